use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::text::TokenSequence;

/// Coarse part-of-speech classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Propn,
    Verb,
    Adj,
    Other,
}

impl PosTag {
    pub fn is_nominal(self) -> bool {
        matches!(self, PosTag::Noun | PosTag::Propn)
    }
}

impl FromStr for PosTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NOUN" => Ok(PosTag::Noun),
            "PROPN" => Ok(PosTag::Propn),
            "VERB" => Ok(PosTag::Verb),
            "ADJ" => Ok(PosTag::Adj),
            "OTHER" => Ok(PosTag::Other),
            other => Err(Error::InvalidInput(format!("unknown POS tag `{other}`"))),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PosTag::Noun => "NOUN",
            PosTag::Propn => "PROPN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Other => "OTHER",
        })
    }
}

/// Assigns one tag per token. Must be deterministic.
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &TokenSequence) -> Vec<PosTag>;

    /// Whether this tagger handles `lang` (a tweet language code).
    fn supports(&self, _lang: &str) -> bool {
        true
    }
}

/// Dictionary tagger: exact lookup of the lowercased token, `OTHER` when
/// unknown.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: HashMap<String, PosTag>,
    languages: Option<Vec<String>>,
}

pub fn lexicon_tagger(lexicon: HashMap<String, PosTag>) -> Result<LexiconTagger> {
    LexiconTagger::new(lexicon)
}

impl LexiconTagger {
    pub fn new(lexicon: HashMap<String, PosTag>) -> Result<Self> {
        if lexicon.is_empty() {
            return Err(Error::Empty("tagger lexicon"));
        }
        let lexicon = lexicon
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        Ok(Self {
            lexicon,
            languages: None,
        })
    }

    /// Reads `token<TAB>TAG` lines; blank lines and `#` comments are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lexicon = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, tag) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidInput(format!("lexicon line {}: expected token<TAB>TAG", i + 1))
            })?;
            let tag = tag
                .parse()
                .map_err(|e| Error::InvalidInput(format!("lexicon line {}: {e}", i + 1)))?;
            lexicon.insert(token.trim().to_owned(), tag);
        }
        Self::new(lexicon)
    }

    /// Restricts the tagger to the given language codes.
    pub fn with_languages<S: Into<String>>(mut self, langs: impl IntoIterator<Item = S>) -> Self {
        self.languages = Some(langs.into_iter().map(Into::into).collect());
        self
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, tokens: &TokenSequence) -> Vec<PosTag> {
        tokens
            .iter()
            .map(|t| {
                self.lexicon
                    .get(&t.to_lowercase())
                    .copied()
                    .unwrap_or(PosTag::Other)
            })
            .collect()
    }

    fn supports(&self, lang: &str) -> bool {
        self.languages
            .as_ref()
            .is_none_or(|ls| ls.iter().any(|l| l == lang))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(tokens: &[&str]) -> TokenSequence {
        TokenSequence::from(tokens.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn case_folded_lookup_and_unknowns() {
        let tagger =
            lexicon_tagger([("virus".to_string(), PosTag::Noun)].into_iter().collect()).unwrap();
        assert_eq!(
            tagger.tag(&seq(&["Virus", "zzz"])),
            vec![PosTag::Noun, PosTag::Other]
        );
        assert_eq!(tagger.tag(&seq(&[])).len(), 0);
    }

    #[test]
    fn empty_lexicon_is_rejected() {
        assert!(LexiconTagger::new(HashMap::new()).is_err());
    }

    #[test]
    fn reads_lexicon_files() {
        let src = "# comment\nWhite\tPROPN\nhouse\tPROPN\nsaid\tverb\n\n";
        let tagger = LexiconTagger::from_reader(src.as_bytes())
            .unwrap()
            .with_languages(["en"]);
        assert_eq!(
            tagger.tag(&seq(&["white", "House", "said"])),
            vec![PosTag::Propn, PosTag::Propn, PosTag::Verb]
        );
        assert!(tagger.supports("en"));
        assert!(!tagger.supports("ja"));
        assert!(LexiconTagger::from_reader("a NOUN\n".as_bytes()).is_err());
        assert!(LexiconTagger::from_reader("a\tTHING\n".as_bytes()).is_err());
    }
}
