//! Tokenization shared by the classifier, keyword mining and filters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const URL_TOKEN: &str = "URL";
pub const MENTION_TOKEN: &str = "MENTION";

/// Han, kana and CJK compatibility ideographs: scripts written without
/// word spacing, where every codepoint becomes its own token.
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x309F       // hiragana
        | 0x30A0..=0x30FF     // katakana
        | 0x31F0..=0x31FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0xFF66..=0xFF9F     // half-width katakana
        | 0x20000..=0x2FA1F)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

impl From<Vec<String>> for TokenSequence {
    fn from(tokens: Vec<String>) -> Self {
        Self { tokens }
    }
}

/// Lowercases cased scripts, splits on whitespace and punctuation, emits each
/// CJK codepoint as a separate token and collapses URLs and @-mentions into
/// `URL` / `MENTION` placeholders. Fails only on blank input; a text made of
/// punctuation alone yields an empty sequence.
pub fn tokenize(text: &str) -> Result<TokenSequence> {
    if text.trim().is_empty() {
        return Err(Error::InvalidInput("cannot tokenize empty text".into()));
    }
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            tokens.push(URL_TOKEN.to_owned());
            continue;
        }
        if chunk.starts_with('@') && chunk[1..].chars().next().is_some_and(is_word_char) {
            tokens.push(MENTION_TOKEN.to_owned());
            let rest: String = chunk[1..]
                .chars()
                .skip_while(|c| is_word_char(*c))
                .collect();
            split_words(&rest, &mut tokens);
            continue;
        }
        split_words(chunk, &mut tokens);
    }
    Ok(TokenSequence { tokens })
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && !is_cjk(c)
}

fn split_words(chunk: &str, tokens: &mut Vec<String>) {
    let mut current = String::new();
    for c in chunk.chars() {
        if is_cjk(c) {
            flush(&mut current, tokens);
            tokens.push(c.to_string());
        } else if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else {
            flush(&mut current, tokens);
        }
    }
    flush(&mut current, tokens);
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).unwrap().tokens
    }

    #[test]
    fn lowercases_and_strips_punctuation() {
        assert_eq!(toks("Fear the virus!"), ["fear", "the", "virus"]);
        assert_eq!(toks("stay-home, #COVID19..."), ["stay", "home", "covid19"]);
    }

    #[test]
    fn placeholders_for_urls_and_mentions() {
        assert_eq!(toks("see https://t.co/x"), ["see", "URL"]);
        assert_eq!(
            toks("@who: masks www.example.org"),
            ["MENTION", "masks", "URL"]
        );
        assert_eq!(toks("email a@b"), ["email", "a", "b"]);
    }

    #[test]
    fn cjk_codepoints_are_separate_tokens() {
        assert_eq!(toks("corona 感染"), ["corona", "感", "染"]);
        assert_eq!(toks("コロナが怖い"), ["コ", "ロ", "ナ", "が", "怖", "い"]);
    }

    #[test]
    fn blank_text_is_an_error() {
        assert!(tokenize("").is_err());
        assert!(tokenize("  \n").is_err());
        assert!(tokenize("!!!").unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let s = "Mixed CASE text, 2020 @user https://x.y 疫情";
        assert_eq!(tokenize(s).unwrap(), tokenize(s).unwrap());
    }
}
