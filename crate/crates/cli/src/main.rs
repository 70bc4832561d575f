mod args;
mod commands;

use std::ffi::OsString;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Fatal};

/// Appends `--key value` for every `key=value` line of the `--config` file
/// whose flag is not already on the command line. `true`/`false` values
/// toggle switches.
fn inject_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let args: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let path = args.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=").map(str::to_owned).or_else(|| {
            (a == "--config")
                .then(|| args.get(i + 1).cloned())
                .flatten()
        })
    });
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let present = |key: &str| {
        args.iter()
            .any(|a| a == &format!("--{key}") || a.starts_with(&format!("--{key}=")))
    };
    let mut out = argv;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{path}:{}: expected key=value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" || present(&key) {
            continue;
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            v => {
                out.push(format!("--{key}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    eprintln!(
        "emotweet: seed={} quiet={} {:?}",
        cli.seed, cli.quiet, cli.command
    );
    let ctx = Ctx {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Stats(a) => commands::stats(&ctx, a),
        Command::Filter(a) => commands::filter(&ctx, a),
        Command::Train(a) => commands::train_cmd(&ctx, a),
        Command::Evaluate(a) => commands::evaluate(&ctx, a),
        Command::Predict(a) => commands::predict(&ctx, a),
        Command::Keywords(a) => commands::keywords(&ctx, a),
        Command::Trend(a) => commands::trend(&ctx, a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = err.chain().any(|c| {
        c.is::<Fatal>()
            || matches!(
                c.downcast_ref::<emotweet::Error>(),
                Some(emotweet::Error::NonFiniteLoss { .. })
            )
    });
    if internal {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let argv = match inject_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
