//! Argument parsing for the four subcommands.

use std::path::PathBuf;

pub const USAGE: &str = "\
usage: thermident <generate|estimate|evaluate|report> --config <path> [--out <dir>] [--seed <n>]

  generate   roll the scenario's truth plant and write train/test datasets
  estimate   fit every requested (method, architecture, window) cell
  evaluate   run sim1/sim2/sim3 per fitted model, write traces and results
  report     aggregate evaluation results into one accuracy table

options:
  --config <path>   scenario configuration file (required)
  --out <dir>       artifact directory (default: out)
  --seed <n>        override the scenario seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Estimate,
    Evaluate,
    Report,
}

#[derive(Debug, Clone)]
pub struct Args {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

pub fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut it = argv.iter();
    let sub = it.next().ok_or("missing subcommand")?;
    let command = match sub.as_str() {
        "generate" => Command::Generate,
        "estimate" => Command::Estimate,
        "evaluate" => Command::Evaluate,
        "report" => Command::Report,
        other => return Err(format!("unknown subcommand {other:?}")),
    };
    let mut config: Option<PathBuf> = None;
    let mut out = PathBuf::from("out");
    let mut seed: Option<u64> = None;
    while let Some(flag) = it.next() {
        match flag.as_str() {
            "--config" => {
                let v = it.next().ok_or("--config needs a path")?;
                config = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it.next().ok_or("--out needs a directory")?;
                out = PathBuf::from(v);
            }
            "--seed" => {
                let v = it.next().ok_or("--seed needs an integer")?;
                seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| format!("--seed: not an integer: {v:?}"))?,
                );
            }
            other => return Err(format!("unknown option {other:?}")),
        }
    }
    Ok(Args {
        command,
        config: config.ok_or("--config is required")?,
        out,
        seed,
    })
}
