//! The `thermident` command-line pipeline.
//!
//! Four subcommands chain into a full experiment:
//!
//! ```text
//! thermident generate --config scenario.cfg --out out
//! thermident estimate --config scenario.cfg --out out
//! thermident evaluate --config scenario.cfg --out out
//! thermident report   --config scenario.cfg --out out
//! ```
//!
//! `generate` writes training/testing datasets from the scenario's truth
//! plant; `estimate` fits every requested (method, architecture, window)
//! cell; `evaluate` runs the three simulation types per fitted model and
//! writes traces plus a results table; `report` pivots the results into one
//! accuracy table. Exit codes: 0 success, 2 usage/config error, 3 at least
//! one estimation cell failed to converge (partial results are kept).
//!
//! Every artifact embeds the config hash and seed; downstream commands
//! refuse inputs whose hash does not match the active config. The
//! `THERMIDENT_THREADS` environment variable caps how many estimation or
//! evaluation cells run concurrently; results are identical regardless.

mod args;
mod par;
mod pipeline;

use args::{parse_args, Command, USAGE};
use pipeline::Pipeline;

/// Runs one CLI invocation (without the binary name). Returns the process
/// exit code instead of exiting, so tests can drive it in-process.
pub fn run_command(argv: &[String]) -> i32 {
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("{USAGE}");
            return 2;
        }
    };
    let pipeline = match Pipeline::new(&args) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match args.command {
        Command::Generate => pipeline.generate(),
        Command::Estimate => pipeline.estimate(),
        Command::Evaluate => pipeline.evaluate(),
        Command::Report => pipeline.report(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
