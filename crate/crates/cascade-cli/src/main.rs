//! `cascade` — command-line front end.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
//! (a `diagnostics.txt` is written), 4 certificate or check failure.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Command;

use commands::SUBCOMMANDS;
use config::{add_keys, Resolved};

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Certificate(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) | Failure::Io(_) => 3,
            Failure::Certificate(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Certificate(m) | Failure::Io(m) => m,
        }
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("cascade")
        .about("Energy-cascade constructions for the quintic NLS on T²: generation sets, toy model, sliders, comparisons")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for s in SUBCOMMANDS {
        cmd = cmd.subcommand(add_keys(Command::new(s.name).about(s.about), s.keys));
    }
    cmd
}

fn run(name: &str, m: &clap::ArgMatches) -> Result<(), Failure> {
    let sub = SUBCOMMANDS.iter().find(|s| s.name == name).expect("registered subcommand");
    let r = Resolved::resolve(name, sub.keys, m)?;
    let threads: usize = r.get("threads")?;
    if threads == 0 {
        return Err(Failure::Config("threads must be at least 1".into()));
    }
    // Later calls fail harmlessly if a pool already exists (only in tests).
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    let resolved = r.to_text();
    print!("{resolved}");
    output::write_atomic(r.out_dir(), "resolved.cfg", &resolved).map_err(|e| Failure::Io(format!("resolved.cfg: {e}")))?;
    let result = (sub.run)(&r);
    if let Err(Failure::Numerical(msg) | Failure::Io(msg)) = &result {
        let text = format!("error = {msg}\n{resolved}");
        let _ = output::write_atomic(r.out_dir(), "diagnostics.txt", &text);
    }
    result
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_is_well_formed() {
        cli().debug_assert();
    }
}
