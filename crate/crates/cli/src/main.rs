mod args;
mod commands;
mod report;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use freiman_core::Limits;

use args::RunConfig;
use report::Report;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let start = Instant::now();
    let json = serde_json::to_string(&cfg).expect("config serializes");
    let mut rep = Report::new(&json);
    let limits = Limits::default().with_enumeration(cfg.budget);
    let (outcome, fields) = match commands::run(&cfg.command, &limits, &mut rep) {
        Ok(s) => (s.outcome, s.fields),
        Err(f) => {
            eprintln!("error: {}", f.message);
            rep.line(format!("# error {}", f.message));
            (f.outcome, vec![("status", f.outcome.status().to_string())])
        }
    };
    let timing = (!cfg.no_timing).then(|| start.elapsed());
    let text = rep.finish(timing, &fields);
    let written = match &cfg.output {
        Some(path) => fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(report::Outcome::InputError as u8);
    }
    ExitCode::from(outcome as u8)
}
