use std::process::ExitCode;

use clap::Parser;
use qnk_cli::{run, Args, SuiteConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match SuiteConfig::from_args(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let report = run(&cfg);
    let text = report.to_json(&cfg);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAIL as u8);
            }
        }
        None => print!("{text}"),
    }
    let s = report.summary();
    eprintln!("{} checks: {} passed, {} failed ({:.2}s)", s.total, s.passed, s.failed, report.wall_time);
    ExitCode::from(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL } as u8)
}
