use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use matcube_cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = run(&cfg);
    let written = match (&cfg.out, report.code) {
        (Some(path), 0) => std::fs::write(path, &report.text),
        _ => std::io::stdout().write_all(report.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("matcube: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.code)
}
