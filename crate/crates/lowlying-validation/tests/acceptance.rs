//! One line per acceptance criterion; exits nonzero if any fails.

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for check in lowlying_validation::CHECKS {
        let c = check();
        println!("{c}");
        let _ = std::io::stdout().flush();
        if !c.passed {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 12 criteria fail: {failed:?}", failed.len());
        ExitCode::FAILURE
    }
}
