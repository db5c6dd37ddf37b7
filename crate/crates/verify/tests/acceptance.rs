use std::process::ExitCode;

use permshape_verify::{criteria, run, Line};

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, summary, f) in criteria() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let report = run(name, summary, f);
        println!("{}", report.headline());
        for line in &report.lines {
            match line {
                Line::Check { ok, text } => println!("    [{}] {text}", if *ok { "ok" } else { "x" }),
                Line::Note(text) => println!("    {text}"),
            }
        }
        if !report.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
