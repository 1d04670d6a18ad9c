use std::fmt::Write as _;

use anyhow::anyhow;
use drcw_core::document::{verify_document, verify_golay, VerificationReport};

use crate::analyze::read_document;
use crate::args::{Global, VerifyArgs};
use crate::failure::{CmdResult, Failure};
use crate::output::write_file;

fn render(report: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {}: {}", c.name, c.detail);
    }
    out
}

pub fn run(args: &VerifyArgs, global: &Global) -> CmdResult {
    let report = match (args.golay, &args.document) {
        (Some(n), _) => verify_golay(n)?,
        (None, Some(path)) => verify_document(&read_document(path)?)?,
        (None, None) => return Err(Failure::usage(anyhow!("give --golay N or a document"))),
    };
    let text = render(&report);
    match &global.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if report.passed() {
        return Ok(());
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    Err(Failure::verify(anyhow!(
        "verification failed: {}",
        failed.join(", ")
    )))
}
