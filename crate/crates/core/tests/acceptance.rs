//! Runs the twelve acceptance criteria in sequence, one line each.

use std::io::Write;

use bvfourier::acceptance::{run_criterion, COUNT, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for id in 1..=COUNT {
        let r = run_criterion(id, DEFAULT_SEED).expect("criterion exists");
        // written to the stream directly so the lines show without --nocapture
        let _ = writeln!(std::io::stderr(), "{r}");
        if !r.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
