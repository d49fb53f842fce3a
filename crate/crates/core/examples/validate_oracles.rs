//! Runs the independent consistency checks and shows that a corrupted
//! reference table is caught.
//!
//! `cargo run --release --example validate_oracles`

use dgnorms::validate::{run, Check, ValidateOptions};

fn main() -> dgnorms::Result<()> {
    for o in run(&ValidateOptions::default())? {
        println!("{:<14} passed={} compared={} worst/tol={:.2e}", o.check.name(), o.passed, o.compared, o.worst_ratio);
    }
    let tampered = ValidateOptions {
        checks: vec![Check::OneStep],
        samples: 20_000,
        tamper_epsilon: 0.2,
        ..ValidateOptions::default()
    };
    let o = &run(&tampered)?[0];
    println!("with epsilon shifted by 0.2 in the reference rows: passed={} ({})", o.passed, o.detail);
    Ok(())
}
