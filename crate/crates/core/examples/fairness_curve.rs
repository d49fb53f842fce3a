//! Level of fairness against selection intensity for the four classic norms.
//!
//! Run with `cargo run --release --example fairness_curve`.

use dgnorms::fairness::FairnessAnalysis;
use dgnorms::norms::named_norms;
use dgnorms::{Params, RoleAssignment};

fn main() -> dgnorms::Result<()> {
    let base = Params::default();
    let betas = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    println!("{:<10} {:<11} {}", "norm", "role", betas.map(|b| format!("b={b:<4}")).join(" "));
    for norm in named_norms() {
        for role in RoleAssignment::BOTH {
            let analysis = FairnessAnalysis::build(&norm, role, &base)?;
            let mut cells = Vec::new();
            for beta in betas {
                let r = analysis.report(&base.with_beta(beta)?)?;
                cells.push(format!("{:.4}", r.total));
            }
            let name = norm.common_name().unwrap_or("custom");
            println!("{:<10} {:<11} {}", name, role.name(), cells.join("  "));
        }
    }
    Ok(())
}
