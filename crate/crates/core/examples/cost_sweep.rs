//! How the level of fairness responds to the cost of reporting.
//!
//! `cargo run --release --example cost_sweep`

use dgnorms::fairness::FairnessAnalysis;
use dgnorms::{Params, RoleAssignment, SocialNorm};

fn main() -> dgnorms::Result<()> {
    let base = Params::default().with_beta(0.8)?;
    for norm in [SocialNorm::STERN_JUDGING, SocialNorm::SIMPLE_STANDING] {
        // one set of reputation chains serves every cost
        let analysis = FairnessAnalysis::build(&norm, RoleAssignment::ReputationBased, &base)?;
        println!("{} (reputation-based roles, beta = 0.8)", norm.common_name().unwrap_or("-"));
        for cost in [0.0, 0.01, 0.02, 0.05, 0.1, 0.2] {
            let r = analysis.report(&base.with_cost_report(cost)?)?;
            println!("  c_R = {cost:<5} F_F = {:.4}  most common: {}", r.total, r.dominant());
        }
    }
    Ok(())
}
