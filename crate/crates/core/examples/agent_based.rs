//! Agent-based runs next to the two-timescale prediction.
//!
//! `cargo run --release --example agent_based [generations] [replicas]`

use dgnorms::abm::{run_replicas, AbmConfig};
use dgnorms::fairness::total_fairness;
use dgnorms::{Params, RoleAssignment, SocialNorm};

fn main() -> dgnorms::Result<()> {
    let mut args = std::env::args().skip(1);
    let generations: u64 = args.next().map(|v| v.parse().expect("integer")).unwrap_or(100_000);
    let replicas: u64 = args.next().map(|v| v.parse().expect("integer")).unwrap_or(4);
    let params = Params::default();
    println!("{:<16} {:<10} {:>10} {:>16}", "norm", "role", "analytic", "simulated");
    for norm in [SocialNorm::STERN_JUDGING, SocialNorm::SIMPLE_STANDING, SocialNorm::IMAGE_SCORING, SocialNorm::SHUNNING] {
        for role in RoleAssignment::BOTH {
            let analytic = total_fairness(&norm, role, &params)?.total;
            let mut cfg = AbmConfig::new(params, norm, role, 2024);
            cfg.generations = generations;
            cfg.burn_in = generations / 10;
            let runs = run_replicas(&cfg, replicas)?;
            let n = runs.len() as f64;
            let mean = runs.iter().map(|r| r.mean_fair_fraction).sum::<f64>() / n;
            let spread = (runs.iter().map(|r| (r.mean_fair_fraction - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
            println!(
                "{:<16} {:<10} {:>10.4} {:>9.4} ± {:.4}",
                norm.common_name().unwrap_or("-"),
                role.name(),
                analytic,
                mean,
                spread / n.sqrt()
            );
        }
    }
    Ok(())
}
