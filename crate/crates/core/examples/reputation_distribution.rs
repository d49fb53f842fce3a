//! Stationary number of good players in a population of discriminators
//! (FNR) under each classic norm.
//!
//! `cargo run --release --example reputation_distribution`

use dgnorms::norms::named_norms;
use dgnorms::reputation_chain::monomorphic_chain;
use dgnorms::{Params, RoleAssignment, Strategy};

fn main() -> dgnorms::Result<()> {
    let params = Params::default();
    for norm in named_norms() {
        for role in RoleAssignment::BOTH {
            let (p, v) = monomorphic_chain(Strategy::FNR, &norm, role, &params)?;
            let mean: f64 = v.probs.iter().enumerate().map(|(i, q)| i as f64 * q).sum();
            println!(
                "{:<16} {:<10} mode i = {:>2}, mean = {:>6.2}, P(i = 0) = {:.4}, residual = {:.1e}",
                norm.common_name().unwrap_or("-"),
                role.name(),
                v.argmax(),
                mean,
                v.probs[0],
                p.residual(&v.probs)
            );
            // coarse histogram in bins of five good players
            let bins: Vec<f64> = v.probs.chunks(5).map(|c| c.iter().sum()).collect();
            let bar: String = bins.iter().map(|b| " .:-=+*#%@".as_bytes()[(b * 9.99) as usize] as char).collect();
            println!("{:<28}|{bar}|", "");
        }
    }
    Ok(())
}
