//! Long-run strategy mix in the rare-mutation limit.
//!
//! `cargo run --release --example strategy_equilibrium [norm]`

use dgnorms::dynamics::embedded_chain;
use dgnorms::experiments::parse_norms;
use dgnorms::{Params, RoleAssignment, Strategy};

fn main() -> dgnorms::Result<()> {
    let norm = parse_norms(&std::env::args().nth(1).unwrap_or_else(|| "sj".into()))?[0];
    let params = Params::default();
    for role in RoleAssignment::BOTH {
        let chain = embedded_chain(&norm, role, &params)?;
        println!("{norm}, {role} roles (residual {:.1e})", chain.residual());
        for (s, phi) in Strategy::ALL.iter().zip(chain.phi) {
            println!("  {s} {phi:.4} {}", "#".repeat((phi * 60.0).round() as usize));
        }
    }
    Ok(())
}
