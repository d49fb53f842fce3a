//! Which strategy can invade which: fixation probabilities of single mutants
//! among a discriminator and two unconditional defectors.
//!
//! `cargo run --release --example pairwise_competition [norm] [beta]`

use dgnorms::dynamics::PayoffTable;
use dgnorms::experiments::parse_norms;
use dgnorms::{Params, RoleAssignment, Strategy};

fn main() -> dgnorms::Result<()> {
    let mut args = std::env::args().skip(1);
    let norm = parse_norms(&args.next().unwrap_or_else(|| "sj".into()))?[0];
    let beta: f64 = args.next().map(|b| b.parse().expect("beta must be a number")).unwrap_or(0.6);
    let params = Params::default().with_beta(beta)?;
    let players = [Strategy::FNR, Strategy::NNS, Strategy::NNR];
    let z = params.z() as f64;

    for role in RoleAssignment::BOTH {
        let table = PayoffTable::build(&norm, role, &params)?;
        println!("{norm}, {role} roles, beta = {beta}: rho * Z (above 1 means the mutant is favoured)");
        for mutant in players {
            for resident in players {
                if mutant != resident {
                    let rz = table.fixation(mutant, resident, &params) * z;
                    let mark = if rz > 1.0 { "invades" } else { "" };
                    println!("  {mutant} -> {resident}: {rz:>10.4} {mark}");
                }
            }
        }
    }
    Ok(())
}
