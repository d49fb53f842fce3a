//! Level of fairness for every norm of a catalog.
//!
//! `cargo run --release --example norm_catalog [leading-eight|second-order] [Z]`

use dgnorms::experiments::parse_norms;
use dgnorms::fairness::total_fairness;
use dgnorms::{Params, RoleAssignment};

fn main() -> dgnorms::Result<()> {
    let mut args = std::env::args().skip(1);
    let catalog = args.next().unwrap_or_else(|| "leading-eight".into());
    let z: usize = args.next().map(|v| v.parse().expect("Z must be an integer")).unwrap_or(50);
    let params = Params::default().with_z(z)?;
    println!("{:<10} {:>8} {:>11}   (beta = {}, Z = {z})", "norm", "random", "reputation", params.beta());
    for norm in parse_norms(&catalog)? {
        let random = total_fairness(&norm, RoleAssignment::Random, &params)?;
        let reputation = total_fairness(&norm, RoleAssignment::ReputationBased, &params)?;
        println!("{:<10} {:>8.4} {:>11.4}", norm.to_string(), random.total, reputation.total);
    }
    Ok(())
}
