//! Writes the CSV tables behind the standard figures into a directory
//! (`$DGNORMS_OUT_DIR`, else `./tables`).
//!
//! `cargo run --release --example write_tables`

use std::path::PathBuf;

use dgnorms::abm::PayoffAggregation;
use dgnorms::experiments::{self, parse_norms};
use dgnorms::{Params, RoleAssignment, Strategy};

fn main() -> dgnorms::Result<()> {
    let dir = std::env::var_os("DGNORMS_OUT_DIR").map(PathBuf::from).unwrap_or_else(|| "tables".into());
    let params = Params::default();
    let both = RoleAssignment::BOTH.to_vec();
    let named = parse_norms("named")?;

    let s = experiments::fairness_curve(
        &experiments::FairnessCurve {
            norms: named.clone(),
            roles: both.clone(),
            betas: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            params,
        },
        &dir.join("fairness_curve.csv"),
        false,
    )?;
    println!("{} rows -> {}", s.rows, s.path.display());

    let s = experiments::pairwise(
        &experiments::Pairwise {
            norms: parse_norms("sj,ss")?,
            roles: both.clone(),
            strategies: vec![Strategy::FNR, Strategy::NNS, Strategy::NNR],
            params,
        },
        &dir.join("pairwise.csv"),
        false,
    )?;
    println!("{} rows -> {}", s.rows, s.path.display());

    for norm in &named {
        for role in &both {
            let name = format!("reputation_{}_{}.csv", norm.common_name().unwrap_or("norm"), role.name());
            let s = experiments::reputation_dist(
                &experiments::ReputationDist {
                    strategy: Strategy::FNR,
                    mixture: None,
                    norm: *norm,
                    role: *role,
                    params,
                },
                &dir.join(name),
                false,
            )?;
            println!("{} rows -> {}", s.rows, s.path.display());
        }
    }

    let s = experiments::cost_sweep(
        &experiments::CostSweep {
            norms: parse_norms("sj,ss")?,
            roles: vec![RoleAssignment::ReputationBased],
            costs: vec![0.0, 0.01, 0.02, 0.05],
            params: params.with_beta(0.8)?,
        },
        &dir.join("cost_sweep.csv"),
        false,
    )?;
    println!("{} rows -> {}", s.rows, s.path.display());

    let s = experiments::abm_sweep(
        &experiments::AbmSweep {
            norms: named,
            roles: both,
            betas: vec![0.2, 0.6, 1.0],
            params,
            generations: 100_000,
            burn_in: 10_000,
            seed: 1,
            replicas: 2,
            aggregation: PayoffAggregation::Total,
        },
        &dir.join("abm.csv"),
        false,
    )?;
    println!("{} rows -> {}", s.rows, s.path.display());
    Ok(())
}
