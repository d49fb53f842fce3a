//! Experiment drivers that sweep parameters and write CSV tables.
//!
//! Work items run in parallel; rows are written in a fixed order so that
//! output does not depend on the number of threads. A failed computation
//! yields a row with `status` set to the error and `NaN` values, and is
//! counted in [`Summary::failed`].

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::abm::{self, AbmConfig, PayoffAggregation};
use crate::dynamics::PayoffTable;
use crate::error::{Error, Result};
use crate::fairness::{FairnessAnalysis, FairnessReport};
use crate::norms::{all_second_order, leading_eight, named_norm, named_norms, SocialNorm, Strategy};
use crate::output::{
    fairness_columns, fairness_fields, fmt_f64, TableWriter, ABM_SCHEMA, FAIRNESS_SCHEMA, PAIRWISE_SCHEMA,
    REPUTATION_SCHEMA,
};
use crate::reputation_chain::{solve_setting, stationary_rows, StateGrid};
use crate::setting::{PairwiseSetting, Params, RoleAssignment};

const OK: &str = "ok";

/// What a driver wrote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub path: PathBuf,
    pub rows: usize,
    pub failed: usize,
}

/// Parses a grid written as `a,b,c` or `start:stop:step` (inclusive).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let bad = |reason: &str| Error::Parse {
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range must be start:stop:step"));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(bad("range needs step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // fixed decimal rounding keeps 0.1 * 3 from printing as 0.30000000000000004
        return Ok((0..=n).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect());
    }
    text.split(',').map(num).collect()
}

/// Nonempty, finite and strictly increasing.
pub fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} grid contains {v}")));
    }
    for w in grid.windows(2) {
        if w[1] == w[0] {
            return Err(Error::InvalidArgument(format!("{name} grid repeats {}", w[0])));
        }
        if w[1] < w[0] {
            return Err(Error::InvalidArgument(format!("{name} grid is not increasing at {}", w[1])));
        }
    }
    Ok(())
}

/// Comma-separated norms. Besides bit strings (`1001`, `1101/1001`) and the
/// names accepted by [`named_norm`], the catalogs `named`, `leading-eight`
/// and `second-order` expand to their members.
pub fn parse_norms(text: &str) -> Result<Vec<SocialNorm>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.to_ascii_lowercase().as_str() {
            "named" | "all-named" => out.extend(named_norms()),
            "leading-eight" | "leading_eight" | "l8" => out.extend(leading_eight()),
            "second-order" | "second_order" => out.extend(all_second_order()),
            _ if item.starts_with(['0', '1']) => out.push(item.parse()?),
            _ => out.push(named_norm(item)?),
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no norms given".into()));
    }
    Ok(out)
}

/// `random`, `reputation` or `both`, comma-separated.
pub fn parse_roles(text: &str) -> Result<Vec<RoleAssignment>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("both") {
            out.extend(RoleAssignment::BOTH);
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no role assignment given".into()));
    }
    out.dedup();
    Ok(out)
}

/// Comma-separated strategy names, or `all`.
pub fn parse_strategies(text: &str) -> Result<Vec<Strategy>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(Strategy::ALL.to_vec());
    }
    let out = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Strategy>>>()?;
    if out.is_empty() {
        return Err(Error::InvalidArgument("no strategies given".into()));
    }
    Ok(out)
}

fn nan_fields(n: usize) -> Vec<String> {
    vec![fmt_f64(f64::NAN); n]
}

fn status_of<T>(r: &Result<T>) -> String {
    match r {
        Ok(_) => OK.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessCurve {
    pub norms: Vec<SocialNorm>,
    pub roles: Vec<RoleAssignment>,
    pub betas: Vec<f64>,
    pub params: Params,
}

/// One fairness row per `(norm, role, value)`, each `(norm, role)` solved once.
fn fairness_sweep<F>(
    norms: &[SocialNorm],
    roles: &[RoleAssignment],
    values: &[f64],
    base: &Params,
    apply: F,
    out: &Path,
    timestamp: bool,
) -> Result<Summary>
where
    F: Fn(&Params, f64) -> Result<Params> + Sync,
{
    let combos: Vec<(SocialNorm, RoleAssignment)> =
        norms.iter().flat_map(|n| roles.iter().map(move |r| (*n, *r))).collect();
    let results: Vec<Vec<(SocialNorm, RoleAssignment, Params, Result<FairnessReport>)>> = combos
        .par_iter()
        .map(|&(norm, role)| {
            let analysis = FairnessAnalysis::build(&norm, role, base);
            values
                .iter()
                .map(|&v| {
                    let params = apply(base, v);
                    let report = match (&analysis, &params) {
                        (Ok(a), Ok(p)) => a.report(p),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    (norm, role, params.unwrap_or(*base), report)
                })
                .collect()
        })
        .collect();
    let mut cols = fairness_columns();
    cols.push("status".into());
    let mut w = TableWriter::create(out, FAIRNESS_SCHEMA, &cols, timestamp)?;
    let (mut rows, mut failed) = (0, 0);
    for (norm, role, params, report) in results.into_iter().flatten() {
        let mut fields = match &report {
            Ok(r) => fairness_fields(r),
            Err(_) => {
                failed += 1;
                let mut f = vec![
                    norm.to_string(),
                    role.to_string(),
                    fmt_f64(params.beta()),
                    params.z().to_string(),
                    fmt_f64(params.epsilon()),
                    fmt_f64(params.cost_report()),
                    fmt_f64(params.mu()),
                ];
                f.extend(nan_fields(17));
                f
            }
        };
        fields.push(status_of(&report));
        w.row(&fields)?;
        rows += 1;
    }
    w.finish()?;
    Ok(Summary {
        path: out.to_path_buf(),
        rows,
        failed,
    })
}

/// Level of fairness against selection intensity.
pub fn fairness_curve(cfg: &FairnessCurve, out: &Path, timestamp: bool) -> Result<Summary> {
    check_grid("beta", &cfg.betas)?;
    if let Some(b) = cfg.betas.iter().find(|b| **b < 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {b}")));
    }
    fairness_sweep(&cfg.norms, &cfg.roles, &cfg.betas, &cfg.params, |p, b| p.with_beta(b), out, timestamp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostSweep {
    pub norms: Vec<SocialNorm>,
    pub roles: Vec<RoleAssignment>,
    pub costs: Vec<f64>,
    pub params: Params,
}

/// Level of fairness against the reporting cost.
pub fn cost_sweep(cfg: &CostSweep, out: &Path, timestamp: bool) -> Result<Summary> {
    check_grid("cost", &cfg.costs)?;
    if let Some(c) = cfg.costs.iter().find(|c| **c < 0.0) {
        return Err(Error::InvalidArgument(format!("reporting cost must be non-negative, got {c}")));
    }
    fairness_sweep(&cfg.norms, &cfg.roles, &cfg.costs, &cfg.params, |p, c| p.with_cost_report(c), out, timestamp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pairwise {
    pub norms: Vec<SocialNorm>,
    pub roles: Vec<RoleAssignment>,
    /// Every ordered pair of distinct strategies is tabulated.
    pub strategies: Vec<Strategy>,
    pub params: Params,
}

/// Fixation probability of each strategy into each other one.
pub fn pairwise(cfg: &Pairwise, out: &Path, timestamp: bool) -> Result<Summary> {
    let mut strategies: Vec<Strategy> = Vec::new();
    for s in &cfg.strategies {
        if !strategies.contains(s) {
            strategies.push(*s);
        }
    }
    if strategies.len() < 2 {
        return Err(Error::InvalidArgument("need at least two distinct strategies".into()));
    }
    let combos: Vec<(SocialNorm, RoleAssignment)> =
        cfg.norms.iter().flat_map(|n| cfg.roles.iter().map(move |r| (*n, *r))).collect();
    let tables: Vec<Result<PayoffTable>> =
        combos.par_iter().map(|(n, r)| PayoffTable::build(n, *r, &cfg.params)).collect();
    let cols: Vec<String> = ["norm", "role", "beta", "mutant", "resident", "rho", "rho_times_Z", "invades", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut w = TableWriter::create(out, PAIRWISE_SCHEMA, &cols, timestamp)?;
    let z = cfg.params.z() as f64;
    let (mut rows, mut failed) = (0, 0);
    for ((norm, role), table) in combos.iter().zip(&tables) {
        for &mutant in &strategies {
            for &resident in &strategies {
                if mutant == resident {
                    continue;
                }
                let (rho, status) = match table {
                    Ok(t) => (t.fixation(mutant, resident, &cfg.params), OK.to_string()),
                    Err(e) => {
                        failed += 1;
                        (f64::NAN, format!("error: {e}"))
                    }
                };
                w.row(&[
                    norm.to_string(),
                    role.to_string(),
                    fmt_f64(cfg.params.beta()),
                    mutant.to_string(),
                    resident.to_string(),
                    fmt_f64(rho),
                    fmt_f64(rho * z),
                    (rho * z > 1.0).to_string(),
                    status,
                ])?;
                rows += 1;
            }
        }
    }
    w.finish()?;
    Ok(Summary {
        path: out.to_path_buf(),
        rows,
        failed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReputationDist {
    pub strategy: Strategy,
    /// Second strategy and the number of `strategy` players; monomorphic if `None`.
    pub mixture: Option<(Strategy, usize)>,
    pub norm: SocialNorm,
    pub role: RoleAssignment,
    pub params: Params,
}

/// Stationary reputation distribution, one row per state.
pub fn reputation_dist(cfg: &ReputationDist, out: &Path, timestamp: bool) -> Result<Summary> {
    let setting = match cfg.mixture {
        None => PairwiseSetting::monomorphic(cfg.strategy, cfg.norm, cfg.role, cfg.params),
        Some((other, m)) => PairwiseSetting::new(cfg.strategy, other, m, cfg.norm, cfg.role, cfg.params)?,
    };
    let dist = solve_setting(&setting)?;
    let cols: Vec<String> = ["m", "i", "j", "probability"].iter().map(|s| s.to_string()).collect();
    let mut w = TableWriter::create(out, REPUTATION_SCHEMA, &cols, timestamp)?;
    let rows = stationary_rows(StateGrid::of(&setting), &dist);
    for (m, i, j, p) in &rows {
        w.row(&[m.to_string(), i.to_string(), j.to_string(), fmt_f64(*p)])?;
    }
    w.finish()?;
    Ok(Summary {
        path: out.to_path_buf(),
        rows: rows.len(),
        failed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmSweep {
    pub norms: Vec<SocialNorm>,
    pub roles: Vec<RoleAssignment>,
    pub betas: Vec<f64>,
    pub params: Params,
    pub generations: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub replicas: u64,
    pub aggregation: PayoffAggregation,
}

/// Agent-based runs, one row per `(norm, role, beta, replica)`.
///
/// Replica `r` of grid point `k` uses seed `replica_seed(seed, k * replicas + r)`.
pub fn abm_sweep(cfg: &AbmSweep, out: &Path, timestamp: bool) -> Result<Summary> {
    check_grid("beta", &cfg.betas)?;
    if cfg.replicas == 0 {
        return Err(Error::InvalidArgument("replica count must be positive".into()));
    }
    let mut jobs = Vec::new();
    for norm in &cfg.norms {
        for role in &cfg.roles {
            for beta in &cfg.betas {
                let params = cfg.params.with_beta(*beta)?;
                for r in 0..cfg.replicas {
                    let stream = jobs.len() as u64;
                    let mut c = AbmConfig::new(params, *norm, *role, abm::replica_seed(cfg.seed, stream));
                    c.generations = cfg.generations;
                    c.burn_in = cfg.burn_in;
                    c.aggregation = cfg.aggregation;
                    c.validate()?;
                    jobs.push((r, c));
                }
            }
        }
    }
    let results: Vec<_> = jobs.par_iter().map(|(_, c)| abm::run(c)).collect();
    let mut cols = fairness_columns();
    cols.extend(
        ["seed", "replica", "generations", "burn_in", "aggregation", "F_std_error", "status"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut w = TableWriter::create(out, ABM_SCHEMA, &cols, timestamp)?;
    let mut failed = 0;
    for ((replica, c), res) in jobs.iter().zip(&results) {
        let p = &c.params;
        let mut f = vec![
            c.norm.to_string(),
            c.role.to_string(),
            fmt_f64(p.beta()),
            p.z().to_string(),
            fmt_f64(p.epsilon()),
            fmt_f64(p.cost_report()),
            fmt_f64(p.mu()),
        ];
        match res {
            Ok(r) => {
                f.extend(r.frequencies.iter().map(|v| fmt_f64(*v)));
                // per-strategy fairness is not tracked by the simulation
                f.extend(std::iter::repeat_n(String::new(), 8));
                f.push(fmt_f64(r.mean_fair_fraction));
            }
            Err(_) => {
                failed += 1;
                f.extend(nan_fields(8));
                f.extend(std::iter::repeat_n(String::new(), 8));
                f.push(fmt_f64(f64::NAN));
            }
        }
        f.extend([
            c.seed.to_string(),
            replica.to_string(),
            c.generations.to_string(),
            c.burn_in.to_string(),
            c.aggregation.to_string(),
            res.as_ref().map(|r| fmt_f64(r.fair_std_error)).unwrap_or_else(|_| fmt_f64(f64::NAN)),
            status_of(res),
        ]);
        w.row(&f)?;
    }
    w.finish()?;
    Ok(Summary {
        path: out.to_path_buf(),
        rows: jobs.len(),
        failed,
    })
}
