//! Independent checks of the analytic machinery.
//!
//! * one-step: transition rows against a Monte Carlo simulation of a single
//!   observation round on small populations;
//! * fixation: closed-form fixation probabilities against absorption
//!   probabilities of the birth-death chain, solved densely;
//! * mu-invariance: the embedded chain's stationary vector must not depend
//!   on the mutation rate.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{step_probs_from_payoffs, EmbeddedChain, PayoffTable};
use crate::error::{Error, Result};
use crate::norms::{assess, named_norms, Action, NormVector, Reputation, SocialNorm, Strategy};
use crate::reputation_chain::{transition_matrix, RepState, StateGrid};
use crate::setting::{PairwiseSetting, Params, RoleAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Check {
    OneStep,
    Fixation,
    MuInvariance,
}

impl Check {
    pub const ALL: [Check; 3] = [Check::OneStep, Check::Fixation, Check::MuInvariance];

    pub fn name(self) -> &'static str {
        match self {
            Check::OneStep => "one-step",
            Check::Fixation => "fixation",
            Check::MuInvariance => "mu-invariance",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "expected one-step, fixation or mu-invariance".into(),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub checks: Vec<Check>,
    /// Monte Carlo samples per transition row.
    pub samples: usize,
    pub seed: u64,
    /// Shift added to epsilon when building the analytic rows; a non-zero
    /// value must make the one-step check fail.
    pub tamper_epsilon: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            checks: Check::ALL.to_vec(),
            samples: 200_000,
            seed: 20_240_601,
            tamper_epsilon: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    /// Number of compared quantities.
    pub compared: usize,
    /// Largest deviation divided by its tolerance.
    pub worst_ratio: f64,
    pub detail: String,
}

/// Runs the selected checks in order.
pub fn run(opts: &ValidateOptions) -> Result<Vec<CheckOutcome>> {
    if opts.checks.is_empty() {
        return Err(Error::InvalidArgument("no checks selected".into()));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    opts.checks
        .iter()
        .map(|c| match c {
            Check::OneStep => one_step(opts),
            Check::Fixation => fixation(opts.seed),
            Check::MuInvariance => mu_invariance(),
        })
        .collect()
}

/// Plays one observation round from `state` on a concrete population and
/// returns the next reputation state.
pub fn simulate_step<R: Rng>(setting: &PairwiseSetting, state: RepState, rng: &mut R) -> RepState {
    let (z, m) = (setting.z(), setting.m());
    // players 0..m use X and the first i of them are good; likewise Y from m
    let good = |k: usize| if k < m { k < state.i } else { k - m < state.j };
    let strategy = |k: usize| if k < m { setting.strategy_x } else { setting.strategy_y };
    let observer = rng.gen_range(0..z);
    let a = (observer + 1 + rng.gen_range(0..z - 1)) % z;
    let b = loop {
        let c = rng.gen_range(0..z);
        if c != observer && c != a {
            break c;
        }
    };
    let (ra, rb) = (Reputation::from_good(good(a)), Reputation::from_good(good(b)));
    let (dictator, recipient) = match setting.role {
        RoleAssignment::ReputationBased if ra != rb => {
            if ra.is_good() {
                (a, b)
            } else {
                (b, a)
            }
        }
        _ => {
            if rng.gen_bool(0.5) {
                (a, b)
            } else {
                (b, a)
            }
        }
    };
    if !strategy(observer).reports() {
        return state;
    }
    let rec = Reputation::from_good(good(recipient));
    let mut action = strategy(dictator).intended(rec);
    if action == Action::Fair && rng.gen_bool(setting.params.epsilon()) {
        action = Action::Unfair;
    }
    let before = good(dictator);
    let after = assess(&setting.norm, Reputation::from_good(before), action, rec).is_good();
    let delta = after as i64 - before as i64;
    if dictator < m {
        RepState {
            i: (state.i as i64 + delta) as usize,
            j: state.j,
        }
    } else {
        RepState {
            i: state.i,
            j: (state.j as i64 + delta) as usize,
        }
    }
}

fn one_step(opts: &ValidateOptions) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.samples as f64;
    let mut compared = 0;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for z in [3usize, 4, 5] {
        let params = Params::new(z, 0.05, 0.01, 0.01, 0.6)?;
        let pairs: Vec<(Strategy, Strategy)> = (0..6)
            .map(|_| (Strategy::ALL[rng.gen_range(0..8)], Strategy::ALL[rng.gen_range(0..8)]))
            .collect();
        for norm in named_norms() {
            for role in RoleAssignment::BOTH {
                for &(x, y) in &pairs {
                    let m = rng.gen_range(0..=z);
                    let setting = PairwiseSetting::new(x, y, m, norm, role, params)?;
                    let golden = PairwiseSetting::new(
                        x,
                        y,
                        m,
                        norm,
                        role,
                        params.with_epsilon(params.epsilon() + opts.tamper_epsilon)?,
                    )?;
                    let p = transition_matrix(&golden);
                    let grid = StateGrid::of(&setting);
                    for (r, st) in grid.states().enumerate() {
                        let mut counts = vec![0usize; grid.len()];
                        for _ in 0..opts.samples {
                            counts[grid.index(simulate_step(&setting, st, &mut rng))] += 1;
                        }
                        for (c, &k) in counts.iter().enumerate() {
                            let expect = p.get(r, c);
                            let sigma = (expect * (1.0 - expect) / n).sqrt();
                            let tol = (3.0 * sigma).max(5e-3);
                            let ratio = (k as f64 / n - expect).abs() / tol;
                            compared += 1;
                            if ratio > worst {
                                worst = ratio;
                                worst_at = format!("Z={z} {norm} {role} {x}/{y} m={m} row {st:?} col {c}");
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CheckOutcome {
        check: Check::OneStep,
        passed: worst <= 1.0,
        compared,
        worst_ratio: worst,
        detail: format!("worst entry {worst_at}"),
    })
}

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&r, &s| a[r][k].abs().total_cmp(&a[s][k].abs()))
            .unwrap_or(k);
        if a[p][k] == 0.0 {
            return Err(Error::Singular(k));
        }
        a.swap(k, p);
        b.swap(k, p);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

/// Probability that the birth-death chain started at one mutant is absorbed
/// at `Z`, from the first-step equations.
pub fn absorption_probability(t_plus: &[f64], t_minus: &[f64]) -> Result<f64> {
    // unknowns x_1 .. x_{Z-1}; x_0 = 0, x_Z = 1
    let n = t_plus.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for k in 0..n {
        a[k][k] = t_plus[k] + t_minus[k];
        if k + 1 < n {
            a[k][k + 1] = -t_plus[k];
        } else {
            b[k] = t_plus[k];
        }
        if k > 0 {
            a[k][k - 1] = -t_minus[k];
        }
    }
    Ok(dense_solve(a, b)?[0])
}

fn fixation(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF1A7);
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let tol = 1e-10;
    for case in 0..10 {
        let z = rng.gen_range(3..=6);
        let norm = if case < 4 {
            named_norms()[case]
        } else {
            SocialNorm::new(NormVector::from_bits(rng.gen_range(0..16)), NormVector::from_bits(rng.gen_range(0..16)))
        };
        let role = RoleAssignment::BOTH[case % 2];
        let beta = rng.gen_range(0.1..3.0);
        let params = Params::new(z, rng.gen_range(0.0..0.1), rng.gen_range(0.0..0.05), 0.01, beta)?;
        let x = Strategy::ALL[rng.gen_range(0..8)];
        let y = Strategy::ALL[(x.index() + rng.gen_range(1..8)) % 8];
        let table = PayoffTable::build(&norm, role, &params)?;
        let (mut tp, mut tm) = (Vec::new(), Vec::new());
        for m in 1..z {
            let (gx, gy) = table.payoffs(x, y, m, params.cost_report());
            let (p, q) = step_probs_from_payoffs(z, m, gx, gy, beta);
            tp.push(p);
            tm.push(q);
        }
        let direct = absorption_probability(&tp, &tm)?;
        let closed = table.fixation(x, y, &params);
        let ratio = (direct - closed).abs() / tol;
        if ratio >= worst {
            worst = ratio;
            worst_at = format!("Z={z} {norm} {role} {x} into {y}: {closed:.6e} vs {direct:.6e}");
        }
    }
    Ok(CheckOutcome {
        check: Check::Fixation,
        passed: worst < 1.0,
        compared: 10,
        worst_ratio: worst,
        detail: format!("worst case {worst_at}"),
    })
}

fn mu_invariance() -> Result<CheckOutcome> {
    let tol = 1e-12;
    let mut worst = 0.0f64;
    let mut compared = 0;
    let base = Params::new(12, 0.01, 0.01, 0.01, 0.6)?;
    for role in RoleAssignment::BOTH {
        let table = PayoffTable::build(&SocialNorm::STERN_JUDGING, role, &base)?;
        let reference = EmbeddedChain::from_table(&table, &base.with_mu(0.001)?)?;
        for mu in [0.01, 0.1] {
            let other = EmbeddedChain::from_table(&table, &base.with_mu(mu)?)?;
            for (a, b) in reference.phi.iter().zip(other.phi) {
                worst = worst.max((a - b).abs() / tol);
                compared += 1;
            }
        }
    }
    Ok(CheckOutcome {
        check: Check::MuInvariance,
        passed: worst < 1.0,
        compared,
        worst_ratio: worst,
        detail: "stern judging, Z = 12, mu in {0.001, 0.01, 0.1}".into(),
    })
}
