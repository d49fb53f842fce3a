//! Strategy dynamics in the rare-mutation limit.
//!
//! Strategies change by pairwise comparison (Fermi imitation). Between
//! mutations the population is monomorphic, so the long-run behaviour is an
//! 8-state chain whose transitions are driven by fixation probabilities.
//! Reputations equilibrate much faster than strategies, so the payoffs
//! entering imitation are the stationary averages `g_X(m)`, `g_Y(m)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::norms::{SocialNorm, Strategy};
use crate::payoffs::expected_payoffs;
use crate::reputation_chain::solve_setting;
use crate::setting::{PairwiseSetting, Params, RoleAssignment};

/// Probability that a focal player with payoff `g_focal` imitates a model
/// player with payoff `g_model`.
pub fn imitation_prob(g_focal: f64, g_model: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-beta * (g_model - g_focal)).exp())
}

/// `(T+, T-)` for `m` X-players given the stationary payoffs at `m`.
pub fn step_probs_from_payoffs(z: usize, m: usize, g_x: f64, g_y: f64, beta: f64) -> (f64, f64) {
    let zf = z as f64;
    let mf = m as f64;
    let prefactor = (zf - mf) / zf * mf / (zf - 1.0);
    (
        prefactor * imitation_prob(g_y, g_x, beta),
        prefactor * imitation_prob(g_x, g_y, beta),
    )
}

/// Probabilities that one imitation step raises or lowers the X-count.
pub fn step_probs(setting: &PairwiseSetting) -> Result<(f64, f64)> {
    let z = setting.z();
    let m = setting.m();
    if m == 0 || m >= z {
        return Err(Error::InvalidArgument(format!("mutant count must lie in 1..{z}, got {m}")));
    }
    let v = solve_setting(setting)?;
    let g = expected_payoffs(setting, &v)?;
    Ok(step_probs_from_payoffs(z, m, g.g_x, g.g_y, setting.params.beta()))
}

/// Fixation probability of a single mutant from the payoff differences
/// `g_X(m) - g_Y(m)` for `m = 1 .. Z-1`.
///
/// Uses `T-(m) / T+(m) = exp(-beta (g_X(m) - g_Y(m)))`.
pub fn fixation_from_differences(diffs: &[f64], beta: f64) -> f64 {
    let mut log_prod = 0.0;
    let mut logs = Vec::with_capacity(diffs.len());
    for d in diffs {
        log_prod -= beta * d;
        logs.push(log_prod);
    }
    let peak = logs.iter().copied().fold(0.0, f64::max);
    if peak < 700.0 {
        1.0 / (1.0 + logs.iter().map(|l| l.exp()).sum::<f64>())
    } else {
        let scaled: f64 = (-peak).exp() + logs.iter().map(|l| (l - peak).exp()).sum::<f64>();
        (-(peak + scaled.ln())).exp()
    }
}

/// Stationary payoffs of every strategy pair at every mutant count, for one
/// `(norm, role, Z, epsilon)`.
///
/// Payoffs are stored before reporting costs, so a table serves any `c_R`,
/// `beta` and `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    pub norm: SocialNorm,
    pub role: RoleAssignment,
    z: usize,
    epsilon: f64,
    /// Keyed by unordered pair `(a, b)` with `a < b`; entry `m - 1` holds the
    /// payoffs of `a` and `b` when `m` players use `a`.
    gross: Vec<Vec<(f64, f64)>>,
}

fn pair_slot(a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < 8);
    // row-major upper triangle
    a * (15 - a) / 2 + (b - a - 1)
}

impl PayoffTable {
    /// Solves all `28 * (Z - 1)` reputation chains in parallel.
    pub fn build(norm: &SocialNorm, role: RoleAssignment, params: &Params) -> Result<Self> {
        let z = params.z();
        let priced = params.with_cost_report(0.0)?;
        let mut items = Vec::with_capacity(28 * (z - 1));
        for a in 0..8 {
            for b in a + 1..8 {
                for m in 1..z {
                    items.push((a, b, m));
                }
            }
        }
        let solved: Vec<(f64, f64)> = items
            .par_iter()
            .map(|&(a, b, m)| {
                let s = PairwiseSetting::new(Strategy::ALL[a], Strategy::ALL[b], m, *norm, role, priced)?;
                let v = solve_setting(&s)?;
                let g = expected_payoffs(&s, &v)?;
                Ok((g.g_x, g.g_y))
            })
            .collect::<Result<_>>()?;
        let mut gross = (0..28).map(|_| Vec::with_capacity(z - 1)).collect::<Vec<_>>();
        for (&(a, b, _), g) in items.iter().zip(solved) {
            gross[pair_slot(a, b)].push(g);
        }
        Ok(PayoffTable {
            norm: *norm,
            role,
            z,
            epsilon: params.epsilon(),
            gross,
        })
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Whether the table was solved for the population size and error rate of `params`.
    pub fn matches(&self, params: &Params) -> bool {
        self.z == params.z() && self.epsilon == params.epsilon()
    }

    /// `(g_X(m), g_Y(m))` with `m` X-players, reporting costs subtracted.
    pub fn payoffs(&self, x: Strategy, y: Strategy, m: usize, cost_report: f64) -> (f64, f64) {
        assert!(m >= 1 && m < self.z, "mutant count out of range");
        let (a, b) = (x.index(), y.index());
        let (gx, gy) = match a.cmp(&b) {
            std::cmp::Ordering::Less => self.gross[pair_slot(a, b)][m - 1],
            std::cmp::Ordering::Greater => {
                let (gb, ga) = self.gross[pair_slot(b, a)][self.z - m - 1];
                (ga, gb)
            }
            std::cmp::Ordering::Equal => (0.5, 0.5),
        };
        (
            gx - cost_report * x.report_indicator(),
            gy - cost_report * y.report_indicator(),
        )
    }

    /// Probability that a single `mutant` takes over a `resident` population.
    pub fn fixation(&self, mutant: Strategy, resident: Strategy, params: &Params) -> f64 {
        debug_assert!(self.matches(params));
        let diffs: Vec<f64> = (1..self.z)
            .map(|m| {
                let (gx, gy) = self.payoffs(mutant, resident, m, params.cost_report());
                gx - gy
            })
            .collect();
        fixation_from_differences(&diffs, params.beta())
    }

    /// 8x8 matrix of fixation probabilities, `[resident][mutant]`.
    pub fn fixation_matrix(&self, params: &Params) -> [[f64; 8]; 8] {
        let mut rho = [[0.0; 8]; 8];
        for (r, row) in rho.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.fixation(Strategy::ALL[c], Strategy::ALL[r], params);
            }
        }
        rho
    }
}

/// Fixation probability of a single `mutant` into a `resident` population.
///
/// Solves only the `Z - 1` chains this pair needs.
pub fn fixation_prob(
    mutant: Strategy,
    resident: Strategy,
    norm: &SocialNorm,
    role: RoleAssignment,
    params: &Params,
) -> Result<f64> {
    let z = params.z();
    let diffs = (1..z)
        .into_par_iter()
        .map(|m| {
            let s = PairwiseSetting::new(mutant, resident, m, *norm, role, *params)?;
            let v = solve_setting(&s)?;
            let g = expected_payoffs(&s, &v)?;
            Ok(g.g_x - g.g_y)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(fixation_from_differences(&diffs, params.beta()))
}

/// Transition matrix between monomorphic populations and its stationary vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedChain {
    /// `a[resident][next]`, row-stochastic, indexed by [`Strategy::ALL`].
    pub a: [[f64; 8]; 8],
    /// Long-run share of time spent in each monomorphic population.
    pub phi: [f64; 8],
}

impl EmbeddedChain {
    /// Off-diagonal `a[X][Y] = (mu / 8) rho(Y into X)`, diagonal the complement.
    pub fn from_fixation(rho: &[[f64; 8]; 8], mu: f64) -> Result<Self> {
        let scale = mu / 8.0;
        let mut a = [[0.0; 8]; 8];
        // generator a - I, with the diagonal summed directly to avoid 1 - (1 - x)
        let mut gen = [[0.0; 8]; 8];
        for x in 0..8 {
            let mut out = 0.0;
            for y in 0..8 {
                if x != y {
                    let v = scale * rho[x][y];
                    a[x][y] = v;
                    gen[x][y] = v;
                    out += v;
                }
            }
            a[x][x] = 1.0 - out;
            gen[x][x] = -out;
        }
        // phi * gen = 0 with the last equation replaced by sum(phi) = 1
        let mut trip = Vec::with_capacity(64);
        for (x, row) in gen.iter().enumerate() {
            for (y, &v) in row.iter().enumerate() {
                if y < 7 {
                    trip.push((y, x, v));
                }
            }
            trip.push((7, x, 1.0));
        }
        let mut rhs = vec![0.0; 8];
        rhs[7] = 1.0;
        let sol = BandMatrix::from_triplets(8, &trip).solve(rhs)?;
        let mut phi = [0.0; 8];
        for (p, s) in phi.iter_mut().zip(sol) {
            *p = s.max(0.0);
        }
        let total: f64 = phi.iter().sum();
        for p in &mut phi {
            *p /= total;
        }
        Ok(EmbeddedChain { a, phi })
    }

    pub fn from_table(table: &PayoffTable, params: &Params) -> Result<Self> {
        if !table.matches(params) {
            return Err(Error::InvalidArgument(
                "payoff table was solved for a different population size or error rate".into(),
            ));
        }
        EmbeddedChain::from_fixation(&table.fixation_matrix(params), params.mu())
    }

    /// `||phi a - phi||_inf`.
    pub fn residual(&self) -> f64 {
        (0..8)
            .map(|y| {
                let v: f64 = (0..8).map(|x| self.phi[x] * self.a[x][y]).sum();
                (v - self.phi[y]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Strategy with the largest stationary share.
    pub fn dominant(&self) -> Strategy {
        let mut best = 0;
        for k in 1..8 {
            if self.phi[k] > self.phi[best] {
                best = k;
            }
        }
        Strategy::ALL[best]
    }
}

/// Builds the embedded chain from scratch for one norm and role assignment.
pub fn embedded_chain(norm: &SocialNorm, role: RoleAssignment, params: &Params) -> Result<EmbeddedChain> {
    let table = PayoffTable::build(norm, role, params)?;
    EmbeddedChain::from_table(&table, params)
}
