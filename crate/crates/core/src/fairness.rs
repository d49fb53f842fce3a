//! Level of fairness: how often dictators split fairly in the long run.
//!
//! `f_F(X)` is the fair-split probability in a monomorphic `X` population,
//! averaged over its stationary reputation distribution. The total level
//! `F_F` weights these by the share of time the strategy dynamics spend in
//! each monomorphic population.

use rayon::prelude::*;

use crate::dynamics::{EmbeddedChain, PayoffTable};
use crate::error::{Error, Result};
use crate::norms::{SocialNorm, Strategy};
use crate::reputation_chain::monomorphic_chain;
use crate::setting::{Params, RoleAssignment};

/// Fair-split probability of silent discriminators (`FNS`, `NFS`).
///
/// Without reports their reputations carry no information, so they are
/// assigned a small fixed fairness.
pub const SILENT_DISCRIMINATOR_FAIRNESS: f64 = 0.1;

/// Probability that a dictator splits fairly in a monomorphic `x` population
/// with `i` good players.
pub fn p_fair(i: usize, x: Strategy, role: RoleAssignment, params: &Params) -> Result<f64> {
    let z = params.z();
    if i > z {
        return Err(Error::InvalidArgument(format!("good count {i} exceeds the population size {z}")));
    }
    let keep = 1.0 - params.epsilon();
    let (to_good, to_bad) = (x.fair_indicator(crate::norms::Reputation::Good), x.fair_indicator(crate::norms::Reputation::Bad));
    if to_good == to_bad {
        return Ok(keep * to_good);
    }
    if !x.reports() {
        return Ok(SILENT_DISCRIMINATOR_FAIRNESS);
    }
    let (zf, i) = (z as f64, i as f64);
    let p = match role {
        RoleAssignment::Random => to_good * i / zf + to_bad * (zf - i) / zf,
        RoleAssignment::ReputationBased => {
            let zz = zf * (zf - 1.0);
            to_good * i * (i - 1.0) / zz + to_bad * (zf * zf - zf - i * i + i) / zz
        }
    };
    Ok(keep * p)
}

fn is_constant(x: Strategy) -> bool {
    use crate::norms::Reputation::{Bad, Good};
    x.fair_indicator(Good) == x.fair_indicator(Bad) || !x.reports()
}

/// Long-run fair-split probability of a monomorphic `x` population.
pub fn f_fair(x: Strategy, norm: &SocialNorm, role: RoleAssignment, params: &Params) -> Result<f64> {
    if is_constant(x) {
        return p_fair(0, x, role, params);
    }
    let (_, v) = monomorphic_chain(x, norm, role, params)?;
    // monomorphic grid: index = i * 1 + 0
    let mut total = 0.0;
    for (i, p) in v.probs.iter().enumerate() {
        total += p * p_fair(i, x, role, params)?;
    }
    Ok(total)
}

/// `F_F` together with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub norm: SocialNorm,
    pub role: RoleAssignment,
    pub params: Params,
    /// Stationary weight of each monomorphic population, in [`Strategy::ALL`] order.
    pub phi: [f64; 8],
    pub f_fair: [f64; 8],
    pub total: f64,
}

impl FairnessReport {
    fn assemble(norm: SocialNorm, role: RoleAssignment, params: Params, phi: [f64; 8], f_fair: [f64; 8]) -> Self {
        let total = phi.iter().zip(&f_fair).map(|(p, f)| p * f).sum::<f64>().clamp(0.0, 1.0);
        FairnessReport {
            norm,
            role,
            params,
            phi,
            f_fair,
            total,
        }
    }

    /// Strategy with the largest weight.
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

/// Everything about one `(norm, role, Z, epsilon)` that does not depend on
/// `beta`, `mu` or the reporting cost.
///
/// Build once and call [`FairnessAnalysis::report`] across a parameter sweep.
#[derive(Debug, Clone)]
pub struct FairnessAnalysis {
    pub table: PayoffTable,
    pub f_fair: [f64; 8],
}

impl FairnessAnalysis {
    pub fn build(norm: &SocialNorm, role: RoleAssignment, params: &Params) -> Result<Self> {
        let table = PayoffTable::build(norm, role, params)?;
        let values = Strategy::ALL
            .par_iter()
            .map(|&x| f_fair(x, norm, role, params))
            .collect::<Result<Vec<f64>>>()?;
        let mut f = [0.0; 8];
        f.copy_from_slice(&values);
        Ok(FairnessAnalysis { table, f_fair: f })
    }

    /// Whether `params` differs from the build parameters only in `beta`, `mu` or `c_R`.
    pub fn covers(&self, params: &Params) -> bool {
        self.table.matches(params)
    }

    pub fn embedded_chain(&self, params: &Params) -> Result<EmbeddedChain> {
        EmbeddedChain::from_table(&self.table, params)
    }

    pub fn report(&self, params: &Params) -> Result<FairnessReport> {
        let chain = self.embedded_chain(params)?;
        Ok(FairnessReport::assemble(self.table.norm, self.table.role, *params, chain.phi, self.f_fair))
    }
}

/// `F_F` for one norm, role assignment and parameter set.
pub fn total_fairness(norm: &SocialNorm, role: RoleAssignment, params: &Params) -> Result<FairnessReport> {
    FairnessAnalysis::build(norm, role, params)?.report(params)
}
