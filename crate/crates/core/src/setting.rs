//! Model parameters and the two-strategy population setting shared by the
//! reputation chain, the payoff evaluation and the strategy dynamics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::norms::{SocialNorm, Strategy};

/// Population and evolutionary parameters.
///
/// Ranges are checked on construction: `z >= 3`, `0 <= epsilon < 1`,
/// `cost_report >= 0`, `0 < mu <= 1`, `beta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    z: usize,
    epsilon: f64,
    cost_report: f64,
    mu: f64,
    beta: f64,
}

impl Params {
    pub fn new(z: usize, epsilon: f64, cost_report: f64, mu: f64, beta: f64) -> Result<Self> {
        if z < 3 {
            return Err(Error::InvalidParameter(format!(
                "population size must be at least 3 (dictator, recipient and observer), got {z}"
            )));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1), got {epsilon}")));
        }
        if !(cost_report >= 0.0 && cost_report.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reporting cost must be a finite non-negative number, got {cost_report}"
            )));
        }
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidParameter(format!("mu must lie in (0, 1], got {mu}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be a finite non-negative number, got {beta}"
            )));
        }
        Ok(Params {
            z,
            epsilon,
            cost_report,
            mu,
            beta,
        })
    }

    /// Population size.
    pub fn z(&self) -> usize {
        self.z
    }

    /// Implementation-error probability of an intended fair split.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Cost paid by a reporting observer.
    pub fn cost_report(&self) -> f64 {
        self.cost_report
    }

    /// Mutation probability.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Selection intensity.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Params::new(self.z, self.epsilon, self.cost_report, self.mu, beta)
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Params::new(self.z, self.epsilon, self.cost_report, mu, self.beta)
    }

    pub fn with_cost_report(self, cost_report: f64) -> Result<Self> {
        Params::new(self.z, self.epsilon, cost_report, self.mu, self.beta)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Params::new(self.z, epsilon, self.cost_report, self.mu, self.beta)
    }

    pub fn with_z(self, z: usize) -> Result<Self> {
        Params::new(z, self.epsilon, self.cost_report, self.mu, self.beta)
    }
}

impl Default for Params {
    /// `Z = 50`, `epsilon = 0.01`, `c_R = 0.01`, `mu = 0.01`, `beta = 0.6`.
    fn default() -> Self {
        Params {
            z: 50,
            epsilon: 0.01,
            cost_report: 0.01,
            mu: 0.01,
            beta: 0.6,
        }
    }
}

/// How the two members of a pair are assigned the dictator and recipient roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleAssignment {
    /// Either member dictates with probability 1/2.
    Random,
    /// A good player dictates against a bad one; equal reputations toss a coin.
    ReputationBased,
}

impl RoleAssignment {
    pub const BOTH: [RoleAssignment; 2] = [RoleAssignment::Random, RoleAssignment::ReputationBased];

    pub fn name(self) -> &'static str {
        match self {
            RoleAssignment::Random => "random",
            RoleAssignment::ReputationBased => "reputation",
        }
    }
}

impl fmt::Display for RoleAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RoleAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" | "rand" => Ok(RoleAssignment::Random),
            "reputation" | "reputation-based" | "reputation_based" | "rep" => Ok(RoleAssignment::ReputationBased),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected `random` or `reputation`".to_string(),
            }),
        }
    }
}

/// `m` players using `strategy_x` and `Z - m` using `strategy_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseSetting {
    pub strategy_x: Strategy,
    pub strategy_y: Strategy,
    m: usize,
    pub norm: SocialNorm,
    pub role: RoleAssignment,
    pub params: Params,
}

impl PairwiseSetting {
    pub fn new(
        strategy_x: Strategy,
        strategy_y: Strategy,
        m: usize,
        norm: SocialNorm,
        role: RoleAssignment,
        params: Params,
    ) -> Result<Self> {
        if m > params.z() {
            return Err(Error::InvalidArgument(format!(
                "X-count {m} exceeds the population size {}",
                params.z()
            )));
        }
        Ok(PairwiseSetting {
            strategy_x,
            strategy_y,
            m,
            norm,
            role,
            params,
        })
    }

    /// A population where everybody plays `strategy` (`m = Z`).
    pub fn monomorphic(strategy: Strategy, norm: SocialNorm, role: RoleAssignment, params: Params) -> Self {
        PairwiseSetting {
            strategy_x: strategy,
            strategy_y: strategy,
            m: params.z(),
            norm,
            role,
            params,
        }
    }

    /// Number of X-players.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of Y-players.
    pub fn n_y(&self) -> usize {
        self.params.z() - self.m
    }

    pub fn z(&self) -> usize {
        self.params.z()
    }

    /// Relabels X as Y: `(X, m) <-> (Y, Z - m)`.
    pub fn swapped(&self) -> Self {
        PairwiseSetting {
            strategy_x: self.strategy_y,
            strategy_y: self.strategy_x,
            m: self.n_y(),
            ..*self
        }
    }
}
