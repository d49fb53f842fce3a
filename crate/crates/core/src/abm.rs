//! Agent-based simulation with reputations and strategies evolving together.
//!
//! Each generation every reputation is redrawn at random, `5Z` dictator-game
//! rounds are played, and one imitation (or mutation) event updates a
//! single strategy.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::imitation_prob;
use crate::error::{Error, Result};
use crate::norms::{assess, Action, Reputation, SocialNorm, Strategy};
use crate::setting::{Params, RoleAssignment};

/// Rounds per generation, as a multiple of `Z`.
pub const ROUNDS_PER_PLAYER: usize = 5;

/// How a generation's payoffs are summarised for the imitation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PayoffAggregation {
    /// Everything earned (minus reporting costs) during the generation.
    #[default]
    Total,
    /// The total divided by the number of games played as dictator or recipient,
    /// which puts `beta` in the per-round units of the two-timescale analysis.
    PerInteraction,
}

impl PayoffAggregation {
    pub fn name(self) -> &'static str {
        match self {
            PayoffAggregation::Total => "total",
            PayoffAggregation::PerInteraction => "per-interaction",
        }
    }
}

impl fmt::Display for PayoffAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayoffAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "total" | "sum" => Ok(PayoffAggregation::Total),
            "per-interaction" | "per_interaction" | "mean" => Ok(PayoffAggregation::PerInteraction),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected `total` or `per-interaction`".to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmConfig {
    pub params: Params,
    pub norm: SocialNorm,
    pub role: RoleAssignment,
    pub generations: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Start with everybody on this strategy; random strategies if `None`.
    pub initial: Option<Strategy>,
    /// Mutation probability override; allows `0`, which [`Params`] rejects.
    pub mu_override: Option<f64>,
    pub aggregation: PayoffAggregation,
}

impl AbmConfig {
    /// `10^5` generations with `10^4` of burn-in.
    pub fn new(params: Params, norm: SocialNorm, role: RoleAssignment, seed: u64) -> Self {
        AbmConfig {
            params,
            norm,
            role,
            generations: 100_000,
            burn_in: 10_000,
            seed,
            initial: None,
            mu_override: None,
            aggregation: PayoffAggregation::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.generations <= self.burn_in {
            return Err(Error::InvalidParameter(format!(
                "generations ({}) must exceed burn-in ({})",
                self.generations, self.burn_in
            )));
        }
        if let Some(mu) = self.mu_override {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::InvalidParameter(format!("mu must lie in [0, 1], got {mu}")));
            }
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.mu_override.unwrap_or(self.params.mu())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbmResult {
    pub seed: u64,
    pub generations: u64,
    pub burn_in: u64,
    /// Share of recorded rounds that ended in a fair split.
    pub mean_fair_fraction: f64,
    pub fair_std_error: f64,
    /// Time-averaged strategy frequencies in [`Strategy::ALL`] order.
    pub frequencies: [f64; 8],
    pub frequency_std_error: [f64; 8],
}

/// What happened in one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub observer: usize,
    pub dictator: usize,
    pub recipient: usize,
    pub action: Action,
    pub reported: bool,
    pub dictator_gain: f64,
    pub recipient_gain: f64,
}

/// Players, their public reputations and the current generation's tallies.
#[derive(Debug, Clone)]
pub struct Population {
    strategies: Vec<Strategy>,
    reputations: Vec<Reputation>,
    payoff: Vec<f64>,
    interactions: Vec<u32>,
    norm: SocialNorm,
    role: RoleAssignment,
    epsilon: f64,
    cost_report: f64,
    aggregation: PayoffAggregation,
}

impl Population {
    pub fn new<R: Rng>(config: &AbmConfig, rng: &mut R) -> Self {
        let z = config.params.z();
        let strategies = (0..z)
            .map(|_| config.initial.unwrap_or_else(|| Strategy::ALL[rng.gen_range(0..8)]))
            .collect();
        Population {
            strategies,
            reputations: vec![Reputation::Good; z],
            payoff: vec![0.0; z],
            interactions: vec![0; z],
            norm: config.norm,
            role: config.role,
            epsilon: config.params.epsilon(),
            cost_report: config.params.cost_report(),
            aggregation: config.aggregation,
        }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn reputations(&self) -> &[Reputation] {
        &self.reputations
    }

    pub fn counts(&self) -> [usize; 8] {
        let mut c = [0; 8];
        for s in &self.strategies {
            c[s.index()] += 1;
        }
        c
    }

    /// Redraws every reputation uniformly and clears the payoff tallies.
    pub fn start_generation<R: Rng>(&mut self, rng: &mut R) {
        for r in &mut self.reputations {
            *r = Reputation::from_good(rng.gen_bool(0.5));
        }
        self.payoff.iter_mut().for_each(|p| *p = 0.0);
        self.interactions.iter_mut().for_each(|n| *n = 0);
    }

    /// Observer, then an ordered pair from the remaining players.
    pub fn play_round<R: Rng>(&mut self, rng: &mut R) -> RoundRecord {
        let z = self.len();
        let observer = rng.gen_range(0..z);
        let mut a = rng.gen_range(0..z - 1);
        if a >= observer {
            a += 1;
        }
        let b = skip_two(rng.gen_range(0..z - 2), observer, a);
        let (dictator, recipient) = match self.role {
            RoleAssignment::ReputationBased if self.reputations[a] != self.reputations[b] => {
                if self.reputations[a].is_good() {
                    (a, b)
                } else {
                    (b, a)
                }
            }
            _ => (a, b),
        };
        self.play(observer, dictator, recipient, rng)
    }

    fn play<R: Rng>(&mut self, observer: usize, dictator: usize, recipient: usize, rng: &mut R) -> RoundRecord {
        let strategy = self.strategies[dictator];
        let recipient_rep = self.reputations[recipient];
        let mut action = strategy.intended(recipient_rep);
        if action == Action::Fair && rng.gen_bool(self.epsilon) {
            action = Action::Unfair;
        }
        let (dictator_gain, recipient_gain) = match action {
            Action::Fair => (0.5, 0.5),
            Action::Unfair => (1.0, 0.0),
        };
        debug_assert!(dictator_gain + recipient_gain == 1.0);
        self.payoff[dictator] += dictator_gain;
        self.payoff[recipient] += recipient_gain;
        self.interactions[dictator] += 1;
        self.interactions[recipient] += 1;
        let reported = self.strategies[observer].reports();
        if reported {
            self.payoff[observer] -= self.cost_report;
            let prior = self.reputations[dictator];
            self.reputations[dictator] = assess(&self.norm, prior, action, recipient_rep);
        }
        RoundRecord {
            observer,
            dictator,
            recipient,
            action,
            reported,
            dictator_gain,
            recipient_gain,
        }
    }

    /// This generation's payoff as seen by the imitation step.
    ///
    /// Per-interaction payoffs are zero for players that never played.
    pub fn fitness(&self, player: usize) -> f64 {
        match (self.aggregation, self.interactions[player]) {
            (PayoffAggregation::Total, _) => self.payoff[player],
            (PayoffAggregation::PerInteraction, 0) => 0.0,
            (PayoffAggregation::PerInteraction, n) => self.payoff[player] / n as f64,
        }
    }

    pub fn interactions(&self, player: usize) -> u32 {
        self.interactions[player]
    }

    /// One mutation or pairwise-comparison event.
    pub fn imitate<R: Rng>(&mut self, mu: f64, beta: f64, rng: &mut R) {
        let z = self.len();
        let focal = rng.gen_range(0..z);
        let mut model = rng.gen_range(0..z - 1);
        if model >= focal {
            model += 1;
        }
        if rng.gen_bool(mu) {
            self.strategies[focal] = Strategy::ALL[rng.gen_range(0..8)];
        } else {
            let p = imitation_prob(self.fitness(focal), self.fitness(model), beta);
            if rng.gen_bool(p) {
                self.strategies[focal] = self.strategies[model];
            }
        }
    }
}

/// Index of the `k`-th player (0-based) that is neither `x` nor `y`.
fn skip_two(k: usize, x: usize, y: usize) -> usize {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let mut v = k;
    if v >= lo {
        v += 1;
    }
    if v >= hi {
        v += 1;
    }
    v
}

/// Deterministic seed of replica `replica` derived from a base seed.
pub fn replica_seed(seed: u64, replica: u64) -> u64 {
    // splitmix64 finaliser
    let mut x = seed.wrapping_add(replica).wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mean and batch-means standard error of a series.
fn mean_and_error(series: &[f64]) -> (f64, f64) {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let batches = n.min(20);
    if batches < 2 {
        return (mean, f64::NAN);
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

pub fn run(config: &AbmConfig) -> Result<AbmResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pop = Population::new(config, &mut rng);
    let z = pop.len();
    let rounds = ROUNDS_PER_PLAYER * z;
    let (mu, beta) = (config.mu(), config.params.beta());
    let recorded = (config.generations - config.burn_in) as usize;
    let mut fair_series = Vec::with_capacity(recorded);
    let mut freq_series: Vec<Vec<f64>> = (0..8).map(|_| Vec::with_capacity(recorded)).collect();
    for gen in 0..config.generations {
        pop.start_generation(&mut rng);
        let mut fair = 0usize;
        for _ in 0..rounds {
            if pop.play_round(&mut rng).action == Action::Fair {
                fair += 1;
            }
        }
        if gen >= config.burn_in {
            fair_series.push(fair as f64 / rounds as f64);
            for (k, c) in pop.counts().iter().enumerate() {
                freq_series[k].push(*c as f64 / z as f64);
            }
        }
        pop.imitate(mu, beta, &mut rng);
    }
    let (mean_fair_fraction, fair_std_error) = mean_and_error(&fair_series);
    let mut frequencies = [0.0; 8];
    let mut frequency_std_error = [0.0; 8];
    for k in 0..8 {
        let (m, e) = mean_and_error(&freq_series[k]);
        frequencies[k] = m;
        frequency_std_error[k] = e;
    }
    Ok(AbmResult {
        seed: config.seed,
        generations: config.generations,
        burn_in: config.burn_in,
        mean_fair_fraction,
        fair_std_error,
        frequencies,
        frequency_std_error,
    })
}

/// Independent replicas in parallel, seeded by [`replica_seed`].
pub fn run_replicas(config: &AbmConfig, replicas: u64) -> Result<Vec<AbmResult>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut c = config.clone();
            c.seed = replica_seed(config.seed, r);
            run(&c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::Strategy;
    use proptest::prelude::*;

    fn config(z: usize, role: RoleAssignment) -> AbmConfig {
        let p = Params::new(z, 0.01, 0.01, 0.01, 0.6).unwrap();
        let mut c = AbmConfig::new(p, SocialNorm::STERN_JUDGING, role, 11);
        c.generations = 3_000;
        c.burn_in = 500;
        c
    }

    #[test]
    fn burn_in_must_be_shorter_than_run() {
        let mut c = config(10, RoleAssignment::Random);
        c.burn_in = c.generations;
        assert!(run(&c).is_err());
        c.burn_in = 0;
        assert!(run(&c).is_ok());
        c.mu_override = Some(1.5);
        assert!(c.validate().is_err());
    }

    #[test]
    fn same_seed_same_result() {
        for role in RoleAssignment::BOTH {
            let c = config(12, role);
            assert_eq!(run(&c).unwrap(), run(&c).unwrap());
        }
        let c = config(12, RoleAssignment::Random);
        let mut d = c.clone();
        d.seed += 1;
        assert_ne!(run(&c).unwrap(), run(&d).unwrap());
    }

    #[test]
    fn mutation_only_dynamics_are_uniform() {
        let mut c = config(10, RoleAssignment::Random);
        c.mu_override = Some(1.0);
        c.generations = 40_000;
        c.burn_in = 1_000;
        let r = run(&c).unwrap();
        assert!((r.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for f in r.frequencies {
            assert!((f - 0.125).abs() < 0.01, "{:?}", r.frequencies);
        }
    }

    #[test]
    fn pinned_fair_population() {
        for role in RoleAssignment::BOTH {
            let mut c = config(20, role);
            c.initial = Some(Strategy::FFR);
            c.mu_override = Some(0.0);
            let r = run(&c).unwrap();
            assert_eq!(r.frequencies[Strategy::FFR.index()], 1.0);
            assert!((r.mean_fair_fraction - 0.99).abs() < 0.005, "{}", r.mean_fair_fraction);
        }
    }

    #[test]
    fn rounds_conserve_resources_and_touch_only_the_dictator() {
        let c = config(9, RoleAssignment::ReputationBased);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop = Population::new(&c, &mut rng);
        for _ in 0..200 {
            pop.start_generation(&mut rng);
            for _ in 0..45 {
                let before = pop.reputations().to_vec();
                let r = pop.play_round(&mut rng);
                assert_eq!(r.dictator_gain + r.recipient_gain, 1.0);
                assert!(r.observer != r.dictator && r.observer != r.recipient && r.dictator != r.recipient);
                if c.role == RoleAssignment::ReputationBased && before[r.dictator] != before[r.recipient] {
                    assert!(before[r.dictator].is_good());
                }
                for (k, (a, b)) in before.iter().zip(pop.reputations()).enumerate() {
                    if k != r.dictator || !r.reported {
                        assert_eq!(a, b);
                    }
                }
                assert_eq!(r.reported, pop.strategies()[r.observer].reports());
            }
        }
    }

    #[test]
    fn aggregation_names_round_trip() {
        for a in [PayoffAggregation::Total, PayoffAggregation::PerInteraction] {
            assert_eq!(a.name().parse::<PayoffAggregation>().unwrap(), a);
        }
        assert!("median".parse::<PayoffAggregation>().is_err());
    }

    #[test]
    fn replica_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| replica_seed(42, r)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(replica_seed(42, 3), replica_seed(42, 3));
    }

    proptest! {
        #[test]
        fn skip_two_avoids_both(x in 0usize..20, y in 0usize..20, k in 0usize..18) {
            prop_assume!(x != y);
            let v = skip_two(k, x, y);
            prop_assert!(v != x && v != y && v < 20);
            // order preserving, hence a bijection onto the remaining 18 players
            if k > 0 {
                prop_assert!(skip_two(k - 1, x, y) < v);
            }
        }
    }
}
