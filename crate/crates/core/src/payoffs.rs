//! Per-state expected payoffs and their stationary averages.
//!
//! A focal player is one member of a randomly drawn pair; its partner is
//! drawn from the other `Z - 1` players. As dictator it keeps 0.5 after a
//! fair split and 1 after an unfair one; as recipient it gets 0.5 from a fair
//! split. Reporters pay `c_R` per round. All values are per-round
//! expectations.

use crate::error::{Error, Result};
use crate::norms::{Reputation, Strategy};
use crate::reputation_chain::{RepState, StateGrid, StationaryDist};
use crate::setting::{PairwiseSetting, RoleAssignment};

/// Which group of the pairwise setting a payoff refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    X,
    Y,
}

/// Stationary-averaged payoffs `(g_X(m), g_Y(m))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffPair {
    pub g_x: f64,
    pub g_y: f64,
}

/// Probability the focal player dictates when paired with a partner of the
/// given reputation.
fn dictates(role: RoleAssignment, focal: Reputation, partner: Reputation) -> f64 {
    match role {
        RoleAssignment::Random => 0.5,
        RoleAssignment::ReputationBased => match (focal, partner) {
            (Reputation::Good, Reputation::Bad) => 1.0,
            (Reputation::Bad, Reputation::Good) => 0.0,
            _ => 0.5,
        },
    }
}

/// Payoff to a dictator playing `strategy` against a recipient of reputation `recipient`.
fn dictator_take(strategy: Strategy, recipient: Reputation, epsilon: f64) -> f64 {
    let fair = strategy.fair_prob(recipient, epsilon);
    0.5 * fair + (1.0 - fair)
}

/// Expected payoff `pi` of an X- or Y-player in state `(i, j)`, reporting cost included.
///
/// The dictator side weights every partner by its share of the other `Z - 1`
/// players. On the recipient side the random-role form does the same, while
/// the reputation-based form adds, for each group, the fraction of that
/// group's members (excluding the focal player) with the required reputation.
/// The two coincide in a monomorphic population. Returns 0 for a species
/// with no members.
pub fn pi(setting: &PairwiseSetting, state: RepState, species: Species) -> f64 {
    let eps = setting.params.epsilon();
    let z = setting.z() as f64;
    let (m, n_y) = (setting.m(), setting.n_y());
    let (own_n, own_good, other_good, own_strategy, other_strategy, other_n) = match species {
        Species::X => (m, state.i, state.j, setting.strategy_x, setting.strategy_y, n_y),
        Species::Y => (n_y, state.j, state.i, setting.strategy_y, setting.strategy_x, m),
    };
    if own_n == 0 {
        return 0.0;
    }
    let own_bad = own_n - own_good;
    let other_bad = other_n - other_good;
    let mut total = 0.0;
    for focal in [Reputation::Good, Reputation::Bad] {
        let count = match focal {
            Reputation::Good => own_good,
            Reputation::Bad => own_bad,
        };
        if count == 0 {
            continue;
        }
        let (mut own_partners_good, mut own_partners_bad) = (own_good as f64, own_bad as f64);
        match focal {
            Reputation::Good => own_partners_good -= 1.0,
            Reputation::Bad => own_partners_bad -= 1.0,
        }
        let own_pool = own_n as f64 - 1.0;
        let other_pool = other_n as f64;
        let partners = [
            (own_partners_good, own_pool, Reputation::Good, own_strategy),
            (own_partners_bad, own_pool, Reputation::Bad, own_strategy),
            (other_good as f64, other_pool, Reputation::Good, other_strategy),
            (other_bad as f64, other_pool, Reputation::Bad, other_strategy),
        ];
        let mut given_focal = 0.0;
        for (n_partner, pool, partner_rep, partner_strategy) in partners {
            if n_partner <= 0.0 {
                continue;
            }
            let d = dictates(setting.role, focal, partner_rep);
            let as_dictator = n_partner / (z - 1.0) * d * dictator_take(own_strategy, partner_rep, eps);
            let receive_weight = match setting.role {
                RoleAssignment::Random => n_partner / (z - 1.0),
                RoleAssignment::ReputationBased => n_partner / pool,
            };
            let as_recipient = receive_weight * (1.0 - d) * 0.5 * partner_strategy.fair_prob(focal, eps);
            given_focal += as_dictator + as_recipient;
        }
        total += count as f64 / own_n as f64 * given_focal;
    }
    total - setting.params.cost_report() * own_strategy.report_indicator()
}

/// `g = sum_{i,j} v(i, j) pi(i, j)` for both species.
pub fn expected_payoffs(setting: &PairwiseSetting, v: &StationaryDist) -> Result<PayoffPair> {
    let grid = StateGrid::of(setting);
    if v.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} states, setting with m = {} has {}",
            v.len(),
            setting.m(),
            grid.len()
        )));
    }
    let mut g_x = 0.0;
    let mut g_y = 0.0;
    for (s, &p) in grid.states().zip(&v.probs) {
        if p == 0.0 {
            continue;
        }
        g_x += p * pi(setting, s, Species::X);
        g_y += p * pi(setting, s, Species::Y);
    }
    Ok(PayoffPair { g_x, g_y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{NormVector, SocialNorm};
    use crate::reputation_chain::{solve_setting, SolveMethod};
    use crate::setting::Params;
    use crate::norms::Strategy;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn setting(x: Strategy, y: Strategy, m: usize, role: RoleAssignment, p: Params) -> PairwiseSetting {
        PairwiseSetting::new(x, y, m, SocialNorm::STERN_JUDGING, role, p).unwrap()
    }

    // Transcription of the random-role closed form for pi_X.
    fn reference_random_pi_x(s: &PairwiseSetting, i: f64, j: f64) -> f64 {
        let z = s.z() as f64;
        let m = s.m() as f64;
        let e = s.params.epsilon();
        let (x, y) = (s.strategy_x, s.strategy_y);
        let igx = x.fair_indicator(Reputation::Good);
        let ibx = x.fair_indicator(Reputation::Bad);
        let igy = y.fair_indicator(Reputation::Good);
        let iby = y.fair_indicator(Reputation::Bad);
        let fair = 0.5
            * (1.0 - e)
            * (i / m * (0.5 * igx * (i + j - 1.0) / (z - 1.0) + 0.5 * ibx * (z - i - j) / (z - 1.0))
                + (m - i) / m * (0.5 * igx * (i + j) / (z - 1.0) + 0.5 * ibx * (z - 1.0 - i - j) / (z - 1.0)));
        let unfair = i / m * 0.5 * (1.0 - igx + e * igx) * (i + j - 1.0) / (z - 1.0)
            + i / m * 0.5 * (1.0 - ibx + e * ibx) * (z - i - j) / (z - 1.0)
            + (m - i) / m * 0.5 * (1.0 - igx + e * igx) * (i + j) / (z - 1.0)
            + (m - i) / m * 0.5 * (1.0 - ibx + e * ibx) * (z - 1.0 - i - j) / (z - 1.0);
        let received = 0.5
            * (1.0 - e)
            * (i / m * 0.5 * (igx * (m - 1.0) / (z - 1.0) + igy * (z - m) / (z - 1.0))
                + (m - i) / m * 0.5 * (ibx * (m - 1.0) / (z - 1.0) + iby * (z - m) / (z - 1.0)));
        fair + unfair + received - s.params.cost_report() * x.report_indicator()
    }

    #[test]
    fn random_role_matches_reference_form() {
        let p = Params::new(11, 0.07, 0.02, 0.01, 0.6).unwrap();
        for x in Strategy::ALL {
            for y in Strategy::ALL {
                for m in 1..11 {
                    let s = setting(x, y, m, RoleAssignment::Random, p);
                    for st in StateGrid::of(&s).states() {
                        let a = pi(&s, st, Species::X);
                        let b = reference_random_pi_x(&s, st.i as f64, st.j as f64);
                        assert!((a - b).abs() < 1e-14, "{x} {y} m={m} {st:?}: {a} vs {b}");
                    }
                }
            }
        }
    }

    fn ratio(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            0.0
        } else {
            a / b
        }
    }

    // Transcription of the reputation-based closed forms for pi_X and pi_Y.
    fn reference_reputation_pi(s: &PairwiseSetting, i: f64, j: f64) -> (f64, f64) {
        let z = s.z() as f64;
        let m = s.m() as f64;
        let e = s.params.epsilon();
        let (x, y) = (s.strategy_x, s.strategy_y);
        let igx = x.fair_indicator(Reputation::Good);
        let ibx = x.fair_indicator(Reputation::Bad);
        let igy = y.fair_indicator(Reputation::Good);
        let iby = y.fair_indicator(Reputation::Bad);
        let n = z - m;
        let pi_x = if m == 0.0 {
            0.0
        } else {
            0.5 * (1.0 - e)
                * (i / m * (0.5 * igx * (i + j - 1.0) / (z - 1.0) + ibx * (z - i - j) / (z - 1.0))
                    + (m - i) / m * 0.5 * ibx * (z - 1.0 - i - j) / (z - 1.0))
                + (i / m * 0.5 * (1.0 - igx + e * igx) * (i + j - 1.0) / (z - 1.0)
                    + i / m * (1.0 - ibx + e * ibx) * (z - i - j) / (z - 1.0)
                    + (m - i) / m * 0.5 * (1.0 - ibx + e * ibx) * (z - 1.0 - i - j) / (z - 1.0))
                + 0.5 * (1.0 - e)
                    * (i / m * 0.5 * (igx * ratio(i - 1.0, m - 1.0) + igy * ratio(j, n))
                        + (m - i) / m * 0.5 * (ibx * ratio(m - i - 1.0, m - 1.0) + iby * ratio(n - j, n))
                        + (m - i) / m * (ibx * ratio(i, m - 1.0) + iby * ratio(j, n)))
                - s.params.cost_report() * x.report_indicator()
        };
        let pi_y = if n == 0.0 {
            0.0
        } else {
            0.5 * (1.0 - e)
                * (j / n * (0.5 * igy * (i + j - 1.0) / (z - 1.0) + iby * (z - i - j) / (z - 1.0))
                    + (n - j) / n * 0.5 * iby * (z - 1.0 - i - j) / (z - 1.0))
                + (j / n * 0.5 * (1.0 - igy + e * igy) * (i + j - 1.0) / (z - 1.0)
                    + j / n * (1.0 - iby + e * iby) * (z - i - j) / (z - 1.0)
                    + (n - j) / n * 0.5 * (1.0 - iby + e * iby) * (z - 1.0 - i - j) / (z - 1.0))
                + 0.5 * (1.0 - e)
                    * (j / n * 0.5 * (igx * ratio(i, m) + igy * ratio(j - 1.0, n - 1.0))
                        + (n - j) / n * 0.5 * (ibx * ratio(m - i, m) + iby * ratio(n - j - 1.0, n - 1.0))
                        + (n - j) / n * (ibx * ratio(i, m) + iby * ratio(j, n - 1.0)))
                - s.params.cost_report() * y.report_indicator()
        };
        (pi_x, pi_y)
    }

    #[test]
    fn reputation_role_matches_reference_form() {
        let p = Params::new(9, 0.05, 0.01, 0.01, 0.6).unwrap();
        for x in Strategy::ALL {
            for y in Strategy::ALL {
                for m in 0..=9 {
                    let s = setting(x, y, m, RoleAssignment::ReputationBased, p);
                    for st in StateGrid::of(&s).states() {
                        let (ex, ey) = reference_reputation_pi(&s, st.i as f64, st.j as f64);
                        let (a, b) = (pi(&s, st, Species::X), pi(&s, st, Species::Y));
                        assert!((a - ex).abs() < 1e-14, "{x} {y} m={m} {st:?}: {a} vs {ex}");
                        assert!((b - ey).abs() < 1e-14, "{x} {y} m={m} {st:?}: {b} vs {ey}");
                    }
                }
            }
        }
    }

    #[test]
    fn unconditional_defector_payoff() {
        let p = Params::new(20, 0.01, 0.01, 0.01, 0.6).unwrap();
        let s = setting(Strategy::NNR, Strategy::NNS, 7, RoleAssignment::Random, p);
        for st in StateGrid::of(&s).states() {
            assert!((pi(&s, st, Species::X) - 0.49).abs() < 1e-15);
        }
        let v = solve_setting(&s).unwrap();
        let g = expected_payoffs(&s, &v).unwrap();
        assert!((g.g_x - 0.49).abs() < 1e-14);
        assert!((g.g_y - 0.5).abs() < 1e-14);
    }

    #[test]
    fn all_fair_monomorphic_gets_half() {
        for eps in [0.0, 0.01, 0.3] {
            let p = Params::new(10, eps, 0.01, 0.01, 0.6).unwrap();
            let s = PairwiseSetting::monomorphic(Strategy::FFS, SocialNorm::SHUNNING, RoleAssignment::Random, p);
            for i in 0..=10 {
                assert!((pi(&s, RepState { i, j: 0 }, Species::X) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_mutant_reputation_based_terms_vanish() {
        let p = Params::new(6, 0.01, 0.0, 0.01, 0.6).unwrap();
        let s = setting(Strategy::FFR, Strategy::NNS, 1, RoleAssignment::ReputationBased, p);
        // the lone FFR player never receives from another FFR player
        for st in StateGrid::of(&s).states() {
            let v = pi(&s, st, Species::X);
            assert!(v.is_finite());
            let focal = Reputation::from_good(st.i == 1);
            let partners_good = st.j as f64;
            let partners_bad = (5 - st.j) as f64;
            let expect = (partners_good * (dictates(s.role, focal, Reputation::Good) * 0.505)
                + partners_bad * (dictates(s.role, focal, Reputation::Bad) * 0.505))
                / 5.0;
            assert!((v - expect).abs() < 1e-15, "{st:?}");
        }
    }

    #[test]
    fn point_mass_average_is_pointwise() {
        let p = Params::new(7, 0.02, 0.01, 0.01, 0.6).unwrap();
        let s = setting(Strategy::FNR, Strategy::NFS, 3, RoleAssignment::ReputationBased, p);
        let grid = StateGrid::of(&s);
        let target = RepState { i: 2, j: 1 };
        let mut probs = vec![0.0; grid.len()];
        probs[grid.index(target)] = 1.0;
        let v = StationaryDist {
            probs,
            closed_classes: 1,
            residual: 0.0,
            method: SolveMethod::Direct,
        };
        let g = expected_payoffs(&s, &v).unwrap();
        assert_eq!(g.g_x, pi(&s, target, Species::X));
        assert_eq!(g.g_y, pi(&s, target, Species::Y));

        let short = StationaryDist {
            probs: vec![1.0],
            ..v
        };
        assert!(expected_payoffs(&s, &short).is_err());
    }

    #[test]
    fn monomorphic_mean_payoff_is_half_before_costs() {
        let p = Params::default();
        for x in [Strategy::NNR, Strategy::FFR] {
            for role in RoleAssignment::BOTH {
                let s = PairwiseSetting::monomorphic(x, SocialNorm::STERN_JUDGING, role, p);
                let v = solve_setting(&s).unwrap();
                let g = expected_payoffs(&s, &v).unwrap();
                assert!((g.g_x + p.cost_report() - 0.5).abs() < 1e-14);
            }
        }
    }

    fn arb_setting() -> impl proptest::strategy::Strategy<Value = PairwiseSetting> {
        (3usize..12, 0.0f64..0.5, 0.0f64..0.1, 0usize..8, 0usize..8, 0u8..16, 0u8..16, any::<bool>(), 0usize..100)
            .prop_map(|(z, eps, c, x, y, g, b, rep, mraw)| {
                let p = Params::new(z, eps, c, 0.01, 0.6).unwrap();
                let norm = SocialNorm::new(NormVector::from_bits(g), NormVector::from_bits(b));
                let role = if rep { RoleAssignment::ReputationBased } else { RoleAssignment::Random };
                PairwiseSetting::new(Strategy::ALL[x], Strategy::ALL[y], mraw % (z + 1), norm, role, p).unwrap()
            })
    }

    proptest! {
        #[test]
        fn resource_conservation(s in arb_setting()) {
            // every pair shares one unit, so the population-mean pre-cost payoff is 1/2;
            // the reputation-based recipient terms only conserve it in monomorphic populations
            prop_assume!(s.role == RoleAssignment::Random || s.m() == 0 || s.n_y() == 0);
            let c = s.params.cost_report();
            let z = s.z() as f64;
            for st in StateGrid::of(&s).states() {
                let tx = s.m() as f64 * (pi(&s, st, Species::X) + c * s.strategy_x.report_indicator());
                let ty = s.n_y() as f64 * (pi(&s, st, Species::Y) + c * s.strategy_y.report_indicator());
                prop_assert!(((tx + ty) / z - 0.5).abs() < 1e-13);
            }
        }

        #[test]
        fn exchange_symmetry(s in arb_setting()) {
            let w = s.swapped();
            for st in StateGrid::of(&s).states() {
                let a = pi(&s, st, Species::X);
                let b = pi(&w, RepState { i: st.j, j: st.i }, Species::Y);
                prop_assert!((a - b).abs() < 1e-15);
            }
        }

        #[test]
        fn payoffs_bounded(s in arb_setting()) {
            let c = s.params.cost_report();
            for st in StateGrid::of(&s).states() {
                for sp in [Species::X, Species::Y] {
                    let v = pi(&s, st, sp);
                    let cap = match s.role {
                        RoleAssignment::Random => 1.0,
                        RoleAssignment::ReputationBased => 1.5,
                    };
                    prop_assert!(v >= -c - 1e-15 && v <= cap + 1e-15);
                }
            }
        }

        #[test]
        fn unfair_only_pairs_ignore_epsilon(
            z in 3usize..10, e1 in 0.0f64..0.9, e2 in 0.0f64..0.9, rx in any::<bool>(), ry in any::<bool>(),
            rep in any::<bool>(), mraw in 0usize..100,
        ) {
            let x = if rx { Strategy::NNR } else { Strategy::NNS };
            let y = if ry { Strategy::NNR } else { Strategy::NNS };
            let role = if rep { RoleAssignment::ReputationBased } else { RoleAssignment::Random };
            let m = mraw % (z + 1);
            let s1 = PairwiseSetting::new(x, y, m, SocialNorm::STERN_JUDGING, role, Params::new(z, e1, 0.01, 0.01, 0.6).unwrap()).unwrap();
            let s2 = PairwiseSetting::new(x, y, m, SocialNorm::STERN_JUDGING, role, Params::new(z, e2, 0.01, 0.01, 0.6).unwrap()).unwrap();
            for st in StateGrid::of(&s1).states() {
                prop_assert_eq!(pi(&s1, st, Species::X), pi(&s2, st, Species::X));
                prop_assert_eq!(pi(&s1, st, Species::Y), pi(&s2, st, Species::Y));
            }
        }
    }
}
