//! Exact reputation dynamics of a population with fixed strategies.
//!
//! With `m` X-players and `Z - m` Y-players the public state is `(i, j)`: the
//! number of good X-players and good Y-players. One round draws an observer
//! uniformly, then an unordered pair from the remaining `Z - 1` players whose
//! roles follow the [`RoleAssignment`]. A reporting observer replaces the
//! dictator's reputation with its assessment; otherwise nothing changes. At
//! most one reputation moves per round, so the chain is banded on the grid
//! index `i * (Z - m + 1) + j`.

use crate::error::{Error, Result};
use crate::linalg::{closed_classes, BandMatrix};
use crate::norms::{Action, Reputation, SocialNorm, Strategy};
use crate::setting::{PairwiseSetting, Params, RoleAssignment};

/// Iteration cap of the power-iteration fallback.
pub const POWER_ITERATION_CAP: usize = 1_000_000;
/// Stopping tolerance of the power-iteration fallback.
pub const POWER_ITERATION_TOL: f64 = 1e-12;
/// Largest accepted `||vP - v||_inf` for a direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Reputation state `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RepState {
    /// Good X-players, `0 ..= m`.
    pub i: usize,
    /// Good Y-players, `0 ..= Z - m`.
    pub j: usize,
}

/// Shape of the `(i, j)` grid for a given `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateGrid {
    pub m: usize,
    pub n_y: usize,
}

impl StateGrid {
    pub fn new(m: usize, n_y: usize) -> Self {
        StateGrid { m, n_y }
    }

    pub fn of(setting: &PairwiseSetting) -> Self {
        StateGrid::new(setting.m(), setting.n_y())
    }

    pub fn len(&self) -> usize {
        (self.m + 1) * (self.n_y + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, s: RepState) -> usize {
        debug_assert!(s.i <= self.m && s.j <= self.n_y);
        s.i * (self.n_y + 1) + s.j
    }

    pub fn state(&self, idx: usize) -> RepState {
        RepState {
            i: idx / (self.n_y + 1),
            j: idx % (self.n_y + 1),
        }
    }

    pub fn contains(&self, s: RepState) -> bool {
        s.i <= self.m && s.j <= self.n_y
    }

    pub fn states(&self) -> impl Iterator<Item = RepState> + '_ {
        (0..self.len()).map(|k| self.state(k))
    }
}

/// Probabilities that the round's observer is a reporting player of each
/// kind. The remainder `1 - total()` is the chance that nobody reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverEvents {
    pub x_good: f64,
    pub x_bad: f64,
    pub y_good: f64,
    pub y_bad: f64,
}

impl ObserverEvents {
    pub fn total(&self) -> f64 {
        self.x_good + self.x_bad + self.y_good + self.y_bad
    }
}

pub fn observer_event_probs(setting: &PairwiseSetting, state: RepState) -> ObserverEvents {
    let z = setting.z() as f64;
    let (m, n_y) = (setting.m(), setting.n_y());
    let ex = setting.strategy_x.report_indicator();
    let ey = setting.strategy_y.report_indicator();
    ObserverEvents {
        x_good: state.i as f64 / z * ex,
        x_bad: (m - state.i) as f64 / z * ex,
        y_good: state.j as f64 / z * ey,
        y_bad: (n_y - state.j) as f64 / z * ey,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Species {
    X,
    Y,
}

/// Players left to form the pair once the observer is drawn.
#[derive(Debug, Clone, Copy)]
struct Pool {
    x_good: f64,
    x_bad: f64,
    y_good: f64,
    y_bad: f64,
    /// `Z - 1`.
    others: f64,
}

impl Pool {
    fn count(&self, species: Species, rep: Reputation) -> f64 {
        match (species, rep) {
            (Species::X, Reputation::Good) => self.x_good,
            (Species::X, Reputation::Bad) => self.x_bad,
            (Species::Y, Reputation::Good) => self.y_good,
            (Species::Y, Reputation::Bad) => self.y_bad,
        }
    }

    fn with_rep(&self, rep: Reputation) -> f64 {
        match rep {
            Reputation::Good => self.x_good + self.y_good,
            Reputation::Bad => self.x_bad + self.y_bad,
        }
    }

    /// Probability that the dictator is a `(species, dictator_rep)` player and
    /// the recipient has reputation `recipient_rep`.
    fn dictator_meets(&self, role: RoleAssignment, species: Species, dictator_rep: Reputation, recipient_rep: Reputation) -> f64 {
        let dictators = self.count(species, dictator_rep);
        if dictators == 0.0 {
            return 0.0;
        }
        let mut recipients = self.with_rep(recipient_rep);
        if recipient_rep == dictator_rep {
            recipients -= 1.0;
        }
        let ordered = dictators / self.others * recipients / (self.others - 1.0);
        match role {
            RoleAssignment::Random => ordered,
            RoleAssignment::ReputationBased => match (dictator_rep, recipient_rep) {
                (Reputation::Good, Reputation::Bad) => 2.0 * ordered,
                (Reputation::Bad, Reputation::Good) => 0.0,
                _ => ordered,
            },
        }
    }
}

/// Probability that a dictator with reputation `prior` playing `strategy`
/// against a `recipient` is assessed good.
fn assessed_good_prob(norm: &SocialNorm, strategy: Strategy, prior: Reputation, recipient: Reputation, epsilon: f64) -> f64 {
    let fair = strategy.fair_prob(recipient, epsilon);
    let vector = norm.vector(prior);
    fair * vector.weight(Action::Fair, recipient) + (1.0 - fair) * vector.weight(Action::Unfair, recipient)
}

/// One-step move probabilities out of a state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowMoves {
    pub i_up: f64,
    pub i_down: f64,
    pub j_up: f64,
    pub j_down: f64,
}

impl RowMoves {
    pub fn stay(&self) -> f64 {
        (1.0 - self.i_up - self.i_down - self.j_up - self.j_down).max(0.0)
    }
}

/// Move probabilities out of `state`, combining every observer event by total probability.
pub fn row_moves(setting: &PairwiseSetting, state: RepState) -> RowMoves {
    let params = &setting.params;
    let eps = params.epsilon();
    let (m, n_y) = (setting.m(), setting.n_y());
    let (i, j) = (state.i as f64, state.j as f64);
    let base = Pool {
        x_good: i,
        x_bad: (m - state.i) as f64,
        y_good: j,
        y_bad: (n_y - state.j) as f64,
        others: (params.z() - 1) as f64,
    };
    let ob = observer_event_probs(setting, state);
    let events = [
        (ob.x_good, Species::X, Reputation::Good),
        (ob.x_bad, Species::X, Reputation::Bad),
        (ob.y_good, Species::Y, Reputation::Good),
        (ob.y_bad, Species::Y, Reputation::Bad),
    ];
    let norm = &setting.norm;
    let role = setting.role;
    let mut moves = RowMoves::default();
    for (p_ob, obs_species, obs_rep) in events {
        if p_ob == 0.0 {
            continue;
        }
        let mut pool = base;
        match (obs_species, obs_rep) {
            (Species::X, Reputation::Good) => pool.x_good -= 1.0,
            (Species::X, Reputation::Bad) => pool.x_bad -= 1.0,
            (Species::Y, Reputation::Good) => pool.y_good -= 1.0,
            (Species::Y, Reputation::Bad) => pool.y_bad -= 1.0,
        }
        for (species, strategy) in [(Species::X, setting.strategy_x), (Species::Y, setting.strategy_y)] {
            let mut up = 0.0;
            let mut down = 0.0;
            for rec in [Reputation::Good, Reputation::Bad] {
                let from_bad = pool.dictator_meets(role, species, Reputation::Bad, rec);
                if from_bad > 0.0 {
                    up += from_bad * assessed_good_prob(norm, strategy, Reputation::Bad, rec, eps);
                }
                let from_good = pool.dictator_meets(role, species, Reputation::Good, rec);
                if from_good > 0.0 {
                    down += from_good * (1.0 - assessed_good_prob(norm, strategy, Reputation::Good, rec, eps));
                }
            }
            match species {
                Species::X => {
                    moves.i_up += p_ob * up;
                    moves.i_down += p_ob * down;
                }
                Species::Y => {
                    moves.j_up += p_ob * up;
                    moves.j_down += p_ob * down;
                }
            }
        }
    }
    moves
}

/// Sparse row-stochastic matrix; each row lists its nonzero `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    /// Wraps explicit rows. Entries must be non-negative and each row must
    /// sum to one within `1e-12`.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        for (r, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for &(c, v) in row {
                if c >= n || !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!("bad entry ({r}, {c}) = {v}")));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("row {r} sums to {sum}")));
            }
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn identity(n: usize) -> Self {
        TransitionMatrix {
            rows: (0..n).map(|r| vec![(r, 1.0)]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r].iter().find(|(cc, _)| *cc == c).map_or(0.0, |(_, v)| *v)
    }

    /// `v P`.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n());
        let mut out = vec![0.0; self.n()];
        for (r, row) in self.rows.iter().enumerate() {
            let vr = v[r];
            if vr == 0.0 {
                continue;
            }
            for &(c, p) in row {
                out[c] += vr * p;
            }
        }
        out
    }

    /// `max_r |sum_c P(r, c) - 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|(_, v)| v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `||v P - v||_inf`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.left_multiply(v)
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().all(|&(c, v)| (c == r && v == 1.0) || v == 0.0))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut d = vec![vec![0.0; n]; n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                d[r][c] += v;
            }
        }
        d
    }
}

/// Builds the reputation chain for a two-strategy population.
pub fn transition_matrix(setting: &PairwiseSetting) -> TransitionMatrix {
    let grid = StateGrid::of(setting);
    let rows = grid
        .states()
        .map(|s| {
            let mv = row_moves(setting, s);
            let mut row = Vec::with_capacity(5);
            let mut push = |target: RepState, p: f64| {
                if p > 0.0 {
                    row.push((grid.index(target), p));
                }
            };
            if s.i > 0 {
                push(RepState { i: s.i - 1, j: s.j }, mv.i_down);
            }
            if s.j > 0 {
                push(RepState { i: s.i, j: s.j - 1 }, mv.j_down);
            }
            push(s, mv.stay());
            if s.j < grid.n_y {
                push(RepState { i: s.i, j: s.j + 1 }, mv.j_up);
            }
            if s.i < grid.m {
                push(RepState { i: s.i + 1, j: s.j }, mv.i_up);
            }
            row
        })
        .collect();
    TransitionMatrix { rows }
}

/// How a stationary vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    PowerIteration,
}

/// Stationary (or limiting) distribution of a reputation chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDist {
    pub probs: Vec<f64>,
    /// Number of closed communicating classes; 1 means the answer does not
    /// depend on the initial distribution.
    pub closed_classes: usize,
    /// `||vP - v||_inf` on the chain it was solved for.
    pub residual: f64,
    pub method: SolveMethod,
}

impl StationaryDist {
    pub fn is_unique(&self) -> bool {
        self.closed_classes == 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the most likely state (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = k;
            }
        }
        best
    }
}

fn binomial_half_pmf(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 0.5f64.powi(n as i32);
    for k in 0..n {
        p[k + 1] = p[k] * (n - k) as f64 / (k + 1) as f64;
    }
    p
}

/// Every player independently good with probability 1/2.
pub fn default_initial(grid: StateGrid) -> Vec<f64> {
    let px = binomial_half_pmf(grid.m);
    let py = binomial_half_pmf(grid.n_y);
    grid.states().map(|s| px[s.i] * py[s.j]).collect()
}

/// Stationary vector of the chain restricted to one closed class, in class order.
fn solve_closed_class(p: &TransitionMatrix, class: &[usize]) -> Result<Vec<f64>> {
    if class.len() == 1 {
        return Ok(vec![1.0]);
    }
    let n = class.len();
    let mut local = vec![usize::MAX; p.n()];
    for (k, &s) in class.iter().enumerate() {
        local[s] = k;
    }
    // (P_CC^T - I) v = 0, one equation swapped for v[pin] = 1.
    let mut base = Vec::with_capacity(6 * n);
    for (rl, &r) in class.iter().enumerate() {
        for &(c, v) in p.row(r) {
            let cl = local[c];
            if cl != usize::MAX {
                base.push((cl, rl, v));
            }
        }
        base.push((rl, rl, -1.0));
    }
    let solve_pinned = |pin: usize| -> Result<Vec<f64>> {
        let mut trip: Vec<_> = base.iter().copied().filter(|&(r, _, _)| r != pin).collect();
        trip.push((pin, pin, 1.0));
        let mut rhs = vec![0.0; n];
        rhs[pin] = 1.0;
        BandMatrix::from_triplets(n, &trip).solve(rhs)
    };
    let mut x = solve_pinned(n - 1)?;
    let peak = x
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc })
        .0;
    if peak != n - 1 {
        x = solve_pinned(peak)?;
    }
    for v in &mut x {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = x.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Singular(0));
    }
    Ok(x.into_iter().map(|v| v / total).collect())
}

fn direct_solve(p: &TransitionMatrix, initial: &[f64]) -> Result<(Vec<f64>, usize)> {
    let n = p.n();
    let classes = closed_classes(
        n,
        (0..n).flat_map(|r| p.row(r).iter().filter(|(_, v)| *v > 0.0).map(move |&(c, _)| (r, c))),
    );
    let mut v = vec![0.0; n];
    if classes.closed.len() == 1 {
        let class = &classes.closed[0];
        for (s, pv) in class.iter().zip(solve_closed_class(p, class)?) {
            v[*s] = pv;
        }
        return Ok((v, 1));
    }

    // Limit of initial * P^t: the mass each closed class ends up with, spread
    // by that class's own stationary vector.
    let mut class_of = vec![usize::MAX; n];
    for (ci, class) in classes.closed.iter().enumerate() {
        for &s in class {
            class_of[s] = ci;
        }
    }
    let mut mass: Vec<f64> = classes
        .closed
        .iter()
        .map(|class| class.iter().map(|&s| initial[s]).sum())
        .collect();
    let transient = &classes.transient;
    if !transient.is_empty() && transient.iter().any(|&t| initial[t] != 0.0) {
        let nt = transient.len();
        let mut local = vec![usize::MAX; n];
        for (k, &t) in transient.iter().enumerate() {
            local[t] = k;
        }
        // w (I - Q) = initial_T, solved in transposed form.
        let mut trip = Vec::with_capacity(6 * nt);
        for (rl, &r) in transient.iter().enumerate() {
            trip.push((rl, rl, 1.0));
            for &(c, pv) in p.row(r) {
                let cl = local[c];
                if cl != usize::MAX {
                    trip.push((cl, rl, -pv));
                }
            }
        }
        let rhs: Vec<f64> = transient.iter().map(|&t| initial[t]).collect();
        let w = BandMatrix::from_triplets(nt, &trip).solve(rhs)?;
        for (rl, &r) in transient.iter().enumerate() {
            for &(c, pv) in p.row(r) {
                if class_of[c] != usize::MAX {
                    mass[class_of[c]] += w[rl] * pv;
                }
            }
        }
    }
    for (ci, class) in classes.closed.iter().enumerate() {
        if mass[ci] == 0.0 {
            continue;
        }
        for (s, pv) in class.iter().zip(solve_closed_class(p, class)?) {
            v[*s] = mass[ci] * pv;
        }
    }
    Ok((v, classes.closed.len()))
}

fn power_iteration(p: &TransitionMatrix, initial: &[f64]) -> Result<Vec<f64>> {
    let mut v = initial.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let next = p.left_multiply(&v);
        residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if residual < POWER_ITERATION_TOL {
            let total: f64 = v.iter().sum();
            return Ok(v.into_iter().map(|x| x / total).collect());
        }
    }
    Err(Error::Convergence {
        iterations: POWER_ITERATION_CAP,
        residual,
    })
}

/// Stationary distribution of `p`.
///
/// With a single closed class the answer is unique and `initial` is ignored.
/// With several (the all-silent identity chain, for one) the result is the
/// long-run limit of `initial` pushed through the chain.
pub fn stationary(p: &TransitionMatrix, initial: &[f64]) -> Result<StationaryDist> {
    if initial.len() != p.n() {
        return Err(Error::InvalidArgument(format!(
            "initial distribution has {} entries, chain has {} states",
            initial.len(),
            p.n()
        )));
    }
    let total: f64 = initial.iter().sum();
    if initial.iter().any(|v| !(*v >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("initial distribution must be non-negative and sum to 1".into()));
    }
    let direct = direct_solve(p, initial);
    let n = p.n();
    let closed = match &direct {
        Ok((_, k)) => *k,
        Err(_) => 0,
    };
    if let Ok((v, k)) = direct {
        let residual = p.residual(&v);
        if residual < RESIDUAL_TOL {
            return Ok(StationaryDist {
                probs: v,
                closed_classes: k,
                residual,
                method: SolveMethod::Direct,
            });
        }
    }
    let v = power_iteration(p, initial)?;
    let residual = p.residual(&v);
    let closed_classes = if closed > 0 {
        closed
    } else {
        closed_classes(n, (0..n).flat_map(|r| p.row(r).iter().map(move |&(c, _)| (r, c)))).closed.len()
    };
    Ok(StationaryDist {
        probs: v,
        closed_classes,
        residual,
        method: SolveMethod::PowerIteration,
    })
}

/// Chain and stationary distribution of a population playing `strategy` only.
///
/// States are indexed by the good count `i = 0 ..= Z`.
pub fn monomorphic_chain(
    strategy: Strategy,
    norm: &SocialNorm,
    role: RoleAssignment,
    params: &Params,
) -> Result<(TransitionMatrix, StationaryDist)> {
    let setting = PairwiseSetting::monomorphic(strategy, *norm, role, *params);
    let p = transition_matrix(&setting);
    let init = default_initial(StateGrid::of(&setting));
    let v = stationary(&p, &init)?;
    Ok((p, v))
}

/// Stationary solution of a pairwise setting with the default initial distribution.
pub fn solve_setting(setting: &PairwiseSetting) -> Result<StationaryDist> {
    let p = transition_matrix(setting);
    stationary(&p, &default_initial(StateGrid::of(setting)))
}

/// `(m, i, j, probability)` rows for CSV export.
pub fn stationary_rows(grid: StateGrid, dist: &StationaryDist) -> Vec<(usize, usize, usize, f64)> {
    grid.states()
        .zip(&dist.probs)
        .map(|(s, p)| (grid.m, s.i, s.j, *p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::named_norms;
    use proptest::prelude::*;

    fn params(z: usize, eps: f64) -> Params {
        Params::new(z, eps, 0.01, 0.01, 0.6).unwrap()
    }

    fn setting(x: Strategy, y: Strategy, m: usize, norm: SocialNorm, role: RoleAssignment, p: Params) -> PairwiseSetting {
        PairwiseSetting::new(x, y, m, norm, role, p).unwrap()
    }

    #[test]
    fn observer_probabilities() {
        let p = params(4, 0.01);
        let sj = SocialNorm::STERN_JUDGING;
        let s = setting(Strategy::NNS, Strategy::FNS, 2, sj, RoleAssignment::Random, p);
        let ob = observer_event_probs(&s, RepState { i: 1, j: 1 });
        assert_eq!(ob.total(), 0.0);

        let s = setting(Strategy::FNR, Strategy::NNR, 2, sj, RoleAssignment::Random, p);
        let ob = observer_event_probs(&s, RepState { i: 1, j: 1 });
        assert_eq!((ob.x_good, ob.x_bad, ob.y_good, ob.y_bad), (0.25, 0.25, 0.25, 0.25));

        let s = setting(Strategy::FNR, Strategy::NNS, 4, sj, RoleAssignment::Random, p);
        let ob = observer_event_probs(&s, RepState { i: 4, j: 0 });
        assert_eq!((ob.x_good, ob.x_bad, ob.y_good, ob.y_bad), (1.0, 0.0, 0.0, 0.0));
    }

    // A few conditional moves written out in closed form, used to pin the
    // generic construction.
    fn reference_i_up_random_xb(s: &PairwiseSetting, i: f64, j: f64) -> f64 {
        let z = s.z() as f64;
        let m = s.m() as f64;
        let e = s.params.epsilon();
        let sb = s.norm.if_bad;
        let ig = s.strategy_x.fair_indicator(Reputation::Good);
        let ib = s.strategy_x.fair_indicator(Reputation::Bad);
        let fg = sb.weight(Action::Fair, Reputation::Good);
        let fb = sb.weight(Action::Fair, Reputation::Bad);
        let ng = sb.weight(Action::Unfair, Reputation::Good);
        let nb = sb.weight(Action::Unfair, Reputation::Bad);
        (m - i - 1.0) / (z - 1.0)
            * ((i + j) / (z - 2.0) * (ig * (1.0 - e) * fg + (ig * e + 1.0 - ig) * ng)
                + (z - 2.0 - i - j) / (z - 2.0) * (ib * (1.0 - e) * fb + (ib * e + 1.0 - ib) * nb))
    }

    fn reference_i_down_reputation_xg(s: &PairwiseSetting, i: f64, j: f64) -> f64 {
        let z = s.z() as f64;
        let e = s.params.epsilon();
        let sg = s.norm.if_good;
        let ig = s.strategy_x.fair_indicator(Reputation::Good);
        let ib = s.strategy_x.fair_indicator(Reputation::Bad);
        let fg = 1.0 - sg.weight(Action::Fair, Reputation::Good);
        let fb = 1.0 - sg.weight(Action::Fair, Reputation::Bad);
        let ng = 1.0 - sg.weight(Action::Unfair, Reputation::Good);
        let nb = 1.0 - sg.weight(Action::Unfair, Reputation::Bad);
        (i - 1.0) / (z - 1.0)
            * ((i + j - 2.0) / (z - 2.0) * (ig * (1.0 - e) * fg + (ig * e + 1.0 - ig) * ng)
                + 2.0 * (z - i - j) / (z - 2.0) * (ib * (1.0 - e) * fb + (ib * e + 1.0 - ib) * nb))
    }

    fn reference_j_up_reputation_yb(s: &PairwiseSetting, i: f64, j: f64) -> f64 {
        let z = s.z() as f64;
        let m = s.m() as f64;
        let e = s.params.epsilon();
        let sb = s.norm.if_bad;
        let ib = s.strategy_y.fair_indicator(Reputation::Bad);
        let fb = sb.weight(Action::Fair, Reputation::Bad);
        let nb = sb.weight(Action::Unfair, Reputation::Bad);
        (z - m - j - 1.0) / (z - 1.0) * (z - i - j - 2.0) / (z - 2.0) * (ib * (1.0 - e) * fb + (ib * e + 1.0 - ib) * nb)
    }

    #[test]
    fn matches_reference_conditional_forms() {
        // One reporting species plus an extreme state pins down which
        // observer event occurred.
        let p = params(9, 0.03);
        for norm in crate::norms::leading_eight() {
            for x in Strategy::ALL {
                // Y silent and i = 0: the only report comes from Ob=XB
                let s = setting(
                    Strategy::new(x.to_good, x.to_bad, crate::norms::Reporting::Report),
                    Strategy::NNS,
                    5,
                    norm,
                    RoleAssignment::Random,
                    p,
                );
                let st = RepState { i: 0, j: 2 };
                let mv = row_moves(&s, st);
                let ob = observer_event_probs(&s, st);
                let expect = ob.x_bad * reference_i_up_random_xb(&s, 0.0, 2.0);
                assert!((mv.i_up - expect).abs() < 1e-15, "{norm} {x}: {} vs {expect}", mv.i_up);

                // i = m forces Ob=XG among X reporters
                let mut s = s;
                s.role = RoleAssignment::ReputationBased;
                let st = RepState { i: 5, j: 1 };
                let mv = row_moves(&s, st);
                let ob = observer_event_probs(&s, st);
                let expect = ob.x_good * reference_i_down_reputation_xg(&s, 5.0, 1.0);
                assert!((mv.i_down - expect).abs() < 1e-15);

                // Y reporters, X silent, j = 0 forces Ob=YB
                let s = setting(
                    Strategy::NNS,
                    Strategy::new(x.to_good, x.to_bad, crate::norms::Reporting::Report),
                    5,
                    norm,
                    RoleAssignment::ReputationBased,
                    p,
                );
                let st = RepState { i: 2, j: 0 };
                let mv = row_moves(&s, st);
                let ob = observer_event_probs(&s, st);
                let expect = ob.y_bad * reference_j_up_reputation_yb(&s, 2.0, 0.0);
                assert!((mv.j_up - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn all_silent_is_identity() {
        let p = params(6, 0.01);
        for norm in named_norms() {
            for role in RoleAssignment::BOTH {
                let s = setting(Strategy::NFS, Strategy::FFS, 2, norm, role, p);
                let tm = transition_matrix(&s);
                assert!(tm.is_identity());
                let init = default_initial(StateGrid::of(&s));
                let v = stationary(&tm, &init).unwrap();
                assert_eq!(v.probs, init);
                assert_eq!(v.closed_classes, tm.n());
            }
        }
    }

    #[test]
    fn monomorphic_examples() {
        let p = Params::default();
        for role in RoleAssignment::BOTH {
            for norm in [SocialNorm::IMAGE_SCORING, SocialNorm::SHUNNING] {
                let (_, v) = monomorphic_chain(Strategy::FNR, &norm, role, &p).unwrap();
                assert!(v.probs[0] > 1.0 - 1e-12, "{norm} {role}: {}", v.probs[0]);
                assert!(v.is_unique());
            }
            let (_, v) = monomorphic_chain(Strategy::NNS, &SocialNorm::STERN_JUDGING, role, &p).unwrap();
            let binom = binomial_half_pmf(50);
            for (a, b) in v.probs.iter().zip(&binom) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let (_, v) = monomorphic_chain(Strategy::FNR, &SocialNorm::STERN_JUDGING, RoleAssignment::Random, &p).unwrap();
        assert_eq!(v.argmax(), 50);
        let (_, v) =
            monomorphic_chain(Strategy::FNR, &SocialNorm::STERN_JUDGING, RoleAssignment::ReputationBased, &p).unwrap();
        let peak = v.argmax();
        assert!(peak > 0 && peak < 50, "peak at {peak}");
    }

    #[test]
    fn no_absorbing_extremes_with_errors() {
        let p = Params::default();
        for norm in [SocialNorm::STERN_JUDGING, SocialNorm::SIMPLE_STANDING] {
            for role in RoleAssignment::BOTH {
                let (tm, _) = monomorphic_chain(Strategy::FNR, &norm, role, &p).unwrap();
                for r in [0, 50] {
                    assert!(tm.get(r, r) < 1.0, "{norm} {role} state {r} absorbing");
                }
            }
        }
    }

    #[test]
    fn stationary_rejects_bad_initial() {
        let tm = TransitionMatrix::identity(3);
        assert!(stationary(&tm, &[0.5, 0.5]).is_err());
        assert!(stationary(&tm, &[0.5, 0.6, -0.1]).is_err());
    }

    #[test]
    fn absorbing_mixture_limit() {
        // 0 and 2 absorbing, 1 splits evenly
        let tm = TransitionMatrix::from_rows(vec![
            vec![(0, 1.0)],
            vec![(0, 0.25), (1, 0.5), (2, 0.25)],
            vec![(2, 1.0)],
        ])
        .unwrap();
        let v = stationary(&tm, &[0.0, 1.0, 0.0]).unwrap();
        assert!((v.probs[0] - 0.5).abs() < 1e-15 && (v.probs[2] - 0.5).abs() < 1e-15);
        assert_eq!(v.closed_classes, 2);
    }

    #[test]
    fn power_iteration_agrees_with_direct() {
        let p = params(8, 0.05);
        let s = setting(Strategy::FNR, Strategy::NFR, 3, SocialNorm::STERN_JUDGING, RoleAssignment::ReputationBased, p);
        let tm = transition_matrix(&s);
        let init = default_initial(StateGrid::of(&s));
        let direct = stationary(&tm, &init).unwrap();
        let iter = power_iteration(&tm, &init).unwrap();
        for (a, b) in direct.probs.iter().zip(&iter) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn arb_setting() -> impl proptest::strategy::Strategy<Value = PairwiseSetting> {
        (3usize..9, 0.0f64..0.3, 0usize..8, 0usize..8, 0u8..16, 0u8..16, any::<bool>(), 0usize..100)
            .prop_map(|(z, eps, x, y, g, b, rep, mraw)| {
                let p = Params::new(z, eps, 0.01, 0.01, 0.6).unwrap();
                let norm = SocialNorm::new(crate::norms::NormVector::from_bits(g), crate::norms::NormVector::from_bits(b));
                let role = if rep { RoleAssignment::ReputationBased } else { RoleAssignment::Random };
                PairwiseSetting::new(Strategy::ALL[x], Strategy::ALL[y], mraw % (z + 1), norm, role, p).unwrap()
            })
    }

    use crate::norms::Strategy;
    use proptest::strategy::Strategy as _;

    proptest! {
        #[test]
        fn chain_is_row_stochastic_and_local(s in arb_setting()) {
            let tm = transition_matrix(&s);
            prop_assert!(tm.row_sum_error() < 1e-12);
            let grid = StateGrid::of(&s);
            for r in 0..tm.n() {
                let a = grid.state(r);
                for &(c, v) in tm.row(r) {
                    let b = grid.state(c);
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert!(a.i.abs_diff(b.i) + a.j.abs_diff(b.j) <= 1);
                }
            }
            let v = stationary(&tm, &default_initial(grid)).unwrap();
            prop_assert!(v.residual < 1e-10);
            prop_assert!(v.probs.iter().all(|p| *p >= 0.0));
            prop_assert!((v.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn relabelling_species_permutes_chain(s in arb_setting()) {
            let a = transition_matrix(&s);
            let w = s.swapped();
            let b = transition_matrix(&w);
            let ga = StateGrid::of(&s);
            let gb = StateGrid::of(&w);
            for r in 0..a.n() {
                let sr = ga.state(r);
                let rr = gb.index(RepState { i: sr.j, j: sr.i });
                for &(c, v) in a.row(r) {
                    let sc = ga.state(c);
                    let cc = gb.index(RepState { i: sc.j, j: sc.i });
                    prop_assert!((b.get(rr, cc) - v).abs() < 1e-14);
                }
            }
        }
    }
}
