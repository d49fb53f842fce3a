//! Social norms, dictator strategies and reputation assessment.
//!
//! A norm is a pair of assessment vectors. The first is consulted when the
//! dictator currently has a good reputation, the second when it is bad. Each
//! vector is indexed by the realized action (fair or unfair split) and the
//! recipient's reputation and says whether the observer labels the dictator
//! good (`1`) or bad (`0`).
//!
//! Norms print and parse as bitstrings in the `F_G F_B N_G N_B` order, e.g.
//! `1001/1001` for stern judging. A single four-bit half is read as a
//! second-order norm.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Public reputation of a player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reputation {
    Good,
    Bad,
}

impl Reputation {
    pub fn is_good(self) -> bool {
        self == Reputation::Good
    }

    pub fn from_good(good: bool) -> Self {
        if good {
            Reputation::Good
        } else {
            Reputation::Bad
        }
    }
}

/// Realized dictator action: a 50-50 split or a 100-0 split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Fair,
    Unfair,
}

/// Observer behaviour: share the assessment (paying the reporting cost) or stay silent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reporting {
    Report,
    Silent,
}

/// One assessment vector `(F_G, F_B, N_G, N_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormVector {
    pub fair_good: bool,
    pub fair_bad: bool,
    pub unfair_good: bool,
    pub unfair_bad: bool,
}

impl NormVector {
    pub const fn new(fair_good: bool, fair_bad: bool, unfair_good: bool, unfair_bad: bool) -> Self {
        NormVector {
            fair_good,
            fair_bad,
            unfair_good,
            unfair_bad,
        }
    }

    /// Builds a vector from four bits in `F_G F_B N_G N_B` order; the most
    /// significant of the four bits is `F_G`.
    pub const fn from_bits(bits: u8) -> Self {
        NormVector::new(bits & 0b1000 != 0, bits & 0b0100 != 0, bits & 0b0010 != 0, bits & 0b0001 != 0)
    }

    pub const fn bits(self) -> u8 {
        ((self.fair_good as u8) << 3)
            | ((self.fair_bad as u8) << 2)
            | ((self.unfair_good as u8) << 1)
            | (self.unfair_bad as u8)
    }

    /// Whether taking `action` against a recipient with reputation `recipient` is judged good.
    pub fn judges_good(self, action: Action, recipient: Reputation) -> bool {
        match (action, recipient) {
            (Action::Fair, Reputation::Good) => self.fair_good,
            (Action::Fair, Reputation::Bad) => self.fair_bad,
            (Action::Unfair, Reputation::Good) => self.unfair_good,
            (Action::Unfair, Reputation::Bad) => self.unfair_bad,
        }
    }

    /// Entry as 0.0/1.0 for use inside probability expressions.
    pub fn weight(self, action: Action, recipient: Reputation) -> f64 {
        if self.judges_good(action, recipient) {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for NormVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.bits())
    }
}

impl FromStr for NormVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s.len() != 4 {
            return Err(bad("expected four characters of 0/1"));
        }
        let mut bits = 0u8;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(bad("expected only 0 or 1")),
            }
        }
        Ok(NormVector::from_bits(bits))
    }
}

/// A third-order social norm `(S^G, S^B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SocialNorm {
    /// Applied when the dictator's current reputation is good.
    pub if_good: NormVector,
    /// Applied when the dictator's current reputation is bad.
    pub if_bad: NormVector,
}

impl SocialNorm {
    pub const STERN_JUDGING: SocialNorm = SocialNorm::second_order(NormVector::from_bits(0b1001));
    pub const SIMPLE_STANDING: SocialNorm = SocialNorm::second_order(NormVector::from_bits(0b1101));
    pub const IMAGE_SCORING: SocialNorm = SocialNorm::second_order(NormVector::from_bits(0b1100));
    pub const SHUNNING: SocialNorm = SocialNorm::second_order(NormVector::from_bits(0b1000));

    pub const fn new(if_good: NormVector, if_bad: NormVector) -> Self {
        SocialNorm { if_good, if_bad }
    }

    pub const fn second_order(v: NormVector) -> Self {
        SocialNorm { if_good: v, if_bad: v }
    }

    pub fn is_second_order(&self) -> bool {
        self.if_good == self.if_bad
    }

    /// The vector consulted for a dictator whose reputation is `prior`.
    pub fn vector(&self, prior: Reputation) -> NormVector {
        match prior {
            Reputation::Good => self.if_good,
            Reputation::Bad => self.if_bad,
        }
    }

    /// Conventional name for the four second-order norms that have one.
    pub fn common_name(&self) -> Option<&'static str> {
        NAMED
            .iter()
            .find(|(_, n)| n == self)
            .map(|(name, _)| *name)
    }
}

/// New reputation of a dictator after an observer applies `norm`.
pub fn assess(norm: &SocialNorm, prior: Reputation, action: Action, recipient: Reputation) -> Reputation {
    Reputation::from_good(norm.vector(prior).judges_good(action, recipient))
}

impl fmt::Display for SocialNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.if_good, self.if_bad)
    }
}

impl FromStr for SocialNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(SocialNorm::second_order(s.parse()?)),
            Some((g, b)) => Ok(SocialNorm::new(g.parse()?, b.parse()?)),
        }
    }
}

const NAMED: [(&str, SocialNorm); 4] = [
    ("stern_judging", SocialNorm::STERN_JUDGING),
    ("simple_standing", SocialNorm::SIMPLE_STANDING),
    ("image_scoring", SocialNorm::IMAGE_SCORING),
    ("shunning", SocialNorm::SHUNNING),
];

/// Looks up one of the four named second-order norms.
///
/// Accepts the snake-case names as well as the abbreviations `sj`, `ss`,
/// `is` and `sh`.
pub fn named_norm(name: &str) -> Result<SocialNorm> {
    let key = name.trim().to_ascii_lowercase().replace('-', "_");
    let key = match key.as_str() {
        "sj" => "stern_judging",
        "ss" => "simple_standing",
        "is" => "image_scoring",
        "sh" => "shunning",
        other => other,
    };
    NAMED
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, norm)| *norm)
        .ok_or_else(|| Error::UnknownNorm(name.to_string()))
}

/// The four named norms in the order stern judging, simple standing, image
/// scoring, shunning.
pub fn named_norms() -> [SocialNorm; 4] {
    NAMED.map(|(_, n)| n)
}

/// The leading eight.
///
/// Every member judges a fair split to a good recipient good, an unfair split
/// to a good recipient bad, and (for good dictators) an unfair split to a bad
/// recipient good. `S^G` is stern judging's or simple standing's vector and
/// `S^B` ranges over the four vectors of the form `(1, *, 0, *)`.
pub fn leading_eight() -> Vec<SocialNorm> {
    let sj = NormVector::from_bits(0b1001);
    let ss = NormVector::from_bits(0b1101);
    let is = NormVector::from_bits(0b1100);
    let sh = NormVector::from_bits(0b1000);
    vec![
        SocialNorm::new(sj, sj),
        SocialNorm::new(ss, ss),
        SocialNorm::new(ss, sj),
        SocialNorm::new(sj, ss),
        SocialNorm::new(sj, is),
        SocialNorm::new(sj, sh),
        SocialNorm::new(ss, is),
        SocialNorm::new(ss, sh),
    ]
}

/// All sixteen second-order norms, ordered by bit pattern `0000` .. `1111`.
pub fn all_second_order() -> Vec<SocialNorm> {
    (0u8..16).map(|b| SocialNorm::second_order(NormVector::from_bits(b))).collect()
}

/// A dictator/observer strategy `s_G s_B s_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    /// Action intended against a good recipient.
    pub to_good: Action,
    /// Action intended against a bad recipient.
    pub to_bad: Action,
    pub reporting: Reporting,
}

impl Strategy {
    pub const FFR: Strategy = Strategy::new(Action::Fair, Action::Fair, Reporting::Report);
    pub const FFS: Strategy = Strategy::new(Action::Fair, Action::Fair, Reporting::Silent);
    pub const FNR: Strategy = Strategy::new(Action::Fair, Action::Unfair, Reporting::Report);
    pub const FNS: Strategy = Strategy::new(Action::Fair, Action::Unfair, Reporting::Silent);
    pub const NFR: Strategy = Strategy::new(Action::Unfair, Action::Fair, Reporting::Report);
    pub const NFS: Strategy = Strategy::new(Action::Unfair, Action::Fair, Reporting::Silent);
    pub const NNR: Strategy = Strategy::new(Action::Unfair, Action::Unfair, Reporting::Report);
    pub const NNS: Strategy = Strategy::new(Action::Unfair, Action::Unfair, Reporting::Silent);

    /// Every strategy in the fixed order used for matrix indices and CSV columns.
    pub const ALL: [Strategy; 8] = [
        Strategy::FFR,
        Strategy::FFS,
        Strategy::FNR,
        Strategy::FNS,
        Strategy::NFR,
        Strategy::NFS,
        Strategy::NNR,
        Strategy::NNS,
    ];

    pub const fn new(to_good: Action, to_bad: Action, reporting: Reporting) -> Self {
        Strategy {
            to_good,
            to_bad,
            reporting,
        }
    }

    /// Position in [`Strategy::ALL`].
    pub fn index(self) -> usize {
        (matches!(self.to_good, Action::Unfair) as usize) * 4
            + (matches!(self.to_bad, Action::Unfair) as usize) * 2
            + (matches!(self.reporting, Reporting::Silent) as usize)
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        Strategy::ALL.get(idx).copied()
    }

    /// Intended action against a recipient of the given reputation.
    pub fn intended(self, recipient: Reputation) -> Action {
        match recipient {
            Reputation::Good => self.to_good,
            Reputation::Bad => self.to_bad,
        }
    }

    /// `I(s_M)`: 1 when the strategy intends a fair split against reputation `M`.
    pub fn fair_indicator(self, recipient: Reputation) -> f64 {
        fair_indicator(self.intended(recipient))
    }

    /// `E(s_R)`: 1 for reporters.
    pub fn reports(self) -> bool {
        self.reporting == Reporting::Report
    }

    pub fn report_indicator(self) -> f64 {
        if self.reports() {
            1.0
        } else {
            0.0
        }
    }

    /// Probability that the realized action is fair, given implementation error `epsilon`.
    pub fn fair_prob(self, recipient: Reputation, epsilon: f64) -> f64 {
        self.fair_indicator(recipient) * (1.0 - epsilon)
    }

    pub fn name(self) -> &'static str {
        ["FFR", "FFS", "FNR", "FNS", "NFR", "NFS", "NNR", "NNS"][self.index()]
    }
}

/// `I(x)`: 1 for a fair split.
pub fn fair_indicator(action: Action) -> f64 {
    match action {
        Action::Fair => 1.0,
        Action::Unfair => 0.0,
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Strategy::ALL
            .iter()
            .copied()
            .find(|st| st.name() == upper)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "expected a three-letter strategy such as FNR".to_string(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use super::Strategy;

    #[test]
    fn assess_examples() {
        let sj = named_norm("stern_judging").unwrap();
        assert_eq!(assess(&sj, Reputation::Good, Action::Fair, Reputation::Good), Reputation::Good);
        let sh = named_norm("shunning").unwrap();
        assert_eq!(assess(&sh, Reputation::Good, Action::Unfair, Reputation::Bad), Reputation::Bad);
        let mixed: SocialNorm = "1101/1001".parse().unwrap();
        assert_eq!(assess(&mixed, Reputation::Bad, Action::Fair, Reputation::Bad), Reputation::Bad);
        // the same action judged by S^G instead
        assert_eq!(assess(&mixed, Reputation::Good, Action::Fair, Reputation::Bad), Reputation::Good);
    }

    #[test]
    fn named_vectors() {
        assert_eq!(named_norm("stern_judging").unwrap().to_string(), "1001/1001");
        assert_eq!(named_norm("image_scoring").unwrap().to_string(), "1100/1100");
        assert_eq!(named_norm("simple_standing").unwrap().to_string(), "1101/1101");
        assert_eq!(named_norm("SH").unwrap().to_string(), "1000/1000");
        assert!(matches!(named_norm("tit_for_tat"), Err(Error::UnknownNorm(_))));
    }

    #[test]
    fn leading_eight_catalog() {
        let l8 = leading_eight();
        assert_eq!(l8.len(), 8);
        let mut dedup = l8.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
        assert_eq!(l8[0], SocialNorm::STERN_JUDGING);
        assert!(l8.contains(&SocialNorm::SIMPLE_STANDING));
        assert!(l8.contains(&"1001/1101".parse().unwrap()));
        for n in &l8 {
            let g = n.if_good;
            assert!(g.fair_good && !g.unfair_good && g.unfair_bad);
            assert!(n.if_bad.fair_good && !n.if_bad.unfair_good);
        }
        let second: Vec<_> = all_second_order();
        let common: Vec<_> = l8.iter().filter(|n| second.contains(n)).collect();
        assert_eq!(common, vec![&SocialNorm::STERN_JUDGING, &SocialNorm::SIMPLE_STANDING]);
    }

    #[test]
    fn second_order_catalog() {
        let all = all_second_order();
        assert_eq!(all.len(), 16);
        assert!(all.contains(&SocialNorm::SHUNNING));
        assert!(all.iter().all(SocialNorm::is_second_order));
    }

    #[test]
    fn norm_parse_errors() {
        assert!("100".parse::<SocialNorm>().is_err());
        assert!("1002".parse::<SocialNorm>().is_err());
        assert!("1001/10".parse::<SocialNorm>().is_err());
        assert!("1001/1001/1001".parse::<SocialNorm>().is_err());
        assert_eq!("1001".parse::<SocialNorm>().unwrap(), SocialNorm::STERN_JUDGING);
    }

    #[test]
    fn strategy_order_and_indicators() {
        let names: Vec<_> = Strategy::ALL.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["FFR", "FFS", "FNR", "FNS", "NFR", "NFS", "NNR", "NNS"]);
        for (i, s) in Strategy::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(s.name().parse::<Strategy>().unwrap(), *s);
        }
        assert_eq!(Strategy::FNR.fair_indicator(Reputation::Good), 1.0);
        assert_eq!(Strategy::FNR.fair_indicator(Reputation::Bad), 0.0);
        assert!(Strategy::NFR.reports());
        assert!(!Strategy::NFS.reports());
    }

    proptest! {
        #[test]
        fn second_order_ignores_prior(bits in 0u8..16, fair in any::<bool>(), good in any::<bool>()) {
            let norm = SocialNorm::second_order(NormVector::from_bits(bits));
            let action = if fair { Action::Fair } else { Action::Unfair };
            let rec = Reputation::from_good(good);
            prop_assert_eq!(
                assess(&norm, Reputation::Good, action, rec),
                assess(&norm, Reputation::Bad, action, rec)
            );
        }

        #[test]
        fn norm_string_round_trip(g in 0u8..16, b in 0u8..16) {
            let norm = SocialNorm::new(NormVector::from_bits(g), NormVector::from_bits(b));
            prop_assert_eq!(norm.to_string().parse::<SocialNorm>().unwrap(), norm);
        }
    }
}
