//! The ultrametric `d(a, b) = max{ε_t : t ∈ {a↾min(|a|,i), b↾min(|b|,i)} ∩ ℕ^{<ℕ}}`
//! with `i = i(a, b)`, over a checked epsilon schedule.

use std::fmt;
use std::sync::Arc;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::sequences::{
    canonical_node, restrict, split_index, DepthBudget, FiniteSeq, Point, Split,
};

type Rule = dyn Fn(&FiniteSeq) -> Dyadic + Send + Sync;

/// A positive, `⊑`-decreasing assignment `t ↦ ε_t` tending to zero.
#[derive(Clone)]
pub struct EpsilonSchedule {
    name: String,
    rule: Arc<Rule>,
}

impl fmt::Debug for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpsilonSchedule({})", self.name)
    }
}

/// Default verification horizon for caller-supplied schedules.
pub const DEFAULT_CHECK_WEIGHT: u64 = 10;

impl EpsilonSchedule {
    /// Wraps `rule` after checking it on every node of weight `≤ check_weight`:
    /// positivity, `s ⊑ t ⟹ ε_t ≤ ε_s`, strictly decreasing level maxima, and
    /// `ε_{t⌢⟨j⟩}` strictly decreasing in `j`.
    pub fn new(
        name: impl Into<String>,
        check_weight: u64,
        rule: impl Fn(&FiniteSeq) -> Dyadic + Send + Sync + 'static,
    ) -> Result<Self> {
        let s = EpsilonSchedule {
            name: name.into(),
            rule: Arc::new(rule),
        };
        s.check(check_weight)?;
        Ok(s)
    }

    /// `ε_t = 2^{-w(t)}`.
    pub fn weight() -> Self {
        EpsilonSchedule {
            name: "weight".into(),
            rule: Arc::new(|t| Dyadic::pow2_neg(weight_u32(t))),
        }
    }

    /// `ε_t = 2^{-2w(t)}`.
    pub fn double_weight() -> Self {
        EpsilonSchedule {
            name: "double-weight".into(),
            rule: Arc::new(|t| Dyadic::pow2_neg(weight_u32(t).saturating_mul(2))),
        }
    }

    pub fn named(name: &str) -> Result<Self> {
        match name {
            "weight" => Ok(Self::weight()),
            "double-weight" => Ok(Self::double_weight()),
            other => Err(Error::Parse(format!("unknown schedule {other:?}"))),
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["weight", "double-weight"]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn epsilon(&self, t: &FiniteSeq) -> Dyadic {
        (self.rule)(t)
    }

    /// `ε_n := ε_{0^n}`, the level sequence used where only a length is known.
    pub fn level(&self, n: usize) -> Dyadic {
        self.epsilon(&FiniteSeq::new(vec![0; n]))
    }

    /// The least `i` with `ε_{t⌢⟨j⟩} < ε` for all `j ≥ i`.
    pub fn child_threshold(&self, t: &FiniteSeq, eps: &Dyadic) -> Result<u64> {
        const LIMIT: u64 = 1 << 16;
        for i in 0..LIMIT {
            if self.epsilon(&t.child(i)) < *eps {
                return Ok(i);
            }
        }
        Err(Error::budget(format!("no child threshold of {t} below {eps}")))
    }

    fn check(&self, w: u64) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(format!("schedule {}: {msg}", self.name)));
        let mut level_max: Vec<Option<Dyadic>> = vec![None; w.min(20) as usize + 1];
        for n in 0..1u64 << w.min(20) {
            let t = &canonical_node(n);
            let e = self.epsilon(t);
            if e.is_zero() {
                return bad(format!("ε_{t} is not positive"));
            }
            if let Some(p) = t.parent() {
                if self.epsilon(&p) < e {
                    return bad(format!("ε_{t} exceeds ε_{p}"));
                }
                let j = t.last().unwrap_or(0);
                if j > 0 && self.epsilon(&p.child(j - 1)) <= e {
                    return bad(format!("children of {p} not strictly decreasing at {j}"));
                }
            }
            let slot = &mut level_max[t.weight() as usize];
            if slot.as_ref().is_none_or(|m| *m < e) {
                *slot = Some(e);
            }
        }
        for k in 1..level_max.len() {
            if let (Some(a), Some(b)) = (&level_max[k - 1], &level_max[k]) {
                if b >= a {
                    return bad(format!("level maxima do not decrease at weight {k}"));
                }
            }
        }
        Ok(())
    }

    /// Runs the constructor checks on an existing schedule.
    pub fn verify(&self, check_weight: u64) -> Result<()> {
        self.check(check_weight)
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self::weight()
    }
}

fn weight_u32(t: &FiniteSeq) -> u32 {
    u32::try_from(t.weight()).unwrap_or(u32::MAX)
}

/// A distance, exact or bounded above when the split was not found in budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceResult {
    Exact(Dyadic),
    Bounded(Dyadic),
}

impl DistanceResult {
    pub fn exact(&self) -> Option<&Dyadic> {
        match self {
            DistanceResult::Exact(d) => Some(d),
            DistanceResult::Bounded(_) => None,
        }
    }

    /// An upper bound valid in both cases.
    pub fn upper(&self) -> &Dyadic {
        match self {
            DistanceResult::Exact(d) | DistanceResult::Bounded(d) => d,
        }
    }

    /// The exact value, or a budget error.
    pub fn require_exact(self) -> Result<Dyadic> {
        match self {
            DistanceResult::Exact(d) => Ok(d),
            DistanceResult::Bounded(u) => Err(Error::budget(format!(
                "distance undetermined at budget depth (bounded by {u})"
            ))),
        }
    }
}

pub fn epsilon(schedule: &EpsilonSchedule, t: &FiniteSeq) -> Dyadic {
    schedule.epsilon(t)
}

pub fn distance(a: &Point, b: &Point, schedule: &EpsilonSchedule, budget: &DepthBudget) -> DistanceResult {
    if a == b {
        return DistanceResult::Exact(Dyadic::zero());
    }
    match split_index(a, b, budget) {
        Split::At(i) => {
            let pick = |p: &Point| {
                let len = p.len().map_or(i, |l| l.min(i));
                restrict(p, len, &DepthBudget { depth: len, ..*budget })
                    .ok()
                    .and_then(|r| r.as_node().cloned())
            };
            let d = [pick(a), pick(b)]
                .into_iter()
                .flatten()
                .map(|t| schedule.epsilon(&t))
                .max();
            // The ∞ coordinate is always last and i(a, b) never passes the
            // first real disagreement, so at most one candidate is dropped.
            DistanceResult::Exact(d.expect("distinct points leave a finite candidate"))
        }
        Split::Undetermined(k) => {
            if a.decision_horizon(b).is_some() {
                return DistanceResult::Exact(Dyadic::zero());
            }
            DistanceResult::Bounded(schedule.epsilon(&a.node_prefix(k)))
        }
    }
}

/// `d(center, p) < radius`, or `None` when a bounded distance cannot settle it.
pub fn ball_member(
    center: &Point,
    radius: &Dyadic,
    p: &Point,
    schedule: &EpsilonSchedule,
    budget: &DepthBudget,
) -> Option<bool> {
    match distance(center, p, schedule, budget) {
        DistanceResult::Exact(d) => Some(d < *radius),
        DistanceResult::Bounded(u) => (u < *radius).then_some(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u64]) -> FiniteSeq {
        FiniteSeq::from(v)
    }

    fn d(x: &str) -> Dyadic {
        x.parse().unwrap()
    }

    #[test]
    fn default_schedule_values() {
        let e = EpsilonSchedule::weight();
        assert_eq!(e.epsilon(&s(&[])), d("1"));
        assert_eq!(e.epsilon(&s(&[0])), d("1/2"));
        assert_eq!(e.epsilon(&s(&[0, 5])), d("2^-7"));
    }

    #[test]
    fn distance_examples() {
        let e = EpsilonSchedule::weight();
        let b = DepthBudget::default();
        let p = Point::Augmented(s(&[3]));
        assert_eq!(distance(&p, &p, &e, &b), DistanceResult::Exact(d("0")));
        let exact = |x: &Point, y: &Point| distance(x, y, &e, &b).exact().unwrap().clone();
        assert_eq!(exact(&Point::Finite(s(&[])), &Point::Finite(s(&[0]))), d("1"));
        assert_eq!(exact(&Point::zeros(), &Point::Finite(s(&[0]))), d("1/2"));
        assert_eq!(exact(&Point::Augmented(s(&[0])), &Point::Finite(s(&[0, 5]))), d("2^-7"));
    }

    #[test]
    fn ball_examples() {
        let e = EpsilonSchedule::weight();
        let b = DepthBudget::default();
        let c = Point::Finite(s(&[0]));
        let r = e.epsilon(&s(&[0]));
        assert_eq!(ball_member(&c, &r, &c, &e, &b), Some(true));
        assert_eq!(ball_member(&c, &r, &Point::Finite(s(&[0, 0])), &e, &b), Some(false));
        let a = Point::Augmented(s(&[]));
        assert_eq!(ball_member(&a, &d("2^-3"), &Point::Finite(s(&[4])), &e, &b), Some(true));
    }

    #[test]
    fn named_schedules_pass_checks() {
        for n in EpsilonSchedule::names() {
            EpsilonSchedule::named(n).unwrap().verify(DEFAULT_CHECK_WEIGHT).unwrap();
        }
        assert!(EpsilonSchedule::named("nope").is_err());
    }

    #[test]
    fn constructor_rejects_bad_schedules() {
        assert!(EpsilonSchedule::new("flat", 6, |_| Dyadic::one()).is_err());
        assert!(EpsilonSchedule::new("zero", 6, |_| Dyadic::zero()).is_err());
        let growing = EpsilonSchedule::new("len", 6, |t: &FiniteSeq| {
            Dyadic::pow2_neg(t.len() as u32 * 3).mul_u64(1 + t.entry_sum())
        });
        assert!(growing.is_err());
        assert!(EpsilonSchedule::new("ok", 6, |t: &FiniteSeq| Dyadic::pow2_neg(3 * t.weight() as u32)).is_ok());
    }

    #[test]
    fn child_threshold_default() {
        let e = EpsilonSchedule::weight();
        assert_eq!(e.child_threshold(&s(&[]), &d("2^-2")).unwrap(), 2);
        assert_eq!(e.child_threshold(&s(&[1]), &d("1")).unwrap(), 0);
    }
}
