//! Basic clopen sets `{t}`, `N_t` and `N_t \ ({t} ∪ ⋃_{j<i} N_{t⌢⟨j⟩})`,
//! and a decision procedure for finite basic covers of the whole space.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::{cone_member, for_each_bounded_node, Coord, DepthBudget, FiniteSeq, InfiniteSeq, Point};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasicClopen {
    Singleton { t: FiniteSeq },
    Cone { t: FiniteSeq },
    /// `N_t \ ({t} ∪ ⋃_{j<i} N_{t⌢⟨j⟩})`.
    ConeMinus { t: FiniteSeq, i: u64 },
}

impl BasicClopen {
    pub fn singleton(t: impl Into<FiniteSeq>) -> Self {
        BasicClopen::Singleton { t: t.into() }
    }

    pub fn cone(t: impl Into<FiniteSeq>) -> Self {
        BasicClopen::Cone { t: t.into() }
    }

    pub fn cone_minus(t: impl Into<FiniteSeq>, i: u64) -> Self {
        BasicClopen::ConeMinus { t: t.into(), i }
    }

    pub fn node(&self) -> &FiniteSeq {
        match self {
            BasicClopen::Singleton { t } | BasicClopen::Cone { t } | BasicClopen::ConeMinus { t, .. } => t,
        }
    }

    /// Exact membership.
    pub fn contains(&self, p: &Point, budget: &DepthBudget) -> Result<bool> {
        basic_member(self, p, budget)
    }
}

pub fn basic_member(b: &BasicClopen, p: &Point, budget: &DepthBudget) -> Result<bool> {
    match b {
        BasicClopen::Singleton { t } => Ok(matches!(p, Point::Finite(u) if u == t)),
        BasicClopen::Cone { t } => cone_member(t, p, budget),
        BasicClopen::ConeMinus { t, i } => {
            if matches!(p, Point::Infinite(InfiniteSeq::Oracle(_))) && t.len() + 1 > budget.depth {
                return Err(Error::budget(format!(
                    "membership in a cone minus at {t} needs depth {}",
                    t.len() + 1
                )));
            }
            if !cone_member(t, p, budget)? {
                return Ok(false);
            }
            Ok(match p.coordinate(t.len()) {
                None => false,
                Some(Coord::Infinity) => true,
                Some(Coord::Nat(j)) => j >= *i,
            })
        }
    }
}

/// A basic set containing `p` of diameter `< ε`.
pub fn neighborhood_of(
    p: &Point,
    eps: &Dyadic,
    schedule: &EpsilonSchedule,
    budget: &DepthBudget,
) -> Result<BasicClopen> {
    if eps.is_zero() {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    match p {
        Point::Finite(t) => Ok(BasicClopen::Singleton { t: t.clone() }),
        Point::Augmented(t) => Ok(BasicClopen::ConeMinus {
            t: t.clone(),
            i: schedule.child_threshold(t, eps)?,
        }),
        Point::Infinite(b) => {
            let limit = if b.is_finitely_described() {
                budget.depth.max(1 << 12)
            } else {
                budget.depth
            };
            (0..=limit)
                .map(|i| b.prefix(i))
                .find(|s| schedule.epsilon(s) < *eps)
                .map(|t| BasicClopen::Cone { t })
                .ok_or_else(|| Error::budget(format!("no cone below radius {eps} within depth {limit}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoverResult {
    Covers,
    Counterexample(Point),
}

/// `(D, M)`: one past the longest node and one past the largest entry or
/// child bound mentioned. Membership of any point in any member of the
/// family depends only on its first `D` coordinates, with entries clamped
/// at `M`.
fn profile_bounds(family: &[BasicClopen]) -> (usize, u64) {
    let d = 1 + family.iter().map(|b| b.node().len()).max().unwrap_or(0);
    let m = 1 + family
        .iter()
        .map(|b| {
            let e = b.node().max_entry().unwrap_or(0);
            match b {
                BasicClopen::ConeMinus { i, .. } => e.max(*i),
                _ => e,
            }
        })
        .max()
        .unwrap_or(0);
    (d, m)
}

fn covered(family: &[BasicClopen], p: &Point) -> bool {
    let budget = DepthBudget {
        depth: usize::MAX,
        branch: u64::MAX,
        steps: u64::MAX,
    };
    family
        .iter()
        .any(|b| basic_member(b, p, &budget).expect("representatives are finitely described"))
}

/// The representatives lying in `N_root`, in canonical order: `Finite(u)` then
/// `Augmented(u)` for `u ⊒ root` with `|u| ≤ D`, then `u⌢0^ω` for `|u| = D+1`.
fn first_uncovered_rep(family: &[BasicClopen], root: &FiniteSeq) -> Option<Point> {
    let (d, m) = profile_bounds(family);
    if root.len() > d {
        let p = Point::Finite(root.clone());
        return (!covered(family, &p)).then_some(p);
    }
    let mut found = None;
    let _ = for_each_bounded_node(d + 1 - root.len(), m + 1, |u| {
        let v = root.concat(u);
        for p in [Point::Finite(v.clone()), Point::Augmented(v)] {
            if !covered(family, &p) {
                found = Some(p);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if found.is_some() {
        return found;
    }
    let tail = d + 1 - root.len();
    let mut u = vec![0u64; tail];
    loop {
        let p = Point::zeros_after(&root.concat(&FiniteSeq::new(u.clone())));
        if !covered(family, &p) {
            return Some(p);
        }
        let mut k = tail;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if u[k] < m {
                u[k] += 1;
                break;
            }
            u[k] = 0;
        }
    }
}

/// Decides whether a finite family of basic sets covers ℕ^{≤ℕ}_*.
pub fn cover_decide(family: &[BasicClopen]) -> CoverResult {
    match first_uncovered_rep(family, &FiniteSeq::empty()) {
        None => CoverResult::Covers,
        Some(p) => CoverResult::Counterexample(p),
    }
}

/// Whether `N_t` is covered by the family.
pub fn cone_covered(family: &[BasicClopen], t: &FiniteSeq) -> bool {
    first_uncovered_rep(family, t).is_none()
}

/// Produces an uncovered point by descending from `⟨⟩`: stop at `t` or
/// `t⌢⟨∞⟩` if uncovered, otherwise move into the first child cone that is
/// not covered.
pub fn uncovered_descent(family: &[BasicClopen]) -> Result<Point> {
    if cover_decide(family) == CoverResult::Covers {
        return Err(Error::Precondition("the family covers the space".into()));
    }
    let (d, m) = profile_bounds(family);
    let mut t = FiniteSeq::empty();
    loop {
        for p in [Point::Finite(t.clone()), Point::Augmented(t.clone())] {
            if !covered(family, &p) {
                return Ok(p);
            }
        }
        // Children with index ≥ M all behave like the child M.
        let j = (0..=m)
            .find(|&j| !cone_covered(family, &t.child(j)))
            .ok_or_else(|| Error::Precondition(format!("every child cone of {t} is covered")))?;
        t = t.child(j);
        if t.len() > d + 1 {
            return Err(Error::Precondition("descent exceeded the profile depth".into()));
        }
    }
}

/// `X ∩ N_t` for a basic set `X`, which is `X`, `N_t` or empty.
pub fn intersect_cone(x: &BasicClopen, t: &FiniteSeq) -> Option<BasicClopen> {
    let r = x.node();
    if t.is_prefix_of(r) {
        return Some(x.clone());
    }
    if !r.is_prefix_of(t) {
        return None;
    }
    match x {
        BasicClopen::Singleton { .. } => None,
        BasicClopen::Cone { .. } => Some(BasicClopen::Cone { t: t.clone() }),
        BasicClopen::ConeMinus { i, .. } => {
            (t.get(r.len()).expect("proper prefix") >= *i).then(|| BasicClopen::Cone { t: t.clone() })
        }
    }
}

fn cone_complement(s: &FiniteSeq) -> Vec<BasicClopen> {
    let mut out = Vec::new();
    for k in 0..s.len() {
        let r = s.restrict(k);
        let a = s.get(k).expect("k < len");
        out.push(BasicClopen::Singleton { t: r.clone() });
        out.push(BasicClopen::ConeMinus { t: r.clone(), i: a + 1 });
        out.extend((0..a).map(|j| BasicClopen::Cone { t: r.child(j) }));
    }
    out
}

/// The complement of a basic set as a finite union of basic sets.
pub fn complement(x: &BasicClopen) -> Vec<BasicClopen> {
    let s = x.node();
    let mut out = cone_complement(s);
    match x {
        BasicClopen::Cone { .. } => {}
        BasicClopen::Singleton { .. } => out.push(BasicClopen::ConeMinus { t: s.clone(), i: 0 }),
        BasicClopen::ConeMinus { i, .. } => {
            out.push(BasicClopen::Singleton { t: s.clone() });
            out.extend((0..*i).map(|j| BasicClopen::Cone { t: s.child(j) }));
        }
    }
    out
}

/// `N_t \ X` as a finite union of basic sets.
pub fn complement_in_cone(x: &BasicClopen, t: &FiniteSeq) -> Vec<BasicClopen> {
    complement(x)
        .iter()
        .filter_map(|y| intersect_cone(y, t))
        .collect()
}
