//! Built-in functions, tree sets and families, addressable by name so that
//! traces can be replayed.

use std::sync::Arc;

use crate::dyadic::Dyadic;
use crate::enumeration::canonical_index;
use crate::error::{Error, Result};
use crate::sequences::{split_index, DepthBudget, FiniteSeq, InfiniteSeq, Point, Split};

use super::oracle::{standard_value_distance, Func, SampleKind, SpaceFunction, TreeFamily, TreeSetOracle, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    Constant,
    IdentityBaire,
    IdentityStar,
    SplitIdentity,
    Prefix0,
    FirstEntry,
    Baire0Aug1,
    AugInvLength,
    AugSum,
    AugLastPow,
    AugLast,
    AugWeightPow,
    AugLength,
    AugRank,
}

const FUNCTIONS: &[(&str, Builtin, &str)] = &[
    ("constant", Builtin::Constant, "the scalar 0 everywhere"),
    ("identity-baire", Builtin::IdentityBaire, "the identity on ℕ^ℕ, valued in ℕ^ℕ with 2^-|p∧q|"),
    ("identity-star", Builtin::IdentityStar, "the identity on ℕ^ℕ_*"),
    ("split-identity", Builtin::SplitIdentity, "the identity on ℕ^ℕ, ⟨1⟩⌢⟨∞⟩ at every augmented point"),
    ("prefix0", Builtin::Prefix0, "p ↦ ⟨0⟩⌢p on ℕ^ℕ_*"),
    ("first-entry", Builtin::FirstEntry, "the first entry as a scalar (0 at ⟨∞⟩)"),
    ("baire0-aug1", Builtin::Baire0Aug1, "0 on ℕ^ℕ, 1 on augmented points"),
    ("aug-inv-length", Builtin::AugInvLength, "0 on ℕ^ℕ, 2^-|t| at t⌢⟨∞⟩"),
    ("aug-sum", Builtin::AugSum, "entry sum of t at t⌢⟨∞⟩"),
    ("aug-last-pow", Builtin::AugLastPow, "2^-last(t) at t⌢⟨∞⟩ (1 at ⟨∞⟩)"),
    ("aug-last", Builtin::AugLast, "last entry of t at t⌢⟨∞⟩ (0 at ⟨∞⟩)"),
    ("aug-weight-pow", Builtin::AugWeightPow, "2^-w(t) at t⌢⟨∞⟩"),
    ("aug-length", Builtin::AugLength, "|t| at t⌢⟨∞⟩"),
    ("aug-rank", Builtin::AugRank, "canonical index of t at t⌢⟨∞⟩"),
];

fn scalar(d: Dyadic) -> Value {
    Value::Scalar(d)
}

fn pow2(n: u64) -> Dyadic {
    Dyadic::pow2_neg(u32::try_from(n).unwrap_or(u32::MAX))
}

struct Registered {
    name: &'static str,
    kind: Builtin,
}

impl SpaceFunction for Registered {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn eval(&self, p: &Point) -> Result<Value> {
        use Builtin::*;
        let outside = || Error::domain(format!("{} is not defined at {p:?}", self.name));
        if p.is_finite() {
            return Err(outside());
        }
        if let Point::Infinite(b) = p {
            return match self.kind {
                Constant | Baire0Aug1 | AugInvLength => Ok(scalar(Dyadic::zero())),
                IdentityBaire | IdentityStar | SplitIdentity => Ok(Value::Point(p.clone())),
                Prefix0 => Ok(Value::Point(prefix0(b)?)),
                FirstEntry => Ok(Value::nat(b.coordinate(0))),
                _ => Err(outside()),
            };
        }
        let Point::Augmented(t) = p else { unreachable!() };
        Ok(match self.kind {
            Constant => scalar(Dyadic::zero()),
            IdentityBaire => return Err(outside()),
            IdentityStar => Value::Point(p.clone()),
            SplitIdentity => Value::Point(Point::Augmented(FiniteSeq::from([1]))),
            Prefix0 => Value::Point(Point::Augmented(FiniteSeq::from([0]).concat(t))),
            FirstEntry => Value::nat(t.get(0).unwrap_or(0)),
            Baire0Aug1 => Value::nat(1),
            AugInvLength => scalar(pow2(t.len() as u64)),
            AugSum => Value::nat(t.entry_sum()),
            AugLastPow => scalar(pow2(t.last().unwrap_or(0))),
            AugLast => Value::nat(t.last().unwrap_or(0)),
            AugWeightPow => scalar(pow2(t.weight())),
            AugLength => Value::nat(t.len() as u64),
            AugRank => Value::nat(
                canonical_index(t).ok_or_else(|| Error::budget(format!("canonical index of {t} overflows")))?,
            ),
        })
    }

    fn cone_diameter(&self, t: &FiniteSeq) -> Option<Dyadic> {
        use Builtin::*;
        match self.kind {
            Constant | Baire0Aug1 | AugInvLength => Some(Dyadic::zero()),
            IdentityBaire => Some(pow2(t.len() as u64)),
            IdentityStar | SplitIdentity => Some(pow2(t.weight() + 1)),
            Prefix0 => Some(pow2(t.weight() + 2)),
            FirstEntry => (!t.is_empty()).then(Dyadic::zero),
            _ => None,
        }
    }

    fn value_distance(&self, a: &Value, b: &Value) -> Result<Dyadic> {
        match (self.kind, a, b) {
            (Builtin::IdentityBaire, Value::Point(p), Value::Point(q)) => baire_distance(p, q),
            _ => standard_value_distance(a, b),
        }
    }

    fn limit_hint(&self, u: &FiniteSeq, kind: SampleKind) -> Option<Value> {
        use Builtin::*;
        match (self.kind, kind) {
            (Constant, _) => Some(scalar(Dyadic::zero())),
            (IdentityStar, _) => Some(Value::Point(Point::Augmented(u.clone()))),
            (SplitIdentity, SampleKind::Baire) => Some(Value::Point(Point::Augmented(u.clone()))),
            (SplitIdentity, SampleKind::Augmented) => Some(Value::Point(Point::Augmented(FiniteSeq::from([1])))),
            (Prefix0, _) => Some(Value::Point(Point::Augmented(FiniteSeq::from([0]).concat(u)))),
            (FirstEntry, _) => u.get(0).map(Value::nat),
            (Baire0Aug1, SampleKind::Baire) | (AugInvLength, SampleKind::Baire) => Some(scalar(Dyadic::zero())),
            (Baire0Aug1, SampleKind::Augmented) => Some(Value::nat(1)),
            (AugInvLength, SampleKind::Augmented) => Some(scalar(pow2(u.len() as u64 + 1))),
            (AugLastPow, SampleKind::Augmented) | (AugWeightPow, SampleKind::Augmented) => {
                Some(scalar(Dyadic::zero()))
            }
            (AugLength, SampleKind::Augmented) => Some(Value::nat(u.len() as u64 + 1)),
            _ => None,
        }
    }
}

/// `2^{-|p ∧ q|}`, the usual ultrametric on ℕ^ℕ.
fn baire_distance(p: &Point, q: &Point) -> Result<Dyadic> {
    let budget = DepthBudget {
        depth: 64,
        branch: u64::MAX,
        steps: u64::MAX,
    };
    match split_index(p, q, &budget) {
        Split::At(i) => Ok(pow2(i as u64 - 1)),
        Split::Undetermined(_) if p.decision_horizon(q).is_some() => Ok(Dyadic::zero()),
        Split::Undetermined(k) => Err(Error::budget(format!("points agree to depth {k}"))),
    }
}

fn prefix0(b: &InfiniteSeq) -> Result<Point> {
    match b {
        InfiniteSeq::Periodic { head, period } => Point::periodic(FiniteSeq::from([0]).concat(head), period.clone()),
        InfiniteSeq::Oracle(_) => Err(Error::domain("prefix0 takes finitely described points")),
    }
}

/// Looks up a built-in function by name.
pub fn function(name: &str) -> Result<Func> {
    FUNCTIONS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(name, kind, _)| Arc::new(Registered { name, kind }) as Func)
        .ok_or_else(|| Error::Parse(format!("unknown function {name:?}")))
}

/// `(name, description)` of every built-in function.
pub fn function_names() -> Vec<(&'static str, &'static str)> {
    FUNCTIONS.iter().map(|(n, _, d)| (*n, *d)).collect()
}

struct NamedSet {
    name: &'static str,
    member: fn(&FiniteSeq) -> bool,
    hint: Option<fn(&FiniteSeq) -> FiniteSeq>,
}

impl TreeSetOracle for NamedSet {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn member(&self, t: &FiniteSeq) -> bool {
        (self.member)(t)
    }

    fn dense_extension(&self, r: &FiniteSeq) -> Option<FiniteSeq> {
        self.hint.map(|h| h(r))
    }
}

pub fn tree_set(name: &str) -> Result<Arc<dyn TreeSetOracle>> {
    let set = match name {
        "all" => NamedSet {
            name: "all",
            member: |_| true,
            hint: Some(|r| r.clone()),
        },
        "even-sum" => NamedSet {
            name: "even-sum",
            member: |t| t.entry_sum() % 2 == 0,
            hint: Some(|r| if r.entry_sum() % 2 == 0 { r.clone() } else { r.child(1) }),
        },
        "len-le-1" => NamedSet {
            name: "len-le-1",
            member: |t| t.len() <= 1,
            hint: None,
        },
        other => return Err(Error::Parse(format!("unknown tree set {other:?}"))),
    };
    Ok(Arc::new(set))
}

pub fn tree_set_names() -> &'static [&'static str] {
    &["all", "even-sum", "len-le-1"]
}

struct NamedFamily {
    name: &'static str,
    member: fn(usize, &FiniteSeq) -> bool,
    hint: Option<fn(usize, &FiniteSeq) -> FiniteSeq>,
}

impl TreeFamily for NamedFamily {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn member(&self, n: usize, t: &FiniteSeq) -> bool {
        (self.member)(n, t)
    }

    fn dense_extension(&self, n: usize, r: &FiniteSeq) -> Option<FiniteSeq> {
        self.hint.map(|h| h(n, r))
    }
}

fn pad_zeros(r: &FiniteSeq, n: usize, at_least_one: bool) -> FiniteSeq {
    let mut t = r.clone();
    if at_least_one && t.last() != Some(0) {
        t = t.child(0);
    }
    while t.len() < n {
        t = t.child(0);
    }
    t
}

pub fn tree_family(name: &str) -> Result<Arc<dyn TreeFamily>> {
    let fam = match name {
        "all-levels" => NamedFamily {
            name: "all-levels",
            member: |_, _| true,
            hint: Some(|_, r| r.clone()),
        },
        "len-ge-n" => NamedFamily {
            name: "len-ge-n",
            member: |n, t| t.len() >= n,
            hint: Some(|n, r| pad_zeros(r, n, false)),
        },
        "ends-in-zero" => NamedFamily {
            name: "ends-in-zero",
            member: |n, t| t.last() == Some(0) && t.len() >= n,
            hint: Some(|n, r| pad_zeros(r, n, true)),
        },
        other => return Err(Error::Parse(format!("unknown tree family {other:?}"))),
    };
    Ok(Arc::new(fam))
}

pub fn tree_family_names() -> &'static [&'static str] {
    &["all-levels", "len-ge-n", "ends-in-zero"]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::range_nodes;

    #[test]
    fn every_name_resolves() {
        for (n, _) in function_names() {
            assert_eq!(function(n).unwrap().name(), n);
        }
        for n in tree_set_names() {
            tree_set(n).unwrap();
        }
        for n in tree_family_names() {
            tree_family(n).unwrap();
        }
        assert!(function("nope").is_err());
    }

    #[test]
    fn hints_land_in_their_sets() {
        for n in tree_set_names() {
            let s = tree_set(n).unwrap();
            for r in range_nodes(4, 3) {
                if let Some(t) = s.dense_extension(&r) {
                    assert!(r.is_prefix_of(&t) && s.member(&t));
                }
            }
        }
        for n in tree_family_names() {
            let f = tree_family(n).unwrap();
            for level in 0..4 {
                for r in range_nodes(4, 3) {
                    let t = f.dense_extension(level, &r).unwrap();
                    assert!(r.is_prefix_of(&t) && f.member(level, &t));
                }
            }
        }
    }

    #[test]
    fn diameters_bound_sampled_values() {
        for (n, _) in function_names() {
            let f = function(n).unwrap();
            for t in range_nodes(3, 3) {
                let Some(d) = f.cone_diameter(&t) else { continue };
                let pts: Vec<Point> = range_nodes(3, 3)
                    .into_iter()
                    .map(|u| Point::zeros_after(&t.concat(&u)))
                    .chain([Point::periodic(t.clone(), FiniteSeq::from([1, 2])).unwrap()])
                    .collect();
                for p in &pts {
                    for q in &pts {
                        let (a, b) = (f.eval(p).unwrap(), f.eval(q).unwrap());
                        assert!(f.value_distance(&a, &b).unwrap() <= d, "{n} at {t}");
                    }
                }
            }
        }
    }
}
