//! Finite sequences of naturals, points of the compactified space
//! (finite, `∞`-terminated, or infinite), and their prefix structure.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use crate::enumeration::{canonical_index, canonical_node, for_each_bounded_node, range_nodes};

/// An element of ℕ^{<ℕ}. Also the node type of every tree map in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteSeq(Vec<u64>);

impl FiniteSeq {
    pub fn new(entries: Vec<u64>) -> Self {
        FiniteSeq(entries)
    }

    pub fn empty() -> Self {
        FiniteSeq(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u64> {
        self.0.get(i).copied()
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// `t↾i`; the identity once `i ≥ len`.
    pub fn restrict(&self, i: usize) -> FiniteSeq {
        FiniteSeq(self.0[..i.min(self.0.len())].to_vec())
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &FiniteSeq) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self ⊏ other`.
    pub fn is_proper_prefix_of(&self, other: &FiniteSeq) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// `self⌢⟨i⟩`.
    pub fn child(&self, i: u64) -> FiniteSeq {
        let mut v = self.0.clone();
        v.push(i);
        FiniteSeq(v)
    }

    /// `self⌢other`.
    pub fn concat(&self, other: &FiniteSeq) -> FiniteSeq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteSeq(v)
    }

    /// The maximal proper initial segment, if any.
    pub fn parent(&self) -> Option<FiniteSeq> {
        if self.0.is_empty() {
            None
        } else {
            Some(FiniteSeq(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The suffix after the first `n` entries.
    pub fn strip(&self, n: usize) -> FiniteSeq {
        FiniteSeq(self.0[n.min(self.0.len())..].to_vec())
    }

    /// `w(t) = length(t) + Σ entries(t)`, the weight used by the canonical
    /// enumeration and the default epsilon schedule.
    pub fn weight(&self) -> u64 {
        self.0.len() as u64 + self.0.iter().sum::<u64>()
    }

    pub fn entry_sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> Option<u64> {
        self.0.iter().copied().max()
    }
}

impl From<Vec<u64>> for FiniteSeq {
    fn from(v: Vec<u64>) -> Self {
        FiniteSeq(v)
    }
}

impl From<&[u64]> for FiniteSeq {
    fn from(v: &[u64]) -> Self {
        FiniteSeq(v.to_vec())
    }
}

impl<const N: usize> From<[u64; N]> for FiniteSeq {
    fn from(v: [u64; N]) -> Self {
        FiniteSeq(v.to_vec())
    }
}

impl fmt::Debug for FiniteSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FiniteSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "⟩")
    }
}

/// `s ∧ t`: the longest common initial segment.
pub fn meet(s: &FiniteSeq, t: &FiniteSeq) -> FiniteSeq {
    let n = s
        .0
        .iter()
        .zip(t.0.iter())
        .take_while(|(a, b)| a == b)
        .count();
    FiniteSeq(s.0[..n].to_vec())
}

/// One coordinate of a point: a natural number or the terminal `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    Nat(u64),
    Infinity,
}

/// A pure, deterministic presentation of some `b ∈ ℕ^ℕ` by its coordinates.
/// `prefix(i)` must equal `b↾i` on every call.
pub trait PrefixOracle: Send + Sync + fmt::Debug {
    fn coordinate(&self, i: usize) -> u64;

    fn prefix(&self, len: usize) -> FiniteSeq {
        FiniteSeq((0..len).map(|i| self.coordinate(i)).collect())
    }
}

/// An infinite sequence: either eventually periodic (finitely described,
/// with decidable equality) or an opaque prefix oracle.
#[derive(Clone)]
pub enum InfiniteSeq {
    Periodic { head: FiniteSeq, period: FiniteSeq },
    Oracle(Arc<dyn PrefixOracle>),
}

impl InfiniteSeq {
    /// `head⌢period^ω`, normalized to the shortest head and period.
    pub fn periodic(head: FiniteSeq, period: FiniteSeq) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("periodic point with empty period".into()));
        }
        let (head, period) = normalize_periodic(head.0, period.0);
        Ok(InfiniteSeq::Periodic {
            head: FiniteSeq(head),
            period: FiniteSeq(period),
        })
    }

    pub fn zeros() -> Self {
        InfiniteSeq::Periodic {
            head: FiniteSeq::empty(),
            period: FiniteSeq(vec![0]),
        }
    }

    pub fn coordinate(&self, i: usize) -> u64 {
        match self {
            InfiniteSeq::Periodic { head, period } => {
                if i < head.len() {
                    head.0[i]
                } else {
                    period.0[(i - head.len()) % period.len()]
                }
            }
            InfiniteSeq::Oracle(o) => o.coordinate(i),
        }
    }

    pub fn prefix(&self, len: usize) -> FiniteSeq {
        match self {
            InfiniteSeq::Periodic { .. } => FiniteSeq((0..len).map(|i| self.coordinate(i)).collect()),
            InfiniteSeq::Oracle(o) => o.prefix(len),
        }
    }

    pub fn is_finitely_described(&self) -> bool {
        matches!(self, InfiniteSeq::Periodic { .. })
    }

    /// The tail after dropping `n` coordinates, when finitely described.
    pub fn shift(&self, n: usize) -> Option<InfiniteSeq> {
        match self {
            InfiniteSeq::Periodic { head, period } => {
                if n <= head.len() {
                    InfiniteSeq::periodic(head.strip(n), period.clone()).ok()
                } else {
                    let r = (n - head.len()) % period.len();
                    let mut p = period.0[r..].to_vec();
                    p.extend_from_slice(&period.0[..r]);
                    InfiniteSeq::periodic(FiniteSeq::empty(), FiniteSeq(p)).ok()
                }
            }
            InfiniteSeq::Oracle(_) => None,
        }
    }
}

fn normalize_periodic(mut head: Vec<u64>, mut period: Vec<u64>) -> (Vec<u64>, Vec<u64>) {
    let n = period.len();
    if let Some(d) = (1..=n).find(|d| n.is_multiple_of(*d) && (0..n).all(|k| period[k] == period[k % d])) {
        period.truncate(d);
    }
    while let (Some(&h), Some(&p)) = (head.last(), period.last()) {
        if h != p {
            break;
        }
        head.pop();
        period.rotate_right(1);
    }
    (head, period)
}

impl fmt::Debug for InfiniteSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfiniteSeq::Periodic { head, period } => write!(f, "{head}⌢({period})^ω"),
            InfiniteSeq::Oracle(o) => write!(f, "oracle({:?})", o),
        }
    }
}

impl PartialEq for InfiniteSeq {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                InfiniteSeq::Periodic { head: h1, period: p1 },
                InfiniteSeq::Periodic { head: h2, period: p2 },
            ) => h1 == h2 && p1 == p2,
            (InfiniteSeq::Oracle(a), InfiniteSeq::Oracle(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A point of ℕ^{≤ℕ}_*.
#[derive(Clone, PartialEq)]
pub enum Point {
    Finite(FiniteSeq),
    /// `t⌢⟨∞⟩`.
    Augmented(FiniteSeq),
    Infinite(InfiniteSeq),
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(t) => write!(f, "{t}"),
            Point::Augmented(t) => write!(f, "{t}⌢⟨∞⟩"),
            Point::Infinite(b) => write!(f, "{b:?}"),
        }
    }
}

impl Point {
    pub fn zeros() -> Self {
        Point::Infinite(InfiniteSeq::zeros())
    }

    /// `t⌢0^ω`.
    pub fn zeros_after(t: &FiniteSeq) -> Self {
        Point::Infinite(InfiniteSeq::Periodic {
            head: t.clone(),
            period: FiniteSeq::new(vec![0]),
        })
        .normalized()
    }

    pub fn periodic(head: FiniteSeq, period: FiniteSeq) -> Result<Self> {
        Ok(Point::Infinite(InfiniteSeq::periodic(head, period)?))
    }

    fn normalized(self) -> Self {
        match self {
            Point::Infinite(InfiniteSeq::Periodic { head, period }) => {
                Point::Infinite(InfiniteSeq::periodic(head, period).expect("nonempty period"))
            }
            p => p,
        }
    }

    /// Number of coordinates, `None` for infinite points.
    pub fn len(&self) -> Option<usize> {
        match self {
            Point::Finite(t) => Some(t.len()),
            Point::Augmented(t) => Some(t.len() + 1),
            Point::Infinite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Point::Finite(_))
    }

    pub fn is_augmented(&self) -> bool {
        matches!(self, Point::Augmented(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinite(_))
    }

    /// Coordinate `i`, or `None` past the end.
    pub fn coordinate(&self, i: usize) -> Option<Coord> {
        match self {
            Point::Finite(t) => t.get(i).map(Coord::Nat),
            Point::Augmented(t) => match i.cmp(&t.len()) {
                std::cmp::Ordering::Less => Some(Coord::Nat(t.0[i])),
                std::cmp::Ordering::Equal => Some(Coord::Infinity),
                std::cmp::Ordering::Greater => None,
            },
            Point::Infinite(b) => Some(Coord::Nat(b.coordinate(i))),
        }
    }

    /// The longest prefix of this point that is a genuine node: `t` for
    /// finite and augmented points, `b↾len` for infinite ones.
    pub fn node_prefix(&self, len: usize) -> FiniteSeq {
        match self {
            Point::Finite(t) | Point::Augmented(t) => t.restrict(len),
            Point::Infinite(b) => b.prefix(len),
        }
    }

    fn needs_budget(&self) -> bool {
        matches!(self, Point::Infinite(InfiniteSeq::Oracle(_)))
    }

    /// Length of a finite description from which every coordinate follows.
    fn description(&self) -> Option<(usize, usize)> {
        match self {
            Point::Finite(t) => Some((t.len() + 1, 1)),
            Point::Augmented(t) => Some((t.len() + 2, 1)),
            Point::Infinite(InfiniteSeq::Periodic { head, period }) => Some((head.len(), period.len())),
            Point::Infinite(InfiniteSeq::Oracle(_)) => None,
        }
    }

    /// A depth past which two finitely described points can no longer first
    /// disagree; `None` when either point is an opaque oracle.
    pub fn decision_horizon(&self, other: &Point) -> Option<usize> {
        let (h1, p1) = self.description()?;
        let (h2, p2) = other.description()?;
        Some(h1.max(h2) + p1.lcm(&p2))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PointDoc {
    Finite { seq: FiniteSeq },
    Augmented { seq: FiniteSeq },
    Infinite { head: FiniteSeq, period: FiniteSeq },
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match self {
            Point::Finite(t) => PointDoc::Finite { seq: t.clone() },
            Point::Augmented(t) => PointDoc::Augmented { seq: t.clone() },
            Point::Infinite(InfiniteSeq::Periodic { head, period }) => PointDoc::Infinite {
                head: head.clone(),
                period: period.clone(),
            },
            Point::Infinite(InfiniteSeq::Oracle(_)) => {
                return Err(serde::ser::Error::custom("oracle points have no finite description"))
            }
        };
        doc.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Ok(match PointDoc::deserialize(de)? {
            PointDoc::Finite { seq } => Point::Finite(seq),
            PointDoc::Augmented { seq } => Point::Augmented(seq),
            PointDoc::Infinite { head, period } => {
                Point::periodic(head, period).map_err(serde::de::Error::custom)?
            }
        })
    }
}

/// `p↾i`, together with whether the restriction exposes the final `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub seq: FiniteSeq,
    pub infinity: bool,
}

impl Restriction {
    /// The restriction as a node of ℕ^{<ℕ}, if it contains no `∞`.
    pub fn as_node(&self) -> Option<&FiniteSeq> {
        if self.infinity {
            None
        } else {
            Some(&self.seq)
        }
    }
}

/// Truncation limits for searches over lazy data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthBudget {
    /// Maximum prefix length inspected.
    pub depth: usize,
    /// Maximum child index enumerated (exclusive).
    pub branch: u64,
    /// Maximum number of oracle calls.
    pub steps: u64,
}

impl DepthBudget {
    pub fn new(depth: usize, branch: u64, steps: u64) -> Result<Self> {
        if depth == 0 || branch == 0 || steps == 0 {
            return Err(Error::Parse("budget fields must all be positive".into()));
        }
        Ok(DepthBudget { depth, branch, steps })
    }
}

impl Default for DepthBudget {
    fn default() -> Self {
        DepthBudget {
            depth: 12,
            branch: 4,
            steps: 1_000_000,
        }
    }
}

/// `p↾i`. Restricting an oracle point deeper than `budget.depth` is an error.
pub fn restrict(p: &Point, i: usize, budget: &DepthBudget) -> Result<Restriction> {
    match p {
        Point::Finite(t) => Ok(Restriction {
            seq: t.restrict(i),
            infinity: false,
        }),
        Point::Augmented(t) => Ok(Restriction {
            seq: t.restrict(i),
            infinity: i > t.len(),
        }),
        Point::Infinite(b) => {
            if p.needs_budget() && i > budget.depth {
                return Err(Error::budget(format!(
                    "restriction to length {i} exceeds depth budget {}",
                    budget.depth
                )));
            }
            Ok(Restriction {
                seq: b.prefix(i),
                infinity: false,
            })
        }
    }
}

/// Outcome of [`split_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    /// The least `i` with `a↾i ≠ b↾i`.
    At(usize),
    /// The points agree on every prefix of length at most the given depth.
    Undetermined(usize),
}

/// `i(a, b) = min{i : a↾i ≠ b↾i}`, searched up to `budget.depth` (or to the
/// decision horizon when both points are finitely described and that is
/// deeper).
pub fn split_index(a: &Point, b: &Point, budget: &DepthBudget) -> Split {
    let limit = a
        .decision_horizon(b)
        .map_or(budget.depth, |h| h.max(budget.depth));
    for k in 0..limit {
        match (a.coordinate(k), b.coordinate(k)) {
            (None, None) => return Split::Undetermined(budget.depth),
            (x, y) if x != y => return Split::At(k + 1),
            _ => {}
        }
    }
    Split::Undetermined(budget.depth)
}

/// `t ⊑ p`, i.e. `p ∈ N_t`.
pub fn cone_member(t: &FiniteSeq, p: &Point, budget: &DepthBudget) -> Result<bool> {
    if p.needs_budget() && t.len() > budget.depth {
        return Err(Error::budget(format!(
            "cone test at length {} exceeds depth budget {}",
            t.len(),
            budget.depth
        )));
    }
    Ok(t
        .entries()
        .iter()
        .enumerate()
        .all(|(i, &e)| p.coordinate(i) == Some(Coord::Nat(e))))
}
