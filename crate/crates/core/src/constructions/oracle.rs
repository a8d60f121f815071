//! Oracle interfaces: functions on the space, tree sets, and level families.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::embeddings::{extend, MeetEmbedding};
use crate::error::{Error, Result};
use crate::metric::{distance, EpsilonSchedule};
use crate::sequences::{DepthBudget, FiniteSeq, Point};

/// A point of the target space: a nonnegative dyadic scalar or a point of
/// ℕ^{≤ℕ}_* under the weight metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Scalar(Dyadic),
    Point(Point),
}

impl Value {
    pub fn scalar(d: Dyadic) -> Self {
        Value::Scalar(d)
    }

    pub fn nat(n: u64) -> Self {
        Value::Scalar(Dyadic::from_u64(n))
    }
}

fn value_budget() -> DepthBudget {
    DepthBudget {
        depth: 64,
        branch: u64::MAX,
        steps: u64::MAX,
    }
}

/// `|a - b|` on scalars, the weight-schedule distance on points.
pub fn standard_value_distance(a: &Value, b: &Value) -> Result<Dyadic> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(x.abs_diff(y)),
        (Value::Point(p), Value::Point(q)) => {
            distance(p, q, &EpsilonSchedule::weight(), &value_budget()).require_exact()
        }
        _ => Err(Error::domain("distance between a scalar and a point")),
    }
}

/// Which points stand in for a child cone when looking at sibling values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// `u⌢⟨j⟩⌢⟨∞⟩`.
    Augmented,
    /// The function's sample point of `N_{u⌢⟨j⟩}`.
    Baire,
}

/// A function `φ` on (part of) ℕ^{≤ℕ}_*, presented by queries. All methods
/// must be pure.
pub trait SpaceFunction: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, p: &Point) -> Result<Value>;

    /// An upper bound on the diameter of `φ[N_t ∩ ℕ^ℕ]`, `None` if unbounded
    /// or unknown. Must be `⊑`-monotone.
    fn cone_diameter(&self, _t: &FiniteSeq) -> Option<Dyadic> {
        None
    }

    fn value_distance(&self, a: &Value, b: &Value) -> Result<Dyadic> {
        standard_value_distance(a, b)
    }

    /// A Baire point of `N_t`.
    fn sample(&self, t: &FiniteSeq) -> Point {
        Point::zeros_after(t)
    }

    /// The limit of the sibling values at the children of `u`, when it exists.
    fn limit_hint(&self, _u: &FiniteSeq, _kind: SampleKind) -> Option<Value> {
        None
    }

    /// The point actually passed to the underlying registry function.
    fn resolve(&self, p: &Point) -> Result<Point> {
        Ok(p.clone())
    }

    /// The node whose cone diameter the underlying function reports for `t`.
    fn resolve_node(&self, t: &FiniteSeq) -> Result<FiniteSeq> {
        Ok(t.clone())
    }

    /// Name of the underlying registry function.
    fn base_name(&self) -> String {
        self.name()
    }
}

pub type Func = Arc<dyn SpaceFunction>;

/// `φ ∘ π̂`.
pub struct Composite {
    base: Func,
    pi: MeetEmbedding,
    budget: DepthBudget,
}

impl Composite {
    pub fn new(base: Func, pi: MeetEmbedding) -> Self {
        Composite {
            base,
            pi,
            budget: DepthBudget::default(),
        }
    }

    pub fn func(base: Func, pi: MeetEmbedding) -> Func {
        Arc::new(Self::new(base, pi))
    }
}

impl SpaceFunction for Composite {
    fn name(&self) -> String {
        format!("{}∘π̂", self.base.name())
    }

    fn eval(&self, p: &Point) -> Result<Value> {
        self.base.eval(&extend(&self.pi, p, &self.budget)?)
    }

    fn cone_diameter(&self, t: &FiniteSeq) -> Option<Dyadic> {
        self.base.cone_diameter(&self.pi.image(t).ok()?)
    }

    fn value_distance(&self, a: &Value, b: &Value) -> Result<Dyadic> {
        self.base.value_distance(a, b)
    }

    fn sample(&self, t: &FiniteSeq) -> Point {
        Point::zeros_after(t)
    }

    fn limit_hint(&self, u: &FiniteSeq, kind: SampleKind) -> Option<Value> {
        self.base.limit_hint(&self.pi.image(u).ok()?, kind)
    }

    fn resolve(&self, p: &Point) -> Result<Point> {
        self.base.resolve(&extend(&self.pi, p, &self.budget)?)
    }

    fn resolve_node(&self, t: &FiniteSeq) -> Result<FiniteSeq> {
        self.base.resolve_node(&self.pi.image(t)?)
    }

    fn base_name(&self) -> String {
        self.base.base_name()
    }
}

/// A set `T ⊆ ℕ^{<ℕ}` with an optional density witness.
pub trait TreeSetOracle: Send + Sync {
    fn name(&self) -> String;
    fn member(&self, t: &FiniteSeq) -> bool;
    /// Some `t ⊒ r` in the set.
    fn dense_extension(&self, _r: &FiniteSeq) -> Option<FiniteSeq> {
        None
    }
}

/// A sequence of sets `T_n`.
pub trait TreeFamily: Send + Sync {
    fn name(&self) -> String;
    fn member(&self, n: usize, t: &FiniteSeq) -> bool;
    /// Some `t ⊒ r` in `T_n`.
    fn dense_extension(&self, _n: usize, _r: &FiniteSeq) -> Option<FiniteSeq> {
        None
    }
}

/// Counts oracle calls against `budget.steps`.
pub struct Meter {
    used: AtomicU64,
    limit: u64,
}

impl fmt::Debug for Meter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Meter({}/{})", self.used(), self.limit)
    }
}

impl Meter {
    pub fn new(limit: u64) -> Arc<Self> {
        Arc::new(Meter {
            used: AtomicU64::new(0),
            limit,
        })
    }

    pub fn tick(&self) -> Result<()> {
        let n = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.limit {
            return Err(Error::budget(format!("step budget of {} oracle calls exhausted", self.limit)));
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

/// A metered view of a function.
#[derive(Clone)]
pub struct Probe {
    pub f: Func,
    pub meter: Arc<Meter>,
}

impl Probe {
    pub fn new(f: Func, meter: Arc<Meter>) -> Self {
        Probe { f, meter }
    }

    pub fn eval(&self, p: &Point) -> Result<Value> {
        self.meter.tick()?;
        self.f.eval(p)
    }

    pub fn aug(&self, t: &FiniteSeq) -> Result<Value> {
        self.eval(&Point::Augmented(t.clone()))
    }

    pub fn diam(&self, t: &FiniteSeq) -> Result<Option<Dyadic>> {
        self.meter.tick()?;
        Ok(self.f.cone_diameter(t))
    }

    pub fn dist(&self, a: &Value, b: &Value) -> Result<Dyadic> {
        self.f.value_distance(a, b)
    }

    pub fn sample(&self, t: &FiniteSeq) -> Point {
        self.f.sample(t)
    }

    pub fn composite(&self, pi: &MeetEmbedding) -> Probe {
        Probe {
            f: Composite::func(self.f.clone(), pi.clone()),
            meter: self.meter.clone(),
        }
    }
}
