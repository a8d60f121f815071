//! Oracle-driven constructions of ∧-embeddings. Density is never decided:
//! every "pick a node in a dense set" step is a bounded search in canonical
//! order, and failure is reported as [`Error::BudgetExceeded`].

mod augmented;
mod avoid;
mod baire;
pub mod oracle;
pub mod recheck;
pub mod registry;
pub mod trace;
mod tree;

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::embeddings::{validate, MeetEmbedding, SuccessorTable, Validation};
use crate::error::{Error, Result};
use crate::sequences::{for_each_bounded_node, range_nodes, DepthBudget, FiniteSeq};

pub use augmented::{
    epsilon_discrete_or_ball, limit_refine, shrink_or_discrete, BallOrDiscrete, EpsSplitOutcome, LimitMode,
    LimitOutcome, ShrinkMode, ShrinkOutcome,
};
pub use avoid::{
    discrete_refine, disjoint_refine, finite_avoid_or_converge, point_avoid, DiscreteMode, DiscreteOutcome,
    DisjointOutcome, FiniteAvoidMode, FiniteAvoidOutcome, PointAvoidOutcome,
};
pub use baire::{
    children_stabilize, classify_baire_function, diameter_shrink, disjointify, ClassifyOutcome, Shape,
    StabilizeOutcome, Verdict,
};
pub use oracle::{Composite, Func, Meter, Probe, SampleKind, SpaceFunction, TreeFamily, TreeSetOracle, Value};
pub use recheck::{recheck, RecheckReport};
pub use trace::{Certificate, PartialEmbedding, Trace};
pub use tree::{category_refine, continuity_refine, ramsey_split, RamseyOutcome, Side};

/// The output range of a construction: nodes of length `< depth` with
/// entries `< branch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub depth: usize,
    pub branch: u64,
}

impl Range {
    pub fn new(depth: usize, branch: u64) -> Self {
        Range { depth, branch }
    }

    pub fn nodes(&self) -> Vec<FiniteSeq> {
        range_nodes(self.depth, self.branch)
    }

    /// Nodes that have children inside the range.
    pub fn parents(&self) -> Vec<FiniteSeq> {
        range_nodes(self.depth.saturating_sub(1), self.branch)
    }
}

/// A constructed embedding with its trace.
#[derive(Debug, Clone)]
pub struct Built {
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

pub(crate) fn base_params(range: Range, budget: &DepthBudget) -> serde_json::Value {
    serde_json::json!({
        "depth": range.depth,
        "branch": range.branch,
        "search_depth": budget.depth,
        "search_branch": budget.branch,
        "steps": budget.steps,
    })
}

/// The first `base⌢u`, over `u` in canonical order with `|u| < budget.depth`
/// and entries `< budget.branch`, accepted by `pred`.
pub(crate) fn first_extension(
    base: &FiniteSeq,
    budget: &DepthBudget,
    meter: &Meter,
    mut pred: impl FnMut(&FiniteSeq) -> Result<bool>,
) -> Result<Option<FiniteSeq>> {
    let r = for_each_bounded_node(budget.depth, budget.branch, |u| {
        if let Err(e) = meter.tick() {
            return ControlFlow::Break(Err(e));
        }
        let c = base.concat(u);
        match pred(&c) {
            Ok(true) => ControlFlow::Break(Ok(c)),
            Ok(false) => ControlFlow::Continue(()),
            Err(e) => ControlFlow::Break(Err(e)),
        }
    });
    match r {
        ControlFlow::Break(r) => r.map(Some),
        ControlFlow::Continue(()) => Ok(None),
    }
}

/// Images on the range built in canonical order: `π(⟨⟩)` is the first
/// extension of `root` accepted at `⟨⟩`, and `π(t⌢⟨i⟩)` the first extension
/// of `π(t)⌢⟨i⟩` accepted at `t⌢⟨i⟩`. `Ok(None)` if a search runs dry.
pub(crate) fn successor_images(
    root: &FiniteSeq,
    range: Range,
    budget: &DepthBudget,
    meter: &Meter,
    mut accept: impl FnMut(&FiniteSeq, &FiniteSeq) -> Result<bool>,
) -> Result<Option<BTreeMap<FiniteSeq, FiniteSeq>>> {
    let mut images: BTreeMap<FiniteSeq, FiniteSeq> = BTreeMap::new();
    for t in range.nodes() {
        let base = match (t.parent(), t.last()) {
            (Some(p), Some(i)) => images[&p].child(i),
            _ => root.clone(),
        };
        match first_extension(&base, budget, meter, |c| accept(&t, c))? {
            Some(img) => {
                images.insert(t, img);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(images))
}

/// The table embedding through `images`, which must be closed under parents.
pub(crate) fn table_embedding(images: &BTreeMap<FiniteSeq, FiniteSeq>) -> Result<MeetEmbedding> {
    Ok(MeetEmbedding::table(SuccessorTable::from_images(images)?))
}

/// Wraps `pi` on `range`, refusing anything that fails [`validate`].
pub(crate) fn checked(pi: MeetEmbedding, range: Range) -> Result<PartialEmbedding> {
    let pe = PartialEmbedding::new(pi, range.depth, range.branch)?;
    if let Validation::Violation { t, i, j } = validate(&|t| pe.images[t].clone(), range.depth, range.branch) {
        return Err(Error::InvalidEmbedding(format!("constructed table fails at {t}, child {i}, sibling {j:?}")));
    }
    Ok(pe)
}

pub(crate) fn exhausted(what: impl std::fmt::Display) -> Error {
    Error::budget(format!("{what}: no witness within the search budget"))
}
