//! Offline re-verification of a [`Trace`] against the registry.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::embeddings::{meet_preservation_oracle, validate, MeetCheck, Validation};
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::FiniteSeq;

use super::oracle::{Func, Value};
use super::registry;
use super::trace::{Certificate, Endpoint, Quantity, Term, Trace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecheckReport {
    pub op: String,
    pub certificates: usize,
    pub table_nodes: usize,
    pub failures: Vec<String>,
}

impl RecheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn endpoint(f: &Func, e: &Endpoint) -> Result<Value> {
    match e {
        Endpoint::Eval(p) => f.eval(p),
        Endpoint::Fixed(v) => Ok(v.clone()),
    }
}

fn recompute(f: Option<&Func>, schedule: &EpsilonSchedule, q: &Quantity) -> Result<Dyadic> {
    let need = || f.ok_or_else(|| Error::Parse("trace has function terms but names no function".into()));
    Ok(match q {
        Quantity::Distance { a, b } => {
            let f = need()?;
            f.value_distance(&endpoint(f, a)?, &endpoint(f, b)?)?
        }
        Quantity::Diameter(t) => need()?
            .cone_diameter(t)
            .ok_or_else(|| Error::Precondition(format!("no cone diameter at {t}")))?,
        Quantity::Constant(d) => d.clone(),
        Quantity::Epsilon(t) => schedule.epsilon(t),
        Quantity::LevelEpsilon(n) => schedule.level(*n),
    })
}

fn side(f: Option<&Func>, schedule: &EpsilonSchedule, terms: &[Term], failures: &mut Vec<String>, label: &str) -> Dyadic {
    let mut sum = Dyadic::zero();
    for t in terms {
        match recompute(f, schedule, &t.quantity) {
            Ok(v) => {
                if v != t.recorded {
                    failures.push(format!("{label}: recorded {} but recomputed {v}", t.recorded));
                }
                sum = sum.add(&v.mul_u64(t.coeff));
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    sum
}

/// Recomputes every certificate term from the registry function and the
/// schedule named in the trace, checks each relation exactly, re-evaluates
/// membership claims, and validates the table.
pub fn recheck(trace: &Trace) -> Result<RecheckReport> {
    let f = trace.function.as_deref().map(registry::function).transpose()?;
    let schedule = EpsilonSchedule::named(&trace.schedule)?;
    let mut failures = Vec::new();
    for (k, c) in trace.certificates.iter().enumerate() {
        match c {
            Certificate::Membership { set, level, node, expected } => {
                let got = match level {
                    None => registry::tree_set(set)?.member(node),
                    Some(n) => registry::tree_family(set)?.member(*n, node),
                };
                if got != *expected {
                    failures.push(format!("certificate {k}: {node} ∈ {set} is {got}, expected {expected}"));
                }
            }
            Certificate::Inequality { label, lhs, relation, rhs } => {
                let l = side(f.as_ref(), &schedule, lhs, &mut failures, label);
                let r = side(f.as_ref(), &schedule, rhs, &mut failures, label);
                if !relation.holds(&l, &r) {
                    failures.push(format!("certificate {k} ({label}): {l} {relation:?} {r} fails"));
                }
            }
        }
    }
    let table: BTreeMap<FiniteSeq, FiniteSeq> = trace.table.entries.iter().cloned().collect();
    let (depth, branch) = (trace.table.depth, trace.table.branch);
    let expected = crate::sequences::range_nodes(depth, branch);
    if expected.iter().any(|t| !table.contains_key(t)) {
        failures.push("table does not cover its range".into());
    } else {
        let lookup = |t: &FiniteSeq| table[t].clone();
        if let Validation::Violation { t, i, j } = validate(&lookup, depth, branch) {
            failures.push(format!("table fails validation at {t}, child {i}, sibling {j:?}"));
        }
        if let MeetCheck::Disagrees(a, b) = meet_preservation_oracle(&lookup, depth, branch) {
            failures.push(format!("table does not preserve the meet of {a} and {b}"));
        }
    }
    Ok(RecheckReport {
        op: trace.op.clone(),
        certificates: trace.certificates.len(),
        table_nodes: table.len(),
        failures,
    })
}
