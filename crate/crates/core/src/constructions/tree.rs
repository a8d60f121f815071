//! Splitting and refining against sets of nodes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Result;
use crate::metric::EpsilonSchedule;
use crate::sequences::{range_nodes, DepthBudget, FiniteSeq};

use super::oracle::{Func, Meter, TreeFamily, TreeSetOracle};
use super::trace::{Certificate, PartialEmbedding, Trace};
use super::{base_params as params, checked, Built, exhausted, first_extension, successor_images, table_embedding, Range};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    InT,
    InComplement,
}

#[derive(Debug, Clone)]
pub struct RamseyOutcome {
    pub side: Side,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// Candidate roots for the side searches: small nodes in canonical order.
fn candidate_roots(budget: &DepthBudget) -> Vec<FiniteSeq> {
    range_nodes(budget.depth.min(3), budget.branch.min(3))
}

/// A ∧-embedding whose tabulated images all lie in `T` or all in `∁T`.
/// `T` is tried first, below each candidate root, then `∁T`.
pub fn ramsey_split(
    set: &dyn TreeSetOracle,
    range: Range,
    budget: &DepthBudget,
) -> Result<RamseyOutcome> {
    let meter = Meter::new(budget.steps);
    for side in [Side::InT, Side::InComplement] {
        let want = side == Side::InT;
        for root in candidate_roots(budget) {
            let found = successor_images(&root, range, budget, &meter, |_, c| Ok(set.member(c) == want))?;
            let Some(images) = found else { continue };
            let mut pe = checked(table_embedding(&images)?, range)?;
            pe.certificates = pe
                .images
                .values()
                .map(|v| Certificate::Membership {
                    set: set.name(),
                    level: None,
                    node: v.clone(),
                    expected: want,
                })
                .collect();
            let trace = Trace::from_result(
                "ramsey",
                None,
                Some(set.name()),
                &EpsilonSchedule::weight(),
                params(range, budget),
                json!(side),
                &pe,
                meter.used(),
            )?;
            return Ok(RamseyOutcome { side, pe, trace });
        }
    }
    Err(exhausted(format!("ramsey_split on {}", set.name())))
}

/// A node `⊒ base` in `T_n`: the family's hint when it checks out,
/// otherwise the first one found by search.
fn pick(
    family: &dyn TreeFamily,
    n: usize,
    base: &FiniteSeq,
    budget: &DepthBudget,
    meter: &Meter,
) -> Result<FiniteSeq> {
    meter.tick()?;
    if let Some(h) = family.dense_extension(n, base) {
        if base.is_prefix_of(&h) && family.member(n, &h) {
            return Ok(h);
        }
    }
    first_extension(base, budget, meter, |c| Ok(family.member(n, c)))?
        .ok_or_else(|| exhausted(format!("no extension of {base} in {}[{n}]", family.name())))
}

/// A ∧-embedding into `N_s` with `π(t) ∈ T_{|t|}` on the range.
pub fn category_refine(
    family: &dyn TreeFamily,
    s: &FiniteSeq,
    range: Range,
    budget: &DepthBudget,
) -> Result<Built> {
    let meter = Meter::new(budget.steps);
    let mut images: BTreeMap<FiniteSeq, FiniteSeq> = BTreeMap::new();
    for t in range.nodes() {
        let base = match (t.parent(), t.last()) {
            (Some(p), Some(i)) => images[&p].child(i),
            _ => s.clone(),
        };
        let img = pick(family, t.len(), &base, budget, &meter)?;
        images.insert(t, img);
    }
    let mut pe = checked(table_embedding(&images)?, range)?;
    pe.certificates = pe
        .images
        .iter()
        .map(|(t, v)| Certificate::Membership {
            set: family.name(),
            level: Some(t.len()),
            node: v.clone(),
            expected: true,
        })
        .collect();
    let mut p = params(range, budget);
    p["s"] = json!(s);
    let trace = Trace::from_result(
        "category",
        None,
        Some(family.name()),
        &EpsilonSchedule::weight(),
        p,
        json!(null),
        &pe,
        meter.used(),
    )?;
    Ok(Built { pe, trace })
}

/// [`category_refine`] against the dense open presentation `certificate` of
/// a comeager set on which `f` is continuous.
pub fn continuity_refine(
    f: &Func,
    certificate: &dyn TreeFamily,
    s: &FiniteSeq,
    range: Range,
    budget: &DepthBudget,
) -> Result<Built> {
    let mut out = category_refine(certificate, s, range, budget)?;
    out.trace.op = "continuity".into();
    out.trace.function = Some(f.name());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::registry::{function, tree_family, tree_set};

    fn budget() -> DepthBudget {
        DepthBudget::new(4, 4, 200_000).unwrap()
    }

    #[test]
    fn ramsey_examples() {
        let r = Range::new(3, 3);
        let all = ramsey_split(&*tree_set("all").unwrap(), r, &budget()).unwrap();
        assert_eq!(all.side, Side::InT);

        let even = tree_set("even-sum").unwrap();
        let out = ramsey_split(&*even, r, &budget()).unwrap();
        assert_eq!(out.side, Side::InT);
        assert_eq!(out.pe.images.len(), 13);
        assert!(out.pe.images.values().all(|v| v.entry_sum() % 2 == 0));

        let short = tree_set("len-le-1").unwrap();
        let out = ramsey_split(&*short, r, &budget()).unwrap();
        assert_eq!(out.side, Side::InComplement);
        assert!(out.pe.images.values().all(|v| v.len() >= 2));
    }

    #[test]
    fn category_examples() {
        let r = Range::new(3, 3);
        let s = FiniteSeq::from([2]);
        for name in ["all-levels", "len-ge-n", "ends-in-zero"] {
            let fam = tree_family(name).unwrap();
            let out = category_refine(&*fam, &s, r, &budget()).unwrap();
            for (t, v) in &out.pe.images {
                assert!(s.is_prefix_of(v) && fam.member(t.len(), v), "{name} at {t}");
            }
        }
        let all = category_refine(&*tree_family("all-levels").unwrap(), &s, r, &budget()).unwrap();
        for (t, v) in &all.pe.images {
            assert_eq!(v, &s.concat(t));
        }
    }

    #[test]
    fn continuity_is_a_relabelled_category_refine() {
        let f = function("identity-baire").unwrap();
        let fam = tree_family("ends-in-zero").unwrap();
        let out = continuity_refine(&f, &*fam, &FiniteSeq::empty(), Range::new(3, 3), &budget()).unwrap();
        assert_eq!(out.trace.op, "continuity");
        assert!(out.pe.images.values().all(|v| v.last() == Some(0)));
    }
}
