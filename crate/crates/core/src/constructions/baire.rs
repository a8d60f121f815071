//! Refinements of functions on ℕ^ℕ: shrinking cone diameters, stabilizing
//! sibling values, and separating sibling cones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dyadic::Dyadic;
use crate::embeddings::MeetEmbedding;
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::{DepthBudget, FiniteSeq, Point};

use super::oracle::{Func, Meter, Probe, SampleKind, Value};
use super::trace::{constant, inequality, Certificate, Recorder, Relation, Stage, Trace};
use super::{base_params, checked, exhausted, first_extension, successor_images, table_embedding, Built, Range};

fn trace(op: &str, f: &Func, schedule: &EpsilonSchedule, params: serde_json::Value, mode: serde_json::Value, out: &super::PartialEmbedding, calls: u64) -> Result<Trace> {
    Trace::from_result(op, Some(f.base_name()), None, schedule, params, mode, out, calls)
}

/// A table with `diam φ[N_{π(t)}] < ε_t` on the range.
pub fn diameter_shrink(f: &Func, schedule: &EpsilonSchedule, range: Range, budget: &DepthBudget) -> Result<Built> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    diameter_shrink_with(&probe, schedule, range, budget).and_then(|pe| {
        let trace = trace("shrink", f, schedule, base_params(range, budget), json!(null), &pe, meter.used())?;
        Ok(Built { pe, trace })
    })
}

fn diameter_shrink_with(
    probe: &Probe,
    schedule: &EpsilonSchedule,
    range: Range,
    budget: &DepthBudget,
) -> Result<super::PartialEmbedding> {
    let images = successor_images(&FiniteSeq::empty(), range, budget, &probe.meter, |t, c| {
        let d = probe
            .diam(c)?
            .ok_or_else(|| Error::Precondition(format!("{} has no cone diameter bound at {c}", probe.f.name())))?;
        Ok(d < schedule.epsilon(t))
    })?
    .ok_or_else(|| exhausted("diameter_shrink"))?;
    let mut pe = checked(table_embedding(&images)?, range)?;
    let rec = Recorder { probe, schedule };
    for (t, v) in &pe.images {
        pe.certificates.push(inequality(
            format!("diam at {t}"),
            vec![rec.diameter(v)?],
            Relation::Lt,
            vec![rec.epsilon(t)],
        )?);
    }
    Ok(pe)
}

/// How the values at the selected children of a node behave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The `k`-th selected child's value is within `2^{-k}` of `limit`.
    Convergent { limit: Value },
    /// Selected values are pairwise at least `epsilon` apart.
    Discrete { epsilon: Dyadic },
}

#[derive(Debug, Clone)]
pub struct StabilizeOutcome {
    pub pe: super::PartialEmbedding,
    /// Keyed by domain node.
    pub verdicts: BTreeMap<FiniteSeq, Verdict>,
    pub trace: Trace,
}

fn sample_point(probe: &Probe, c: &FiniteSeq, kind: SampleKind) -> Point {
    match kind {
        SampleKind::Augmented => Point::Augmented(c.clone()),
        SampleKind::Baire => probe.sample(c),
    }
}

/// Child indices `j < selector_budget` of `u` whose values approach the
/// limit hint with tolerance `2^{-k}` at the `k`-th pick.
fn convergent_selection(
    probe: &Probe,
    rec: &Recorder,
    u: &FiniteSeq,
    t: &FiniteSeq,
    kind: SampleKind,
    want: u64,
    selector_budget: u64,
) -> Result<Option<(Value, Vec<u64>, Vec<Certificate>)>> {
    let Some(x) = probe.f.limit_hint(u, kind) else {
        return Ok(None);
    };
    let (mut picks, mut certs) = (Vec::new(), Vec::new());
    let mut j = 0;
    while (picks.len() as u64) < want {
        if j >= selector_budget {
            return Ok(None);
        }
        let c = u.child(j);
        let tol = Dyadic::pow2_neg(picks.len() as u32);
        let mut lhs = vec![rec.distance_to(&sample_point(probe, &c, kind), &x)?];
        if kind == SampleKind::Baire {
            match probe.diam(&c)? {
                Some(_) => lhs.push(rec.diameter(&c)?),
                None => return Ok(None),
            }
        }
        let cert = Certificate::Inequality {
            label: format!("converge at {t}, pick {}", picks.len()),
            lhs,
            relation: Relation::Lt,
            rhs: vec![constant(tol)],
        };
        if cert.holds() {
            picks.push(j);
            certs.push(cert);
        }
        j += 1;
    }
    Ok(Some((x, picks, certs)))
}

/// The largest `2^{-k}` admitting `want` pairwise separated children among
/// the first `selector_budget`, picked greedily.
fn discrete_selection(
    probe: &Probe,
    rec: &Recorder,
    u: &FiniteSeq,
    t: &FiniteSeq,
    kind: SampleKind,
    want: u64,
    selector_budget: u64,
) -> Result<Option<(Dyadic, Vec<u64>, Vec<Certificate>)>> {
    let pts: Vec<Point> = (0..selector_budget).map(|j| sample_point(probe, &u.child(j), kind)).collect();
    let vals = pts.iter().map(|p| probe.eval(p)).collect::<Result<Vec<_>>>()?;
    for k in 0..=64 {
        let eps = Dyadic::pow2_neg(k);
        let mut picks: Vec<usize> = Vec::new();
        for j in 0..vals.len() {
            if picks.len() as u64 == want {
                break;
            }
            let mut ok = true;
            for &p in &picks {
                if probe.dist(&vals[j], &vals[p])? < eps {
                    ok = false;
                    break;
                }
            }
            if ok {
                picks.push(j);
            }
        }
        if picks.len() as u64 == want {
            let mut certs = Vec::new();
            for a in 0..picks.len() {
                for b in a + 1..picks.len() {
                    certs.push(inequality(
                        format!("separated at {t}, picks {a} {b}"),
                        vec![rec.distance(&pts[picks[a]], &pts[picks[b]])?],
                        Relation::Ge,
                        vec![constant(eps.clone())],
                    )?);
                }
            }
            return Ok(Some((eps, picks.into_iter().map(|j| j as u64).collect(), certs)));
        }
    }
    Ok(None)
}

/// Reindexes children, `π(t⌢⟨i⟩) = π(t)⌢⟨ι(i)⟩`, so that at every node the
/// selected sibling values either converge or are uniformly separated.
/// `kind` picks the augmented variant or the Baire variant.
pub fn children_stabilize(
    f: &Func,
    kind: SampleKind,
    selector_budget: u64,
    range: Range,
    steps: u64,
) -> Result<StabilizeOutcome> {
    let meter = Meter::new(steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let (pe, verdicts) = children_stabilize_with(&probe, kind, selector_budget, range)?;
    let params = json!({
        "depth": range.depth,
        "branch": range.branch,
        "selector_budget": selector_budget,
        "steps": steps,
        "sample": kind,
    });
    let mode = serde_json::to_value(verdicts.iter().map(|(t, v)| (t.to_string(), v)).collect::<BTreeMap<_, _>>())
        .expect("verdicts serialize");
    let trace = trace("stabilize", f, &EpsilonSchedule::weight(), params, mode, &pe, meter.used())?;
    Ok(StabilizeOutcome { pe, verdicts, trace })
}

fn children_stabilize_with(
    probe: &Probe,
    kind: SampleKind,
    selector_budget: u64,
    range: Range,
) -> Result<(super::PartialEmbedding, BTreeMap<FiniteSeq, Verdict>)> {
    let schedule = EpsilonSchedule::weight();
    let rec = Recorder { probe, schedule: &schedule };
    let mut images = BTreeMap::from([(FiniteSeq::empty(), FiniteSeq::empty())]);
    let mut verdicts = BTreeMap::new();
    let mut certs = Vec::new();
    for t in range.parents() {
        let u = images[&t].clone();
        let want = range.branch;
        let (verdict, picks, c) =
            if let Some((x, p, c)) = convergent_selection(probe, &rec, &u, &t, kind, want, selector_budget)? {
                (Verdict::Convergent { limit: x }, p, c)
            } else if let Some((e, p, c)) = discrete_selection(probe, &rec, &u, &t, kind, want, selector_budget)? {
                (Verdict::Discrete { epsilon: e }, p, c)
            } else {
                return Err(exhausted(format!("children_stabilize at {t}")));
            };
        for (i, j) in picks.into_iter().enumerate() {
            images.insert(t.child(i as u64), u.child(j));
        }
        verdicts.insert(t, verdict);
        certs.extend(c);
    }
    let mut pe = checked(table_embedding(&images)?, range)?;
    pe.certificates = certs;
    Ok((pe, verdicts))
}

/// Child words `w_i` with pairwise distinct first entries such that sibling
/// cones of `π(t)` are separated by more than the sum of their diameters.
pub fn disjointify(f: &Func, range: Range, budget: &DepthBudget) -> Result<Built> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let pe = disjointify_with(&probe, range, budget)?;
    let trace = trace("disjointify", f, &EpsilonSchedule::weight(), base_params(range, budget), json!(null), &pe, meter.used())?;
    Ok(Built { pe, trace })
}

fn disjointify_with(probe: &Probe, range: Range, budget: &DepthBudget) -> Result<super::PartialEmbedding> {
    let schedule = EpsilonSchedule::weight();
    let rec = Recorder { probe, schedule: &schedule };
    let diam = |c: &FiniteSeq| -> Result<Dyadic> {
        probe
            .diam(c)?
            .ok_or_else(|| Error::Precondition(format!("{} has no cone diameter bound at {c}", probe.f.name())))
    };
    let firsts = budget.branch.max(range.branch);
    let mut images = BTreeMap::from([(FiniteSeq::empty(), FiniteSeq::empty())]);
    let mut certs = Vec::new();
    for t in range.parents() {
        let u = images[&t].clone();
        let mut chosen: Vec<(u64, FiniteSeq, Value, Dyadic)> = Vec::new();
        for i in 0..range.branch {
            let mut found = None;
            for j in (0..firsts).filter(|j| chosen.iter().all(|c| c.0 != *j)) {
                let hit = first_extension(&u.child(j), budget, &probe.meter, |c| {
                    let (v, d) = (probe.eval(&probe.sample(c))?, diam(c)?);
                    for (_, _, v2, d2) in &chosen {
                        if probe.dist(&v, v2)? <= d.add(d2) {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?;
                if let Some(c) = hit {
                    found = Some((j, c));
                    break;
                }
            }
            let (j, c) = found.ok_or_else(|| exhausted(format!("disjointify at {t}, child {i}")))?;
            let (v, d) = (probe.eval(&probe.sample(&c))?, diam(&c)?);
            chosen.push((j, c, v, d));
        }
        for a in 0..chosen.len() {
            for b in a + 1..chosen.len() {
                let (ca, cb) = (&chosen[a].1, &chosen[b].1);
                certs.push(inequality(
                    format!("disjoint at {t}, children {a} {b}"),
                    vec![rec.diameter(ca)?, rec.diameter(cb)?],
                    Relation::Lt,
                    vec![rec.distance(&probe.sample(ca), &probe.sample(cb))?],
                )?);
            }
        }
        for (i, (_, c, _, _)) in chosen.into_iter().enumerate() {
            images.insert(t.child(i as u64), c);
        }
    }
    let mut pe = checked(table_embedding(&images)?, range)?;
    pe.certificates = certs;
    Ok(pe)
}

fn at_stage(label: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::BudgetExceeded(m) => Error::BudgetExceeded(format!("{label} stage: {m}")),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Constant,
    EmbedsIntoBaire,
    EmbedsIntoBaireStar,
}

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub shape: Shape,
    pub pe: super::PartialEmbedding,
    pub verdicts: BTreeMap<FiniteSeq, Verdict>,
    pub trace: Trace,
}

/// Constant on some cone, or refined by shrink, stabilize (Baire variant)
/// and disjointify into a map whose verdicts are all `Discrete` (a copy of
/// ℕ^ℕ) or all `Convergent` (a copy of ℕ^ℕ_*).
pub fn classify_baire_function(
    f: &Func,
    schedule: &EpsilonSchedule,
    selector_budget: u64,
    range: Range,
    budget: &DepthBudget,
) -> Result<ClassifyOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let mut params = base_params(range, budget);
    params["selector_budget"] = json!(selector_budget);
    let rec = Recorder { probe: &probe, schedule };

    let flat = first_extension(&FiniteSeq::empty(), budget, &meter, |c| Ok(probe.diam(c)? == Some(Dyadic::zero())))?;
    if let Some(s) = flat {
        let mut pe = checked(MeetEmbedding::prefix(s.clone()), range)?;
        pe.certificates.push(inequality(
            format!("constant on the cone at {s}"),
            vec![rec.diameter(&s)?],
            Relation::Le,
            vec![constant(Dyadic::zero())],
        )?);
        pe.stages.push(Stage { label: "constant".into(), embedding: pe.embedding.clone() });
        let trace = trace("classify", f, schedule, params, json!({ "shape": Shape::Constant }), &pe, meter.used())?;
        return Ok(ClassifyOutcome { shape: Shape::Constant, pe, verdicts: BTreeMap::new(), trace });
    }

    let p1 = diameter_shrink_with(&probe, schedule, range, budget).map_err(at_stage("shrink"))?;
    let probe2 = probe.composite(&p1.embedding);
    let (p2, verdicts) =
        children_stabilize_with(&probe2, SampleKind::Baire, selector_budget, range).map_err(at_stage("stabilize"))?;
    let probe3 = probe2.composite(&p2.embedding);
    let p3 = disjointify_with(&probe3, range, budget).map_err(at_stage("disjointify"))?;

    let shape = if verdicts.values().all(|v| matches!(v, Verdict::Discrete { .. })) {
        Shape::EmbedsIntoBaire
    } else if verdicts.values().all(|v| matches!(v, Verdict::Convergent { .. })) {
        Shape::EmbedsIntoBaireStar
    } else {
        return Err(Error::CertificationFailed(
            "mixed convergent and discrete verdicts on the range; no single shape is certified".into(),
        ));
    };
    let pi = MeetEmbedding::compose(&p1.embedding, &MeetEmbedding::compose(&p2.embedding, &p3.embedding));
    let mut pe = checked(pi, range)?;
    for (label, s) in [("shrink", &p1), ("stabilize", &p2), ("disjointify", &p3)] {
        pe.stages.push(Stage { label: label.into(), embedding: s.embedding.clone() });
        pe.certificates.extend(s.certificates.iter().cloned());
    }
    let mode = json!({
        "shape": shape,
        "verdicts": verdicts.iter().map(|(t, v)| (t.to_string(), v)).collect::<BTreeMap<_, _>>(),
    });
    let trace = trace("classify", f, schedule, params, mode, &pe, meter.used())?;
    Ok(ClassifyOutcome { shape, pe, verdicts, trace })
}
