//! Steering values away from given points and from each other.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dyadic::Dyadic;
use crate::embeddings::{amalgamate, MeetEmbedding};
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::{DepthBudget, FiniteSeq, Point};

use super::oracle::{Func, Meter, Probe, Value};
use super::trace::{constant, inequality, times, PartialEmbedding, Recorder, Relation, Term, Trace};
use super::{base_params, checked, exhausted, first_extension, successor_images, table_embedding, Range};

fn aug(t: &FiniteSeq) -> Point {
    Point::Augmented(t.clone())
}

fn trace(
    op: &str,
    f: &Func,
    schedule: &EpsilonSchedule,
    params: serde_json::Value,
    mode: serde_json::Value,
    pe: &PartialEmbedding,
    meter: &Meter,
) -> Result<Trace> {
    Trace::from_result(op, Some(f.base_name()), None, schedule, params, mode, pe, meter.used())
}

/// The least distance from the augmented samples `s⌢v⌢⟨∞⟩` (`v` in range)
/// to the members of `avoid`.
fn clearance(probe: &Probe, s: &FiniteSeq, avoid: &[Value], range: Range) -> Result<Option<Dyadic>> {
    let mut m: Option<Dyadic> = None;
    for v in range.nodes() {
        let y = probe.aug(&s.concat(&v))?;
        for x in avoid {
            let d = probe.dist(&y, x)?;
            m = Some(m.map_or(d.clone(), |m| m.min(d)));
        }
    }
    Ok(m)
}

fn clearance_certificates(
    rec: &Recorder,
    label: &str,
    s: &FiniteSeq,
    avoid: &[Value],
    range: Range,
    relation: Relation,
    bound: &Dyadic,
    pe: &mut PartialEmbedding,
) -> Result<()> {
    for v in range.nodes() {
        for x in avoid {
            pe.certificates.push(inequality(
                format!("{label} at {s}⌢{v}"),
                vec![rec.distance_to(&aug(&s.concat(&v)), x)?],
                relation,
                vec![constant(bound.clone())],
            )?);
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PointAvoidOutcome {
    pub s: FiniteSeq,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// The first `s` in canonical order whose augmented samples `s⌢v⌢⟨∞⟩` all
/// differ from `x`, with the prefix embedding `t ↦ s⌢t`.
pub fn point_avoid(f: &Func, x: &Value, range: Range, budget: &DepthBudget) -> Result<PointAvoidOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let schedule = EpsilonSchedule::weight();
    let rec = Recorder { probe: &probe, schedule: &schedule };
    let avoid = std::slice::from_ref(x);
    let s = first_extension(&FiniteSeq::empty(), budget, &meter, |s| {
        Ok(clearance(&probe, s, avoid, range)?.is_some_and(|m| !m.is_zero()))
    })?
    .ok_or_else(|| exhausted("point_avoid"))?;
    let mut pe = checked(MeetEmbedding::prefix(s.clone()), range)?;
    clearance_certificates(&rec, "avoids x", &s, avoid, range, Relation::Gt, &Dyadic::zero(), &mut pe)?;
    let mut params = base_params(range, budget);
    params["x"] = json!(x);
    let tr = trace("avoid", f, &schedule, params, json!({ "s": s }), &pe, &meter)?;
    Ok(PointAvoidOutcome { s, pe, trace: tr })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FiniteAvoidMode {
    ConvergesToMember { x: Value },
    /// Samples below `u` stay `≥ epsilon` from every member of `F`.
    ClosureAvoidsF { epsilon: Dyadic, u: FiniteSeq },
}

#[derive(Debug, Clone)]
pub struct FiniteAvoidOutcome {
    pub mode: FiniteAvoidMode,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// Below `t`: a table along which `φ(π(v)⌢⟨∞⟩)` is within `ε_v` of one
/// member of `F`, tried in the order of `F`; otherwise the largest
/// `ε = 2^{-j}` and first `u ⊒ t` keeping the samples below `u` at least
/// `ε` from `F`.
pub fn finite_avoid_or_converge(
    f: &Func,
    family: &[Value],
    t: &FiniteSeq,
    schedule: &EpsilonSchedule,
    range: Range,
    budget: &DepthBudget,
) -> Result<FiniteAvoidOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let rec = Recorder { probe: &probe, schedule };
    let mut params = base_params(range, budget);
    params["F"] = json!(family);
    params["t"] = json!(t);

    for x in family {
        let near = |v: &FiniteSeq, c: &FiniteSeq| -> Result<bool> { Ok(probe.dist(&probe.aug(c)?, x)? < schedule.epsilon(v)) };
        let Some(images) = successor_images(t, range, budget, &meter, near)? else { continue };
        let mut pe = checked(table_embedding(&images)?, range)?;
        for (v, img) in &images {
            pe.certificates.push(inequality(
                format!("near x at {v}"),
                vec![rec.distance_to(&aug(img), x)?],
                Relation::Lt,
                vec![rec.epsilon(v)],
            )?);
        }
        let mode = FiniteAvoidMode::ConvergesToMember { x: x.clone() };
        let tr = trace("finite-avoid", f, schedule, params, json!(mode), &pe, &meter)?;
        return Ok(FiniteAvoidOutcome { mode, pe, trace: tr });
    }

    let mut best: Option<(u32, FiniteSeq)> = None;
    let mut cands = Vec::new();
    first_extension(t, budget, &meter, |u| {
        cands.push(u.clone());
        Ok(false)
    })?;
    for u in cands {
        let Some(m) = clearance(&probe, &u, family, range)? else { continue };
        let Some(j) = (0..=64u32).find(|&j| m >= Dyadic::pow2_neg(j)) else { continue };
        if best.as_ref().is_none_or(|(bj, _)| j < *bj) {
            best = Some((j, u));
        }
        if best.as_ref().is_some_and(|(bj, _)| *bj == 0) {
            break;
        }
    }
    let (j, u) = best.ok_or_else(|| exhausted("finite_avoid_or_converge"))?;
    let eps = Dyadic::pow2_neg(j);
    let mut pe = checked(MeetEmbedding::prefix(u.clone()), range)?;
    clearance_certificates(&rec, "clear of F", &u, family, range, Relation::Ge, &eps, &mut pe)?;
    let mode = FiniteAvoidMode::ClosureAvoidsF { epsilon: eps, u };
    let tr = trace("finite-avoid", f, schedule, params, json!(mode), &pe, &meter)?;
    Ok(FiniteAvoidOutcome { mode, pe, trace: tr })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteMode {
    GlobalConvergence,
    PairwiseAvoidance,
}

#[derive(Debug, Clone)]
pub struct DiscreteOutcome {
    pub mode: DiscreteMode,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// Either values at `π(t_n)⌢⟨∞⟩` form a Cauchy family
/// (`d(v_m, v_n) < max(ε_{t_m}, ε_{t_n})`), or an amalgam of prefix factors
/// keeps every earlier value `φ(π(t_m)⌢⟨∞⟩)` away from the values below
/// `π(t_n)`.
pub fn discrete_refine(f: &Func, schedule: &EpsilonSchedule, range: Range, budget: &DepthBudget) -> Result<DiscreteOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let rec = Recorder { probe: &probe, schedule };
    let params = base_params(range, budget);
    let eps_term = |a: &FiniteSeq, b: &FiniteSeq| -> Term {
        if schedule.epsilon(a) >= schedule.epsilon(b) {
            rec.epsilon(a)
        } else {
            rec.epsilon(b)
        }
    };

    let mut done: Vec<(FiniteSeq, Value)> = Vec::new();
    let cauchy = successor_images(&FiniteSeq::empty(), range, budget, &meter, |t, c| {
        let y = probe.aug(c)?;
        for (m, v) in &done {
            if probe.dist(&y, v)? >= schedule.epsilon(m).max(schedule.epsilon(t)) {
                return Ok(false);
            }
        }
        done.push((t.clone(), y));
        Ok(true)
    })?;
    if let Some(images) = cauchy {
        let mut pe = checked(table_embedding(&images)?, range)?;
        let imgs: Vec<_> = images.iter().collect();
        for a in 0..imgs.len() {
            for b in a + 1..imgs.len() {
                pe.certificates.push(inequality(
                    format!("cauchy: {} vs {}", imgs[a].0, imgs[b].0),
                    vec![rec.distance(&aug(imgs[a].1), &aug(imgs[b].1))?],
                    Relation::Lt,
                    vec![eps_term(imgs[a].0, imgs[b].0)],
                )?);
            }
        }
        let mode = DiscreteMode::GlobalConvergence;
        let tr = trace("discrete-refine", f, schedule, params, json!(mode), &pe, &meter)?;
        return Ok(DiscreteOutcome { mode, pe, trace: tr });
    }

    // Factors in canonical order: π_{t_n} = prefix(s_n), s_n ⊒ t_n, with the
    // samples of φ ∘ π_{⟨⟩} ∘ … ∘ π_{t'_n} below s_n clear of earlier values.
    let mut factors: BTreeMap<FiniteSeq, MeetEmbedding> = BTreeMap::new();
    let mut outer: BTreeMap<FiniteSeq, MeetEmbedding> = BTreeMap::new();
    let mut earlier: Vec<Value> = Vec::new();
    for t in range.nodes() {
        let above = t.parent().map(|p| outer[&p].clone());
        let local = above.as_ref().map_or_else(|| probe.clone(), |o| probe.composite(o));
        let s = first_extension(&t, budget, &meter, |s| {
            Ok(clearance(&local, &s.concat(&t), &earlier, range)?.is_none_or(|m| !m.is_zero()))
        })?
        .ok_or_else(|| exhausted(format!("discrete_refine: no clear factor at {t}")))?;
        let pi = MeetEmbedding::prefix(s);
        let o = match &above {
            Some(o) => MeetEmbedding::compose(o, &pi),
            None => pi.clone(),
        };
        earlier.push(probe.aug(&o.image(&t)?)?);
        outer.insert(t.clone(), o);
        factors.insert(t, pi);
    }
    let fam = factors.clone();
    let amalgam = amalgamate(
        &|t: &FiniteSeq| fam.get(t).cloned().ok_or_else(|| Error::budget(format!("no factor at {t}"))),
        range.depth,
        range.branch,
    )?;
    let mut pe = checked(amalgam, range)?;
    let order = range.nodes();
    for (n, tn) in order.iter().enumerate() {
        let below: Vec<&FiniteSeq> = order.iter().filter(|v| tn.is_prefix_of(v)).collect();
        let mut terms = Vec::new();
        for tm in &order[..n] {
            let x = probe.aug(pe.image(tm))?;
            for v in &below {
                terms.push((tm.clone(), (*v).clone(), rec.distance_to(&aug(pe.image(v)), &x)?));
            }
        }
        let Some(lb) = terms.iter().map(|(_, _, t)| t.recorded.clone()).min() else { continue };
        if lb.is_zero() {
            let (tm, v, _) = terms.into_iter().find(|(_, _, t)| t.recorded.is_zero()).expect("a zero term");
            return Err(Error::CertificationFailed(format!(
                "value at {tm}⌢∞ recurs below {tn}, at {v}⌢∞"
            )));
        }
        for (tm, v, term) in terms {
            pe.certificates.push(inequality(
                format!("clear: {tm} vs {v} below {tn}"),
                vec![term],
                Relation::Ge,
                vec![constant(lb.clone())],
            )?);
        }
    }
    pe.factors = factors;
    let mode = DiscreteMode::PairwiseAvoidance;
    let tr = trace("discrete-refine", f, schedule, params, json!(mode), &pe, &meter)?;
    Ok(DiscreteOutcome { mode, pe, trace: tr })
}

#[derive(Debug, Clone)]
pub struct DisjointOutcome {
    pub s: FiniteSeq,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// Given `b` whose value is `≥ delta` from the augmented samples, the first
/// proper initial segment `s` of `b` with `3·diam φ[N_s] < delta`; Baire
/// values below `s` then stay within `delta/3` of `φ(b)`.
pub fn disjoint_refine(
    f: &Func,
    b: &Point,
    delta: &Dyadic,
    range: Range,
    budget: &DepthBudget,
) -> Result<DisjointOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let schedule = EpsilonSchedule::weight();
    let rec = Recorder { probe: &probe, schedule: &schedule };
    if !b.is_infinite() {
        return Err(Error::domain("the witness b must be a point of ℕ^ℕ"));
    }
    let fb = probe.eval(b)?;
    for v in range.nodes() {
        let d = probe.dist(&fb, &probe.aug(&v)?)?;
        if d < *delta {
            return Err(Error::CertificationFailed(format!(
                "witness too close: d(φ(b), φ({v}⌢∞)) = {d} < {delta}"
            )));
        }
    }
    let s = (0..budget.depth)
        .map(|i| b.node_prefix(i))
        .find_map(|s| match probe.diam(&s) {
            Ok(Some(d)) if d.mul_u64(3) < *delta => Some(Ok(s)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .transpose()?
        .ok_or_else(|| exhausted("disjoint_refine"))?;

    let mut pe = checked(MeetEmbedding::prefix(s.clone()), range)?;
    pe.certificates.push(inequality(
        format!("3·diam at {s}"),
        vec![times(3, rec.diameter(&s)?)],
        Relation::Lt,
        vec![constant(delta.clone())],
    )?);
    for v in range.nodes() {
        let c = s.concat(&v);
        pe.certificates.push(inequality(
            format!("baire sample below {s}: {v}"),
            vec![times(3, rec.distance_to(&probe.sample(&c), &fb)?)],
            Relation::Lt,
            vec![constant(delta.clone())],
        )?);
        pe.certificates.push(inequality(
            format!("augmented sample below {s}: {v}"),
            vec![rec.distance_to(&aug(&c), &fb)?],
            Relation::Ge,
            vec![constant(delta.clone())],
        )?);
    }
    let mut params = base_params(range, budget);
    params["b"] = json!(b);
    params["delta"] = json!(delta);
    let tr = trace("disjoint-refine", f, &schedule, params, json!({ "s": s }), &pe, &meter)?;
    Ok(DisjointOutcome { s, pe, trace: tr })
}
