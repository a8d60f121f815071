//! Refinements driven by values at augmented points `t⌢⟨∞⟩`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dyadic::Dyadic;
use crate::embeddings::{amalgamate, MeetEmbedding};
use crate::enumeration::canonical_index;
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::{range_nodes, DepthBudget, FiniteSeq, Point};

use super::oracle::{Func, Meter, Probe, Value};
use super::trace::{constant, inequality, times, Certificate, PartialEmbedding, Recorder, Relation, Trace};
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

/// Small roots tried below a node, in canonical order.
fn candidates_below(t: &FiniteSeq, budget: &DepthBudget) -> Vec<FiniteSeq> {
    range_nodes(budget.depth.min(3), budget.branch.min(3))
        .into_iter()
        .map(|v| t.concat(&v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LimitMode {
    /// Baire-part and augmented-part values below `s` keep distance
    /// `≥ margin`.
    SeparatedClosure { s: FiniteSeq, margin: Dyadic },
    ContinuousAtBaire,
}

#[derive(Debug, Clone)]
pub struct LimitOutcome {
    pub mode: LimitMode,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// Least distance between Baire-part and augmented-part values at the
/// samples `s⌢v`, `|v| < depth`.
fn margin(probe: &Probe, s: &FiniteSeq, depth: usize, branch: u64) -> Result<Dyadic> {
    let nodes: Vec<FiniteSeq> = range_nodes(depth, branch).iter().map(|v| s.concat(v)).collect();
    let baire = nodes.iter().map(|c| probe.eval(&probe.sample(c))).collect::<Result<Vec<_>>>()?;
    let augs = nodes.iter().map(|c| probe.aug(c)).collect::<Result<Vec<_>>>()?;
    let mut m: Option<Dyadic> = None;
    for a in &baire {
        for b in &augs {
            let d = probe.dist(a, b)?;
            m = Some(m.map_or(d.clone(), |m| m.min(d)));
        }
    }
    Ok(m.unwrap_or_else(Dyadic::zero))
}

/// Either a cone where the Baire-part and augmented-part values stay apart,
/// or a table along which `φ(π(t)⌢b)` and `φ(π(t)⌢⟨∞⟩)` are within
/// `ε_{|t|}`.
///
/// Separation is judged on samples: a positive margin that does not shrink
/// between sample depths `depth - 1` and `depth`.
pub fn limit_refine(f: &Func, schedule: &EpsilonSchedule, range: Range, budget: &DepthBudget) -> Result<LimitOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let rec = Recorder { probe: &probe, schedule };
    let d = range.depth.max(2);

    for s in candidates_below(&FiniteSeq::empty(), budget) {
        let shallow = margin(&probe, &s, d - 1, range.branch)?;
        if shallow.is_zero() || margin(&probe, &s, d, range.branch)? < shallow {
            continue;
        }
        let mut pe = checked(MeetEmbedding::prefix(s.clone()), range)?;
        for v in range_nodes(d, range.branch) {
            for w in range_nodes(d, range.branch) {
                let (a, b) = (probe.sample(&s.concat(&v)), aug(&s.concat(&w)));
                pe.certificates.push(inequality(
                    format!("separated below {s}: {v} vs {w}⌢∞"),
                    vec![rec.distance(&a, &b)?],
                    Relation::Ge,
                    vec![constant(shallow.clone())],
                )?);
            }
        }
        let mode = LimitMode::SeparatedClosure { s, margin: shallow };
        let trace = trace("limit", f, schedule, base_params(range, budget), json!(mode), &pe, &meter)?;
        return Ok(LimitOutcome { mode, pe, trace });
    }

    let close = |t: &FiniteSeq, c: &FiniteSeq| -> Result<bool> {
        let (b, a) = (probe.eval(&probe.sample(c))?, probe.aug(c)?);
        Ok(probe.dist(&b, &a)? < schedule.level(t.len()))
    };
    let images = successor_images(&FiniteSeq::empty(), range, budget, &meter, close)?
        .ok_or_else(|| exhausted("limit_refine"))?;
    let mut pe = checked(table_embedding(&images)?, range)?;
    for (t, v) in &images {
        pe.certificates.push(inequality(
            format!("limit at {t}"),
            vec![rec.distance(&probe.sample(v), &aug(v))?],
            Relation::Lt,
            vec![rec.level(t.len())],
        )?);
    }
    let mode = LimitMode::ContinuousAtBaire;
    let trace = trace("limit", f, schedule, base_params(range, budget), json!(mode), &pe, &meter)?;
    Ok(LimitOutcome { mode, pe, trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BallOrDiscrete {
    DiscreteInjection,
    InsideBall { center: Value },
}

#[derive(Debug, Clone)]
pub struct EpsSplitOutcome {
    pub mode: BallOrDiscrete,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// The ball branch: a successor rule rooted at `u` keeping every
/// `φ(π(v)⌢⟨∞⟩)` within `eps` of `x = φ(u⌢⟨∞⟩)`.
fn ball_rule(probe: &Probe, u: &FiniteSeq, eps: &Dyadic, budget: &DepthBudget) -> Result<(Value, MeetEmbedding)> {
    let x = probe.aug(u)?;
    let (p, c, e, b) = (probe.clone(), x.clone(), eps.clone(), *budget);
    let pi = MeetEmbedding::rule(u.clone(), format!("ball({u}, {eps})"), move |_, img, i| {
        first_extension(&img.child(i), &b, &p.meter, |c2| Ok(p.dist(&p.aug(c2)?, &c)? < e))?
            .ok_or_else(|| exhausted(format!("ball extension of {img}⌢⟨{i}⟩")))
    });
    Ok((x, pi))
}

/// A ball embedding below `t` whose images on the range all check out.
fn find_ball(
    probe: &Probe,
    t: &FiniteSeq,
    eps: &Dyadic,
    range: Range,
    budget: &DepthBudget,
) -> Result<Option<(Value, MeetEmbedding)>> {
    for u in candidates_below(t, budget) {
        let (x, pi) = ball_rule(probe, &u, eps, budget)?;
        match range.nodes().iter().try_for_each(|v| pi.image(v).map(drop)) {
            Ok(()) => return Ok(Some((x, pi))),
            // A dry search rejects this root; an exhausted meter fails the next call.
            Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// The discrete branch: in canonical order, `π(t_n)` extends
/// `π(t'_n)⌢⟨n⟩` (`t'_n` the parent, `n` the canonical index) with value
/// at least `eps` from all earlier values.
fn discrete_injection(
    probe: &Probe,
    t: &FiniteSeq,
    eps: &Dyadic,
    range: Range,
    budget: &DepthBudget,
) -> Result<Option<BTreeMap<FiniteSeq, FiniteSeq>>> {
    let mut images: BTreeMap<FiniteSeq, FiniteSeq> = BTreeMap::new();
    let mut values: Vec<Value> = Vec::new();
    for v in range.nodes() {
        let base = match v.parent() {
            Some(p) => images[&p].child(canonical_index(&v).ok_or_else(|| Error::budget("index overflow"))?),
            None => t.clone(),
        };
        let hit = first_extension(&base, budget, &probe.meter, |c| {
            let y = probe.aug(c)?;
            for z in &values {
                if probe.dist(&y, z)? < *eps {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        let Some(c) = hit else { return Ok(None) };
        values.push(probe.aug(&c)?);
        images.insert(v, c);
    }
    Ok(Some(images))
}

fn discrete_certificates(rec: &Recorder, pe: &PartialEmbedding, eps: &Dyadic) -> Result<Vec<Certificate>> {
    let imgs: Vec<(&FiniteSeq, &FiniteSeq)> = pe.images.iter().collect();
    let mut out = Vec::new();
    for a in 0..imgs.len() {
        for b in a + 1..imgs.len() {
            out.push(inequality(
                format!("separated: {} vs {}", imgs[a].0, imgs[b].0),
                vec![rec.distance(&aug(imgs[a].1), &aug(imgs[b].1))?],
                Relation::Ge,
                vec![constant(eps.clone())],
            )?);
        }
    }
    Ok(out)
}

/// Below `t`, either all values on a table stay within `eps` of one value,
/// or the table injects into an `eps`-separated set of values.
pub fn epsilon_discrete_or_ball(
    f: &Func,
    eps: &Dyadic,
    t: &FiniteSeq,
    range: Range,
    budget: &DepthBudget,
) -> Result<EpsSplitOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let schedule = EpsilonSchedule::weight();
    let rec = Recorder { probe: &probe, schedule: &schedule };
    let mut params = base_params(range, budget);
    params["epsilon"] = json!(eps);
    params["t"] = json!(t);

    if let Some((x, pi)) = find_ball(&probe, t, eps, range, budget)? {
        let mut pe = checked(pi, range)?;
        for (v, img) in &pe.images.clone() {
            pe.certificates.push(inequality(
                format!("in ball at {v}"),
                vec![rec.distance_to(&aug(img), &x)?],
                Relation::Lt,
                vec![constant(eps.clone())],
            )?);
        }
        let mode = BallOrDiscrete::InsideBall { center: x };
        let trace = trace("eps-split", f, &schedule, params, json!(mode), &pe, &meter)?;
        return Ok(EpsSplitOutcome { mode, pe, trace });
    }
    let images = discrete_injection(&probe, t, eps, range, budget)?
        .ok_or_else(|| exhausted("epsilon_discrete_or_ball"))?;
    let mut pe = checked(table_embedding(&images)?, range)?;
    pe.certificates = discrete_certificates(&rec, &pe, eps)?;
    let mode = BallOrDiscrete::DiscreteInjection;
    let trace = trace("eps-split", f, &schedule, params, json!(mode), &pe, &meter)?;
    Ok(EpsSplitOutcome { mode, pe, trace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ShrinkMode {
    DiscreteInjection { epsilon: Dyadic },
    DiameterToZero,
}

#[derive(Debug, Clone)]
pub struct ShrinkOutcome {
    pub mode: ShrinkMode,
    pub pe: PartialEmbedding,
    pub trace: Trace,
}

/// An injection into an `ε`-separated set for one of `ε = 1, 1/2, …,
/// 2^{-depth}`, or else the amalgam of ball embeddings `π_t` of radius
/// `ε_t/2` for `φ ∘ π_{⟨⟩} ∘ … ∘ π_{t'}` (`t'` the parent of `t`), so that
/// values below `π(t)` stay within `ε_t` of each other.
pub fn shrink_or_discrete(
    f: &Func,
    schedule: &EpsilonSchedule,
    range: Range,
    budget: &DepthBudget,
) -> Result<ShrinkOutcome> {
    let meter = Meter::new(budget.steps);
    let probe = Probe::new(f.clone(), meter.clone());
    let rec = Recorder { probe: &probe, schedule };
    let params = base_params(range, budget);

    for j in 0..=range.depth as u32 {
        let eps = Dyadic::pow2_neg(j);
        if let Some(images) = discrete_injection(&probe, &FiniteSeq::empty(), &eps, range, budget)? {
            let mut pe = checked(table_embedding(&images)?, range)?;
            pe.certificates = discrete_certificates(&rec, &pe, &eps)?;
            let mode = ShrinkMode::DiscreteInjection { epsilon: eps };
            let trace = trace("shrink-or-discrete", f, schedule, params, json!(mode), &pe, &meter)?;
            return Ok(ShrinkOutcome { mode, pe, trace });
        }
    }

    let mut factors: BTreeMap<FiniteSeq, MeetEmbedding> = BTreeMap::new();
    let mut centers: BTreeMap<FiniteSeq, Value> = BTreeMap::new();
    // outer[t] = π_{⟨⟩} ∘ … ∘ π_t
    let mut outer: BTreeMap<FiniteSeq, MeetEmbedding> = BTreeMap::new();
    for t in range.nodes() {
        let above = t.parent().map(|p| outer[&p].clone());
        let local = match &above {
            Some(o) => probe.composite(o),
            None => probe.clone(),
        };
        let radius = schedule.epsilon(&t).half();
        let (x, pi) = find_ball(&local, &t, &radius, range, budget)?
            .ok_or_else(|| exhausted(format!("shrink_or_discrete: no ball factor at {t}")))?;
        outer.insert(
            t.clone(),
            match &above {
                Some(o) => MeetEmbedding::compose(o, &pi),
                None => pi.clone(),
            },
        );
        factors.insert(t.clone(), pi);
        centers.insert(t, x);
    }
    let fam = factors.clone();
    let amalgam = amalgamate(
        &|t: &FiniteSeq| fam.get(t).cloned().ok_or_else(|| Error::budget(format!("no factor at {t}"))),
        range.depth,
        range.branch,
    )?;
    let mut pe = checked(amalgam, range)?;
    for (t, x) in &centers {
        for (v, img) in pe.images.iter().filter(|(v, _)| t.is_prefix_of(v)) {
            pe.certificates.push(inequality(
                format!("ball at {t}, node {v}"),
                vec![times(2, rec.distance_to(&aug(img), x)?)],
                Relation::Lt,
                vec![rec.epsilon(t)],
            )?);
        }
    }
    pe.factors = factors;
    let mode = ShrinkMode::DiameterToZero;
    let trace = trace("shrink-or-discrete", f, schedule, params, json!(mode), &pe, &meter)?;
    Ok(ShrinkOutcome { mode, pe, trace })
}
