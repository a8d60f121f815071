//! Construction results, certificates, and their JSON traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::embeddings::{image_map, MeetEmbedding};
use crate::error::{Error, Result};
use crate::metric::EpsilonSchedule;
use crate::sequences::{FiniteSeq, Point};

use super::oracle::{Probe, Value};

/// One side of a recorded distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// The registry function evaluated at this point.
    Eval(Point),
    Fixed(Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Distance { a: Endpoint, b: Endpoint },
    /// The registry function's cone diameter bound at this node.
    Diameter(FiniteSeq),
    Constant(Dyadic),
    /// `ε_t` under the trace's schedule.
    Epsilon(FiniteSeq),
    /// `ε_{0^n}`.
    LevelEpsilon(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: u64,
    pub quantity: Quantity,
    pub recorded: Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn holds(self, l: &Dyadic, r: &Dyadic) -> bool {
        match self {
            Relation::Lt => l < r,
            Relation::Le => l <= r,
            Relation::Gt => l > r,
            Relation::Ge => l >= r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `node ∈ set` (at `level` for families) is `expected`.
    Membership {
        set: String,
        level: Option<usize>,
        node: FiniteSeq,
        expected: bool,
    },
    /// `Σ lhs  relation  Σ rhs`, each term `coeff · quantity`.
    Inequality {
        label: String,
        lhs: Vec<Term>,
        relation: Relation,
        rhs: Vec<Term>,
    },
}

impl Certificate {
    pub fn holds(&self) -> bool {
        match self {
            Certificate::Membership { .. } => true,
            Certificate::Inequality { lhs, relation, rhs, .. } => {
                relation.holds(&sum_recorded(lhs), &sum_recorded(rhs))
            }
        }
    }
}

pub(crate) fn sum_recorded(terms: &[Term]) -> Dyadic {
    terms
        .iter()
        .fold(Dyadic::zero(), |acc, t| acc.add(&t.recorded.mul_u64(t.coeff)))
}

/// Builds certificate terms, recording values in terms of the registry
/// function so that a trace can be replayed without the composite.
pub(crate) struct Recorder<'a> {
    pub probe: &'a Probe,
    pub schedule: &'a EpsilonSchedule,
}

impl Recorder<'_> {
    pub fn distance(&self, a: &Point, b: &Point) -> Result<Term> {
        let (va, vb) = (self.probe.eval(a)?, self.probe.eval(b)?);
        Ok(Term {
            coeff: 1,
            recorded: self.probe.dist(&va, &vb)?,
            quantity: Quantity::Distance {
                a: Endpoint::Eval(self.probe.f.resolve(a)?),
                b: Endpoint::Eval(self.probe.f.resolve(b)?),
            },
        })
    }

    pub fn distance_to(&self, a: &Point, x: &Value) -> Result<Term> {
        let va = self.probe.eval(a)?;
        Ok(Term {
            coeff: 1,
            recorded: self.probe.dist(&va, x)?,
            quantity: Quantity::Distance {
                a: Endpoint::Eval(self.probe.f.resolve(a)?),
                b: Endpoint::Fixed(x.clone()),
            },
        })
    }

    pub fn diameter(&self, t: &FiniteSeq) -> Result<Term> {
        let d = self
            .probe
            .diam(t)?
            .ok_or_else(|| Error::Precondition(format!("no cone diameter bound at {t}")))?;
        Ok(Term {
            coeff: 1,
            recorded: d,
            quantity: Quantity::Diameter(self.probe.f.resolve_node(t)?),
        })
    }

    pub fn epsilon(&self, t: &FiniteSeq) -> Term {
        Term {
            coeff: 1,
            recorded: self.schedule.epsilon(t),
            quantity: Quantity::Epsilon(t.clone()),
        }
    }

    pub fn level(&self, n: usize) -> Term {
        Term {
            coeff: 1,
            recorded: self.schedule.level(n),
            quantity: Quantity::LevelEpsilon(n),
        }
    }
}

pub(crate) fn constant(d: Dyadic) -> Term {
    Term {
        coeff: 1,
        recorded: d.clone(),
        quantity: Quantity::Constant(d),
    }
}

pub(crate) fn times(k: u64, mut t: Term) -> Term {
    t.coeff *= k;
    t
}

pub(crate) fn inequality(label: impl Into<String>, lhs: Vec<Term>, relation: Relation, rhs: Vec<Term>) -> Result<Certificate> {
    let c = Certificate::Inequality {
        label: label.into(),
        lhs,
        relation,
        rhs,
    };
    if !c.holds() {
        return Err(Error::CertificationFailed(format!("{c:?}")));
    }
    Ok(c)
}

/// A labelled intermediate embedding.
#[derive(Debug, Clone)]
pub struct Stage {
    pub label: String,
    pub embedding: MeetEmbedding,
}

/// An embedding together with its table on the range `length < depth`,
/// entries `< branch`, and the evidence gathered while building it.
#[derive(Debug, Clone)]
pub struct PartialEmbedding {
    pub embedding: MeetEmbedding,
    pub depth: usize,
    pub branch: u64,
    pub images: BTreeMap<FiniteSeq, FiniteSeq>,
    pub stages: Vec<Stage>,
    /// The factors `π_t` of an amalgam, on the range.
    pub factors: BTreeMap<FiniteSeq, MeetEmbedding>,
    pub certificates: Vec<Certificate>,
}

impl PartialEmbedding {
    pub fn new(embedding: MeetEmbedding, depth: usize, branch: u64) -> Result<Self> {
        let images = image_map(&embedding, depth, branch)?;
        Ok(PartialEmbedding {
            embedding,
            depth,
            branch,
            images,
            stages: Vec::new(),
            factors: BTreeMap::new(),
            certificates: Vec::new(),
        })
    }

    pub fn image(&self, t: &FiniteSeq) -> &FiniteSeq {
        &self.images[t]
    }

    pub fn table_doc(&self) -> TableDoc {
        TableDoc {
            depth: self.depth,
            branch: self.branch,
            entries: self.images.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub depth: usize,
    pub branch: u64,
    pub entries: Vec<(FiniteSeq, FiniteSeq)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDoc {
    pub label: String,
    pub root: FiniteSeq,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableDoc>,
}

/// A self-contained, replayable record of one construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_set: Option<String>,
    pub schedule: String,
    pub params: serde_json::Value,
    pub mode: serde_json::Value,
    pub table: TableDoc,
    pub stages: Vec<StageDoc>,
    pub certificates: Vec<Certificate>,
    pub oracle_calls: u64,
}

impl Trace {
    #[allow(clippy::too_many_arguments)]
    pub fn from_result(
        op: &str,
        function: Option<String>,
        tree_set: Option<String>,
        schedule: &EpsilonSchedule,
        params: serde_json::Value,
        mode: serde_json::Value,
        pe: &PartialEmbedding,
        oracle_calls: u64,
    ) -> Result<Trace> {
        let stages = pe
            .stages
            .iter()
            .map(|s| {
                let table = s
                    .embedding
                    .as_table()
                    .map(|_| image_map(&s.embedding, pe.depth, pe.branch))
                    .transpose()?
                    .map(|m| TableDoc {
                        depth: pe.depth,
                        branch: pe.branch,
                        entries: m.into_iter().collect(),
                    });
                Ok(StageDoc {
                    label: s.label.clone(),
                    root: s.embedding.root()?,
                    table,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trace {
            op: op.to_string(),
            function,
            tree_set,
            schedule: schedule.name().to_string(),
            params,
            mode,
            table: pe.table_doc(),
            stages,
            certificates: pe.certificates.clone(),
            oracle_calls,
        })
    }
}
