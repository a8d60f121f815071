use clap::{Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use bairestar::constructions::registry::{self, function, tree_family, tree_set};
use bairestar::constructions::*;
use bairestar::{DepthBudget, Error, Point, Result};

use crate::{parse, parse_dyadic, parse_seq, read_doc, Opts};

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    Augmented,
    Baire,
}

#[derive(Subcommand)]
pub enum ConstructCommand {
    /// Registry functions, tree sets and level families.
    Registry,
    /// Monochromatic ∧-embedding for a tree set.
    Ramsey {
        #[arg(long)]
        set: String,
    },
    /// ∧-embedding into N_s with π(t) ∈ T_|t|.
    Category {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "[]")]
        s: String,
    },
    /// Category refinement against a continuity certificate for a function.
    Continuity {
        #[arg(long = "fn")]
        func: String,
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "[]")]
        s: String,
    },
    /// Cone diameters below ε_t.
    Shrink {
        #[arg(long = "fn")]
        func: String,
    },
    /// Children converge or stay uniformly apart.
    Stabilize {
        #[arg(long = "fn")]
        func: String,
        #[arg(long, value_enum, default_value = "augmented")]
        kind: Kind,
        #[arg(long, default_value_t = 16)]
        selector_budget: u64,
    },
    /// Child cones with pairwise disjoint value closures.
    Disjointify {
        #[arg(long = "fn")]
        func: String,
    },
    /// Separated closure or continuity at Baire points.
    Limit {
        #[arg(long = "fn")]
        func: String,
    },
    /// ε-discrete injection or a table inside one ε-ball.
    EpsSplit {
        #[arg(long = "fn")]
        func: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "[]")]
        t: String,
    },
    /// Discrete injection or diameters shrinking to zero.
    ShrinkOrDiscrete {
        #[arg(long = "fn")]
        func: String,
    },
    /// A cone whose augmented values avoid x.
    Avoid {
        #[arg(long = "fn")]
        func: String,
        /// A value document, or a bare dyadic.
        #[arg(long)]
        x: String,
    },
    /// Convergence to a member of F, or closure avoiding F.
    FiniteAvoid {
        #[arg(long = "fn")]
        func: String,
        /// JSON list of values or dyadics.
        #[arg(long = "set")]
        values: String,
        #[arg(long, default_value = "[]")]
        t: String,
    },
    /// Global convergence or pairwise avoidance.
    DiscreteRefine {
        #[arg(long = "fn")]
        func: String,
    },
    /// A cone around b whose values stay δ-separated from the augmented values.
    DisjointRefine {
        #[arg(long = "fn")]
        func: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        delta: String,
    },
    /// Constant, EmbedsIntoBaire or EmbedsIntoBaireStar.
    Classify {
        #[arg(long = "fn")]
        func: String,
        #[arg(long, default_value_t = 16)]
        selector_budget: u64,
    },
    /// Re-verify a trace (file path, `-` for stdin, or inline JSON).
    Recheck { trace: String },
}

fn parse_value(text: &str) -> Result<Value> {
    parse::<Value>("value", text).or_else(|_| parse_dyadic(text).map(Value::scalar))
}

fn parse_values(text: &str) -> Result<Vec<Value>> {
    let items: Vec<Json> = parse("value list", text)?;
    items
        .iter()
        .map(|j| match j {
            Json::String(s) => parse_dyadic(s).map(Value::scalar),
            Json::Number(n) => parse_dyadic(&n.to_string()).map(Value::scalar),
            other => parse_value(&other.to_string()),
        })
        .collect()
}

/// Common output shape: the result summary, the certificates, and the full trace.
fn doc(result: Json, trace: &Trace) -> Result<Json> {
    let images: Vec<_> = trace.table.entries.clone();
    Ok(json!({
        "op": trace.op,
        "result": result,
        "images": images,
        "certificates": trace.certificates,
        "trace": trace,
    }))
}

pub fn run(cmd: ConstructCommand, o: &Opts) -> Result<Json> {
    let (depth, branch) = o.range();
    let r = Range::new(depth, branch);
    let b = DepthBudget::new(o.search_depth, o.search_branch, o.steps)?;
    let w = o.schedule()?;
    match cmd {
        ConstructCommand::Registry => {
            let fns: Vec<Json> = registry::function_names()
                .into_iter()
                .map(|(n, d)| json!({ "name": n, "description": d }))
                .collect();
            Ok(json!({
                "functions": fns,
                "tree_sets": registry::tree_set_names(),
                "tree_families": registry::tree_family_names(),
            }))
        }
        ConstructCommand::Ramsey { set } => {
            let out = ramsey_split(tree_set(&set)?.as_ref(), r, &b)?;
            doc(json!({ "side": out.side }), &out.trace)
        }
        ConstructCommand::Category { family, s } => {
            let out = category_refine(tree_family(&family)?.as_ref(), &parse_seq(&s)?, r, &b)?;
            doc(json!({}), &out.trace)
        }
        ConstructCommand::Continuity { func, family, s } => {
            let out = continuity_refine(&function(&func)?, tree_family(&family)?.as_ref(), &parse_seq(&s)?, r, &b)?;
            doc(json!({}), &out.trace)
        }
        ConstructCommand::Shrink { func } => {
            let out = diameter_shrink(&function(&func)?, &w, r, &b)?;
            doc(json!({}), &out.trace)
        }
        ConstructCommand::Stabilize { func, kind, selector_budget } => {
            let kind = match kind {
                Kind::Augmented => SampleKind::Augmented,
                Kind::Baire => SampleKind::Baire,
            };
            let out = children_stabilize(&function(&func)?, kind, selector_budget, r, o.steps)?;
            let verdicts: Vec<_> = out.verdicts.iter().collect();
            doc(json!({ "verdicts": verdicts }), &out.trace)
        }
        ConstructCommand::Disjointify { func } => {
            let out = disjointify(&function(&func)?, r, &b)?;
            doc(json!({}), &out.trace)
        }
        ConstructCommand::Limit { func } => {
            let out = limit_refine(&function(&func)?, &w, r, &b)?;
            doc(json!(out.mode), &out.trace)
        }
        ConstructCommand::EpsSplit { func, eps, t } => {
            let out = epsilon_discrete_or_ball(&function(&func)?, &parse_dyadic(&eps)?, &parse_seq(&t)?, r, &b)?;
            doc(json!(out.mode), &out.trace)
        }
        ConstructCommand::ShrinkOrDiscrete { func } => {
            let out = shrink_or_discrete(&function(&func)?, &w, r, &b)?;
            doc(json!(out.mode), &out.trace)
        }
        ConstructCommand::Avoid { func, x } => {
            let out = point_avoid(&function(&func)?, &parse_value(&x)?, r, &b)?;
            doc(json!({ "s": out.s }), &out.trace)
        }
        ConstructCommand::FiniteAvoid { func, values, t } => {
            let f = function(&func)?;
            let out = finite_avoid_or_converge(&f, &parse_values(&values)?, &parse_seq(&t)?, &w, r, &b)?;
            doc(json!(out.mode), &out.trace)
        }
        ConstructCommand::DiscreteRefine { func } => {
            let out = discrete_refine(&function(&func)?, &w, r, &b)?;
            doc(json!({ "mode": out.mode }), &out.trace)
        }
        ConstructCommand::DisjointRefine { func, b: point, delta } => {
            let p: Point = parse("point", &point)?;
            let out = disjoint_refine(&function(&func)?, &p, &parse_dyadic(&delta)?, r, &b)?;
            doc(json!({ "s": out.s }), &out.trace)
        }
        ConstructCommand::Classify { func, selector_budget } => {
            let out = classify_baire_function(&function(&func)?, &w, selector_budget, r, &b)?;
            let verdicts: Vec<_> = out.verdicts.iter().collect();
            doc(json!({ "shape": out.shape, "verdicts": verdicts }), &out.trace)
        }
        ConstructCommand::Recheck { trace } => recheck_doc(&trace),
    }
}

/// Accepts a bare trace or a construct output carrying one under "trace".
pub fn recheck_doc(arg: &str) -> Result<Json> {
    let text = read_doc(arg)?;
    let mut j: Json = parse("trace", &text)?;
    if let Some(inner) = j.get_mut("trace") {
        j = inner.take();
    }
    let trace: Trace = serde_json::from_value(j).map_err(|e| Error::Parse(format!("trace: {e}")))?;
    let report = recheck(&trace)?;
    Ok(json!({ "ok": report.ok(), "report": report }))
}
