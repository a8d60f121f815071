use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use bairestar::catalog::{self, samples, Payload, TaggedValue};
use bairestar::constructions::registry;
use bairestar::embeddings::{image_map, meet_preservation_oracle, validate_embedding, EmbeddingSpec, MeetCheck};
use bairestar::sequences::{split_index, Split};
use bairestar::{
    basic_member, cover_decide, distance, extend, meet, neighborhood_of, preimage_cone, uncovered_descent,
    BasicClopen, CatalogFunction, CoverResult, DepthBudget, DistanceResult, Dyadic, EpsilonSchedule, Error,
    FiniteSeq, MeetEmbedding, Pairing, Point, Result, Validation,
};

mod construct;

#[derive(Parser)]
#[command(name = "bairestar", version, about = "Exact computations on the compactified Baire space ℕ^{≤ℕ}_*")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Opts {
    /// Depth bound: the budget depth, or the output range depth for embeddings and constructions.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Branch bound, as for --depth.
    #[arg(long, global = true)]
    branch: Option<u64>,
    /// Maximum oracle calls.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    steps: u64,
    /// Depth of extension searches in constructions.
    #[arg(long, global = true, default_value_t = 4)]
    search_depth: usize,
    /// Entry bound of extension searches in constructions.
    #[arg(long, global = true, default_value_t = 4)]
    search_branch: u64,
    /// Named ε schedule.
    #[arg(long, global = true, default_value = "weight")]
    schedule: String,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

impl Opts {
    /// Budget for point computations.
    fn budget(&self) -> Result<DepthBudget> {
        DepthBudget::new(self.depth.unwrap_or(12), self.branch.unwrap_or(4), self.steps)
    }

    /// `(depth, branch)` of a tabulated range.
    fn range(&self) -> (usize, u64) {
        (self.depth.unwrap_or(3), self.branch.unwrap_or(3))
    }

    fn schedule(&self) -> Result<EpsilonSchedule> {
        EpsilonSchedule::named(&self.schedule)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two points.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Meet of two finite sequences, and the split index of two points.
    Meet {
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// ε_t or the level value ε_n.
    Eps {
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Membership of a point in a basic set, or a basic neighbourhood of diameter < radius.
    Member {
        #[arg(long)]
        point: String,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        radius: Option<String>,
    },
    /// Decide whether a finite family of basic sets covers the space.
    CoverCheck {
        #[arg(long)]
        family: String,
        /// Random points for a soundness cross-check.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// An explicit uncovered point of a non-covering family.
    Descent {
        #[arg(long)]
        family: String,
    },
    #[command(subcommand)]
    Embed(EmbedCommand),
    #[command(subcommand)]
    Catalog(CatalogCommand),
    #[command(subcommand)]
    Construct(construct::ConstructCommand),
    /// Re-verify a construction trace (file path, `-` for stdin, or inline JSON).
    Recheck { trace: String },
}

#[derive(Subcommand)]
enum EmbedCommand {
    /// Check the successor conditions and meet preservation on the range.
    Check {
        #[arg(long)]
        pi: String,
    },
    /// Images of nodes, or of every node in range.
    Eval {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        t: Option<String>,
    },
    /// The extension of π to a point.
    Extend {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        point: String,
    },
    /// Images of `outer ∘ inner` on the range.
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
    /// The cone whose extension image lands in N_t.
    Preimage {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        t: String,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the descriptors of catalog a (24) or b (27).
    List {
        #[arg(long, default_value = "b")]
        set: String,
    },
    /// Evaluate catalog entry `fn` (an index into catalog b) at a point.
    Eval {
        #[arg(long = "fn")]
        index: usize,
        #[arg(long)]
        point: String,
    },
    /// Check φ∘π̂ = ψ∘f on sampled points, with φ the entry itself or a registry function.
    CheckEmbed {
        #[arg(long = "fn")]
        index: usize,
        #[arg(long)]
        pi: String,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long)]
        phi: Option<String>,
    },
}

pub fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_seq(text: &str) -> Result<FiniteSeq> {
    parse("sequence", text)
}

pub fn parse_dyadic(text: &str) -> Result<Dyadic> {
    text.trim_matches('"').parse()
}

fn parse_embedding(text: &str) -> Result<MeetEmbedding> {
    parse::<EmbeddingSpec>("embedding", text)?.build()
}

/// A document from a path, `-` for stdin, or inline JSON.
pub fn read_doc(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    let mut text = String::new();
    if arg == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
    }
    Ok(text)
}

fn distance_doc(d: DistanceResult) -> Json {
    match d {
        DistanceResult::Exact(x) => json!({ "exact": x }),
        DistanceResult::Bounded(u) => json!({ "bounded": u }),
    }
}

fn images_doc(pi: &MeetEmbedding, depth: usize, branch: u64) -> Result<Json> {
    let m = image_map(pi, depth, branch)?;
    Ok(json!(m.into_iter().collect::<Vec<_>>()))
}

/// JSON of a point, with opaque infinite points given by their prefix to `depth`.
fn point_doc(p: &Point, depth: usize) -> Json {
    serde_json::to_value(p).unwrap_or_else(|_| json!({ "kind": "infinite_prefix", "seq": p.node_prefix(depth) }))
}

fn tagged_doc(v: &TaggedValue, depth: usize) -> Json {
    let payload = match &v.payload {
        Payload::Point(p) => json!({ "point": point_doc(p, depth) }),
        Payload::Infinity => json!("infinity"),
        Payload::Left(x) => json!({ "left": tagged_doc(x, depth) }),
        Payload::Right(x) => json!({ "right": tagged_doc(x, depth) }),
    };
    json!({ "space": v.space, "payload": payload })
}

fn random_point(rng: &mut ChaCha8Rng, max_len: usize, max_entry: u64) -> Point {
    let n = rng.random_range(0..=max_len);
    let t = FiniteSeq::new((0..n).map(|_| rng.random_range(0..=max_entry)).collect());
    match rng.random_range(0..3) {
        0 => Point::Finite(t),
        1 => Point::Augmented(t),
        _ => Point::periodic(t, FiniteSeq::new(vec![rng.random_range(0..=max_entry)])).expect("nonempty period"),
    }
}

fn covered(family: &[BasicClopen], p: &Point, budget: &DepthBudget) -> Result<bool> {
    for b in family {
        if basic_member(b, p, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn catalog_entry(index: usize) -> Result<CatalogFunction> {
    let all = catalog::catalog_b();
    let n = all.len();
    all.into_iter()
        .nth(index)
        .ok_or_else(|| Error::Parse(format!("catalog index {index} out of range 0..{n}")))
}

fn run(cli: Cli) -> Result<Json> {
    let o = cli.opts;
    match cli.command {
        Command::Dist { a, b } => {
            let (a, b): (Point, Point) = (parse("point a", &a)?, parse("point b", &b)?);
            Ok(distance_doc(distance(&a, &b, &o.schedule()?, &o.budget()?)))
        }
        Command::Meet { s, t, a, b } => {
            let mut doc = json!({});
            if let (Some(s), Some(t)) = (&s, &t) {
                doc["meet"] = json!(meet(&parse_seq(s)?, &parse_seq(t)?));
            }
            if let (Some(a), Some(b)) = (&a, &b) {
                let (a, b): (Point, Point) = (parse("point a", a)?, parse("point b", b)?);
                doc["split_index"] = match split_index(&a, &b, &o.budget()?) {
                    Split::At(i) => json!(i),
                    Split::Undetermined(d) => json!({ "undetermined_to_depth": d }),
                };
            }
            if doc.as_object().is_some_and(|m| m.is_empty()) {
                return Err(Error::Parse("meet needs --s and --t, or --a and --b".into()));
            }
            Ok(doc)
        }
        Command::Eps { t, level } => {
            let w = o.schedule()?;
            match (t, level) {
                (Some(t), None) => Ok(json!({ "epsilon": w.epsilon(&parse_seq(&t)?) })),
                (None, Some(n)) => Ok(json!({ "level": n, "epsilon": w.level(n) })),
                _ => Err(Error::Parse("eps needs exactly one of --t and --level".into())),
            }
        }
        Command::Member { point, set, radius } => {
            let p: Point = parse("point", &point)?;
            match (set, radius) {
                (Some(set), None) => {
                    let b: BasicClopen = parse("basic set", &set)?;
                    Ok(json!({ "member": basic_member(&b, &p, &o.budget()?)? }))
                }
                (None, Some(r)) => {
                    let nb = neighborhood_of(&p, &parse_dyadic(&r)?, &o.schedule()?, &o.budget()?)?;
                    Ok(json!({ "neighborhood": nb }))
                }
                _ => Err(Error::Parse("member needs exactly one of --set and --radius".into())),
            }
        }
        Command::CoverCheck { family, samples } => {
            let fam: Vec<BasicClopen> = parse("family", &family)?;
            let budget = o.budget()?;
            let result = cover_decide(&fam);
            let mut doc = match &result {
                CoverResult::Covers => json!({ "result": "covers" }),
                CoverResult::Counterexample(p) => json!({ "result": "counterexample", "point": p }),
            };
            if samples > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
                let mut contradictions = Vec::new();
                if result == CoverResult::Covers {
                    for _ in 0..samples {
                        let p = random_point(&mut rng, 6, 4);
                        if !covered(&fam, &p, &budget)? {
                            contradictions.push(p);
                        }
                    }
                }
                if let CoverResult::Counterexample(w) = &result {
                    if covered(&fam, w, &budget)? {
                        contradictions.push(w.clone());
                    }
                }
                doc["samples"] = json!(samples);
                doc["contradictions"] = json!(contradictions);
            }
            Ok(doc)
        }
        Command::Descent { family } => {
            let fam: Vec<BasicClopen> = parse("family", &family)?;
            let p = uncovered_descent(&fam)?;
            Ok(json!({ "point": point_doc(&p, o.budget()?.depth) }))
        }
        Command::Embed(cmd) => embed(cmd, &o),
        Command::Catalog(cmd) => catalog_cmd(cmd, &o),
        Command::Construct(cmd) => construct::run(cmd, &o),
        Command::Recheck { trace } => construct::recheck_doc(&trace),
    }
}

fn embed(cmd: EmbedCommand, o: &Opts) -> Result<Json> {
    let (depth, branch) = o.range();
    match cmd {
        EmbedCommand::Check { pi } => {
            let pi = parse_embedding(&pi)?;
            let v = validate_embedding(&pi, depth, branch)?;
            let lookup = |t: &FiniteSeq| pi.image(t).expect("images in range were computed by validation");
            let meets = meet_preservation_oracle(&lookup, depth, branch);
            Ok(match v {
                Validation::Valid => json!({ "valid": true, "meets_preserved": meets == MeetCheck::Agrees }),
                Validation::Violation { t, i, j } => json!({
                    "valid": false,
                    "violation": { "t": t, "i": i, "j": j },
                    "meets_preserved": meets == MeetCheck::Agrees,
                }),
            })
        }
        EmbedCommand::Eval { pi, t } => {
            let pi = parse_embedding(&pi)?;
            match t {
                Some(t) => Ok(json!({ "image": pi.image(&parse_seq(&t)?)? })),
                None => Ok(json!({ "images": images_doc(&pi, depth, branch)? })),
            }
        }
        EmbedCommand::Extend { pi, point } => {
            let pi = parse_embedding(&pi)?;
            let p: Point = parse("point", &point)?;
            let budget = o.budget()?;
            Ok(json!({ "point": point_doc(&extend(&pi, &p, &budget)?, budget.depth) }))
        }
        EmbedCommand::Compose { outer, inner } => {
            let c = MeetEmbedding::compose(&parse_embedding(&outer)?, &parse_embedding(&inner)?);
            Ok(json!({ "images": images_doc(&c, depth, branch)? }))
        }
        EmbedCommand::Preimage { pi, t } => {
            let pre = preimage_cone(&parse_embedding(&pi)?, &parse_seq(&t)?, depth, branch)?;
            Ok(json!({ "preimage": pre }))
        }
    }
}

fn catalog_cmd(cmd: CatalogCommand, o: &Opts) -> Result<Json> {
    match cmd {
        CatalogCommand::List { set } => {
            let list = match set.as_str() {
                "a" => catalog::catalog_a(),
                "b" => catalog::catalog_b(),
                other => return Err(Error::Parse(format!("unknown catalog {other:?}, expected a or b"))),
            };
            let entries: Vec<Json> = list
                .iter()
                .enumerate()
                .map(|(i, f)| json!({ "index": i, "name": f.to_string(), "descriptor": f }))
                .collect();
            Ok(json!({ "set": set, "count": list.len(), "functions": entries }))
        }
        CatalogCommand::Eval { index, point } => {
            let f = catalog_entry(index)?;
            let p: Point = parse("point", &point)?;
            Ok(json!({ "function": f.to_string(), "value": tagged_doc(&catalog::evaluate(&f, &p)?, 0) }))
        }
        CatalogCommand::CheckEmbed { index, pi, samples: n, phi } => {
            let f = catalog_entry(index)?;
            let pi = parse_embedding(&pi)?;
            let budget = o.budget()?;
            let (depth, branch) = o.range();
            let mut pts = samples(f.domain(), depth, branch);
            pts.shuffle(&mut ChaCha8Rng::seed_from_u64(o.seed));
            pts.truncate(n);
            let d = budget.depth;
            let result = match phi {
                None => embed_via_doc(&pi, &f, &|q| Ok(tagged_doc(&catalog::evaluate(&f, q)?, d)), &pts, &budget)?,
                Some(name) => {
                    let g = registry::function(&name)?;
                    embed_via_doc(&pi, &f, &|q| Ok(json!(g.eval(q)?)), &pts, &budget)?
                }
            };
            Ok(json!({ "function": f.to_string(), "samples": pts.len(), "result": result }))
        }
    }
}

fn embed_via_doc(
    pi: &MeetEmbedding,
    f: &CatalogFunction,
    phi: &dyn Fn(&Point) -> Result<Json>,
    pts: &[Point],
    budget: &DepthBudget,
) -> Result<Json> {
    Ok(match catalog::embed_via(pi, f, phi, pts, budget)? {
        Pairing::CertifiedPairing { psi } => {
            let table: Vec<Json> = psi.iter().map(|(k, v)| json!([tagged_doc(k, budget.depth), v])).collect();
            json!({ "result": "certified_pairing", "psi": table })
        }
        Pairing::Mismatch { reason, first, second } => {
            json!({ "result": "mismatch", "reason": reason, "first": first, "second": second })
        }
    })
}

fn error_doc(e: &Error) -> (Json, u8) {
    let (kind, code) = match e {
        Error::Parse(_) => ("parse", 2),
        Error::DomainMismatch(_) => ("domain_mismatch", 3),
        Error::BudgetExceeded(_) => ("budget_exceeded", 4),
        Error::ContainmentViolation { .. } => ("containment_violation", 1),
        Error::CertificationFailed(_) => ("certification_failed", 1),
        Error::Precondition(_) => ("precondition", 1),
        Error::InvalidEmbedding(_) => ("invalid_embedding", 1),
    };
    (json!({ "error": { "kind": kind, "message": e.to_string() } }), code)
}

fn emit(doc: &Json) {
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string(doc).expect("documents serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit(&json!({ "error": { "kind": "parse", "message": e.to_string() } }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(doc) => {
            emit(&doc);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (doc, code) = error_doc(&e);
            emit(&doc);
            ExitCode::from(code)
        }
    }
}
