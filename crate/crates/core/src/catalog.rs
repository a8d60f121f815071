//! The named spaces, the projection `p`, and the finite basis catalogs as
//! evaluable descriptors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::embeddings::{extend, MeetEmbedding};
use crate::error::{Error, Result};
use crate::enumeration::range_nodes;
use crate::sequences::{DepthBudget, FiniteSeq, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceTag {
    /// ℕ^ℕ
    Baire,
    /// ℕ^ℕ_*
    BaireStar,
    /// ℕ^ℕ_* ∖ ℕ^ℕ
    BaireStarMinusBaire,
    /// ℕ^{<ℕ}
    Tree,
    /// ℕ^{<ℕ} ∪ {∞}
    TreeOnePoint,
    /// ℕ^{≤ℕ}_* ∖ ℕ^ℕ
    SeqStarMinusBaire,
    /// ℕ^{≤ℕ}
    Seq,
    /// ℕ^{≤ℕ}_*
    SeqStar,
    /// {∞}
    Singleton,
}

/// Which kinds of element a space holds.
#[derive(Clone, Copy)]
struct Kinds {
    finite: bool,
    augmented: bool,
    infinite: bool,
    /// The point at infinity of ℕ^{<ℕ} ∪ {∞}.
    tree_infinity: bool,
    /// The value of a constant map.
    singleton: bool,
}

impl SpaceTag {
    pub const ALL: [SpaceTag; 9] = [
        SpaceTag::Baire,
        SpaceTag::BaireStar,
        SpaceTag::BaireStarMinusBaire,
        SpaceTag::Tree,
        SpaceTag::TreeOnePoint,
        SpaceTag::SeqStarMinusBaire,
        SpaceTag::Seq,
        SpaceTag::SeqStar,
        SpaceTag::Singleton,
    ];

    fn kinds(self) -> Kinds {
        let k = |finite, augmented, infinite| Kinds {
            finite,
            augmented,
            infinite,
            tree_infinity: false,
            singleton: false,
        };
        match self {
            SpaceTag::Baire => k(false, false, true),
            SpaceTag::BaireStar => k(false, true, true),
            SpaceTag::BaireStarMinusBaire => k(false, true, false),
            SpaceTag::Tree => k(true, false, false),
            SpaceTag::TreeOnePoint => Kinds {
                tree_infinity: true,
                ..k(true, false, false)
            },
            SpaceTag::SeqStarMinusBaire => k(true, true, false),
            SpaceTag::Seq => k(true, false, true),
            SpaceTag::SeqStar => k(true, true, true),
            SpaceTag::Singleton => Kinds {
                singleton: true,
                ..k(false, false, false)
            },
        }
    }

    pub fn contains_point(self, p: &Point) -> bool {
        let k = self.kinds();
        match p {
            Point::Finite(_) => k.finite,
            Point::Augmented(_) => k.augmented,
            Point::Infinite(_) => k.infinite,
        }
    }

    /// `self ⊆ other` as point sets.
    pub fn is_subset_of(self, other: SpaceTag) -> bool {
        let (a, b) = (self.kinds(), other.kinds());
        (!a.finite || b.finite)
            && (!a.augmented || b.augmented)
            && (!a.infinite || b.infinite)
            && (!a.tree_infinity || b.tree_infinity)
            && (!a.singleton || b.singleton)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SpaceTag::Baire => "ℕ^ℕ",
            SpaceTag::BaireStar => "ℕ^ℕ_*",
            SpaceTag::BaireStarMinusBaire => "ℕ^ℕ_*∖ℕ^ℕ",
            SpaceTag::Tree => "ℕ^<ℕ",
            SpaceTag::TreeOnePoint => "ℕ^<ℕ∪{∞}",
            SpaceTag::SeqStarMinusBaire => "ℕ^≤ℕ_*∖ℕ^ℕ",
            SpaceTag::Seq => "ℕ^≤ℕ",
            SpaceTag::SeqStar => "ℕ^≤ℕ_*",
            SpaceTag::Singleton => "{∞}",
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Targets allowed after the projection `p`.
pub const AFTER_P_TARGETS: [SpaceTag; 5] = [
    SpaceTag::Tree,
    SpaceTag::TreeOnePoint,
    SpaceTag::SeqStarMinusBaire,
    SpaceTag::Seq,
    SpaceTag::SeqStar,
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogFunction {
    /// `c_X`, constant with value `∞`.
    Const { domain: SpaceTag },
    /// `ι_{X,Z}`.
    Inclusion { from: SpaceTag, into: SpaceTag },
    /// `ι_{ℕ^{<ℕ},Z} ∘ p` on ℕ^ℕ_* ∖ ℕ^ℕ.
    InclusionAfterP { into: SpaceTag },
    /// `φ₀ ∪ p` on ℕ^ℕ_*.
    UnionWithP { baire_part: Box<CatalogFunction> },
    /// `φ_{ℕ^ℕ} ⊔ φ_{ℕ^ℕ_*∖ℕ^ℕ}` on ℕ^ℕ_*.
    DisjointUnion {
        baire_part: Box<CatalogFunction>,
        rest_part: Box<CatalogFunction>,
    },
}

impl CatalogFunction {
    pub fn domain(&self) -> SpaceTag {
        match self {
            CatalogFunction::Const { domain } => *domain,
            CatalogFunction::Inclusion { from, .. } => *from,
            CatalogFunction::InclusionAfterP { .. } => SpaceTag::BaireStarMinusBaire,
            CatalogFunction::UnionWithP { .. } | CatalogFunction::DisjointUnion { .. } => SpaceTag::BaireStar,
        }
    }

    /// Checks the structural constraints on a descriptor.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        match self {
            CatalogFunction::Const { .. } => Ok(()),
            CatalogFunction::Inclusion { from, into } => {
                if from.is_subset_of(*into) {
                    Ok(())
                } else {
                    bad(format!("{from} is not contained in {into}"))
                }
            }
            CatalogFunction::InclusionAfterP { into } => {
                if AFTER_P_TARGETS.contains(into) {
                    Ok(())
                } else {
                    bad(format!("{into} is not a target after p"))
                }
            }
            CatalogFunction::UnionWithP { baire_part } => {
                baire_part.check()?;
                if baire_part.domain() != SpaceTag::Baire {
                    return bad(format!("union part has domain {}", baire_part.domain()));
                }
                Ok(())
            }
            CatalogFunction::DisjointUnion { baire_part, rest_part } => {
                baire_part.check()?;
                rest_part.check()?;
                if baire_part.domain() != SpaceTag::Baire || rest_part.domain() != SpaceTag::BaireStarMinusBaire {
                    return bad(format!(
                        "disjoint union parts have domains {} and {}",
                        baire_part.domain(),
                        rest_part.domain()
                    ));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for CatalogFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogFunction::Const { domain } => write!(f, "c[{domain}]"),
            CatalogFunction::Inclusion { from, into } => write!(f, "ι[{from} → {into}]"),
            CatalogFunction::InclusionAfterP { into } => write!(f, "ι[ℕ^<ℕ → {into}]∘p"),
            CatalogFunction::UnionWithP { baire_part } => write!(f, "{baire_part} ∪ p"),
            CatalogFunction::DisjointUnion { baire_part, rest_part } => write!(f, "{baire_part} ⊔ {rest_part}"),
        }
    }
}

fn baire_parts() -> Vec<CatalogFunction> {
    vec![
        CatalogFunction::Const { domain: SpaceTag::Baire },
        CatalogFunction::Inclusion { from: SpaceTag::Baire, into: SpaceTag::Baire },
        CatalogFunction::Inclusion { from: SpaceTag::Baire, into: SpaceTag::BaireStar },
    ]
}

fn rest_parts() -> Vec<CatalogFunction> {
    let r = SpaceTag::BaireStarMinusBaire;
    let mut v = vec![
        CatalogFunction::Const { domain: r },
        CatalogFunction::Inclusion { from: r, into: r },
        CatalogFunction::Inclusion { from: r, into: SpaceTag::BaireStar },
    ];
    v.extend(AFTER_P_TARGETS.iter().map(|&into| CatalogFunction::InclusionAfterP { into }));
    v
}

/// The 24 disjoint unions: three Baire parts times eight rest parts.
pub fn catalog_a() -> Vec<CatalogFunction> {
    let rest = rest_parts();
    baire_parts()
        .into_iter()
        .flat_map(|b| {
            rest.iter().map(move |r| CatalogFunction::DisjointUnion {
                baire_part: Box::new(b.clone()),
                rest_part: Box::new(r.clone()),
            })
        })
        .collect()
}

/// [`catalog_a`] followed by the three unions `φ₀ ∪ p`.
pub fn catalog_b() -> Vec<CatalogFunction> {
    let mut v = catalog_a();
    v.extend(
        baire_parts()
            .into_iter()
            .map(|b| CatalogFunction::UnionWithP { baire_part: Box::new(b) }),
    );
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Point(Point),
    /// `∞`, of ℕ^{<ℕ} ∪ {∞} or of {∞} depending on the tag.
    Infinity,
    Left(Box<TaggedValue>),
    Right(Box<TaggedValue>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedValue {
    pub space: SpaceTag,
    pub payload: Payload,
}

impl TaggedValue {
    fn point(space: SpaceTag, p: Point) -> Self {
        TaggedValue { space, payload: Payload::Point(p) }
    }

    fn infinity() -> Self {
        TaggedValue {
            space: SpaceTag::Singleton,
            payload: Payload::Infinity,
        }
    }
}

impl fmt::Display for TaggedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Point(p) => write!(f, "{p:?} in {}", self.space),
            Payload::Infinity => write!(f, "∞ in {}", self.space),
            Payload::Left(v) => write!(f, "left({v})"),
            Payload::Right(v) => write!(f, "right({v})"),
        }
    }
}

/// `p(t⌢⟨∞⟩) = t`.
pub fn project_p(p: &Point) -> Result<FiniteSeq> {
    match p {
        Point::Augmented(t) => Ok(t.clone()),
        other => Err(Error::domain(format!("p is defined on augmented points only, not {other:?}"))),
    }
}

pub fn evaluate(f: &CatalogFunction, p: &Point) -> Result<TaggedValue> {
    if !f.domain().contains_point(p) {
        return Err(Error::domain(format!("{p:?} is outside the domain {} of {f}", f.domain())));
    }
    Ok(match f {
        CatalogFunction::Const { .. } => TaggedValue::infinity(),
        CatalogFunction::Inclusion { into, .. } => TaggedValue::point(*into, p.clone()),
        CatalogFunction::InclusionAfterP { into } => TaggedValue::point(*into, Point::Finite(project_p(p)?)),
        CatalogFunction::UnionWithP { baire_part } => match p {
            Point::Infinite(_) => evaluate(baire_part, p)?,
            _ => TaggedValue::point(SpaceTag::Tree, Point::Finite(project_p(p)?)),
        },
        CatalogFunction::DisjointUnion { baire_part, rest_part } => {
            let (space, payload) = match p {
                Point::Infinite(_) => (SpaceTag::Baire, Payload::Left(Box::new(evaluate(baire_part, p)?))),
                _ => (SpaceTag::BaireStarMinusBaire, Payload::Right(Box::new(evaluate(rest_part, p)?))),
            };
            TaggedValue { space, payload }
        }
    })
}

/// Finitely described sample points of a space: nodes, augmented nodes,
/// and the eventually periodic points `t⌢0^ω`, `t⌢1^ω` over the range,
/// without repeats.
pub fn samples(space: SpaceTag, depth: usize, branch: u64) -> Vec<Point> {
    let mut out = Vec::new();
    for t in range_nodes(depth, branch) {
        for p in [
            Point::Finite(t.clone()),
            Point::Augmented(t.clone()),
            Point::zeros_after(&t),
            Point::periodic(t.clone(), FiniteSeq::from([1])).expect("nonempty period"),
        ] {
            if space.contains_point(&p) && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Pairing<V> {
    /// The induced `ψ`, one entry per distinct catalog output.
    CertifiedPairing { psi: Vec<(TaggedValue, V)> },
    Mismatch { reason: String, first: Point, second: Point },
}

/// Checks `φ ∘ π̂ = ψ ∘ f` on the samples for the `ψ` it induces, which must
/// be well defined and injective there.
pub fn embed_via<V: PartialEq + Clone>(
    pi: &MeetEmbedding,
    f: &CatalogFunction,
    phi: &dyn Fn(&Point) -> Result<V>,
    samples: &[Point],
    budget: &DepthBudget,
) -> Result<Pairing<V>> {
    let mut psi: Vec<(TaggedValue, V, Point)> = Vec::new();
    for p in samples {
        let key = evaluate(f, p)?;
        let val = phi(&extend(pi, p, budget)?)?;
        if let Some((_, v, q)) = psi.iter().find(|(k, _, _)| *k == key) {
            if *v != val {
                return Ok(Pairing::Mismatch {
                    reason: format!("ψ is not well defined at {key}"),
                    first: q.clone(),
                    second: p.clone(),
                });
            }
            continue;
        }
        if let Some((k, _, q)) = psi.iter().find(|(_, v, _)| *v == val) {
            return Ok(Pairing::Mismatch {
                reason: format!("ψ is not injective: {k} and {key} share a value"),
                first: q.clone(),
                second: p.clone(),
            });
        }
        psi.push((key, val, p.clone()));
    }
    Ok(Pairing::CertifiedPairing {
        psi: psi.into_iter().map(|(k, v, _)| (k, v)).collect(),
    })
}
