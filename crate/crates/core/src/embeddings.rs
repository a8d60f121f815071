//! ∧-embeddings of ℕ^{<ℕ} presented by a root and a successor rule, their
//! validation, amalgamation, and continuous extension to ℕ^{≤ℕ}_*.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{meet, range_nodes, DepthBudget, FiniteSeq, InfiniteSeq, Point, PrefixOracle};

type ChildRule = dyn Fn(&FiniteSeq, &FiniteSeq, u64) -> Result<FiniteSeq> + Send + Sync;

/// Explicit child images, keyed by parent node then child index. Children
/// absent from the table are sent to `π(t)⌢⟨σ(i)⟩`, where `σ` enumerates, in
/// increasing order, the symbols not already used by explicit siblings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuccessorTable {
    pub root: FiniteSeq,
    pub children: BTreeMap<FiniteSeq, BTreeMap<u64, FiniteSeq>>,
}

impl SuccessorTable {
    pub fn new(root: FiniteSeq) -> Self {
        SuccessorTable {
            root,
            children: BTreeMap::new(),
        }
    }

    /// Records `π(parent⌢⟨i⟩) = image`.
    pub fn set(&mut self, parent: &FiniteSeq, i: u64, image: FiniteSeq) {
        self.children.entry(parent.clone()).or_default().insert(i, image);
    }

    /// Builds a table from node images; the map must contain `⟨⟩`.
    pub fn from_images(images: &BTreeMap<FiniteSeq, FiniteSeq>) -> Result<Self> {
        let root = images
            .get(&FiniteSeq::empty())
            .ok_or_else(|| Error::InvalidEmbedding("image table lacks the root".into()))?;
        let mut t = SuccessorTable::new(root.clone());
        for (node, img) in images {
            if let (Some(p), Some(i)) = (node.parent(), node.last()) {
                t.set(&p, i, img.clone());
            }
        }
        Ok(t)
    }

    /// `(t, i, image)` triples in node order.
    pub fn entries(&self) -> Vec<(FiniteSeq, u64, FiniteSeq)> {
        self.children
            .iter()
            .flat_map(|(p, m)| m.iter().map(move |(i, img)| (p.clone(), *i, img.clone())))
            .collect()
    }

    fn default_child(&self, parent: &FiniteSeq, parent_image: &FiniteSeq, i: u64) -> FiniteSeq {
        let Some(explicit) = self.children.get(parent) else {
            return parent_image.child(i);
        };
        if let Some(img) = explicit.get(&i) {
            return img.clone();
        }
        let used: BTreeSet<u64> = explicit
            .values()
            .filter(|img| parent_image.is_proper_prefix_of(img))
            .filter_map(|img| img.get(parent_image.len()))
            .collect();
        let rank = i - explicit.keys().filter(|&&e| e < i).count() as u64;
        let mut seen = 0;
        let mut sym = 0;
        loop {
            if !used.contains(&sym) {
                if seen == rank {
                    return parent_image.child(sym);
                }
                seen += 1;
            }
            sym += 1;
        }
    }

    fn max_parent_len(&self) -> usize {
        self.children.keys().map(|p| p.len()).max().map_or(0, |l| l + 1)
    }
}

enum Repr {
    Prefix(FiniteSeq),
    Table(SuccessorTable),
    /// `π(t⌢⟨i⟩) = π(t)⌢words[i]`, and `π(t)⌢⟨i⟩` past the list.
    ChildWord { root: FiniteSeq, words: Vec<FiniteSeq> },
    Rule { root: FiniteSeq, label: String, rule: Arc<ChildRule> },
    /// `outer ∘ inner`.
    Compose(MeetEmbedding, MeetEmbedding),
}

struct Inner {
    repr: Repr,
    memo: RwLock<HashMap<FiniteSeq, FiniteSeq>>,
}

/// A map ℕ^{<ℕ} → ℕ^{<ℕ} given by a successor rule, memoized internally.
/// Cloning shares the memo.
#[derive(Clone)]
pub struct MeetEmbedding(Arc<Inner>);

const MEMO_CAP: usize = 1 << 20;

impl fmt::Debug for MeetEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.repr {
            Repr::Prefix(s) => write!(f, "prefix({s})"),
            Repr::Table(t) => write!(f, "table(root {}, {} entries)", t.root, t.entries().len()),
            Repr::ChildWord { root, words } => write!(f, "child_word(root {root}, {words:?})"),
            Repr::Rule { label, .. } => write!(f, "rule({label})"),
            Repr::Compose(a, b) => write!(f, "({a:?} ∘ {b:?})"),
        }
    }
}

impl MeetEmbedding {
    fn from_repr(repr: Repr) -> Self {
        MeetEmbedding(Arc::new(Inner {
            repr,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    pub fn identity() -> Self {
        Self::prefix(FiniteSeq::empty())
    }

    /// `t ↦ s⌢t`.
    pub fn prefix(s: FiniteSeq) -> Self {
        Self::from_repr(Repr::Prefix(s))
    }

    pub fn table(t: SuccessorTable) -> Self {
        Self::from_repr(Repr::Table(t))
    }

    pub fn child_word(root: FiniteSeq, words: Vec<FiniteSeq>) -> Self {
        Self::from_repr(Repr::ChildWord { root, words })
    }

    /// `rule(parent, π(parent), i)` returns `π(parent⌢⟨i⟩)`; it must be pure.
    pub fn rule(
        root: FiniteSeq,
        label: impl Into<String>,
        rule: impl Fn(&FiniteSeq, &FiniteSeq, u64) -> Result<FiniteSeq> + Send + Sync + 'static,
    ) -> Self {
        Self::from_repr(Repr::Rule {
            root,
            label: label.into(),
            rule: Arc::new(rule),
        })
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &MeetEmbedding, inner: &MeetEmbedding) -> Self {
        Self::from_repr(Repr::Compose(outer.clone(), inner.clone()))
    }

    pub fn root(&self) -> Result<FiniteSeq> {
        self.image(&FiniteSeq::empty())
    }

    pub fn as_table(&self) -> Option<&SuccessorTable> {
        match &self.0.repr {
            Repr::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_prefix(&self) -> Option<&FiniteSeq> {
        match &self.0.repr {
            Repr::Prefix(s) => Some(s),
            _ => None,
        }
    }

    fn memo_get(&self, t: &FiniteSeq) -> Option<FiniteSeq> {
        self.0.memo.read().expect("memo lock").get(t).cloned()
    }

    fn memo_put(&self, t: FiniteSeq, v: FiniteSeq) {
        let mut m = self.0.memo.write().expect("memo lock");
        if m.len() >= MEMO_CAP {
            m.clear();
        }
        m.insert(t, v);
    }

    fn successor(&self, parent: &FiniteSeq, parent_image: &FiniteSeq, i: u64) -> Result<FiniteSeq> {
        match &self.0.repr {
            Repr::Table(tbl) => Ok(tbl.default_child(parent, parent_image, i)),
            Repr::ChildWord { words, .. } => Ok(match words.get(i as usize) {
                Some(w) => parent_image.concat(w),
                None => parent_image.child(i),
            }),
            Repr::Rule { rule, .. } => rule(parent, parent_image, i),
            Repr::Prefix(_) | Repr::Compose(..) => unreachable!("not a successor representation"),
        }
    }

    fn stored_root(&self) -> FiniteSeq {
        match &self.0.repr {
            Repr::Table(t) => t.root.clone(),
            Repr::ChildWord { root, .. } | Repr::Rule { root, .. } => root.clone(),
            Repr::Prefix(s) => s.clone(),
            Repr::Compose(..) => unreachable!("composites have no stored root"),
        }
    }

    /// `π(t)`.
    pub fn image(&self, t: &FiniteSeq) -> Result<FiniteSeq> {
        if let Some(v) = self.memo_get(t) {
            return Ok(v);
        }
        let v = match &self.0.repr {
            Repr::Prefix(s) => return Ok(s.concat(t)),
            Repr::Compose(outer, inner) => outer.image(&inner.image(t)?)?,
            _ => {
                let mut k = t.len();
                let mut img = loop {
                    if k == 0 {
                        break self.stored_root();
                    }
                    if let Some(v) = self.memo_get(&t.restrict(k)) {
                        break v;
                    }
                    k -= 1;
                };
                for j in k..t.len() {
                    let parent = t.restrict(j);
                    img = self.successor(&parent, &img, t.entries()[j])?;
                    if j + 1 < t.len() {
                        self.memo_put(t.restrict(j + 1), img.clone());
                    }
                }
                img
            }
        };
        self.memo_put(t.clone(), v.clone());
        Ok(v)
    }

    /// A depth `L` with `π(t⌢u) = π(t)⌢u` whenever `|t| ≥ L`, when known.
    pub fn tail_shift_depth(&self) -> Option<usize> {
        match &self.0.repr {
            Repr::Prefix(_) => Some(0),
            Repr::Table(t) => Some(t.max_parent_len()),
            Repr::ChildWord { words, .. } => words
                .iter()
                .enumerate()
                .all(|(i, w)| w.entries() == [i as u64])
                .then_some(0),
            Repr::Rule { .. } => None,
            Repr::Compose(a, b) => Some(a.tail_shift_depth()?.max(b.tail_shift_depth()?)),
        }
    }

    /// The table of `π` on all nodes of length `< depth` with entries `< branch`.
    pub fn to_table(&self, depth: usize, branch: u64) -> Result<SuccessorTable> {
        let mut tbl = SuccessorTable::new(self.root()?);
        for t in range_nodes(depth.saturating_sub(1), branch) {
            for i in 0..branch {
                tbl.set(&t, i, self.image(&t.child(i))?);
            }
        }
        Ok(tbl)
    }

    /// The finite description used by the JSON format, if one exists.
    pub fn spec(&self) -> Option<EmbeddingSpec> {
        match &self.0.repr {
            Repr::Prefix(s) => Some(EmbeddingSpec::Prefix { s: s.clone(), root: None }),
            Repr::Table(t) => Some(EmbeddingSpec::Table {
                root: t.root.clone(),
                entries: t.entries(),
            }),
            Repr::ChildWord { root, words } => Some(EmbeddingSpec::ChildWord {
                root: root.clone(),
                word_rule: words.clone(),
            }),
            Repr::Rule { .. } | Repr::Compose(..) => None,
        }
    }
}

/// JSON form of an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbeddingSpec {
    Prefix {
        s: FiniteSeq,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<FiniteSeq>,
    },
    Table {
        root: FiniteSeq,
        entries: Vec<(FiniteSeq, u64, FiniteSeq)>,
    },
    ChildWord {
        root: FiniteSeq,
        word_rule: Vec<FiniteSeq>,
    },
}

impl EmbeddingSpec {
    pub fn build(&self) -> Result<MeetEmbedding> {
        Ok(match self {
            EmbeddingSpec::Prefix { s, root } => {
                if root.as_ref().is_some_and(|r| r != s) {
                    return Err(Error::Parse("a prefix embedding's root must equal its prefix".into()));
                }
                MeetEmbedding::prefix(s.clone())
            }
            EmbeddingSpec::Table { root, entries } => {
                let mut t = SuccessorTable::new(root.clone());
                for (p, i, img) in entries {
                    t.set(p, *i, img.clone());
                }
                MeetEmbedding::table(t)
            }
            EmbeddingSpec::ChildWord { root, word_rule } => {
                MeetEmbedding::child_word(root.clone(), word_rule.clone())
            }
        })
    }
}

/// First failure of the two child conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Validation {
    Valid,
    /// Condition (1) fails when `j` is `None`, condition (2) otherwise.
    Violation { t: FiniteSeq, i: u64, j: Option<u64> },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

/// Checks `π(t) ⊏ π(t⌢⟨i⟩)` and `π(t⌢⟨i⟩)(|π(t)|) ≠ π(t⌢⟨j⟩)(|π(t)|)` for all
/// children within the range `length < depth`, entries `< branch`.
pub fn validate(candidate: &dyn Fn(&FiniteSeq) -> FiniteSeq, depth: usize, branch: u64) -> Validation {
    for t in range_nodes(depth.saturating_sub(1), branch) {
        let pt = candidate(&t);
        let kids: Vec<FiniteSeq> = (0..branch).map(|i| candidate(&t.child(i))).collect();
        if let Some(i) = kids.iter().position(|c| !pt.is_proper_prefix_of(c)) {
            return Validation::Violation { t, i: i as u64, j: None };
        }
        let sym: Vec<u64> = kids.iter().map(|c| c.get(pt.len()).expect("strict extension")).collect();
        for i in 0..sym.len() {
            for j in i + 1..sym.len() {
                if sym[i] == sym[j] {
                    return Validation::Violation {
                        t,
                        i: i as u64,
                        j: Some(j as u64),
                    };
                }
            }
        }
    }
    Validation::Valid
}

/// [`validate`] over an embedding's images.
pub fn validate_embedding(pi: &MeetEmbedding, depth: usize, branch: u64) -> Result<Validation> {
    let images = image_map(pi, depth, branch)?;
    Ok(validate(&|t| images[t].clone(), depth, branch))
}

/// All images in the range `length < depth`, entries `< branch`.
pub fn image_map(pi: &MeetEmbedding, depth: usize, branch: u64) -> Result<BTreeMap<FiniteSeq, FiniteSeq>> {
    range_nodes(depth, branch)
        .into_iter()
        .map(|t| pi.image(&t).map(|v| (t, v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MeetCheck {
    Agrees,
    Disagrees(FiniteSeq, FiniteSeq),
}

/// Brute-force check of `π(s ∧ t) = π(s) ∧ π(t)` and injectivity over all
/// pairs in range.
pub fn meet_preservation_oracle(
    candidate: &dyn Fn(&FiniteSeq) -> FiniteSeq,
    depth: usize,
    branch: u64,
) -> MeetCheck {
    let nodes = range_nodes(depth, branch);
    let images: Vec<FiniteSeq> = nodes.iter().map(candidate).collect();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let m = meet(&nodes[a], &nodes[b]);
            let pm = candidate(&m);
            if images[a] == images[b] || pm != meet(&images[a], &images[b]) {
                return MeetCheck::Disagrees(nodes[a].clone(), nodes[b].clone());
            }
        }
    }
    MeetCheck::Agrees
}

/// The product `π(t) = (∏_{n ≤ |t|} π_{t↾n})(t)`, applying `π_t` first and
/// `π_{⟨⟩}` last, tabulated on the range and extended past it by the table
/// default rule.
pub fn amalgamate(
    family: &dyn Fn(&FiniteSeq) -> Result<MeetEmbedding>,
    depth: usize,
    branch: u64,
) -> Result<MeetEmbedding> {
    let nodes = range_nodes(depth, branch);
    let mut factors = HashMap::new();
    for t in &nodes {
        let f = family(t)?;
        let r = f.root()?;
        if !t.is_prefix_of(&r) {
            return Err(Error::ContainmentViolation {
                index: t.clone(),
                input: FiniteSeq::empty(),
                image: r,
            });
        }
        factors.insert(t.clone(), f);
    }
    let mut images = BTreeMap::new();
    for t in &nodes {
        let mut x = t.clone();
        for n in (0..=t.len()).rev() {
            let idx = t.restrict(n);
            let y = factors[&idx].image(&x)?;
            if !idx.is_prefix_of(&y) {
                return Err(Error::ContainmentViolation { index: idx, input: x, image: y });
            }
            x = y;
        }
        images.insert(t.clone(), x);
    }
    Ok(MeetEmbedding::table(SuccessorTable::from_images(&images)?))
}

#[derive(Debug)]
struct ExtendOracle {
    pi: MeetEmbedding,
    b: InfiniteSeq,
}

impl PrefixOracle for ExtendOracle {
    fn coordinate(&self, k: usize) -> u64 {
        // |π(b↾i)| ≥ i, so i = k + 1 always suffices.
        let mut i = 0;
        loop {
            let img = self
                .pi
                .image(&self.b.prefix(i))
                .unwrap_or_else(|e| panic!("extension evaluation failed past the checked depth: {e}"));
            if img.len() > k {
                return img.entries()[k];
            }
            i += 1;
        }
    }
}

/// `π̂(p)`: `π(t)`, `π(t)⌢⟨∞⟩`, or `⋃_i π(b↾i)`.
pub fn extend(pi: &MeetEmbedding, p: &Point, budget: &DepthBudget) -> Result<Point> {
    match p {
        Point::Finite(t) => Ok(Point::Finite(pi.image(t)?)),
        Point::Augmented(t) => Ok(Point::Augmented(pi.image(t)?)),
        Point::Infinite(b) => {
            if let (Some(l), InfiniteSeq::Periodic { head, .. }) = (pi.tail_shift_depth(), b) {
                let n = l.max(head.len());
                let img = pi.image(&b.prefix(n))?;
                let Some(InfiniteSeq::Periodic { head: h, period }) = b.shift(n) else {
                    unreachable!("shifts of periodic points are periodic")
                };
                return Point::periodic(img.concat(&h), period);
            }
            pi.image(&b.prefix(budget.depth))?;
            Ok(Point::Infinite(InfiniteSeq::Oracle(Arc::new(ExtendOracle {
                pi: pi.clone(),
                b: b.clone(),
            }))))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Preimage {
    /// `π̂^{-1}(N_t) = N_s`.
    Cone(FiniteSeq),
    /// No preimage; `range_limited` when the search stopped at the range edge.
    Empty { range_limited: bool },
}

/// The minimal-length `s` with `t ⊑ π(s)`, searched within the range.
pub fn preimage_cone(pi: &MeetEmbedding, t: &FiniteSeq, depth: usize, branch: u64) -> Result<Preimage> {
    let mut s = FiniteSeq::empty();
    loop {
        let img = pi.image(&s)?;
        if t.is_prefix_of(&img) {
            return Ok(Preimage::Cone(s));
        }
        if !img.is_prefix_of(t) {
            return Ok(Preimage::Empty { range_limited: false });
        }
        if s.len() + 1 >= depth {
            return Ok(Preimage::Empty { range_limited: true });
        }
        // Siblings differ at |π(s)|, so at most one child stays compatible.
        let want = t.get(img.len()).expect("proper prefix");
        let mut next = None;
        for i in 0..branch {
            let c = pi.image(&s.child(i))?;
            if c.get(img.len()) == Some(want) {
                next = Some(i);
                break;
            }
        }
        match next {
            Some(i) => s = s.child(i),
            None => return Ok(Preimage::Empty { range_limited: true }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u64]) -> FiniteSeq {
        FiniteSeq::from(v)
    }

    #[test]
    fn validate_examples() {
        let pre = |t: &FiniteSeq| s(&[0]).concat(t);
        assert_eq!(validate(&pre, 3, 3), Validation::Valid);
        let collide = |t: &FiniteSeq| if t == &s(&[1]) { s(&[0]) } else { t.clone() };
        assert_eq!(validate(&collide, 3, 3), Validation::Violation { t: s(&[]), i: 0, j: Some(1) });
        let flat = |t: &FiniteSeq| if t == &s(&[0]) { s(&[]) } else { t.clone() };
        assert_eq!(validate(&flat, 3, 3), Validation::Violation { t: s(&[]), i: 0, j: None });
    }

    #[test]
    fn meet_oracle_examples() {
        let pre = |t: &FiniteSeq| s(&[0]).concat(t);
        assert_eq!(meet_preservation_oracle(&pre, 3, 3), MeetCheck::Agrees);
        let collide = |t: &FiniteSeq| if t == &s(&[1]) { s(&[0]) } else { t.clone() };
        assert_eq!(meet_preservation_oracle(&collide, 3, 3), MeetCheck::Disagrees(s(&[0]), s(&[1])));
    }

    #[test]
    fn amalgamation_worked_example() {
        let fam = |t: &FiniteSeq| Ok(MeetEmbedding::prefix(t.clone()));
        let pi = amalgamate(&fam, 3, 4).unwrap();
        assert_eq!(pi.image(&s(&[])).unwrap(), s(&[]));
        for a in 0..4 {
            assert_eq!(pi.image(&s(&[a])).unwrap(), s(&[a, a]));
            for b in 0..4 {
                assert_eq!(pi.image(&s(&[a, b])).unwrap(), s(&[a, a, b, a, b]));
            }
        }
        assert!(validate_embedding(&pi, 5, 3).unwrap().is_valid());
    }

    #[test]
    fn amalgamation_rejects_identities() {
        let fam = |_: &FiniteSeq| Ok(MeetEmbedding::identity());
        match amalgamate(&fam, 3, 3) {
            Err(Error::ContainmentViolation { index, .. }) => assert_eq!(index, s(&[0])),
            other => panic!("expected containment violation, got {other:?}"),
        }
    }

    #[test]
    fn extend_examples() {
        let b = DepthBudget::default();
        let pre = MeetEmbedding::prefix(s(&[0]));
        assert_eq!(extend(&pre, &Point::Augmented(s(&[1])), &b).unwrap(), Point::Augmented(s(&[0, 1])));
        let z = extend(&pre, &Point::zeros(), &b).unwrap();
        match &z {
            Point::Infinite(x) => assert_eq!(x.prefix(3), s(&[0, 0, 0])),
            _ => panic!("not infinite"),
        }
        let id = MeetEmbedding::identity();
        let p = Point::periodic(s(&[4]), s(&[1, 2])).unwrap();
        assert_eq!(extend(&id, &p, &b).unwrap(), p);
    }

    #[test]
    fn extend_through_rule_is_lazy() {
        let double = MeetEmbedding::rule(s(&[]), "double", |_, img, i| Ok(img.child(i).child(i)));
        let q = extend(&double, &Point::zeros_after(&s(&[1])), &DepthBudget::default()).unwrap();
        let Point::Infinite(x) = q else { panic!() };
        assert_eq!(x.prefix(5), s(&[1, 1, 0, 0, 0]));
    }

    #[test]
    fn preimage_examples() {
        let pre = MeetEmbedding::prefix(s(&[0]));
        assert_eq!(preimage_cone(&pre, &s(&[0]), 4, 4).unwrap(), Preimage::Cone(s(&[])));
        assert_eq!(
            preimage_cone(&pre, &s(&[1]), 4, 4).unwrap(),
            Preimage::Empty { range_limited: false }
        );
        let id = MeetEmbedding::identity();
        assert_eq!(preimage_cone(&id, &s(&[2, 1]), 4, 4).unwrap(), Preimage::Cone(s(&[2, 1])));
        assert_eq!(
            preimage_cone(&id, &s(&[7]), 4, 4).unwrap(),
            Preimage::Empty { range_limited: true }
        );
    }

    #[test]
    fn table_defaults_avoid_explicit_symbols() {
        let mut t = SuccessorTable::new(s(&[]));
        t.set(&s(&[]), 0, s(&[3, 3]));
        t.set(&s(&[]), 1, s(&[0]));
        let pi = MeetEmbedding::table(t);
        assert_eq!(pi.image(&s(&[2])).unwrap(), s(&[1]));
        assert_eq!(pi.image(&s(&[3])).unwrap(), s(&[2]));
        assert_eq!(pi.image(&s(&[4])).unwrap(), s(&[4]));
        assert!(validate_embedding(&pi, 4, 6).unwrap().is_valid());
        assert_eq!(pi.tail_shift_depth(), Some(1));
    }

    #[test]
    fn descriptor_round_trip() {
        let docs = [
            r#"{"kind":"prefix","s":[0]}"#,
            r#"{"kind":"table","root":[1],"entries":[[[],0,[1,0,2]]]}"#,
            r#"{"kind":"child_word","root":[],"word_rule":[[0,0],[1]]}"#,
        ];
        for d in docs {
            let spec: EmbeddingSpec = serde_json::from_str(d).unwrap();
            let pi = spec.build().unwrap();
            assert_eq!(serde_json::to_string(&pi.spec().unwrap()).unwrap(), d);
        }
    }
}
