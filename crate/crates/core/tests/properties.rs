use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bairestar::embeddings::{meet_preservation_oracle, validate_embedding, MeetCheck};
use bairestar::enumeration::{canonical_index, canonical_node, range_nodes};
use bairestar::sequences::{cone_member, restrict, split_index, Split};
use bairestar::topology::complement_in_cone;
use bairestar::{
    ball_member, basic_member, distance, extend, meet, BasicClopen, DepthBudget, DistanceResult, Dyadic,
    EpsilonSchedule, FiniteSeq, MeetEmbedding, Point, Validation,
};

fn budget() -> DepthBudget {
    DepthBudget::new(48, 8, 1_000_000).unwrap()
}

fn seq_strategy(max_len: usize, max_entry: u64) -> impl Strategy<Value = FiniteSeq> {
    prop::collection::vec(0..=max_entry, 0..=max_len).prop_map(FiniteSeq::new)
}

fn point_strategy() -> impl Strategy<Value = Point> {
    (seq_strategy(6, 3), 0..3u8, seq_strategy(3, 3)).prop_map(|(t, kind, period)| match kind {
        0 => Point::Finite(t),
        1 => Point::Augmented(t),
        _ if period.is_empty() => Point::zeros_after(&t),
        _ => Point::periodic(t, period).unwrap(),
    })
}

fn exact(a: &Point, b: &Point) -> Dyadic {
    match distance(a, b, &EpsilonSchedule::weight(), &budget()) {
        DistanceResult::Exact(d) => d,
        DistanceResult::Bounded(u) => panic!("d({a:?}, {b:?}) only bounded by {u}"),
    }
}

/// A seeded ∧-embedding built from prefixes and child words.
fn embedding(seed: u64) -> MeetEmbedding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(0..=2);
        FiniteSeq::new((0..n).map(|_| rng.random_range(0..4)).collect())
    };
    let mut pi = MeetEmbedding::identity();
    for _ in 0..rng.random_range(1..=3) {
        let step = if rng.random_bool(0.4) {
            MeetEmbedding::prefix(word(&mut rng))
        } else {
            let k = rng.random_range(1..=4u64);
            let mut firsts: Vec<u64> = (0..k).collect();
            firsts.shuffle(&mut rng);
            let words = firsts.into_iter().map(|f| FiniteSeq::new(vec![f]).concat(&word(&mut rng))).collect();
            MeetEmbedding::child_word(word(&mut rng), words)
        };
        pi = MeetEmbedding::compose(&step, &pi);
    }
    pi
}

#[test]
fn meet_laws_exhaustive() {
    let nodes = range_nodes(5, 4);
    for s in &nodes {
        assert_eq!(&meet(s, s), s);
        for t in &nodes {
            let m = meet(s, t);
            assert_eq!(m, meet(t, s));
            assert!(m.is_prefix_of(s) && m.is_prefix_of(t));
            // The next coordinate after the meet differs, so no longer common prefix exists.
            if m.len() < s.len() && m.len() < t.len() {
                assert_ne!(s.get(m.len()), t.get(m.len()));
            } else {
                assert!(m == *s || m == *t);
            }
        }
    }
}

#[test]
fn canonical_enumeration_injective_and_monotone() {
    let mut seen = std::collections::HashSet::new();
    for n in 0..5_000 {
        let t = canonical_node(n);
        assert!(seen.insert(t.clone()), "repeat at {n}");
        assert_eq!(canonical_index(&t), Some(n));
        if let Some(p) = t.parent() {
            assert!(canonical_index(&p).unwrap() < n, "{p} after {t}");
        }
    }
}

#[test]
fn schedules_pass_their_checks() {
    for name in EpsilonSchedule::names() {
        EpsilonSchedule::named(name).unwrap().verify(10).unwrap();
    }
    assert!(EpsilonSchedule::new("flat", 6, |_| Dyadic::one()).is_err());
}

#[test]
fn partition_law_exhaustive() {
    let b = budget();
    let reps: Vec<Point> = range_nodes(5, 5)
        .into_iter()
        .flat_map(|t| [Point::Finite(t.clone()), Point::Augmented(t.clone()), Point::zeros_after(&t)])
        .collect();
    for t in range_nodes(3, 3) {
        for i in 0..4 {
            let mut parts = vec![BasicClopen::singleton(t.clone()), BasicClopen::cone_minus(t.clone(), i)];
            parts.extend((0..i).map(|j| BasicClopen::cone(t.child(j))));
            let cone = BasicClopen::cone(t.clone());
            for p in &reps {
                let hits = parts.iter().filter(|x| basic_member(x, p, &b).unwrap()).count();
                let inside = basic_member(&cone, p, &b).unwrap();
                assert_eq!(hits, usize::from(inside), "{t}, {i}, {p:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn meet_is_associative(s in seq_strategy(5, 2), t in seq_strategy(5, 2), u in seq_strategy(5, 2)) {
        prop_assert_eq!(meet(&meet(&s, &t), &u), meet(&s, &meet(&t, &u)));
        let r = meet(&meet(&s, &t), &u);
        prop_assert!(r.is_prefix_of(&meet(&s, &u)));
    }

    #[test]
    fn split_index_is_the_first_difference(a in point_strategy(), b in point_strategy()) {
        let bud = budget();
        match split_index(&a, &b, &bud) {
            Split::At(i) => {
                for k in 0..i {
                    prop_assert_eq!(restrict(&a, k, &bud).unwrap(), restrict(&b, k, &bud).unwrap());
                }
                prop_assert_ne!(restrict(&a, i, &bud).unwrap(), restrict(&b, i, &bud).unwrap());
            }
            Split::Undetermined(_) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn distance_is_a_symmetric_ultrametric(a in point_strategy(), b in point_strategy(), c in point_strategy()) {
        let (ab, bc, ac) = (exact(&a, &b), exact(&b, &c), exact(&a, &c));
        prop_assert_eq!(&ab, &exact(&b, &a));
        prop_assert!(exact(&a, &a).is_zero());
        prop_assert_eq!(ab.is_zero(), a == b);
        prop_assert!(ac <= ab.max(bc));
    }

    #[test]
    fn singleton_is_the_epsilon_ball(t in seq_strategy(4, 3), p in point_strategy()) {
        let w = EpsilonSchedule::weight();
        let inside = ball_member(&Point::Finite(t.clone()), &w.epsilon(&t), &p, &w, &budget()).unwrap();
        prop_assert_eq!(inside, p == Point::Finite(t));
    }

    #[test]
    fn punctured_cone_is_a_ball(t in seq_strategy(3, 3), tail in seq_strategy(3, 3), p in point_strategy()) {
        let w = EpsilonSchedule::weight();
        let bud = budget();
        // Any member of N_t \ {t} serves as centre.
        let centre = Point::Augmented(t.concat(&tail));
        let want = cone_member(&t, &p, &bud).unwrap() && p != Point::Finite(t.clone());
        prop_assert_eq!(ball_member(&centre, &w.epsilon(&t), &p, &w, &bud).unwrap(), want);
    }

    #[test]
    fn cone_minus_is_a_ball(t in seq_strategy(3, 2), i in 0..3u64, p in point_strategy()) {
        let w = EpsilonSchedule::weight();
        let bud = budget();
        let set = BasicClopen::cone_minus(t.clone(), i + 1);
        let centre = Point::Finite(t.child(i + 1));
        let radius = (0..=i).map(|j| w.epsilon(&t.child(j))).min().unwrap();
        prop_assert_eq!(
            ball_member(&centre, &radius, &p, &w, &bud).unwrap(),
            basic_member(&set, &p, &bud).unwrap()
        );
    }

    #[test]
    fn complement_in_cone_is_exact(
        x in (seq_strategy(3, 2), 0..3u8, 0..3u64),
        t in seq_strategy(2, 2),
        p in point_strategy(),
    ) {
        let bud = budget();
        let (s, kind, i) = x;
        let x = match kind {
            0 => BasicClopen::singleton(s),
            1 => BasicClopen::cone(s),
            _ => BasicClopen::cone_minus(s, i),
        };
        let parts = complement_in_cone(&x, &t);
        let hits = parts.iter().filter(|y| basic_member(y, &p, &bud).unwrap()).count();
        let want = cone_member(&t, &p, &bud).unwrap() && !basic_member(&x, &p, &bud).unwrap();
        prop_assert!(hits <= 1, "complement parts overlap at {:?}", p);
        prop_assert_eq!(hits == 1, want);
    }

    #[test]
    fn generated_embeddings_are_valid(seed in any::<u64>()) {
        let pi = embedding(seed);
        prop_assert_eq!(validate_embedding(&pi, 4, 3).unwrap(), Validation::Valid);
        let lookup = |t: &FiniteSeq| pi.image(t).unwrap();
        prop_assert_eq!(meet_preservation_oracle(&lookup, 4, 3), MeetCheck::Agrees);
    }

    #[test]
    fn embeddings_are_strictly_monotone(seed in any::<u64>(), s in seq_strategy(5, 4), t in seq_strategy(5, 4)) {
        let pi = embedding(seed);
        let root = pi.image(&FiniteSeq::empty()).unwrap();
        let ps = pi.image(&s).unwrap();
        prop_assert!(ps.len() >= root.len() + s.len());
        for k in 0..s.len() {
            let pk = pi.image(&s.restrict(k)).unwrap();
            prop_assert!(pk.is_proper_prefix_of(&ps));
            prop_assert_eq!(ps.restrict(pk.len()), pk);
        }
        prop_assert_eq!(meet(&ps, &pi.image(&t).unwrap()), pi.image(&meet(&s, &t)).unwrap());
    }

    #[test]
    fn extension_is_injective_and_composes(
        seed in any::<u64>(),
        seed2 in any::<u64>(),
        p in point_strategy(),
        q in point_strategy(),
    ) {
        let bud = DepthBudget::new(24, 8, 1_000_000).unwrap();
        let (a, b) = (embedding(seed), embedding(seed2));
        let same = |x: &Point, y: &Point| matches!(split_index(x, y, &bud), Split::Undetermined(_)) && x.len() == y.len();
        if let Split::At(_) = split_index(&p, &q, &bud) {
            prop_assert!(!same(&extend(&a, &p, &bud).unwrap(), &extend(&a, &q, &bud).unwrap()));
        }
        let lhs = extend(&MeetEmbedding::compose(&a, &b), &p, &bud).unwrap();
        let rhs = extend(&a, &extend(&b, &p, &bud).unwrap(), &bud).unwrap();
        prop_assert!(same(&lhs, &rhs));
        if let Point::Augmented(t) = &p {
            prop_assert_eq!(extend(&a, &p, &bud).unwrap(), Point::Augmented(a.image(t).unwrap()));
        }
    }
}
