use std::collections::HashSet;

use bairestar::catalog::{samples, AFTER_P_TARGETS};
use bairestar::{
    catalog_a, catalog_b, embed_via, evaluate, extend, project_p, CatalogFunction, DepthBudget, Error, FiniteSeq,
    MeetEmbedding, Pairing, Payload, Point, SpaceTag,
};

fn budget() -> DepthBudget {
    DepthBudget::new(8, 4, 100_000).unwrap()
}

fn seq(v: &[u64]) -> FiniteSeq {
    FiniteSeq::new(v.to_vec())
}

#[test]
fn catalog_sizes_and_distinctness() {
    let a = catalog_a();
    let b = catalog_b();
    assert_eq!(a.len(), 24);
    assert_eq!(b.len(), 27);
    assert_eq!(a.iter().collect::<HashSet<_>>().len(), 24);
    assert_eq!(b.iter().collect::<HashSet<_>>().len(), 27);
    assert!(a.iter().all(|f| b.contains(f)));
    let unions = b.iter().filter(|f| matches!(f, CatalogFunction::UnionWithP { .. })).count();
    assert_eq!(unions, 3);
    for f in &b {
        f.check().unwrap();
    }
}

#[test]
fn after_p_targets_are_the_five_listed() {
    for f in catalog_a() {
        let CatalogFunction::DisjointUnion { rest_part, .. } = f else {
            panic!("catalog a holds disjoint unions only")
        };
        if let CatalogFunction::InclusionAfterP { into } = *rest_part {
            assert!(AFTER_P_TARGETS.contains(&into));
        }
    }
}

#[test]
fn evaluate_respects_domains() {
    let all = samples(SpaceTag::SeqStar, 4, 3);
    for f in catalog_b() {
        let parts: Vec<CatalogFunction> = match &f {
            CatalogFunction::DisjointUnion { baire_part, rest_part } => {
                vec![f.clone(), (**baire_part).clone(), (**rest_part).clone()]
            }
            CatalogFunction::UnionWithP { baire_part } => vec![f.clone(), (**baire_part).clone()],
            _ => vec![f.clone()],
        };
        for g in parts {
            for p in &all {
                let r = evaluate(&g, p);
                if g.domain().contains_point(p) {
                    assert!(r.is_ok(), "{g} at {p:?}");
                } else {
                    assert!(matches!(r, Err(Error::DomainMismatch(_))), "{g} at {p:?}");
                }
            }
        }
    }
}

#[test]
fn inclusions_retag_only() {
    for from in SpaceTag::ALL {
        for into in SpaceTag::ALL {
            let f = CatalogFunction::Inclusion { from, into };
            if f.check().is_err() {
                continue;
            }
            for p in samples(from, 3, 3) {
                let v = evaluate(&f, &p).unwrap();
                assert_eq!(v.space, into);
                assert_eq!(v.payload, Payload::Point(p));
            }
        }
    }
}

#[test]
fn unions_agree_with_parts() {
    for f in catalog_b() {
        for p in samples(SpaceTag::BaireStar, 4, 3) {
            let v = evaluate(&f, &p).unwrap();
            match &f {
                CatalogFunction::DisjointUnion { baire_part, rest_part } => match (&p, v.payload) {
                    (Point::Infinite(_), Payload::Left(x)) => assert_eq!(*x, evaluate(baire_part, &p).unwrap()),
                    (Point::Augmented(_), Payload::Right(x)) => assert_eq!(*x, evaluate(rest_part, &p).unwrap()),
                    (_, other) => panic!("{f} at {p:?} gave {other:?}"),
                },
                CatalogFunction::UnionWithP { baire_part } => match &p {
                    Point::Infinite(_) => assert_eq!(v, evaluate(baire_part, &p).unwrap()),
                    _ => {
                        assert_eq!(v.space, SpaceTag::Tree);
                        assert_eq!(v.payload, Payload::Point(Point::Finite(project_p(&p).unwrap())));
                    }
                },
                _ => unreachable!(),
            }
        }
    }
}

#[test]
fn singleton_and_tree_infinity_are_distinct() {
    let c = evaluate(&CatalogFunction::Const { domain: SpaceTag::Baire }, &Point::zeros()).unwrap();
    assert_eq!(c.space, SpaceTag::Singleton);
    assert_eq!(c.payload, Payload::Infinity);
    assert!(!SpaceTag::Singleton.is_subset_of(SpaceTag::TreeOnePoint));
}

#[test]
fn embed_via_inclusion_identity() {
    let pi = MeetEmbedding::prefix(seq(&[2]));
    let f = CatalogFunction::Inclusion { from: SpaceTag::Baire, into: SpaceTag::Baire };
    let pts = samples(SpaceTag::Baire, 3, 3);
    let id = |q: &Point| Ok(q.clone());
    let Pairing::CertifiedPairing { psi } = embed_via(&pi, &f, &id, &pts, &budget()).unwrap() else {
        panic!("expected a pairing")
    };
    assert_eq!(psi.len(), pts.len());
    for (k, v) in psi {
        let Payload::Point(p) = k.payload else { panic!() };
        assert_eq!(v, extend(&pi, &p, &budget()).unwrap());
    }
}

#[test]
fn embed_via_constant_mismatch() {
    let pi = MeetEmbedding::identity();
    let f = CatalogFunction::Const { domain: SpaceTag::Baire };
    let pts = samples(SpaceTag::Baire, 2, 2);
    let first_entry = |q: &Point| Ok(q.node_prefix(1));
    assert!(matches!(
        embed_via(&pi, &f, &first_entry, &pts, &budget()).unwrap(),
        Pairing::Mismatch { .. }
    ));
}

#[test]
fn embed_via_projection_recovers_table() {
    let pi = MeetEmbedding::child_word(seq(&[1]), vec![seq(&[0, 1]), seq(&[2]), seq(&[3, 3])]);
    let f = CatalogFunction::InclusionAfterP { into: SpaceTag::Tree };
    let pts = samples(SpaceTag::BaireStarMinusBaire, 3, 3);
    let phi = |q: &Point| project_p(q);
    let Pairing::CertifiedPairing { psi } = embed_via(&pi, &f, &phi, &pts, &budget()).unwrap() else {
        panic!("expected a pairing")
    };
    assert_eq!(psi.len(), 13);
    for (k, v) in psi {
        let Payload::Point(Point::Finite(t)) = k.payload else { panic!() };
        assert_eq!(v, pi.image(&t).unwrap());
    }
}

#[test]
fn embed_via_detects_non_injective_psi() {
    let pi = MeetEmbedding::identity();
    let f = CatalogFunction::Inclusion {
        from: SpaceTag::BaireStarMinusBaire,
        into: SpaceTag::BaireStarMinusBaire,
    };
    let pts = samples(SpaceTag::BaireStarMinusBaire, 2, 2);
    let len = |q: &Point| Ok(q.len());
    assert!(matches!(
        embed_via(&pi, &f, &len, &pts, &budget()).unwrap(),
        Pairing::Mismatch { .. }
    ));
}

#[test]
fn self_embedding_of_every_catalog_entry() {
    let pis = [
        MeetEmbedding::identity(),
        MeetEmbedding::prefix(seq(&[0, 2])),
        MeetEmbedding::child_word(FiniteSeq::empty(), vec![seq(&[1]), seq(&[0, 0]), seq(&[2, 1])]),
    ];
    for f in catalog_b() {
        let pts = samples(f.domain(), 3, 3);
        for pi in &pis {
            // Oracle images compare by pointer, so infinite images are
            // replaced by an eventually zero point agreeing to depth 12.
            let phi = |q: &Point| {
                let q = match q {
                    Point::Infinite(_) => Point::zeros_after(&q.node_prefix(12)),
                    _ => q.clone(),
                };
                evaluate(&f, &q)
            };
            let r = embed_via(pi, &f, &phi, &pts, &budget()).unwrap();
            assert!(matches!(r, Pairing::CertifiedPairing { .. }), "{f}: {r:?}");
        }
    }
}
