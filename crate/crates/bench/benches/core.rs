use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use bairestar::constructions::registry::function;
use bairestar::constructions::{classify_baire_function, diameter_shrink, recheck, Range};
use bairestar::embeddings::meet_preservation_oracle;
use bairestar::{amalgamate, cover_decide, distance, extend, validate, DepthBudget, EpsilonSchedule, MeetEmbedding};
use bairestar_bench::{child_word, cover_family, node_points, periodic_points};

fn metric(c: &mut Criterion) {
    let w = EpsilonSchedule::weight();
    let budget = DepthBudget::new(64, 8, 1_000_000).unwrap();
    let pts = node_points(4, 3);
    c.bench_function("distance/all pairs, 40 nodes", |b| {
        b.iter(|| {
            for p in &pts {
                for q in &pts {
                    black_box(distance(p, q, &w, &budget));
                }
            }
        })
    });
    let per = periodic_points(3, 3);
    c.bench_function("distance/periodic pairs", |b| {
        b.iter(|| {
            for p in &per {
                for q in &per {
                    black_box(distance(p, q, &w, &budget));
                }
            }
        })
    });
}

fn topology(c: &mut Criterion) {
    let full = cover_family(6, None);
    let gap = cover_family(6, Some(3));
    c.bench_function("cover_decide/covering, 8 sets", |b| b.iter(|| black_box(cover_decide(&full))));
    c.bench_function("cover_decide/gap, 7 sets", |b| b.iter(|| black_box(cover_decide(&gap))));
}

fn embeddings(c: &mut Criterion) {
    let pi = child_word();
    let lookup = |t: &_| pi.image(t).unwrap();
    c.bench_function("validate/depth 4 branch 4", |b| b.iter(|| black_box(validate(&lookup, 4, 4))));
    c.bench_function("meet oracle/depth 4 branch 4", |b| {
        b.iter(|| black_box(meet_preservation_oracle(&lookup, 4, 4)))
    });
    c.bench_function("amalgamate/prefix family, depth 4 branch 3", |b| {
        b.iter(|| {
            let a = amalgamate(&|t| Ok(MeetEmbedding::prefix(t.clone())), 4, 3).unwrap();
            black_box(a.image(&vec![2, 2, 2].into()).unwrap())
        })
    });
    let budget = DepthBudget::new(24, 4, 1_000_000).unwrap();
    let pts = periodic_points(3, 3);
    c.bench_function("extend/periodic points", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(extend(&pi, p, &budget).unwrap());
            }
        })
    });
}

fn constructions(c: &mut Criterion) {
    let w = EpsilonSchedule::weight();
    let budget = DepthBudget::new(4, 4, 2_000_000).unwrap();
    let r = Range::new(3, 3);
    let f = function("identity-star").unwrap();
    c.bench_function("diameter_shrink/identity-star", |b| {
        b.iter(|| black_box(diameter_shrink(&f, &w, r, &budget).unwrap()))
    });
    c.bench_function("classify/identity-star", |b| {
        b.iter(|| black_box(classify_baire_function(&f, &w, 16, r, &budget).unwrap()))
    });
    let trace = classify_baire_function(&f, &w, 16, r, &budget).unwrap().trace;
    c.bench_function("recheck/classify trace", |b| b.iter(|| black_box(recheck(&trace).unwrap())));
}

criterion_group!(benches, metric, topology, embeddings, constructions);
criterion_main!(benches);
