//! Fixtures shared by the benches.

use bairestar::enumeration::range_nodes;
use bairestar::{BasicClopen, FiniteSeq, MeetEmbedding, Point};

/// Finite and augmented points over `range_nodes(depth, branch)`.
pub fn node_points(depth: usize, branch: u64) -> Vec<Point> {
    range_nodes(depth, branch)
        .into_iter()
        .flat_map(|t| [Point::Finite(t.clone()), Point::Augmented(t)])
        .collect()
}

/// Eventually periodic points `t⌢(j)^ω`.
pub fn periodic_points(depth: usize, branch: u64) -> Vec<Point> {
    range_nodes(depth, branch)
        .into_iter()
        .flat_map(|t| (0..2).map(move |j| Point::periodic(t.clone(), FiniteSeq::new(vec![j])).unwrap()))
        .collect()
}

pub fn child_word() -> MeetEmbedding {
    MeetEmbedding::child_word(
        FiniteSeq::new(vec![1]),
        vec![FiniteSeq::new(vec![0, 1]), FiniteSeq::new(vec![2]), FiniteSeq::new(vec![3, 3])],
    )
}

/// `{⟨⟩} ∪ N_⟨⟩∖(...) ∪ N_⟨0⟩ ∪ ... ∪ N_⟨k-1⟩`, covering iff `skip` is `None`.
pub fn cover_family(k: u64, skip: Option<u64>) -> Vec<BasicClopen> {
    let mut fam = vec![BasicClopen::singleton(FiniteSeq::empty()), BasicClopen::cone_minus(FiniteSeq::empty(), k)];
    fam.extend((0..k).filter(|&j| Some(j) != skip).map(|j| BasicClopen::cone(FiniteSeq::new(vec![j]))));
    fam
}
