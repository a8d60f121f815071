//! Exact finite-depth computations on the compactified Baire space
//! ℕ^{≤ℕ}_*: the ultrametric, its clopen basis, ∧-embeddings of the tree
//! ℕ^{<ℕ}, oracle-driven embedding constructions, and the basis catalogs.

pub mod catalog;
pub mod constructions;
pub mod dyadic;
pub mod embeddings;
pub mod enumeration;
pub mod error;
pub mod metric;
pub mod sequences;
pub mod topology;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use metric::{ball_member, distance, DistanceResult, EpsilonSchedule};
pub use sequences::{meet, DepthBudget, FiniteSeq, InfiniteSeq, Point, PrefixOracle};
pub use topology::{basic_member, cover_decide, neighborhood_of, uncovered_descent, BasicClopen, CoverResult};
pub use embeddings::{amalgamate, extend, preimage_cone, validate, MeetEmbedding, Preimage, SuccessorTable, Validation};
pub use catalog::{catalog_a, catalog_b, embed_via, evaluate, project_p, CatalogFunction, Pairing, Payload, SpaceTag, TaggedValue};
