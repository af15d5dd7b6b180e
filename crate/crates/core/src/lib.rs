//! Spectral extremal problems for graphs without `k` disjoint `(r+1)`-cliques.

mod bits;

pub mod audit;
pub mod canon;
pub mod cliques;
pub mod combinatorics;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod graph6;
pub mod matching;
pub mod search;
pub mod serde_float;
pub mod spectral;

pub use canon::{canonical_form, canonical_labeling, CanonicalForm, CanonicalLabeling};
pub use cliques::{enumerate_cliques, find_disjoint_packing, is_free, CliqueList, CliquePacking, FreeVerdict};
pub use error::{Error, Result};
pub use graph::{extremal_graph, DominatedMultipartite, Graph, PartitionLabeling, Role};
pub use search::{SearchReport, Verdict};
pub use spectral::{quotient_rho, spectral_radius, SpectralResult};
