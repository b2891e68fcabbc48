//! Constructive finite-scale genericity: violating spaces of any small
//! diameter, hub-and-blocks spaces assembled from them, perturbation of a
//! metric into a violating one, and rescaled-copy search.

pub mod catalog;
pub mod distortion;
pub mod witness;

pub use catalog::starter_catalog;
pub use distortion::{
    best_scale, min_distortion, richness_search, Matching, Richness, RichnessQuery, RichnessReport, ScaleFit,
};
pub use witness::{
    block_space, find_cluster, perturb_to_anti, singular_witness, BlockSpace, Perturbation, SingularWitness, HUB,
};
