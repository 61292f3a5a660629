//! Finite combinatorics of the semigeneric directed graph: membership
//! validation, the ordered/labelled expansion class, generic finite
//! approximations, and the uniform measure on cylinder sets with
//! brute-force and Monte Carlo oracles.

pub mod digraph;
pub mod extension;
pub mod instances;
pub mod measure;
pub mod star;

pub use digraph::{ColumnView, RawGraph, SemiDigraph, Vertex, Violation};
pub use extension::{
    build_generic, clone_in_column, disjoint_copy, extend_iso, lemma1_extend, ColumnTarget,
    ExtensionDemand, PartialIso, SaturationReport,
};
pub use measure::{
    brute_measure, intersect_u, mc_measure, mu0_cyl, mu0_u, mu0_v, ordering_independence,
    partition_check, rebase, sample_expansion, Cylinder, Rat, UCylinder, VCylinder,
};
pub use star::{check_star, enumerate_expansions, expansion_count, StarExpansion};
