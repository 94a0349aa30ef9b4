//! Graph calculus on the formal fiber: admissible graphs, their weights, the
//! induced polydifferential operators, the star product they assemble into,
//! and the twisted (connection-dressed) variant.

pub mod graph;
pub mod fiberwise;
pub mod operator;
pub mod star;
pub mod weight;

pub use fiberwise::{homotopy_h, phi, phi1_todd_reference, twist, HomotopyWeights};
pub use graph::{enumerate_graphs, enumerate_with_star_sizes, AdmissibleGraph, Edge, Vertex};
pub use operator::{
    assemble, assemble_dressed, hkr, taylor_u, GraphExpansion, NumOp, WeightedTerm,
};
pub use star::{associativity_residuals, star_kernel, NumPoly, StarKernel, StarSeries};
pub use weight::{
    closed_form, monte_carlo, weight, weight_cached, GraphWeight, Provenance, WeightCache,
    WeightMode, WeightValue,
};
