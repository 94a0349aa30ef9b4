//! Exact symbolic kernel for Lie pair computations: graded-commutative
//! algebra over the rationals, Fedosov-type contractions and recursions,
//! Atiyah and Todd cocycles, polydifferential complexes, graph-weight
//! integrals, and the Duflo check.

pub mod atiyah;
pub mod derivation;
pub mod duflo;
pub mod element;
pub mod error;
pub mod fedosov;
pub mod graphs;
pub mod liepair;
pub mod linalg;
pub mod multi_index;
pub mod perturb;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod sym_poly;
pub mod uea;
pub mod word;

pub use atiyah::{EndMatrix, SeriesKind, ToddCocycle};
pub use derivation::Derivation;
pub use duflo::{duflo_check, duflo_element, duflo_sqrt, DufloCheck, DufloSeries};
pub use element::{koszul_sign, Element, Trunc};
pub use error::{Error, Result};
pub use graphs::{
    enumerate_graphs, AdmissibleGraph, GraphExpansion, GraphWeight, StarKernel, WeightCache,
    WeightMode,
};
pub use liepair::{Base, LiePair, LiePairBuilder};
pub use multi_index::MultiIndex;
pub use poly::cohomology::{
    ce_column_ranks, cohomology, hkr_induced_ranks, CohomologyTable, DegreeRanks, HkrDegree,
    Representative, Side, Window,
};
pub use poly::dpoly::{DComplex, DElement, DWord};
pub use poly::fdpoly::FdElement;
pub use poly::tpoly::SchoutenEngine;
pub use scalar::{format_ratio, parse_ratio, Ratio};
pub use sym_poly::SymPoly;
pub use uea::{LieStructure, UeaElement};
pub use word::{FrameSpec, Gen, Word};
