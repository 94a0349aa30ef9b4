//! Polyvector and polydifferential complexes over both models of the
//! quotient: Schouten calculus on the psi bank, Hochschild-type calculus on
//! tensor words, and the cohomology machinery comparing them.

pub mod cohomology;
pub mod dpoly;
pub mod fdpoly;
pub mod tpoly;
