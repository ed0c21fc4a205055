//! Exact and numerical tools for two-dimensional Yang–Mills theory with
//! structure groups U(N) and SU(N).
//!
//! The crate is organised bottom-up:
//!
//! - [`partitions`]: integer partitions, Young-diagram contents, q-uniform sampling.
//! - [`unitary_reps`]: highest weights, exact Weyl dimensions and Casimirs,
//!   the almost-flat parametrisation of U(N) weights, Schur functions.
//! - [`special`]: truncated θ, φ and Witten zeta evaluations.
//! - [`partition_function`]: Migdal sums, large-N limits, the discrete
//!   Gaussian measure on highest weights, the torus 1/N² expansion and the
//!   sphere free energy.
//! - [`hurwitz`]: Hurwitz numbers of torus coverings and their generating series.
//! - [`maps`]: combinatorial maps, loops and holonomies.
//! - [`groups`] and [`monte_carlo`]: U(1)/SU(2) Haar sampling, heat kernels and
//!   lattice Monte Carlo on maps.

pub mod error;
pub mod groups;
pub mod hurwitz;
pub mod maps;
pub mod monte_carlo;
pub mod partition_function;
pub mod partitions;
pub mod quadrature;
pub mod special;
pub mod summation;
pub mod unitary_reps;

mod almost_flat;

pub use error::{Error, Result};
