//! Sparse generalized polynomial chaos (GPCE) surrogates.
//!
//! The crate covers the whole pipeline used to compare sampling designs for
//! compressive GPCE:
//!
//! * [`basis`]: truncated multi-index sets, orthonormal Legendre polynomials
//!   and measurement-matrix assembly.
//! * [`sampling`]: random, Latin hypercube (standard, pool-optimal, SC-ESE),
//!   coherence-optimal MCMC and greedy L1/D-optimal designs.
//! * [`criteria`]: mutual coherence, average cross-correlation, hybrid score,
//!   D-optimality and distance criteria.
//! * [`solver`]: LARS-Lasso path with cross-validated knot selection and a
//!   pseudo-inverse least-squares baseline.
//! * [`surrogate`]: fitting, prediction, NRMSD validation and moments.
//! * [`models`]: Ishigami, Rosenbrock, linear paired product and the
//!   electrode impedance model.
//! * [`bench`]: repeated convergence studies and their statistics.
//! * [`cli`]: the `gpce` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bench;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod models;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod surrogate;

pub use basis::{GpceMatrix, InputSpec, MultiIndex, MultiIndexSet};
pub use error::{Error, Result};
pub use sampling::{SampleSet, Scheme};
pub use surrogate::GpceModel;
