//! Simulation toolbox for biphoton states produced by transversely pumped
//! spontaneous parametric down conversion.
//!
//! The pipeline runs from a declarative pump description ([`config`]) through
//! the pump envelope ([`pump`]), the phase-matching amplitude and joint
//! spectral amplitude ([`biphoton`]), the chronocyclic Wigner function
//! ([`wigner`]) and finally the generalized Hong-Ou-Mandel measurement and
//! pump-displacement tomography ([`hom`]).
//!
//! All quantities are SI internally (seconds, meters, rad/s). Display units
//! only appear in scenario files and CSV headers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biphoton;
pub mod config;
pub mod device;
pub mod error;
pub mod grid;
pub mod hom;
pub mod io;
pub mod pump;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
