//! Spectra of the kinematic dynamo operator on two-dimensional Einstein
//! manifolds under Ricci flow.
//!
//! The operator `Γ_η B = {v, B} + η ΔB ± θ B` comes in two realizations:
//! a 2×2 reduced matrix whose characteristic polynomial is
//! `λ² + 2(R + θ/2 − η)λ + R² + θ² + 2(η − θ)R`, and a periodic finite
//! difference discretization on `[0, 2π)²`. Both feed the spectrum,
//! dynamics and cosmology layers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cosmology;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod operator;
pub mod spectrum;

pub use error::{DynamoError, Result};
pub use geometry::{Metric2, RicciData};
pub use grid::{Grid, StencilOrder, VectorField};
pub use num_complex::Complex64;
pub use operator::{assemble_grid, assemble_reduced, DynamoOperator, MagneticField};
pub use spectrum::{SpectrumResult, SpectrumSource};
