//! Numerical construction of forward self-similar solutions of the 3D
//! incompressible Navier-Stokes equations from (-1)-homogeneous divergence-free
//! initial data, together with the verification functionals (decay fits,
//! scaling identities, local energy balance) used to certify the results.
//!
//! The pipeline: a trace on the unit sphere defines the homogeneous data u0;
//! its caloric extension U0 = e^Delta u0 seeds a fixed-point iteration
//! V + K(V, mu) = 0 for the correction V, continued in the scale parameter
//! mu from 0 to 1; the profile U = mu U0 + V is then checked against the
//! profile equation, its far-field asymptotics, and local energy estimates.
//!
//! All field math is generic over the scalar type via [`Real`]; concrete
//! `f64` aliases are exported at the crate root.

pub mod caloric;
pub mod czt;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod interp;
pub mod io;
pub mod kernel_check;
pub mod landau;
pub mod quad;
pub mod real;
pub mod solver;
pub mod sphere;
pub mod stokes;

pub use error::{Error, Result};
pub use real::Real;

/// Concrete `f64` aliases for the common types.
pub type GridSpec64 = grid::GridSpec<f64>;
pub type RealField64 = grid::RealField<f64>;
pub type SpectralField64 = grid::SpectralField<f64>;
