//! Numerical verification of weighted Hardy, Rellich and
//! Caffarelli-Kohn-Nirenberg inequalities on homogeneous groups,
//! reduced to one-dimensional radial integrals.

pub mod error;
pub mod functionals;
pub mod group;
pub mod quadrature;
pub mod radial;
pub mod sharpness;

pub use error::{DivergenceReason, Endpoint, Error, Result};
