//! Radial profiles: expression trees, derivative jets and test families.

pub mod admissible;
pub mod expr;
pub mod families;
pub mod jet;
pub mod parse;

pub use admissible::{admissible, WeightExponents};
pub use expr::{Interval, RadialExpr, RadialPoint};
pub use families::{extremal_candidate, make_boundary_family, make_origin_family};
pub use jet::Jet;
pub use parse::parse_expr;

use crate::error::Result;

/// `f''(r) + (Q-1) f'(r) / r`, the radial part of the Laplacian-type operator.
pub fn rellich_operand(expr: &RadialExpr, q: f64, r: f64) -> Result<f64> {
    let j = expr.eval_jet(r, 2)?;
    Ok(j.deriv(2) + (q - 1.0) * j.deriv(1) / r)
}

/// Same operator applied to a precomputed jet of order at least 2.
pub fn rellich_from_jet(jet: &Jet, q: f64, r: f64) -> f64 {
    jet.deriv(2) + (q - 1.0) * jet.deriv(1) / r
}
