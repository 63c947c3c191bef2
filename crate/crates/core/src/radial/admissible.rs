//! Local integrability of `|f^(k)|^p` against power weights at both endpoints.

use super::expr::RadialExpr;
use crate::error::{DivergenceReason, Endpoint};

/// Weight `r^origin_power * (1 - (r/R)^c)^boundary_power` of a target integral.
/// The measure factor `r^(Q-1)` is added by [`admissible`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightExponents {
    pub origin_power: f64,
    pub boundary_power: f64,
}

/// Checks that `int |f^(order)|^p r^(origin_power + Q - 1) w^boundary_power dr`
/// converges at both ends of `(0, radius)`.
pub fn admissible(
    expr: &RadialExpr,
    weights: WeightExponents,
    q: f64,
    p: f64,
    order: usize,
    radius: f64,
) -> Result<(), DivergenceReason> {
    if let Some(e) = expr.local_exponent(Endpoint::Origin, radius, order) {
        let total = p * e + weights.origin_power + q - 1.0;
        if total <= -1.0 {
            return Err(DivergenceReason {
                endpoint: Endpoint::Origin,
                exponent: total,
            });
        }
    }
    if let Some(e) = expr.local_exponent(Endpoint::Boundary, radius, order) {
        let total = p * e + weights.boundary_power;
        if total <= -1.0 {
            return Err(DivergenceReason {
                endpoint: Endpoint::Boundary,
                exponent: total,
            });
        }
    }
    Ok(())
}
