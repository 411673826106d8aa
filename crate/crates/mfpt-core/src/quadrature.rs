//! Area quadrature over the trap-free domain and temporal averaging over a
//! period of trap motion.
//!
//! Fields live on the uniform embedding grid, so integrating over the
//! irregular region Ω̄ needs per-node area weights. Two variants:
//!
//! * `Trivial` — h² times the 0/1 indicator of Ω̄; first-order accurate
//!   (the boundary cells are counted all-or-nothing).
//! * `Modified` — h² times a product of regularized-indicator factors, one
//!   per boundary feature, each a C¹ smoothed Heaviside of the signed
//!   distance with support width 2h:
//!
//!   ```text
//!       K(t) = ½(1 + t + sin(πt)/π),  t = clamp(d/h, −1, 1)
//!   ```
//!
//!   This restores second-order area convergence. For the rectangle domain
//!   the outer factor tensorizes per axis, which makes grid-aligned
//!   rectangle areas exact. Nodes deeper than h inside any trap (all deep
//!   and clamped nodes in particular) get weight exactly 0, so constrained
//!   values never pollute averages.
//!
//! Spatial averages always use the quadrature's own Σw as the measure of
//! |Ω̄| — numerator and denominator share the boundary error, which partially
//! cancels. Temporal averaging over a period of trap motion is a trapezoid
//! rule over per-step spatial averages with instantaneous weights.

use crate::band::Band;
use crate::geometry::DomainSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("field has {field} entries but the weights cover {weights} nodes")]
    DimensionMismatch { field: usize, weights: usize },
    #[error("periodic record is empty")]
    EmptyRecord,
    #[error("periodic solve had not converged (relative period-to-period change {resid:.3e})")]
    NotConverged { resid: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightVariant {
    Trivial,
    #[default]
    Modified,
}

/// Per-node area weights for one instant of trap motion.
#[derive(Debug, Clone)]
pub struct QuadratureWeights {
    pub w: Vec<f64>,
    pub variant: WeightVariant,
    /// Σw — the discrete trap-free area |Ω̄|.
    pub total: f64,
}

/// Smoothed Heaviside kernel with support width 2h (argument in units of h).
#[inline]
fn kernel(t: f64) -> f64 {
    if t >= 1.0 {
        1.0
    } else if t <= -1.0 {
        0.0
    } else {
        // clamp guards the −1e−17 the sin term can leave at t = −1
        (0.5 * (1.0 + t + (std::f64::consts::PI * t).sin() / std::f64::consts::PI)).max(0.0)
    }
}

pub fn build_weights(band: &Band, variant: WeightVariant) -> QuadratureWeights {
    let n = band.grid.len();
    let h = band.grid.h;
    let h2 = h * h;
    let mut w = vec![0.0f64; n];
    match variant {
        WeightVariant::Trivial => {
            for k in 0..n {
                if band.dist[k] >= 0.0 {
                    w[k] = h2;
                }
            }
        }
        WeightVariant::Modified => {
            let positions = band
                .traps
                .positions(&band.domain, band.time)
                .expect("band holds a validated trap set");
            for k in 0..n {
                let p = band.grid.coord(k);
                // outer-boundary factor; per-axis for the rectangle so that
                // grid-aligned rectangle areas come out exact
                let mut f = match band.domain {
                    DomainSpec::Rectangle { a0, b0 } => {
                        kernel((a0 - p.x.abs()) / h) * kernel((b0 - p.y.abs()) / h)
                    }
                    _ => kernel(band.d_outer(k) / h),
                };
                for &(c, eps) in &positions {
                    if f == 0.0 {
                        break;
                    }
                    f *= kernel((p.dist(c) - eps) / h);
                }
                w[k] = h2 * f;
            }
        }
    }
    let total = w.iter().sum();
    QuadratureWeights { w, variant, total }
}

/// Weighted spatial average ū = Σwᵢvᵢ / Σwᵢ. Zero-weight nodes are skipped
/// outright, so fields may hold arbitrary (even non-finite) values on nodes
/// outside Ω̄.
pub fn average(field: &[f64], weights: &QuadratureWeights) -> Result<f64, QuadratureError> {
    if field.len() != weights.w.len() {
        return Err(QuadratureError::DimensionMismatch {
            field: field.len(),
            weights: weights.w.len(),
        });
    }
    let mut acc = 0.0;
    for (v, &w) in field.iter().zip(&weights.w) {
        if w != 0.0 {
            acc += w * v;
        }
    }
    Ok(acc / weights.total)
}

/// Trapezoid rule over one period of per-step spatial averages.
///
/// `times` and `step_averages` are the per-step instants (ascending, spanning
/// exactly one period) and the spatial averages computed there with
/// instantaneous weights; the periodic solver records both. A single entry
/// degenerates to that entry. `converged` must report the solver's
/// convergence flag; a non-converged record is refused.
pub fn average_periodic(
    times: &[f64],
    step_averages: &[f64],
    converged: bool,
    residual: f64,
) -> Result<f64, QuadratureError> {
    if times.is_empty() || times.len() != step_averages.len() {
        return Err(QuadratureError::EmptyRecord);
    }
    if !converged {
        return Err(QuadratureError::NotConverged { resid: residual });
    }
    if times.len() == 1 {
        return Ok(step_averages[0]);
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        acc += 0.5 * (step_averages[i] + step_averages[i - 1]) * (times[i] - times[i - 1]);
    }
    Ok(acc / (times[times.len() - 1] - times[0]))
}
