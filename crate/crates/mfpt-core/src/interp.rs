//! Bicubic tensor-product Lagrange interpolation stencils.
//!
//! A query point is interpolated from the 4×4 block of nodes whose central
//! cell contains it. The sixteen weights are products of one-dimensional
//! cubic Lagrange basis values on the equispaced nodes `{-1, 0, 1, 2}` (in
//! cell units), evaluated at the in-cell offset `t ∈ [0, 1)`:
//!
//! ```text
//! w₋₁(t) = −t(t−1)(t−2)/6      w₀(t) = (t²−1)(t−2)/2
//! w₁(t)  = −t(t+1)(t−2)/2      w₂(t) = t(t²−1)/6
//! ```
//!
//! The basis reproduces cubic polynomials exactly and sums to one for every
//! `t`; at `t = 0` it degenerates to the single node weight `w₀ = 1`.

use crate::grid::Grid2;
use crate::Vec2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("interpolation stencil escapes the grid at point ({x:.6}, {y:.6})")]
    StencilEscape { x: f64, y: f64 },
}

/// One sparse interpolation row: flat node indices and matching weights.
#[derive(Debug, Clone)]
pub struct InterpRow {
    pub cols: [usize; 16],
    pub weights: [f64; 16],
}

/// 1-D cubic Lagrange basis on nodes {-1, 0, 1, 2} at offset `t`.
#[inline]
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t * t - 1.0) * (t - 2.0) / 2.0,
        -t * (t + 1.0) * (t - 2.0) / 2.0,
        t * (t * t - 1.0) / 6.0,
    ]
}

/// Build the bicubic interpolation row for point `p`.
///
/// Errors with [`InterpError::StencilEscape`] when the 4×4 stencil around the
/// containing cell leaves the grid.
pub fn interp_row(grid: &Grid2, p: Vec2) -> Result<InterpRow, InterpError> {
    let escape = || InterpError::StencilEscape { x: p.x, y: p.y };
    let (li, lj, tx, ty) = grid.locate(p).ok_or_else(escape)?;
    if li < 1 || lj < 1 || li + 2 >= grid.nx as i64 || lj + 2 >= grid.ny as i64 {
        return Err(escape());
    }
    let wx = lagrange4(tx);
    let wy = lagrange4(ty);
    let mut cols = [0usize; 16];
    let mut weights = [0.0f64; 16];
    let mut k = 0;
    for (a, &wxa) in wx.iter().enumerate() {
        let i = (li - 1) as usize + a;
        for (b, &wyb) in wy.iter().enumerate() {
            let j = (lj - 1) as usize + b;
            cols[k] = grid.flat(i, j);
            weights[k] = wxa * wyb;
            k += 1;
        }
    }
    Ok(InterpRow { cols, weights })
}

/// Evaluate an interpolation row against a nodal field.
#[inline]
pub fn apply_row(row: &InterpRow, values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..16 {
        acc += row.weights[k] * values[row.cols[k]];
    }
    acc
}
