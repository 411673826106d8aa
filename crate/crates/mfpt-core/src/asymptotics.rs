//! Closed-form expansions and root-finding oracles for optimal trap
//! configurations, independent of the grid solver.
//!
//! Everything here evaluates explicit formulas or one-dimensional
//! root/minimum problems, so these routines run in microseconds and serve as
//! an independent cross-check for the grid-based results:
//!
//! * **Ring patterns in the unit disk** — the interaction coefficient
//!   [`kappa1`] of `m` equally spaced traps on a ring, the small-trap average
//!   MFPT [`leading_avg`], the boundary-perturbation correction
//!   [`sigma_correction`], and the optimal ring radius to leading
//!   ([`optimal_ring_radius_leading`]) and first perturbative
//!   ([`optimal_ring_radius_perturbed`]) order.
//! * **Near-disk ellipses** — [`two_trap_ellipse_expansion`] maps the ring
//!   expansion onto an area-π ellipse with two traps on the major axis.
//! * **Thin domains** — explicit average-MFPT curves for two and three traps
//!   in a long thin rectangle ([`thin_rect_two_trap`],
//!   [`thin_rect_three_trap`]) and the three-trap long-thin-ellipse limit
//!   [`thin_ellipse_three_trap`] obtained by minimizing a one-dimensional
//!   profile functional.
//! * **Fast rotation** — the time-averaged radial profile
//!   [`fast_rotation_profile`] for a trap orbiting at high angular speed
//!   around a concentric trap, and the optimal orbit radius
//!   [`fast_rotation_opt_radius`].
//! * **Green's function of the unit disk** with reflecting boundary:
//!   [`neumann_green_disk`] (Fourier series with a reported tail bound),
//!   [`neumann_green_disk_exact`] (closed form), and its regular part
//!   [`neumann_green_disk_regular`].
//!
//! All reference constants quoted in the doc comments are test expectations;
//! computation always goes through the formulas.

use std::f64::consts::PI;

use thiserror::Error;

use crate::numerics::{bisect, golden_min, integrate};
use crate::vec2::Vec2;

/// Errors for the closed-form oracles.
#[derive(Debug, Error)]
pub enum AsymptoticsError {
    /// A parameter lies outside the admissible range of the formula.
    #[error("parameter out of range: {0}")]
    DomainError(String),
    /// The optimality condition has no sign change on the physical bracket.
    #[error("optimality condition has no root on [{lo}, {hi}]")]
    NoRootInBracket {
        /// Lower end of the searched bracket.
        lo: f64,
        /// Upper end of the searched bracket.
        hi: f64,
    },
    /// Green's function evaluation points coincide (log singularity).
    #[error("Green's function evaluation points coincide")]
    CoincidentPoints,
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), AsymptoticsError> {
    if cond {
        Ok(())
    } else {
        Err(AsymptoticsError::DomainError(msg()))
    }
}

// ---------------------------------------------------------------------------
// Ring of m equally spaced traps in the unit disk
// ---------------------------------------------------------------------------

/// Interaction coefficient of `m` equally spaced small traps on a ring of
/// radius `rc` in the unit disk:
///
/// `κ₁ = (1/2π)·[−log(m·rc^(m−1)) − log(1 − rc^(2m)) + m·rc² − (3/4)·m]`.
///
/// This is the common row sum (eigenvalue for the all-ones eigenvector) of
/// the cyclic Green matrix of the configuration; the small-trap average MFPT
/// is an affine function of it, so its minimizer in `rc` is also the optimal
/// ring radius. Diverges to `+∞` at both ends of `(0, 1)`.
pub fn kappa1(m: u32, rc: f64) -> Result<f64, AsymptoticsError> {
    require(m >= 1, || format!("trap count m = {m} must be >= 1"))?;
    require(rc > 0.0 && rc < 1.0, || {
        format!("ring radius rc = {rc} must lie in (0, 1)")
    })?;
    let mf = f64::from(m);
    let r2m = rc.powi(2 * m as i32);
    Ok((-(mf * rc.powi(m as i32 - 1)).ln() - (1.0 - r2m).ln() + mf * rc * rc - 0.75 * mf)
        / (2.0 * PI))
}

/// Analytic derivative `dκ₁/drc`; vanishes exactly at the optimal ring
/// radius. Used by the root-finding cross-checks.
pub fn kappa1_prime(m: u32, rc: f64) -> Result<f64, AsymptoticsError> {
    require(m >= 1, || format!("trap count m = {m} must be >= 1"))?;
    require(rc > 0.0 && rc < 1.0, || {
        format!("ring radius rc = {rc} must lie in (0, 1)")
    })?;
    let mf = f64::from(m);
    let r2m = rc.powi(2 * m as i32);
    Ok(
        (-(mf - 1.0) / rc + 2.0 * mf * rc.powi(2 * m as i32 - 1) / (1.0 - r2m) + 2.0 * mf * rc)
            / (2.0 * PI),
    )
}

/// Analytic second derivative `d²κ₁/drc²`:
///
/// `κ₁″ = (m/(π·rc²))·[(m−1)/(2m) + rc² + rc^(2m)·(2m−1+rc^(2m))/(1−rc^(2m))²]`.
///
/// Strictly positive at the optimal radius (it is a minimum); enters the
/// first-order shift of the optimal radius under boundary perturbations.
pub fn kappa1_second(m: u32, rc: f64) -> Result<f64, AsymptoticsError> {
    require(m >= 1, || format!("trap count m = {m} must be >= 1"))?;
    require(rc > 0.0 && rc < 1.0, || {
        format!("ring radius rc = {rc} must lie in (0, 1)")
    })?;
    let mf = f64::from(m);
    let r2m = rc.powi(2 * m as i32);
    let frac = r2m / ((1.0 - r2m) * (1.0 - r2m));
    Ok(mf / (PI * rc * rc)
        * ((mf - 1.0) / (2.0 * mf) + rc * rc + frac * (2.0 * mf - 1.0 + r2m)))
}

/// Leading-order average MFPT for `m` equally spaced traps of radius `eps`
/// on a ring of radius `rc` in the unit disk, with diffusivity `diffusivity`:
///
/// `ū₀ = 1/(2mνD) + π·κ₁/(mD)`, where `ν = −1/log eps`.
///
/// Reference values at `eps = 0.05`, `D = 1`, evaluated at the optimal ring
/// radius: `0.5120` (m=2), `0.2964` (m=3), `0.1998` (m=4).
pub fn leading_avg(m: u32, rc: f64, eps: f64, diffusivity: f64) -> Result<f64, AsymptoticsError> {
    require(eps > 0.0 && eps < 1.0, || {
        format!("trap radius eps = {eps} must lie in (0, 1) for the log gauge")
    })?;
    require(diffusivity > 0.0, || {
        format!("diffusivity D = {diffusivity} must be positive")
    })?;
    let nu = -1.0 / eps.ln();
    let mf = f64::from(m);
    Ok(1.0 / (2.0 * mf * nu * diffusivity) + PI * kappa1(m, rc)? / (mf * diffusivity))
}

/// First-order change of the average MFPT when the unit-disk boundary is
/// perturbed to `r = 1 + σ·cos(N·θ)` with the ring rotated by phase `psi`:
/// `ū ≈ ū₀ + σ·sigma_correction`.
///
/// Nonzero only when the fold count `n` is a positive integer multiple
/// `k = n/m` of the trap count (otherwise the first-order average correction
/// cancels by symmetry and this returns exactly `0`):
///
/// `Ū₁ = −(rc^N/(N·D))·cos(N·ψ)·[(2 + (N−2)·rc^(2m))/(1 − rc^(2m)) − (N/2)(k−1)]`.
///
/// Minimized over `psi` at `psi = 0`: traps aligned with the outward bulges
/// of the boundary. Reference value `−0.2149` at `m = n = 2`, `rc = 0.4536`,
/// `psi = 0`, `D = 1`.
pub fn sigma_correction(m: u32, n: u32, rc: f64, psi: f64, diffusivity: f64) -> f64 {
    if m == 0 || n == 0 || n % m != 0 {
        return 0.0;
    }
    let k = f64::from(n / m);
    let nf = f64::from(n);
    let r2m = rc.powi(2 * m as i32);
    let bracket = (2.0 + (nf - 2.0) * r2m) / (1.0 - r2m) - 0.5 * nf * (k - 1.0);
    -(rc.powi(n as i32) / (nf * diffusivity)) * (nf * psi).cos() * bracket
}

/// Residual of the optimality condition for the leading-order ring radius:
/// `rc^(2m)/(1 − rc^(2m)) − [(m−1)/(2m) − rc²]`. Proportional to `κ₁′`.
fn ring_radius_residual(m: u32, rc: f64) -> f64 {
    let mf = f64::from(m);
    let r2m = rc.powi(2 * m as i32);
    r2m / (1.0 - r2m) - ((mf - 1.0) / (2.0 * mf) - rc * rc)
}

/// Optimal ring radius, to leading order in the trap size, for `m ≥ 2`
/// equally spaced traps in the unit disk: the unique root in `(0, 1)` of
///
/// `rc^(2m)/(1 − rc^(2m)) = (m−1)/(2m) − rc²`,
///
/// found by bisection to `1e−12`. Reference values (`m = 2..10`): 0.4536,
/// 0.5517, 0.5985, 0.6251, 0.6417, 0.6527, 0.6604, 0.6662, 0.6706.
pub fn optimal_ring_radius_leading(m: u32) -> f64 {
    debug_assert!(m >= 2, "a single trap has no interior optimal ring radius");
    bisect(|r| ring_radius_residual(m, r), 1e-6, 1.0 - 1e-6, 1e-12)
        .expect("residual is negative at 0+ and positive at 1- for m >= 2")
}

/// Sensitivity coefficient `χ′(rc)` of the first-order radius shift:
/// `χ′ = −m·rc^(m−1)/(1 − rc^(2m))²·[(m−2)·rc^(4m) + (4−3m)·rc^(2m) − 2]`.
///
/// Equal to `−m·D·dŪ₁/drc` at fold count `n = m` and `psi = 0`; strictly
/// positive on `(0, 1)`, so the optimal ring always bulges outward with the
/// boundary.
pub fn chi_prime(m: u32, rc: f64) -> f64 {
    let mf = f64::from(m);
    let r2m = rc.powi(2 * m as i32);
    let denom = (1.0 - r2m) * (1.0 - r2m);
    -(mf * rc.powi(m as i32 - 1) / denom) * ((mf - 2.0) * r2m * r2m + (4.0 - 3.0 * mf) * r2m - 2.0)
}

/// Optimal ring radius under the boundary perturbation `r = 1 + σ·cos(N·θ)`,
/// to first order in `sigma`:
///
/// `rc_opt ≈ rc₀ + σ·rc₁` with `rc₁ = (1/π)·χ′(rc₀)/κ₁″(rc₀)` when `n = m`.
///
/// For `n` a higher multiple of `m` the shift is obtained from the same
/// stationarity condition with the correction's derivative taken by central
/// differences of [`sigma_correction`]; for `n` not a multiple of `m` the
/// first-order shift vanishes and `rc₀` is returned. Reference values at
/// `σ = 0.2`: `0.6049` (m = n = 3), `0.6382` (m = n = 4).
pub fn optimal_ring_radius_perturbed(m: u32, n: u32, sigma: f64) -> f64 {
    let rc0 = optimal_ring_radius_leading(m);
    let kappa2 = kappa1_second(m, rc0).expect("rc0 lies in (0,1)");
    let rc1 = if n == m {
        chi_prime(m, rc0) / (PI * kappa2)
    } else if n % m == 0 && n != 0 {
        // dŪ₁/drc by central difference (D = 1; D cancels in the ratio below
        // because the curvature of the unperturbed average is π·κ₁″/(m·D)).
        let step = 1e-6;
        let d_u1 = (sigma_correction(m, n, rc0 + step, 0.0, 1.0)
            - sigma_correction(m, n, rc0 - step, 0.0, 1.0))
            / (2.0 * step);
        -f64::from(m) * d_u1 / (PI * kappa2)
    } else {
        0.0
    };
    rc0 + sigma * rc1
}

/// Optimal two-trap configuration in an area-π ellipse with semi-axes
/// `a = 1/b ≥ 1` and `b ≤ 1`, treated as a perturbed disk with
/// `σ = 1/b − 1`: returns `(rc_opt, ubar_opt)`, the optimal half-separation
/// of the traps on the major axis and the optimal average MFPT.
///
/// The two-term expansions evaluate the `m = n = 2` ring formulas (nothing is
/// hard-coded): `rc_opt ≈ rc₀ + σ·rc₁`, `ū_opt ≈ ū₀(rc₀) + σ·Ū₁(rc₀)`.
/// Reference coefficients at `eps = 0.05`, `D = 1`:
/// `rc_opt ≈ 0.4536 + 0.3559·σ`, `ū_opt ≈ 0.5120 − 0.2149·σ`.
pub fn two_trap_ellipse_expansion(
    b: f64,
    eps: f64,
    diffusivity: f64,
) -> Result<(f64, f64), AsymptoticsError> {
    require(b > 0.0 && b <= 1.0, || {
        format!("minor semi-axis b = {b} must lie in (0, 1]")
    })?;
    let sigma = 1.0 / b - 1.0;
    let rc0 = optimal_ring_radius_leading(2);
    let rc1 = chi_prime(2, rc0) / (PI * kappa1_second(2, rc0)?);
    let u0 = leading_avg(2, rc0, eps, diffusivity)?;
    let u1 = sigma_correction(2, 2, rc0, 0.0, diffusivity);
    Ok((rc0 + sigma * rc1, u0 + sigma * u1))
}

// ---------------------------------------------------------------------------
// Thin rectangle: traps become full-height strips
// ---------------------------------------------------------------------------

/// Half-length `a0` and strip half-width `eps0` of the rectangle
/// `[−a0, a0] × [−b0, b0]` whose area matches the unit disk
/// (`4·a0·b0 = π`) and whose trap strips match disk traps of radius `eps`
/// (`4·eps0·b0 = π·eps²`).
fn thin_rect_geometry(b0: f64, eps: f64) -> (f64, f64) {
    (PI / (4.0 * b0), PI * eps * eps / (4.0 * b0))
}

/// Average MFPT in the thin rectangle of half-width `b0` with two trap
/// strips at `±x0`, as an explicit quadratic in `x0`:
///
/// `ū(x0) = 4b0/(π·D·(1−2ε²))·[(a0−2ε0)·x0² − (a0²−2a0·ε0)·x0 + a0³/3 − a0²ε0 + a0ε0² − (2/3)ε0³]`.
pub fn thin_rect_two_trap_avg(x0: f64, b0: f64, eps: f64, diffusivity: f64) -> f64 {
    let (a0, e0) = thin_rect_geometry(b0, eps);
    let poly = (a0 - 2.0 * e0) * x0 * x0 - (a0 * a0 - 2.0 * a0 * e0) * x0 + a0 * a0 * a0 / 3.0
        - a0 * a0 * e0
        + a0 * e0 * e0
        - 2.0 / 3.0 * e0 * e0 * e0;
    4.0 * b0 / (PI * diffusivity * (1.0 - 2.0 * eps * eps)) * poly
}

/// Analytic derivative `dū/dx0` of [`thin_rect_two_trap_avg`].
pub fn thin_rect_two_trap_avg_deriv(x0: f64, b0: f64, eps: f64, diffusivity: f64) -> f64 {
    let (a0, e0) = thin_rect_geometry(b0, eps);
    4.0 * b0 / (PI * diffusivity * (1.0 - 2.0 * eps * eps))
        * (2.0 * (a0 - 2.0 * e0) * x0 - (a0 * a0 - 2.0 * a0 * e0))
}

/// Optimal two-trap-strip placement in the thin rectangle: the quadratic
/// [`thin_rect_two_trap_avg`] has its vertex at exactly `x0 = a0/2 = π/(8·b0)`
/// independent of the strip width. Returns `(x0_opt, ubar_opt)`;
/// `ubar_opt = π²/(192·D·b0²)·(1−2ε²)²`, i.e. `π²/(192·D·b0²)·(1−4ε²)` up to
/// `O(ε⁴)`.
pub fn thin_rect_two_trap(b0: f64, eps: f64, diffusivity: f64) -> (f64, f64) {
    let (a0, _) = thin_rect_geometry(b0, eps);
    let x0 = 0.5 * a0;
    (x0, thin_rect_two_trap_avg(x0, b0, eps, diffusivity))
}

/// How a thin ellipse of semi-axes `(1/b, b)` is mapped onto an equal-area
/// thin rectangle when evaluating the rectangle formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThinRectCase {
    /// Preserve the ellipse's half-length (`a0 = 1/b`), so the rectangle
    /// half-width shrinks to `b0 = π·b/4` to keep the area at π.
    CaseI,
    /// Preserve the ellipse's half-width (`b0 = b`), so the rectangle is
    /// shorter than the ellipse (`a0 = π/(4b)`).
    CaseII,
}

/// Rectangle half-width `b0` for a thin ellipse of minor semi-axis `b` under
/// the given mapping. Compose with [`thin_rect_two_trap`] or
/// [`thin_rect_three_trap`]: chaining `CaseI` yields `x0_opt = 1/(2b)` (two
/// traps) or `2/(3b)` (three traps); `CaseII` yields `π/(8b)` or `π/(6b)`.
pub fn thin_rect_case_b0(case: ThinRectCase, b: f64) -> f64 {
    match case {
        ThinRectCase::CaseI => 0.25 * PI * b,
        ThinRectCase::CaseII => b,
    }
}

/// Average MFPT in the thin rectangle of half-width `b0` with three trap
/// strips at `−x0, 0, x0`, as an explicit cubic in `x0` (valid on
/// `0 ≤ x0 ≤ a0` where the cubic's interior critical point is a minimum):
///
/// `ū(x0) = 4b0/(π·D·(1−3ε²))·[−x0³/4 + (2a0−3ε0)·x0²/2 − (a0²−2a0ε0)·x0 + a0³/3 − a0²ε0 + a0ε0² − ε0³]`.
pub fn thin_rect_three_trap_avg(x0: f64, b0: f64, eps: f64, diffusivity: f64) -> f64 {
    let (a0, e0) = thin_rect_geometry(b0, eps);
    let poly = -0.25 * x0 * x0 * x0 + 0.5 * (2.0 * a0 - 3.0 * e0) * x0 * x0
        - (a0 * a0 - 2.0 * a0 * e0) * x0
        + a0 * a0 * a0 / 3.0
        - a0 * a0 * e0
        + a0 * e0 * e0
        - e0 * e0 * e0;
    4.0 * b0 / (PI * diffusivity * (1.0 - 3.0 * eps * eps)) * poly
}

/// Analytic derivative `dū/dx0` of [`thin_rect_three_trap_avg`].
pub fn thin_rect_three_trap_avg_deriv(x0: f64, b0: f64, eps: f64, diffusivity: f64) -> f64 {
    let (a0, e0) = thin_rect_geometry(b0, eps);
    4.0 * b0 / (PI * diffusivity * (1.0 - 3.0 * eps * eps))
        * (-0.75 * x0 * x0 + (2.0 * a0 - 3.0 * e0) * x0 - (a0 * a0 - 2.0 * a0 * e0))
}

/// Optimal three-trap-strip placement in the thin rectangle: the minimizing
/// critical point of the cubic [`thin_rect_three_trap_avg`] (the smaller root
/// of its derivative), which equals `x0 = 2a0/3 = π/(6·b0)` as the strip
/// width vanishes. Returns `(x0_opt, ubar_opt)`;
/// `ubar_opt = π²/(432·D·b0²)·(1−6ε²)` up to `O(ε⁴)` — smaller than the
/// two-trap optimum at the same `b0`.
pub fn thin_rect_three_trap(b0: f64, eps: f64, diffusivity: f64) -> (f64, f64) {
    let (a0, e0) = thin_rect_geometry(b0, eps);
    // 3/4·x0² − (2a0 − 3ε0)·x0 + (a0² − 2a0·ε0) = 0, smaller root.
    let bq = 2.0 * a0 - 3.0 * e0;
    let disc = bq * bq - 3.0 * (a0 * a0 - 2.0 * a0 * e0);
    let x0 = (bq - disc.sqrt()) * (2.0 / 3.0);
    (x0, thin_rect_three_trap_avg(x0, b0, eps, diffusivity))
}

// ---------------------------------------------------------------------------
// Thin ellipse with three point traps (strip-trap limit of zero width)
// ---------------------------------------------------------------------------

/// Coefficient of the interior piece of the thin-ellipse profile:
/// `c1 = (d² + asin²d)/asin d`.
fn thin_ellipse_c1(d: f64) -> f64 {
    let a = d.asin();
    (d * d + a * a) / a
}

/// Coefficient of the outer piece of the thin-ellipse profile:
/// `c2 = π·asin d − d² − asin²d`.
fn thin_ellipse_c2(d: f64) -> f64 {
    let a = d.asin();
    PI * a - d * d - a * a
}

/// Leading-order MFPT profile along the long axis of a thin ellipse with
/// point traps at scaled coordinates `X = 0, ±d` (with `X = x·b ∈ [−1, 1]`):
///
/// * `|X| ≤ d`:  `U₀ = −[asin²X + X² + c1·asin X] / (4D)`
/// * `|X| > d`:  `U₀ = −[asin²X + X² + π·asin X + c2] / (4D)`
///
/// evaluated at `−|X|` since the trap layout is symmetric. `U₀` vanishes at
/// the traps and is positive elsewhere.
pub fn thin_ellipse_u0(x: f64, d: f64, diffusivity: f64) -> f64 {
    let xa = -x.abs();
    let a = xa.asin();
    let common = a * a + xa * xa;
    let val = if -xa <= d {
        common + thin_ellipse_c1(d) * a
    } else {
        common + PI * a + thin_ellipse_c2(d)
    };
    -val / (4.0 * diffusivity)
}

/// Inner integral of the profile functional:
/// `∫_{−d}^{0} asin(X)·√(1−X²) dX`, by adaptive quadrature to `1e−12`.
fn thin_ellipse_inner_integral(d: f64) -> f64 {
    integrate(|x: f64| x.asin() * (1.0 - x * x).sqrt(), -d, 0.0, 1e-12)
}

/// Trap-placement functional for three traps in the long-thin ellipse: the
/// `d`-dependent part of the average MFPT,
///
/// `H(d) = (c2/2)·[d·√(1−d²) + asin d] − c2·π/4 + (π − c1)·∫_{−d}^0 asin(X)·√(1−X²) dX`.
///
/// Its minimizer on `(0, 1)` is the optimal scaled trap offset
/// `d_opt ≈ 0.5666`.
pub fn thin_ellipse_h(d: f64) -> f64 {
    let a = d.asin();
    let c1 = thin_ellipse_c1(d);
    let c2 = thin_ellipse_c2(d);
    0.5 * c2 * (d * (1.0 - d * d).sqrt() + a) - 0.25 * c2 * PI
        + (PI - c1) * thin_ellipse_inner_integral(d)
}

/// `d`-independent tail of the thin-ellipse average:
/// `∫_{−1}^{0} √(1−X²)·[asin²X + X² + π·asin X] dX`.
fn thin_ellipse_tail_integral() -> f64 {
    integrate(
        |x: f64| {
            let a = x.asin();
            (1.0 - x * x).sqrt() * (a * a + x * x + PI * a)
        },
        -1.0,
        0.0,
        1e-12,
    )
}

/// Optimal three-trap placement in a thin area-π ellipse with minor semi-axis
/// `b ≪ 1` (traps at `x = 0, ±x0`): minimizes [`thin_ellipse_h`] by
/// golden-section search to `1e−10` and maps the minimum to physical units,
///
/// `x0_opt = d_opt/b`, `ū_opt = [H(d_opt) − tail]/(π·D·b²)`.
///
/// Reference values: `d_opt ≈ 0.5666`, `ū_opt·b²·D ≈ 0.0308`.
pub fn thin_ellipse_three_trap(
    b: f64,
    diffusivity: f64,
) -> Result<(f64, f64), AsymptoticsError> {
    require(b > 0.0, || format!("minor semi-axis b = {b} must be positive"))?;
    require(diffusivity > 0.0, || {
        format!("diffusivity D = {diffusivity} must be positive")
    })?;
    let d_opt = golden_min(thin_ellipse_h, 1e-6, 1.0 - 1e-6, 1e-10);
    let ubar =
        (thin_ellipse_h(d_opt) - thin_ellipse_tail_integral()) / (PI * diffusivity * b * b);
    Ok((d_opt / b, ubar))
}

/// Scaled trap offset `d_opt` minimizing [`thin_ellipse_h`] (the `b`- and
/// `D`-independent part of [`thin_ellipse_three_trap`]).
pub fn thin_ellipse_optimal_offset() -> f64 {
    golden_min(thin_ellipse_h, 1e-6, 1.0 - 1e-6, 1e-10)
}

// ---------------------------------------------------------------------------
// Fast rotation: trap of radius eta orbiting at radius r around a
// concentric trap of radius eps in the unit disk
// ---------------------------------------------------------------------------

fn fast_rotation_check(r: f64, eta: f64, eps: f64) -> Result<(), AsymptoticsError> {
    require(eta > 0.0 && eps > 0.0, || {
        format!("trap radii eta = {eta}, eps = {eps} must be positive")
    })?;
    require(eps < r - eta, || {
        format!("orbit radius r = {r} must exceed eta + eps = {}", eta + eps)
    })?;
    require(r + eta < 1.0, || {
        format!("orbiting trap must stay in the disk: r + eta = {}", r + eta)
    })?;
    Ok(())
}

/// Time-averaged MFPT profile (up to an unknown positive constant factor)
/// for a trap of radius `eta` orbiting at radius `r` in the fast-rotation
/// limit, around a stationary concentric trap of radius `eps`:
///
/// `U(r) = P/L + Q` with `α = r−η`, `β = r+η`, `L = log(ε/α)`,
/// `P = α⁴ − 2α²ε² + ε⁴`, `Q = α⁴ − β⁴ − ε⁴ + 4β² − 4·log β − 3`.
///
/// Only the location of the minimum is meaningful; the overall positive
/// scale is fixed here by `C = 1`, the sign choice under which the interior
/// stationary point is a minimum.
pub fn fast_rotation_profile(r: f64, eta: f64, eps: f64) -> Result<f64, AsymptoticsError> {
    fast_rotation_check(r, eta, eps)?;
    let (alpha, beta) = (r - eta, r + eta);
    let l = (eps / alpha).ln();
    let p = alpha.powi(4) - 2.0 * alpha * alpha * eps * eps + eps.powi(4);
    let q = alpha.powi(4) - beta.powi(4) - eps.powi(4) + 4.0 * beta * beta - 4.0 * beta.ln()
        - 3.0;
    Ok(p / l + q)
}

/// Analytic derivative `dU/dr` of [`fast_rotation_profile`].
pub fn fast_rotation_profile_deriv(r: f64, eta: f64, eps: f64) -> Result<f64, AsymptoticsError> {
    fast_rotation_check(r, eta, eps)?;
    let (alpha, beta) = (r - eta, r + eta);
    let l = (eps / alpha).ln();
    let p = alpha.powi(4) - 2.0 * alpha * alpha * eps * eps + eps.powi(4);
    let dp = 4.0 * alpha * alpha * alpha - 4.0 * alpha * eps * eps;
    let dq = 4.0 * alpha.powi(3) - 4.0 * beta.powi(3) + 8.0 * beta - 4.0 / beta;
    // d(P/L) = P'/L − P·L'/L², with dL/dr = −1/α.
    Ok(dp / l + p / (alpha * l * l) + dq)
}

/// Optimality condition for the fast-rotation orbit radius, as a polynomial
/// combination that shares its roots with `dU/dr = 0`:
/// `𝒜(r) + 4·ℬ(r)·L² − 4·L·𝒞(r)` with `L = log(ε/(r−η))`.
fn fast_rotation_residual(r: f64, eta: f64, eps: f64) -> f64 {
    let l = (eps / (r - eta)).ln();
    let (e2, e4) = (eps * eps, eps.powi(4));
    let (h2, h3, h4, h5) = (eta * eta, eta.powi(3), eta.powi(4), eta.powi(5));
    let (r2, r3, r4, r5) = (r * r, r.powi(3), r.powi(4), r.powi(5));
    let a = e4 * eta - 2.0 * e2 * h3 + h5 - 3.0 * eta * r4 + r5 - 2.0 * (e2 - h2) * r3
        + 2.0 * (e2 * eta + h3) * r2
        + (e4 + 2.0 * e2 * h2 - 3.0 * h4) * r;
    let b = 2.0 * h5 - 6.0 * eta * r4 - 2.0 * h3 + 2.0 * (2.0 * h3 + eta) * r2 + 2.0 * r3
        - (2.0 * h2 + 1.0) * r
        + eta;
    let c = e2 * h3 - h5 + 3.0 * eta * r4 - r5 + (e2 - 2.0 * h2) * r3
        - (e2 * eta + 2.0 * h3) * r2
        - (e2 * h2 - 3.0 * h4) * r;
    a + 4.0 * b * l * l - 4.0 * l * c
}

/// Scan `[lo, hi]` for the first sign change of `f` and bisect it to `1e−12`.
fn scan_bisect<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
) -> Result<f64, AsymptoticsError> {
    const SCAN: usize = 2000;
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * (i as f64) / (SCAN as f64);
        let fx = f(x);
        if prev_f == 0.0 {
            return Ok(prev_x);
        }
        if prev_f.signum() != fx.signum() {
            return bisect(&f, prev_x, x, 1e-12)
                .ok_or(AsymptoticsError::NoRootInBracket { lo, hi });
        }
        prev_x = x;
        prev_f = fx;
    }
    Err(AsymptoticsError::NoRootInBracket { lo, hi })
}

/// Optimal orbit radius in the fast-rotation limit: the root of the
/// optimality condition on the physically admissible bracket
/// `(ε + η + 1e−6, 1 − η − 1e−6)`, by scan-and-bisect to `1e−12`. Agrees with
/// the argmin of [`fast_rotation_profile`] to `1e−6` or better.
///
/// Reference value `0.727` at `eta = eps = 0.02`. Increasing in `eps` at
/// fixed `eta` (a larger central trap pushes the orbit outward) and
/// decreasing in `eta` at fixed `eps`. Convergence to the vanishing-`eps`
/// limit ([`fast_rotation_opt_radius_limit`]) is logarithmic in `eps`.
pub fn fast_rotation_opt_radius(eta: f64, eps: f64) -> Result<f64, AsymptoticsError> {
    require(eta > 0.0 && eps > 0.0, || {
        format!("trap radii eta = {eta}, eps = {eps} must be positive")
    })?;
    let lo = eps + eta + 1e-6;
    let hi = 1.0 - eta - 1e-6;
    require(lo < hi, || {
        format!("no admissible orbit radii: eta = {eta}, eps = {eps}")
    })?;
    scan_bisect(|r| fast_rotation_residual(r, eta, eps), lo, hi)
}

/// Vanishing-central-trap limit (`eps → 0`) of
/// [`fast_rotation_opt_radius`]: the root of the quartic that the optimality
/// condition degenerates to. As `eta → 0` this tends to `1/√2 ≈ 0.70711`,
/// the radius splitting the unit disk into two equal areas.
pub fn fast_rotation_opt_radius_limit(eta: f64) -> Result<f64, AsymptoticsError> {
    require(eta >= 0.0 && eta < 0.5, || {
        format!("orbiting trap radius eta = {eta} must lie in [0, 0.5)")
    })?;
    let (h2, h3, h5) = (eta * eta, eta.powi(3), eta.powi(5));
    let b_poly = |r: f64| {
        2.0 * h5 - 6.0 * eta * r.powi(4) - 2.0 * h3 + 2.0 * (2.0 * h3 + eta) * r * r
            + 2.0 * r.powi(3)
            - (2.0 * h2 + 1.0) * r
            + eta
    };
    scan_bisect(b_poly, eta + 1e-9, 1.0 - eta - 1e-9)
}

// ---------------------------------------------------------------------------
// Neumann Green's function of the unit disk
// ---------------------------------------------------------------------------

/// Default truncation length for the [`neumann_green_disk`] Fourier series.
pub const GREEN_SERIES_TERMS: usize = 200;

fn green_domain_check(x: Vec2, x0: Vec2) -> Result<(f64, f64), AsymptoticsError> {
    let (r, rc) = (x.norm(), x0.norm());
    require(r <= 1.0 + 1e-12 && rc <= 1.0 + 1e-12, || {
        format!("points must lie in the closed unit disk: |x| = {r}, |x0| = {rc}")
    })?;
    if (x - x0).norm() < 1e-12 {
        return Err(AsymptoticsError::CoincidentPoints);
    }
    Ok((r, rc))
}

/// Green's function of the Laplacian in the unit disk with reflecting
/// (zero-flux) boundary, zero mean, and a `−(1/2π)·log` source singularity at
/// `x0`, evaluated by its Fourier series truncated after `n_terms` terms
/// (default [`GREEN_SERIES_TERMS`]):
///
/// `G = (r² + rc²)/4π − 3/8π − (1/2π)·log r₊ + (1/2π)·Σₙ (r₋ⁿ/n)(r₊ⁿ + r₊⁻ⁿ)·cos(n·Δθ)`
///
/// with `r₊ = max(|x|, |x0|)`, `r₋ = min(|x|, |x0|)`. Returns
/// `(value, tail_bound)` where `tail_bound` bounds the truncation error: the
/// geometric tails of the two sub-series, or — when both points sit on the
/// same circle, where the second sub-series only converges conditionally — an
/// Abel-summation bound `1/((n+1)·|sin(Δθ/2)|)`.
pub fn neumann_green_disk(
    x: Vec2,
    x0: Vec2,
    n_terms: usize,
) -> Result<(f64, f64), AsymptoticsError> {
    let (r, rc) = green_domain_check(x, x0)?;
    let (rg, rl) = (r.max(rc), r.min(rc));
    let dtheta = x.y.atan2(x.x) - x0.y.atan2(x0.x);
    let smooth = (r * r + rc * rc) / (4.0 * PI) - 3.0 / (8.0 * PI) - rg.ln() / (2.0 * PI);
    if rl == 0.0 {
        // One point at the origin: every series term vanishes.
        return Ok((smooth, 0.0));
    }
    let (p, q) = (rl * rg, rl / rg); // both sub-series ratios, q <= 1
    let mut sum = 0.0;
    let (mut pn, mut qn) = (1.0, 1.0);
    for n in 1..=n_terms {
        pn *= p;
        qn *= q;
        sum += (pn + qn) / (n as f64) * ((n as f64) * dtheta).cos();
    }
    let nf = (n_terms + 1) as f64;
    let p_tail = pn * p / (nf * (1.0 - p));
    let q_tail = if q < 1.0 - 1e-15 {
        qn * q / (nf * (1.0 - q))
    } else {
        // Equal radii: conditionally convergent cosine series; Abel bound.
        1.0 / (nf * (0.5 * dtheta).sin().abs().max(f64::MIN_POSITIVE))
    };
    Ok((smooth + sum / (2.0 * PI), (p_tail + q_tail) / (2.0 * PI)))
}

/// Closed form of [`neumann_green_disk`] (the Fourier series summed exactly
/// via `Σ tⁿ·cos(nΔ)/n = −½·log(1 − 2t·cosΔ + t²)`):
///
/// `G = (1/2π)·[−log|x−x0| − ½·log(|x|²|x0|² − 2·x·x0 + 1) + (|x|² + |x0|²)/2 − 3/4]`.
pub fn neumann_green_disk_exact(x: Vec2, x0: Vec2) -> Result<f64, AsymptoticsError> {
    let (r, rc) = green_domain_check(x, x0)?;
    let image = r * r * rc * rc - 2.0 * x.dot(x0) + 1.0;
    Ok(
        (-(x - x0).norm().ln() - 0.5 * image.ln() + 0.5 * (r * r + rc * rc) - 0.75)
            / (2.0 * PI),
    )
}

/// Regular part of the disk Green's function at its source point: the finite
/// remainder `lim_{x→x0} [G(x; x0) + (1/2π)·log|x − x0|]`,
///
/// `R(x0) = (1/2π)·[−log(1 − |x0|²) + |x0|² − 3/4]`.
///
/// This is the diagonal of the trap-interaction (Green) matrix; for `m`
/// equally spaced points on a ring, every row sum `R + Σ G` equals
/// [`kappa1`].
pub fn neumann_green_disk_regular(x0: Vec2) -> Result<f64, AsymptoticsError> {
    let rc = x0.norm();
    require(rc < 1.0, || {
        format!("regular part needs an interior point: |x0| = {rc}")
    })?;
    Ok((-(1.0 - rc * rc).ln() + rc * rc - 0.75) / (2.0 * PI))
}
