//! Scalar numerical primitives shared by the asymptotic formulas and the
//! optimizers: bracketed bisection, golden-section minimization, and adaptive
//! Simpson quadrature.
//!
//! These routines favor robustness over iteration counts: every caller in this
//! crate hands them smooth one-dimensional problems where bisection/golden
//! section converge unconditionally inside a valid bracket.

/// Relative machine tolerance floor used when callers request tolerances
/// tighter than double precision supports.
const TOL_FLOOR: f64 = 1e-15;

/// Find a root of `f` on `[a, b]` by bisection.
///
/// Requires a sign change on the bracket; panics on NaN endpoints. Returns the
/// midpoint of the final bracket once its width is below `xtol`.
///
/// Returns `None` if `f(a)` and `f(b)` have the same sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut flo, fhi) = (f(lo), f(hi));
    assert!(
        flo.is_finite() && fhi.is_finite(),
        "bisect: non-finite endpoint values f({lo}) = {flo}, f({hi}) = {fhi}"
    );
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let xtol = xtol.max(TOL_FLOOR);
    // 200 halvings reduce any f64 bracket below machine spacing.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section search for the minimizer of a unimodal `f` on `[a, b]`.
///
/// Shrinks the bracket by the golden ratio each step and returns the bracket
/// midpoint once its width is below `xtol`. On non-unimodal input it still
/// converges, to some local minimizer interior to the initial bracket.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9; // 1/φ
    const INVPHI2: f64 = 0.381_966_011_250_105_1; // 1/φ²
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let xtol = xtol.max(TOL_FLOOR);
    let mut c = lo + INVPHI2 * (hi - lo);
    let mut d = lo + INVPHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    // Bracket shrinks by 1/φ per iteration; 300 iterations exhaust f64 spacing.
    for _ in 0..300 {
        if hi - lo < xtol {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = lo + INVPHI2 * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INVPHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `atol`.
///
/// Classic recursive bisection with the 15-point Richardson error estimate;
/// the recursion depth is capped at 60 (interval width below f64 spacing long
/// before that), at which point the current panel estimate is accepted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, atol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        atol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth >= 60 || delta.abs() <= 15.0 * atol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * atol, depth + 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * atol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let atol = atol.max(1e-300);
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, atol, 0)
}

/// Observed convergence order between two error samples at grid spacings
/// `h1 > h2`: `log(e1/e2) / log(h1/h2)`.
pub fn observed_order(e1: f64, h1: f64, e2: f64, h2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn bisect_rejects_same_sign_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn bisect_accepts_exact_endpoint_root() {
        assert_eq!(bisect(|x| x, 0.0, 1.0, 1e-12), Some(0.0));
    }

    #[test]
    fn golden_min_quartic() {
        // min of (x-0.3)^4 + 1 at 0.3; quartic flatness around the offset
        // value 1.0 limits attainable x accuracy to ~eps^(1/4) ≈ 1.2e-4
        let x = golden_min(|x| (x - 0.3).powi(4) + 1.0, -1.0, 2.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 5e-4);
        // a kink has no flatness limit: the bracket tolerance is attainable
        let x = golden_min(|x| (x - 0.3).abs(), -1.0, 2.0, 1e-12);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-9);
    }

    #[test]
    fn golden_min_respects_bracket() {
        let x = golden_min(|x| x, 2.0, 5.0, 1e-12);
        assert!(x >= 2.0 && x <= 2.0 + 1e-9, "minimum of increasing f at left edge, got {x}");
    }

    #[test]
    fn integrate_smooth() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn integrate_sqrt_singularity_derivative() {
        // integrand with unbounded derivative at 0 still converges adaptively
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn integrate_empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-12), 0.0);
    }

    #[test]
    fn observed_order_second_order_data() {
        let p = observed_order(4e-4, 0.02, 1e-4, 0.01);
        assert_abs_diff_eq!(p, 2.0, epsilon = 1e-12);
    }
}
