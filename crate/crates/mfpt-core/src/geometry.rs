//! Confining domains, absorbing traps, and exact closest-point queries.
//!
//! The solvers embed an irregular domain `Ω̄ = Ω \ ∪ traps` (a reflecting
//! outer boundary minus absorbing circular holes) in a uniform grid; every
//! boundary condition is imposed through closest points on the boundary
//! features. Disk and rectangle projections are closed-form; ellipse and star
//! boundaries are projected by bracketed 1-D Newton iteration on the boundary
//! parameter with equispaced multi-starts (tolerance 1e−12 in the parameter),
//! with a dense-scan fallback if the multi-starts ever miss the global
//! minimizer.

use crate::Vec2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("trap {index} is not strictly inside the domain")]
    TrapOutsideDomain { index: usize },
    #[error("traps {a} and {b} overlap")]
    TrapOverlap { a: usize, b: usize },
    #[error("trap {index}: elliptical orbit requires an ellipse domain")]
    OrbitNeedsEllipse { index: usize },
}

/// Newton convergence tolerance in the boundary parameter.
const PROJECTION_TOL: f64 = 1e-12;
/// Orthogonality residual bound for accepted projections, relative to ‖γ′‖.
const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Parametric confining domain with an exactly projectable boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Disk of radius `r` centered at the origin.
    Disk { r: f64 },
    /// Axis-aligned ellipse x²/a² + y²/b² = 1 with a ≥ b.
    Ellipse { a: f64, b: f64 },
    /// Star-shaped boundary r(θ) = 1 + σ cos(Nθ).
    Star { sigma: f64, n: u32 },
    /// Axis-aligned rectangle [−a0, a0] × [−b0, b0].
    Rectangle { a0: f64, b0: f64 },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<(), GeometryError> {
        match *self {
            DomainSpec::Disk { r } if r > 0.0 => Ok(()),
            DomainSpec::Disk { r } => Err(GeometryError::InvalidDomain(format!(
                "disk radius must be positive, got {r}"
            ))),
            DomainSpec::Ellipse { a, b } if a >= b && b > 0.0 => Ok(()),
            DomainSpec::Ellipse { a, b } => Err(GeometryError::InvalidDomain(format!(
                "ellipse needs a ≥ b > 0, got a={a}, b={b}"
            ))),
            // projection is single-valued inside the grid collar only for
            // moderate fold amplitudes; reject strongly folded boundaries
            DomainSpec::Star { sigma, n } if sigma > 0.0 && sigma <= 0.3 && n >= 2 => Ok(()),
            DomainSpec::Star { sigma, n } => Err(GeometryError::InvalidDomain(format!(
                "star needs 0 < σ ≤ 0.3 and N ≥ 2, got σ={sigma}, N={n}"
            ))),
            DomainSpec::Rectangle { a0, b0 } if a0 > 0.0 && b0 > 0.0 => Ok(()),
            DomainSpec::Rectangle { a0, b0 } => Err(GeometryError::InvalidDomain(format!(
                "rectangle needs positive half-widths, got a0={a0}, b0={b0}"
            ))),
        }
    }

    /// Strict interior-or-boundary test.
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            DomainSpec::Disk { r } => p.norm_sq() <= r * r,
            DomainSpec::Ellipse { a, b } => {
                (p.x / a) * (p.x / a) + (p.y / b) * (p.y / b) <= 1.0
            }
            DomainSpec::Star { sigma, n } => {
                let rho = p.norm();
                let theta = p.y.atan2(p.x);
                rho <= 1.0 + sigma * (n as f64 * theta).cos()
            }
            DomainSpec::Rectangle { a0, b0 } => p.x.abs() <= a0 && p.y.abs() <= b0,
        }
    }

    /// Exact closest point on the outer boundary ∂Ω.
    ///
    /// Center ties break toward the boundary point at polar angle θ = 0.
    pub fn outer_cp(&self, p: Vec2) -> Vec2 {
        match *self {
            DomainSpec::Disk { r } => p.normalized_or(Vec2::new(1.0, 0.0)) * r,
            DomainSpec::Ellipse { a, b } => project_parametric(
                p,
                8,
                |t| Vec2::new(a * t.cos(), b * t.sin()),
                |t| Vec2::new(-a * t.sin(), b * t.cos()),
                |t| Vec2::new(-a * t.cos(), -b * t.sin()),
            ),
            DomainSpec::Star { sigma, n } => {
                let nf = n as f64;
                // one period of cos(Nθ) per 2π/N: use 8 starts per fold
                project_parametric(
                    p,
                    8 * n as usize,
                    |t| {
                        let r = 1.0 + sigma * (nf * t).cos();
                        Vec2::new(r * t.cos(), r * t.sin())
                    },
                    |t| {
                        let r = 1.0 + sigma * (nf * t).cos();
                        let rp = -sigma * nf * (nf * t).sin();
                        Vec2::new(rp * t.cos() - r * t.sin(), rp * t.sin() + r * t.cos())
                    },
                    |t| {
                        let r = 1.0 + sigma * (nf * t).cos();
                        let rp = -sigma * nf * (nf * t).sin();
                        let rpp = -sigma * nf * nf * (nf * t).cos();
                        Vec2::new(
                            (rpp - r) * t.cos() - 2.0 * rp * t.sin(),
                            (rpp - r) * t.sin() + 2.0 * rp * t.cos(),
                        )
                    },
                )
            }
            DomainSpec::Rectangle { a0, b0 } => {
                if p.x.abs() > a0 || p.y.abs() > b0 {
                    // outside: clamp onto the box
                    Vec2::new(p.x.clamp(-a0, a0), p.y.clamp(-b0, b0))
                } else {
                    // inside: project to the nearest side (right side wins ties
                    // to keep the θ=0 convention)
                    let gaps = [
                        (a0 - p.x, Vec2::new(a0, p.y)),
                        (a0 + p.x, Vec2::new(-a0, p.y)),
                        (b0 - p.y, Vec2::new(p.x, b0)),
                        (b0 + p.y, Vec2::new(p.x, -b0)),
                    ];
                    gaps.iter()
                        .min_by(|a, b| a.0.total_cmp(&b.0))
                        .map(|&(_, cp)| cp)
                        .unwrap()
                }
            }
        }
    }

    /// Signed distance to the outer boundary: positive inside, negative
    /// outside.
    ///
    /// Exact whenever the true magnitude is at most `exact_below`; beyond that
    /// a conservative same-sign lower bound on the magnitude may be returned
    /// (still larger than `exact_below`), which is all the quadrature and
    /// classification collars need.
    pub fn signed_distance_outer(&self, p: Vec2, exact_below: f64) -> f64 {
        match *self {
            DomainSpec::Disk { r } => r - p.norm(),
            DomainSpec::Rectangle { a0, b0 } => {
                if self.contains(p) {
                    (a0 - p.x.abs()).min(b0 - p.y.abs())
                } else {
                    let dx = (p.x.abs() - a0).max(0.0);
                    let dy = (p.y.abs() - b0).max(0.0);
                    -(dx * dx + dy * dy).sqrt()
                }
            }
            DomainSpec::Ellipse { a, b } => {
                let rho = ((p.x / a) * (p.x / a) + (p.y / b) * (p.y / b)).sqrt();
                // |∇ρ| ≤ ρ/b everywhere (a ≥ b), giving rigorous far-field
                // bounds: inside d ≥ (1−ρ)b, outside d ≥ b(ρ−1)/ρ
                let bound = if rho <= 1.0 {
                    (1.0 - rho) * b
                } else {
                    -(rho - 1.0) * b / rho
                };
                if bound.abs() > exact_below {
                    bound
                } else {
                    let d = p.dist(self.outer_cp(p));
                    if rho <= 1.0 {
                        d
                    } else {
                        -d
                    }
                }
            }
            DomainSpec::Star { .. } => {
                let d = p.dist(self.outer_cp(p));
                if self.contains(p) {
                    d
                } else {
                    -d
                }
            }
        }
    }

    /// Radius of the smallest origin-centered circle containing the domain.
    pub fn circumradius(&self) -> f64 {
        match *self {
            DomainSpec::Disk { r } => r,
            DomainSpec::Ellipse { a, .. } => a,
            DomainSpec::Star { sigma, .. } => 1.0 + sigma,
            DomainSpec::Rectangle { a0, b0 } => (a0 * a0 + b0 * b0).sqrt(),
        }
    }

    /// Tight axis-aligned bounding box.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        match *self {
            DomainSpec::Disk { r } => (Vec2::new(-r, -r), Vec2::new(r, r)),
            DomainSpec::Ellipse { a, b } => (Vec2::new(-a, -b), Vec2::new(a, b)),
            DomainSpec::Star { sigma, .. } => {
                let r = 1.0 + sigma;
                (Vec2::new(-r, -r), Vec2::new(r, r))
            }
            DomainSpec::Rectangle { a0, b0 } => (Vec2::new(-a0, -b0), Vec2::new(a0, b0)),
        }
    }

    /// Exact area of Ω (before trap removal).
    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            DomainSpec::Disk { r } => PI * r * r,
            DomainSpec::Ellipse { a, b } => PI * a * b,
            // ½∮r²dθ = ½∫(1 + σcos Nθ)² dθ = π(1 + σ²/2)
            DomainSpec::Star { sigma, .. } => PI * (1.0 + sigma * sigma / 2.0),
            DomainSpec::Rectangle { a0, b0 } => 4.0 * a0 * b0,
        }
    }
}

/// Project `p` onto a closed parametric curve γ by Newton multi-start on
/// g(t) = (p − γ(t))·γ′(t), keeping the closest converged candidate.
///
/// Falls back to a dense parameter scan with Newton polish when no start
/// satisfies the orthogonality acceptance bound, so the returned point is the
/// global projection for every query the solvers make.
fn project_parametric(
    p: Vec2,
    n_starts: usize,
    gamma: impl Fn(f64) -> Vec2,
    dgamma: impl Fn(f64) -> Vec2,
    ddgamma: impl Fn(f64) -> Vec2,
) -> Vec2 {
    use std::f64::consts::TAU;
    let newton = |t0: f64| -> f64 {
        let mut t = t0;
        for _ in 0..60 {
            let g = gamma(t);
            let gp = dgamma(t);
            let gpp = ddgamma(t);
            let diff = p - g;
            let f = diff.dot(gp);
            let fp = -gp.norm_sq() + diff.dot(gpp);
            if fp == 0.0 {
                break;
            }
            let dt = f / fp;
            t -= dt;
            if dt.abs() < PROJECTION_TOL {
                break;
            }
        }
        t
    };
    let accept = |t: f64| -> Option<(f64, Vec2)> {
        let g = gamma(t);
        let gp = dgamma(t);
        let resid = (p - g).dot(gp).abs();
        // relative orthogonality residual, with an absolute term so queries
        // exactly on the curve accept
        if resid <= ORTHOGONALITY_TOL * gp.norm() * (p - g).norm().max(1e-30) + 1e-14 {
            Some((p.dist(g), g))
        } else {
            None
        }
    };
    let mut best: Option<(f64, Vec2)> = None;
    for k in 0..n_starts {
        let t = newton(TAU * (k as f64 + 0.5) / n_starts as f64);
        if let Some((d, g)) = accept(t) {
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, g));
            }
        }
    }
    // guard against multi-start misses: dense scan, then polish the best cell
    if best.is_none() {
        let samples = 4096;
        let mut bt = 0.0;
        let mut bd = f64::INFINITY;
        for k in 0..samples {
            let t = TAU * k as f64 / samples as f64;
            let d = p.dist(gamma(t));
            if d < bd {
                bd = d;
                bt = t;
            }
        }
        let t = newton(bt);
        let g = gamma(t);
        best = Some((p.dist(g), g));
    }
    best.unwrap().1
}

/// A circular absorbing trap, stationary or on a periodic orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum TrapSpec {
    Stationary { center: Vec2, radius: f64 },
    /// Center travels the circle r0·(cos(ωt + φ), sin(ωt + φ)).
    RingOrbit { r0: f64, radius: f64, omega: f64, phase: f64 },
    /// Center travels the scaled domain ellipse (s·a·cos(ωt+φ), s·b·sin(ωt+φ));
    /// meaningful only inside an [`DomainSpec::Ellipse`].
    EllipseOrbit { scale: f64, radius: f64, omega: f64, phase: f64 },
}

impl TrapSpec {
    pub fn radius(&self) -> f64 {
        match *self {
            TrapSpec::Stationary { radius, .. }
            | TrapSpec::RingOrbit { radius, .. }
            | TrapSpec::EllipseOrbit { radius, .. } => radius,
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            TrapSpec::Stationary { .. } => 0.0,
            TrapSpec::RingOrbit { omega, .. } | TrapSpec::EllipseOrbit { omega, .. } => omega,
        }
    }

    /// Whether the trap position actually varies with time.
    pub fn is_moving(&self) -> bool {
        match *self {
            TrapSpec::Stationary { .. } => false,
            TrapSpec::RingOrbit { r0, omega, .. } => omega != 0.0 && r0 != 0.0,
            TrapSpec::EllipseOrbit { scale, omega, .. } => omega != 0.0 && scale != 0.0,
        }
    }

    /// Orbit period 2π/|ω| for orbiting variants with ω ≠ 0.
    pub fn period(&self) -> Option<f64> {
        let w = self.omega().abs();
        if w > 0.0 {
            Some(std::f64::consts::TAU / w)
        } else {
            None
        }
    }

    /// Largest distance of the center from the origin over the orbit.
    pub fn orbit_radius(&self, domain: &DomainSpec) -> f64 {
        match *self {
            TrapSpec::Stationary { center, .. } => center.norm(),
            TrapSpec::RingOrbit { r0, .. } => r0.abs(),
            TrapSpec::EllipseOrbit { scale, .. } => match *domain {
                DomainSpec::Ellipse { a, .. } => scale.abs() * a,
                _ => scale.abs(),
            },
        }
    }

    /// Trap center at time `t` (periodic for orbiting variants, constant for
    /// stationary; negative `t` winds the orbit backwards).
    pub fn center(&self, domain: &DomainSpec, t: f64) -> Result<Vec2, GeometryError> {
        match *self {
            TrapSpec::Stationary { center, .. } => Ok(center),
            TrapSpec::RingOrbit { r0, omega, phase, .. } => {
                let ang = omega * t + phase;
                Ok(Vec2::new(r0 * ang.cos(), r0 * ang.sin()))
            }
            TrapSpec::EllipseOrbit { scale, omega, phase, .. } => match *domain {
                DomainSpec::Ellipse { a, b } => {
                    let ang = omega * t + phase;
                    Ok(Vec2::new(scale * a * ang.cos(), scale * b * ang.sin()))
                }
                _ => Err(GeometryError::OrbitNeedsEllipse { index: 0 }),
            },
        }
    }
}

/// The trap configuration of a problem: any number of stationary traps plus
/// at most one moving trap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrapSet {
    pub traps: Vec<TrapSpec>,
}

impl TrapSet {
    pub fn new(traps: Vec<TrapSpec>) -> Self {
        TrapSet { traps }
    }

    pub fn len(&self) -> usize {
        self.traps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traps.is_empty()
    }

    /// Snapshot of (center, radius) pairs at time `t`.
    pub fn positions(&self, domain: &DomainSpec, t: f64) -> Result<Vec<(Vec2, f64)>, GeometryError> {
        self.traps
            .iter()
            .map(|tr| tr.center(domain, t).map(|c| (c, tr.radius())))
            .collect()
    }

    /// Validate radii, containment (with `clearance` between trap circles and
    /// ∂Ω), and pairwise disjointness. Moving orbits are checked at 256
    /// equispaced times over one period.
    pub fn validate(&self, domain: &DomainSpec, clearance: f64) -> Result<(), GeometryError> {
        for (i, tr) in self.traps.iter().enumerate() {
            if !(tr.radius() > 0.0) {
                return Err(GeometryError::InvalidDomain(format!(
                    "trap {i} radius must be positive, got {}",
                    tr.radius()
                )));
            }
            if matches!(tr, TrapSpec::EllipseOrbit { .. })
                && !matches!(domain, DomainSpec::Ellipse { .. })
            {
                return Err(GeometryError::OrbitNeedsEllipse { index: i });
            }
        }
        let times: Vec<f64> = {
            let period = self.traps.iter().filter_map(|t| t.period()).fold(None, |acc: Option<f64>, p| {
                Some(acc.map_or(p, |a: f64| a.max(p)))
            });
            match period {
                Some(t_max) => (0..256).map(|k| t_max * k as f64 / 256.0).collect(),
                None => vec![0.0],
            }
        };
        for &t in &times {
            let pos = self.positions(domain, t)?;
            for (i, &(c, eps)) in pos.iter().enumerate() {
                // the entire trap disk plus clearance must stay inside Ω
                let d = domain.signed_distance_outer(c, eps + clearance + 1.0);
                if d < eps + clearance {
                    return Err(GeometryError::TrapOutsideDomain { index: i });
                }
                for (j, &(c2, eps2)) in pos.iter().enumerate().skip(i + 1) {
                    if c.dist(c2) < eps + eps2 {
                        return Err(GeometryError::TrapOverlap { a: i, b: j });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Which boundary feature (if any) a query point is nearest to / inside of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inside the trap-free domain Ω̄: the point is its own closest point.
    Interior,
    /// Outside Ω: closest point lies on the reflecting outer boundary.
    OuterBoundarySide,
    /// Inside trap k: closest point lies on that trap's circle.
    TrapSide(usize),
}

/// Result of a closest-point query against Ω̄.
#[derive(Debug, Clone, Copy)]
pub struct CpResult {
    pub cp: Vec2,
    pub distance: f64,
    pub region: Region,
}

/// Closest point of `x` in the closed trap-free region Ω̄ at time `t`.
///
/// Total function: interior points return themselves (distance 0), points in
/// trap `k` project onto that trap's circle (tie at the exact center breaks
/// toward polar angle 0 on the circle), and points outside Ω project onto the
/// outer boundary.
pub fn closest_point(
    domain: &DomainSpec,
    traps: &TrapSet,
    t: f64,
    x: Vec2,
) -> Result<CpResult, GeometryError> {
    for (k, trap) in traps.traps.iter().enumerate() {
        let c = trap.center(domain, t)?;
        let eps = trap.radius();
        let d = x.dist(c);
        if d < eps {
            let dir = (x - c).normalized_or(Vec2::new(1.0, 0.0));
            let cp = c + dir * eps;
            return Ok(CpResult {
                cp,
                distance: eps - d,
                region: Region::TrapSide(k),
            });
        }
    }
    if domain.contains(x) {
        Ok(CpResult {
            cp: x,
            distance: 0.0,
            region: Region::Interior,
        })
    } else {
        let cp = domain.outer_cp(x);
        Ok(CpResult {
            cp,
            distance: x.dist(cp),
            region: Region::OuterBoundarySide,
        })
    }
}

/// Reflection of `x` across its closest point: cp + (cp − x).
#[inline]
pub fn mirror_point(x: Vec2, cp: Vec2) -> Vec2 {
    cp * 2.0 - x
}

/// Closest-point query against a bare star boundary r(θ) = 1 + σ cos(Nθ).
pub fn star_cp(sigma: f64, n: u32, x: Vec2) -> Result<CpResult, GeometryError> {
    let domain = DomainSpec::Star { sigma, n };
    domain.validate()?;
    closest_point(&domain, &TrapSet::default(), 0.0, x)
}
