//! Trap-configuration optimizers over solver-backed objectives: exhaustive
//! 1-D parameter sweeps, global-best particle-swarm search, and
//! derivative-free simplex refinement.
//!
//! Objective evaluations within one sweep or one swarm generation are
//! independent and run in parallel (rayon); all optimizer state updates —
//! random draws, personal/global best bookkeeping, simplex moves — are
//! sequential, so a fixed seed reproduces a run bit-for-bit.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{DomainSpec, TrapSet, TrapSpec};
use crate::solver::{solve_rotating_frame, solve_stationary, SolverError};
use crate::vec2::Vec2;

/// Penalty value assigned to infeasible or failed objective evaluations in
/// budgeted searches (PSO, simplex refinement).
pub const INFEASIBLE_PENALTY: f64 = 1e6;

#[derive(Debug, Error)]
pub enum OptimizeError {
    /// A solver-backed objective failed; carries the failing parameter.
    #[error("objective failed at parameter {parameter}: {source}")]
    ObjectiveFailure {
        parameter: f64,
        source: SolverError,
    },
    /// Sweep range or step is unusable.
    #[error("bad sweep range [{lo}, {hi}] with step {delta}")]
    BadRange { lo: f64, hi: f64, delta: f64 },
    /// The moving-radius sweep is defined for rotationally invariant domains.
    #[error("moving-radius sweep supports disks only, got {0}")]
    UnsupportedDomain(String),
}

/// Outcome of a 1-D parameter sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// All evaluated `(parameter, value)` pairs, sorted by parameter.
    pub samples: Vec<(f64, f64)>,
    /// Parameter attaining the minimum (smallest such parameter on ties).
    pub argmin: f64,
    /// The minimal value.
    pub min: f64,
}

/// Evaluate `objective` on the uniform grid `lo, lo+delta, …` inclusive of
/// both endpoints (`hi` is appended when the grid does not land on it) and
/// return all samples together with the arg-minimum.
///
/// Ties resolve to the smaller parameter, which also makes the result
/// invariant under reordering of the evaluations. Evaluations run in
/// parallel; a failure is reported for the smallest failing parameter.
pub fn sweep_1d<F>(objective: F, lo: f64, hi: f64, delta: f64) -> Result<SweepResult, OptimizeError>
where
    F: Fn(f64) -> Result<f64, SolverError> + Sync,
{
    if !(delta > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(OptimizeError::BadRange { lo, hi, delta });
    }
    let steps = ((hi - lo) / delta * (1.0 + 1e-12) + 1e-12).floor() as usize;
    let mut params: Vec<f64> = (0..=steps)
        .map(|k| (lo + k as f64 * delta).min(hi))
        .collect();
    if hi - params[steps] > 1e-9 * delta {
        params.push(hi);
    }

    let evals: Vec<(f64, Result<f64, SolverError>)> = params
        .into_par_iter()
        .map(|p| (p, objective(p)))
        .collect();

    let mut samples = Vec::with_capacity(evals.len());
    for (p, res) in evals {
        match res {
            Ok(v) => samples.push((p, v)),
            // params ascend, so the first failure is the smallest parameter
            Err(source) => {
                return Err(OptimizeError::ObjectiveFailure {
                    parameter: p,
                    source,
                })
            }
        }
    }
    let &(argmin, min) = samples
        .iter()
        .min_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).expect("finite samples"))
        .expect("at least one sample: steps >= 0");
    Ok(SweepResult {
        samples,
        argmin,
        min,
    })
}

/// Particle-swarm configuration. [`PsoConfig::new`] fills in the standard
/// constriction hyperparameters (inertia `0.729`, cognitive = social =
/// `1.49445`) with a 40-particle, 200-generation budget.
///
/// `bounds` is the per-coordinate search box; when the coordinates are trap
/// centers, choose it so every trap keeps a clearance of at least
/// `trap radius + 2h` from the outer boundary.
#[derive(Debug, Clone)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub n_iters: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Inclusive `(lo, hi)` box per coordinate.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl PsoConfig {
    pub fn new(bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        PsoConfig {
            n_particles: 40,
            n_iters: 200,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            bounds,
            seed,
        }
    }
}

/// Global-best particle-swarm minimization of `objective` over the bounds
/// box. Returns `(best point, best value, trace)` where `trace[k]` is the
/// best value known after generation `k` (entry 0 is the initial swarm).
///
/// Velocities are clamped to the box span per coordinate and positions are
/// projected back onto the box; infeasibility inside the box (trap overlap,
/// solver failure) is the objective's business and should be expressed as a
/// large penalty such as [`INFEASIBLE_PENALTY`]. Runs are bit-reproducible
/// for a fixed seed: random draws and best-updates are sequential, only the
/// pure objective evaluations are parallel.
pub fn pso<F>(objective: F, cfg: &PsoConfig) -> (Vec<f64>, f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = cfg.bounds.len();
    assert!(dim > 0, "PSO needs at least one coordinate");
    assert!(cfg.n_particles > 0, "PSO needs at least one particle");
    for &(a, b) in &cfg.bounds {
        assert!(b > a, "PSO bounds must have positive extent, got ({a}, {b})");
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);

    let mut xs: Vec<Vec<f64>> = (0..cfg.n_particles)
        .map(|_| cfg.bounds.iter().map(|&(a, b)| rng.random_range(a..=b)).collect())
        .collect();
    let mut vs: Vec<Vec<f64>> = (0..cfg.n_particles)
        .map(|_| {
            cfg.bounds
                .iter()
                .map(|&(a, b)| rng.random_range(-(b - a)..=(b - a)))
                .collect()
        })
        .collect();

    let mut fvals: Vec<f64> = xs.par_iter().map(|x| objective(x)).collect();
    let mut pbest_x = xs.clone();
    let mut pbest_f = fvals.clone();
    let mut gbest = 0usize;
    for i in 1..cfg.n_particles {
        if pbest_f[i] < pbest_f[gbest] {
            gbest = i;
        }
    }
    let mut gbest_x = pbest_x[gbest].clone();
    let mut gbest_f = pbest_f[gbest];
    let mut trace = Vec::with_capacity(cfg.n_iters + 1);
    trace.push(gbest_f);

    for _ in 0..cfg.n_iters {
        for i in 0..cfg.n_particles {
            for d in 0..dim {
                let (a, b) = cfg.bounds[d];
                let span = b - a;
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = cfg.inertia * vs[i][d]
                    + cfg.cognitive * r1 * (pbest_x[i][d] - xs[i][d])
                    + cfg.social * r2 * (gbest_x[d] - xs[i][d]);
                vs[i][d] = v.clamp(-span, span);
                xs[i][d] = (xs[i][d] + vs[i][d]).clamp(a, b);
            }
        }
        fvals
            .par_iter_mut()
            .zip(xs.par_iter())
            .for_each(|(f, x)| *f = objective(x));
        for i in 0..cfg.n_particles {
            if fvals[i] < pbest_f[i] {
                pbest_f[i] = fvals[i];
                pbest_x[i].clone_from(&xs[i]);
                if fvals[i] < gbest_f {
                    gbest_f = fvals[i];
                    gbest_x.clone_from(&xs[i]);
                }
            }
        }
        trace.push(gbest_f);
    }
    debug_assert_eq!(
        objective(&gbest_x),
        gbest_f,
        "objective must be deterministic: stored best must re-evaluate exactly"
    );
    (gbest_x, gbest_f, trace)
}

/// Derivative-free simplex (Nelder–Mead) descent from `x0` with initial
/// simplex edge `step0`. Stops when the simplex diameter falls below `1e-4`
/// or after 500 objective evaluations, and returns the best vertex seen.
///
/// Feasibility is the objective's business (penalties), as in [`pso`]; the
/// returned value never exceeds `objective(x0)`.
pub fn local_refine<F>(objective: F, x0: &[f64], step0: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    const MAX_EVALS: usize = 500;
    const DIAM_TOL: f64 = 1e-4;
    // standard Nelder–Mead coefficients
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let n = x0.len();
    assert!(n > 0, "simplex refinement needs at least one coordinate");
    assert!(step0 > 0.0, "initial simplex edge must be positive");

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        objective(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0);
    simplex.push((x0.to_vec(), f0));
    for d in 0..n {
        let mut x = x0.to_vec();
        x[d] += step0;
        let f = eval(&x);
        simplex.push((x, f));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam = simplex
            .iter()
            .flat_map(|(xi, _)| {
                simplex.iter().map(move |(xj, _)| {
                    xi.iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
            })
            .fold(0.0f64, f64::max);
        if diam < DIAM_TOL || evals.get() >= MAX_EVALS {
            break;
        }

        let worst = simplex[n].clone();
        let second_worst_f = simplex[n - 1].1;
        let best_f = simplex[0].1;
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            // point centroid + t·(centroid − worst)
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(ALPHA);
        let fr = eval(&xr);
        if fr < best_f {
            let xe = along(GAMMA);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst_f {
            simplex[n] = (xr, fr);
            continue;
        }
        // contraction: outside if the reflection improved on the worst,
        // inside otherwise
        let (xc, fc) = if fr < worst.1 {
            let xc = along(RHO);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-RHO);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            for (xd, bd) in entry.0.iter_mut().zip(&best_x) {
                *xd = bd + SIGMA * (*xd - bd);
            }
            entry.1 = eval(&entry.0);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    (x, f)
}

/// `m` equally spaced stationary traps of radius `eps` on the circle of
/// radius `r`, the first at polar angle `phase`.
pub fn ring_traps(m: u32, r: f64, eps: f64, phase: f64) -> TrapSet {
    TrapSet::new(
        (0..m)
            .map(|k| {
                let th = TAU * f64::from(k) / f64::from(m) + phase;
                TrapSpec::Stationary {
                    center: Vec2::new(r * th.cos(), r * th.sin()),
                    radius: eps,
                }
            })
            .collect(),
    )
}

/// Two stationary traps of radius `eps` at `(±x0, 0)` — the symmetric
/// major-axis pair used in the ellipse placement studies.
pub fn axis_pair_traps(x0: f64, eps: f64) -> TrapSet {
    TrapSet::new(vec![
        TrapSpec::Stationary {
            center: Vec2::new(-x0, 0.0),
            radius: eps,
        },
        TrapSpec::Stationary {
            center: Vec2::new(x0, 0.0),
            radius: eps,
        },
    ])
}

/// Average-MFPT objective over flattened stationary trap centers
/// `[x1, y1, x2, y2, …]`, for [`pso`]/[`local_refine`]: configurations where
/// a trap comes within `eps + 2h` of the outer boundary, two traps come
/// within `2·eps + 2h` of each other, or the solve fails, score
/// [`INFEASIBLE_PENALTY`]; feasible ones score the solver's spatial average.
pub fn stationary_trap_objective<'a>(
    domain: &'a DomainSpec,
    eps: f64,
    diffusivity: f64,
    h: f64,
) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |flat: &[f64]| {
        assert!(
            !flat.is_empty() && flat.len() % 2 == 0,
            "flattened centers come in (x, y) pairs"
        );
        let centers: Vec<Vec2> = flat.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
        let clearance = eps + 2.0 * h;
        for (i, &c) in centers.iter().enumerate() {
            if !domain.contains(c) || domain.signed_distance_outer(c, 2.0 * clearance) < clearance
            {
                return INFEASIBLE_PENALTY;
            }
            for &prev in &centers[..i] {
                if c.dist(prev) < 2.0 * eps + 2.0 * h {
                    return INFEASIBLE_PENALTY;
                }
            }
        }
        let traps = TrapSet::new(
            centers
                .into_iter()
                .map(|center| TrapSpec::Stationary {
                    center,
                    radius: eps,
                })
                .collect(),
        );
        match solve_stationary(domain, &traps, diffusivity, h) {
            Ok(field) => field.avg,
            Err(_) => INFEASIBLE_PENALTY,
        }
    }
}

/// Sweep the orbit radius of a trap rotating at angular speed `omega` in a
/// disk, with the time-averaged MFPT as objective, at radius resolution
/// `dr` (stair-casing at that resolution is expected).
///
/// With `central_trap_radius = None` a single trap of radius
/// `moving_trap_radius` orbits; the sweep starts at `r = 0` (a stationary
/// center trap) and ends where the trap's boundary clearance drops to `2h`.
/// With a central trap present, the sweep starts at the first multiple of
/// `dr` keeping the two traps `2h` apart. The objective is the steady solve
/// in the co-rotating frame, which on a disk carries the same spatial
/// average as the relaxed periodic cycle.
pub fn optimize_moving_radius(
    domain: &DomainSpec,
    omega: f64,
    moving_trap_radius: f64,
    central_trap_radius: Option<f64>,
    diffusivity: f64,
    h: f64,
    dr: f64,
) -> Result<SweepResult, OptimizeError> {
    let DomainSpec::Disk { r: disk_r } = *domain else {
        return Err(OptimizeError::UnsupportedDomain(format!("{domain:?}")));
    };
    let eps = moving_trap_radius;
    let hi = disk_r - eps - 2.0 * h;
    let lo = match central_trap_radius {
        None => 0.0,
        Some(ec) => dr * ((ec + eps + 2.0 * h) / dr).ceil(),
    };
    if !(lo <= hi) {
        return Err(OptimizeError::BadRange { lo, hi, delta: dr });
    }
    let objective = |r: f64| -> Result<f64, SolverError> {
        let mut traps = Vec::new();
        if let Some(ec) = central_trap_radius {
            traps.push(TrapSpec::Stationary {
                center: Vec2::ZERO,
                radius: ec,
            });
        }
        if r == 0.0 {
            traps.push(TrapSpec::Stationary {
                center: Vec2::ZERO,
                radius: eps,
            });
            return Ok(solve_stationary(domain, &TrapSet::new(traps), diffusivity, h)?.avg);
        }
        traps.push(TrapSpec::RingOrbit {
            r0: r,
            radius: eps,
            omega,
            phase: 0.0,
        });
        Ok(solve_rotating_frame(domain, &TrapSet::new(traps), diffusivity, h)?.avg)
    };
    sweep_1d(objective, lo, hi, dr)
}
