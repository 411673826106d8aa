//! Mean first passage time (MFPT) computation for Brownian motion in 2-D
//! confining domains with absorbing circular traps.
//!
//! The crate solves the MFPT boundary value problem
//!
//! ```text
//!     D ∇²u = −1   in Ω̄ = Ω \ ∪ traps,
//!     ∂u/∂n = 0    on the reflecting outer boundary ∂Ω,
//!     u     = 0    on every absorbing trap circle,
//! ```
//!
//! on a uniform Cartesian grid that embeds the irregular domain, using
//! closest-point extensions to impose the boundary conditions through a
//! penalty-stabilized operator. Traps may be stationary, or one trap may
//! move periodically (a circular or elliptical orbit); periodic problems are
//! solved either in a co-rotating frame (elliptic solve with advection, disks
//! only) or by time relaxation to the periodic cycle.
//!
//! Alongside the grid solvers, [`asymptotics`] implements the matched-expansion
//! formulas for small traps (ring patterns, near-disk ellipse perturbations,
//! thin domains, and fast rotation) that serve as independent cross-checks,
//! and [`optimize`] provides sweep/PSO/simplex optimizers over solver-backed
//! objectives for trap placement studies.
//!
//! # Module map
//!
//! | module | contents |
//! |---|---|
//! | [`geometry`] | domains, traps, closest-point queries |
//! | [`grid`] | uniform embedding grid |
//! | [`band`] | grid-point classification and closest-point data |
//! | [`interp`] | bicubic Lagrange interpolation stencils |
//! | [`operators`] | extension operators, Laplacian, penalty systems |
//! | [`quadrature`] | area weights and spatial/temporal averaging |
//! | [`solver`] | stationary, rotating-frame, and periodic-relaxation solves |
//! | [`asymptotics`] | closed-form small-trap formulas and root-finders |
//! | [`optimize`] | parameter sweeps, particle swarm, simplex refinement |
//! | [`sparse`] | CSR matrices, sparse LU, BiCGSTAB |
//! | [`numerics`] | scalar root-finding, minimization, adaptive quadrature |

pub mod asymptotics;
pub mod band;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod numerics;
pub mod operators;
pub mod optimize;
pub mod quadrature;
pub mod solver;
pub mod sparse;

mod vec2;

pub use vec2::Vec2;
