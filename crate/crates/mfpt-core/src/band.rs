//! Grid-point classification over the embedding grid: which nodes carry PDE
//! rows, which carry boundary-condition extension rows, and the closest-point
//! data those rows need.
//!
//! Every node of the padded embedding grid is classified:
//!
//! * `Interior` — inside the trap-free domain Ω̄; carries a PDE row.
//! * `NeumannGhost` — outside Ω; carries a reflecting-boundary extension row
//!   through its mirror point across the outer boundary.
//! * `DirichletGhost` — inside a trap, within reach of the trap circle;
//!   carries an absorbing-boundary extension row.
//! * `TrapDeep` — inside a trap but too deep for an accurate mirror stencil
//!   (or a sub-grid trap's clamp node); pinned to the boundary value directly.
//!
//! The band also stores, per node, the signed distance to the nearest
//! boundary feature (positive inside Ω̄), which drives the boundary-corrected
//! quadrature weights. For moving traps, [`Band::retime`] re-overlays only the
//! trap-dependent state and reports which nodes changed, so per-step operator
//! updates stay local; the outer-boundary data is computed once.

use crate::geometry::{DomainSpec, GeometryError, TrapSet};
use crate::grid::Grid2;
use crate::interp::{interp_row, InterpError, InterpRow};
use crate::{geometry, Vec2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BandError {
    #[error(
        "trap {index} spans fewer than 2 grid cells (radius {radius} < h = {h}); \
         shrink h or opt into SubgridPolicy::PointConstraint"
    )]
    TrapTooSmall { index: usize, radius: f64, h: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Role of one grid node in the discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    NeumannGhost,
    DirichletGhost { trap: usize },
    TrapDeep { trap: usize },
}

/// What to do with traps smaller than the grid can resolve (radius < h).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubgridPolicy {
    /// Refuse to build the band (the accurate default).
    #[default]
    Reject,
    /// Represent the trap as a point constraint: clamp every node inside it
    /// plus the node nearest its center (smallest flat index on ties). Valid
    /// in the small-trap regime where the trap acts through its logarithmic
    /// capacity rather than its resolved shape.
    PointConstraint,
}

#[derive(Debug, Clone, Copy)]
pub struct BandOptions {
    pub subgrid: SubgridPolicy,
    /// Trap nodes deeper than this many h behind the circle are clamped
    /// (`TrapDeep`) instead of mirror-extended; 3.0 keeps every mirror
    /// stencil's data on resolved nodes (the two-mirror stencil reaches
    /// 2√2·h ≈ 2.83·h behind the boundary).
    pub deep_depth_cells: f64,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions {
            subgrid: SubgridPolicy::default(),
            deep_depth_cells: 3.0,
        }
    }
}

/// The embedding grid with per-node classification and closest-point data at
/// one instant of trap motion.
#[derive(Debug, Clone)]
pub struct Band {
    pub grid: Grid2,
    pub domain: DomainSpec,
    pub traps: TrapSet,
    /// Trap-motion time this classification is valid for.
    pub time: f64,
    pub opts: BandOptions,
    /// Per-node role; indexed by flat node index.
    pub class: Vec<NodeClass>,
    /// Closest point on the nearest boundary feature (the node itself for
    /// interior nodes).
    pub cp: Vec<Vec2>,
    /// Signed distance to the nearest boundary feature at [`Band::time`]:
    /// positive inside Ω̄, negative outside Ω or inside a trap. Exact within
    /// the ±2h quadrature collar; beyond it a same-sign lower bound.
    pub dist: Vec<f64>,
    /// Signed distance to the outer boundary only (time-independent).
    d_outer: Vec<f64>,
    /// Flat indices currently classified as trap-side (ghost, deep, clamp).
    pub trap_nodes: Vec<usize>,
    pub n_interior: usize,
    /// Human-readable resolution warnings (under-resolved traps etc.).
    pub warnings: Vec<String>,
}

/// Build the band for a domain/trap configuration at trap-motion time `t`
/// with default options.
pub fn build_band(
    domain: &DomainSpec,
    traps: &TrapSet,
    t: f64,
    h: f64,
) -> Result<Band, BandError> {
    Band::build(domain, traps, t, h, BandOptions::default())
}

impl Band {
    pub fn build(
        domain: &DomainSpec,
        traps: &TrapSet,
        t: f64,
        h: f64,
        opts: BandOptions,
    ) -> Result<Band, BandError> {
        domain.validate()?;
        let (lo, hi) = domain.bbox();
        let grid = Grid2::cover(lo, hi, h);
        let n = grid.len();
        let mut class = vec![NodeClass::Interior; n];
        let mut cp = vec![Vec2::ZERO; n];
        let mut d_outer = vec![0.0f64; n];
        // outer-boundary pass: time-independent
        for k in 0..n {
            let p = grid.coord(k);
            if domain.contains(p) {
                cp[k] = p;
                // exact within the quadrature/classification collar
                d_outer[k] = domain.signed_distance_outer(p, 2.0 * h);
            } else {
                let b = domain.outer_cp(p);
                class[k] = NodeClass::NeumannGhost;
                cp[k] = b;
                d_outer[k] = -p.dist(b);
            }
        }
        let mut band = Band {
            grid,
            domain: domain.clone(),
            traps: traps.clone(),
            time: t,
            opts,
            class,
            cp,
            dist: d_outer.clone(),
            d_outer,
            trap_nodes: Vec::new(),
            n_interior: 0,
            warnings: Vec::new(),
        };
        band.overlay_traps(t)?;
        Ok(band)
    }

    /// Re-classify for trap positions at time `t`, leaving outer-boundary data
    /// untouched. Returns the sorted flat indices of all nodes whose class or
    /// closest-point data changed (old trap nodes ∪ new trap nodes).
    pub fn retime(&mut self, t: f64) -> Result<Vec<usize>, BandError> {
        let mut changed = std::mem::take(&mut self.trap_nodes);
        for &k in &changed {
            self.class[k] = NodeClass::Interior;
            self.cp[k] = self.grid.coord(k);
        }
        self.warnings.clear();
        self.overlay_traps(t)?;
        changed.extend_from_slice(&self.trap_nodes);
        changed.sort_unstable();
        changed.dedup();
        Ok(changed)
    }

    /// Classify trap nodes and refresh `dist` for trap positions at time `t`.
    /// Assumes all previously trap-classified nodes have been reset.
    fn overlay_traps(&mut self, t: f64) -> Result<(), BandError> {
        let h = self.grid.h;
        self.time = t;
        self.dist.copy_from_slice(&self.d_outer);
        self.trap_nodes.clear();
        let positions = self.traps.positions(&self.domain, t)?;
        for (ti, &(c, eps)) in positions.iter().enumerate() {
            if eps < h && self.opts.subgrid == SubgridPolicy::Reject {
                return Err(BandError::TrapTooSmall {
                    index: ti,
                    radius: eps,
                    h,
                });
            }
            if eps < 2.0 * h {
                self.warnings.push(format!(
                    "trap {ti} spans fewer than 4 grid cells (radius {eps} < 2h = {}); \
                     boundary accuracy is degraded",
                    2.0 * h
                ));
            }
            let point_constraint = eps < h;
            // distance overlay over the whole grid (min with trap distance)
            let mut nearest = (f64::INFINITY, usize::MAX);
            for k in 0..self.grid.len() {
                let p = self.grid.coord(k);
                let to_center = p.dist(c);
                let dt = to_center - eps;
                if dt < self.dist[k] {
                    self.dist[k] = dt;
                }
                if to_center < nearest.0 {
                    nearest = (to_center, k);
                }
                if dt < 0.0 && self.class[k] == NodeClass::Interior {
                    // a node exactly on the center keeps cp = c: its mirror
                    // is itself, so the extension row pins it softly to the
                    // boundary value — unlike any fixed fallback direction,
                    // this keeps symmetric configurations exactly symmetric
                    self.cp[k] = if to_center > 0.0 {
                        c + (p - c) * (eps / to_center)
                    } else {
                        c
                    };
                    self.class[k] = if point_constraint || -dt > self.opts.deep_depth_cells * h {
                        NodeClass::TrapDeep { trap: ti }
                    } else {
                        NodeClass::DirichletGhost { trap: ti }
                    };
                    self.trap_nodes.push(k);
                }
            }
            if point_constraint {
                // anchor the point constraint even if no node fell inside
                let k = nearest.1;
                if self.class[k] == NodeClass::Interior {
                    let p = self.grid.coord(k);
                    self.cp[k] = if nearest.0 > 0.0 {
                        c + (p - c) * (eps / nearest.0)
                    } else {
                        c
                    };
                    self.class[k] = NodeClass::TrapDeep { trap: ti };
                    self.trap_nodes.push(k);
                }
            }
        }
        self.trap_nodes.sort_unstable();
        self.n_interior = self
            .class
            .iter()
            .filter(|&&c| c == NodeClass::Interior)
            .count();
        Ok(())
    }

    /// Mirror of node `k` across its closest point.
    #[inline]
    pub fn mirror(&self, k: usize) -> Vec2 {
        geometry::mirror_point(self.grid.coord(k), self.cp[k])
    }

    /// Signed distance to the outer boundary alone (traps ignored).
    pub(crate) fn d_outer(&self, k: usize) -> f64 {
        self.d_outer[k]
    }

    /// Bicubic interpolation row for an arbitrary point of this band's grid.
    pub fn interp_row(&self, p: Vec2) -> Result<InterpRow, InterpError> {
        interp_row(&self.grid, p)
    }
}
