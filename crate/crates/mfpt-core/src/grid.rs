//! Uniform embedding grid.
//!
//! Nodes sit at integer multiples of the spacing `h` — the grid is anchored to
//! the origin, not to the domain's bounding box — so translating a domain by a
//! whole number of cells reproduces identical node geometry. The grid covers
//! the requested box padded by [`PAD_CELLS`] cells on every side, which keeps
//! every 4×4 interpolation stencil of every mirror point inside the grid.

use crate::Vec2;

/// Padding in cells added around the covered box on all sides.
pub const PAD_CELLS: i64 = 4;

/// A rectangular lattice `{ (i0+i)h, (j0+j)h : 0 ≤ i < nx, 0 ≤ j < ny }`.
#[derive(Debug, Clone)]
pub struct Grid2 {
    pub h: f64,
    /// Global integer index of the first node along x (node x = i0·h).
    pub i0: i64,
    /// Global integer index of the first node along y.
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2 {
    /// Grid covering `[lo, hi]` padded by [`PAD_CELLS`] cells.
    pub fn cover(lo: Vec2, hi: Vec2, h: f64) -> Self {
        assert!(h > 0.0, "grid spacing must be positive");
        assert!(lo.x <= hi.x && lo.y <= hi.y, "empty cover box");
        let i0 = (lo.x / h).floor() as i64 - PAD_CELLS;
        let j0 = (lo.y / h).floor() as i64 - PAD_CELLS;
        let i1 = (hi.x / h).ceil() as i64 + PAD_CELLS;
        let j1 = (hi.y / h).ceil() as i64 + PAD_CELLS;
        Grid2 {
            h,
            i0,
            j0,
            nx: (i1 - i0 + 1) as usize,
            ny: (j1 - j0 + 1) as usize,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of local node (i, j); row-major in i.
    #[inline]
    pub fn flat(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        i * self.ny + j
    }

    /// Local (i, j) of a flat index.
    #[inline]
    pub fn unflat(&self, k: usize) -> (usize, usize) {
        (k / self.ny, k % self.ny)
    }

    /// Coordinates of a flat index.
    #[inline]
    pub fn coord(&self, k: usize) -> Vec2 {
        let (i, j) = self.unflat(k);
        Vec2::new(
            (self.i0 + i as i64) as f64 * self.h,
            (self.j0 + j as i64) as f64 * self.h,
        )
    }

    /// Local cell coordinates of an arbitrary point: the local index of the
    /// node at the lower-left corner of the containing cell, and the in-cell
    /// offsets `t ∈ [0, 1)` along each axis.
    ///
    /// Returns `None` when the point falls outside the grid.
    #[inline]
    pub fn locate(&self, p: Vec2) -> Option<(i64, i64, f64, f64)> {
        let gx = (p.x / self.h).floor();
        let gy = (p.y / self.h).floor();
        let li = gx as i64 - self.i0;
        let lj = gy as i64 - self.j0;
        if li < 0 || lj < 0 || li as usize >= self.nx || lj as usize >= self.ny {
            return None;
        }
        Some((li, lj, p.x / self.h - gx, p.y / self.h - gy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cover_pads_and_anchors_to_origin() {
        let g = Grid2::cover(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), 0.1);
        // first node at (floor(-1/0.1) - 4)·0.1 = -1.4
        assert_abs_diff_eq!(g.coord(0).x, -1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(g.coord(0).y, -1.4, epsilon = 1e-12);
        // last node at least 4 cells beyond +1
        let last = g.coord(g.len() - 1);
        assert!(last.x >= 1.0 + 4.0 * 0.1 - 1e-12);
        assert!(last.y >= 1.0 + 4.0 * 0.1 - 1e-12);
        // nodes are integer multiples of h
        let p = g.coord(g.flat(3, 5));
        assert_abs_diff_eq!((p.x / 0.1).round() * 0.1, p.x, epsilon = 1e-12);
    }

    #[test]
    fn anchoring_is_translation_consistent() {
        // shifting the cover box by an integer number of cells shifts node
        // coordinates by exactly that amount
        let g1 = Grid2::cover(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), 0.05);
        let g2 = Grid2::cover(Vec2::new(0.25, 0.0), Vec2::new(1.25, 1.0), 0.05);
        assert_eq!(g2.i0 - g1.i0, 5);
        assert_eq!(g1.nx, g2.nx);
    }

    #[test]
    fn flat_unflat_roundtrip() {
        let g = Grid2::cover(Vec2::new(0.0, 0.0), Vec2::new(0.5, 0.3), 0.1);
        for k in 0..g.len() {
            let (i, j) = g.unflat(k);
            assert_eq!(g.flat(i, j), k);
        }
    }

    #[test]
    fn locate_returns_in_cell_offsets() {
        let g = Grid2::cover(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), 0.1);
        let (li, lj, tx, ty) = g.locate(Vec2::new(0.234, -0.568)).unwrap();
        let corner = g.coord(g.flat(li as usize, lj as usize));
        assert!(corner.x <= 0.234 && 0.234 < corner.x + 0.1);
        assert!(corner.y <= -0.568 && -0.568 < corner.y + 0.1);
        assert_abs_diff_eq!(corner.x + tx * 0.1, 0.234, epsilon = 1e-12);
        assert_abs_diff_eq!(corner.y + ty * 0.1, -0.568, epsilon = 1e-12);
        assert!(g.locate(Vec2::new(50.0, 0.0)).is_none());
    }
}
