//! Uniform periodic grids on the parameter square and scalar fields on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Fewer nodes per direction than this cannot resolve the curvature
/// coefficients sensibly, and the seam-handling stencils assume it.
pub const MIN_NODES: usize = 8;

/// Why a grid is not admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridError {
    /// Each direction needs at least [`MIN_NODES`] nodes.
    TooFewNodes { n_theta: usize, n_phi: usize },
}

impl core::fmt::Display for GridError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GridError::TooFewNodes { n_theta, n_phi } => write!(
                f,
                "grid {n_theta}x{n_phi} too coarse: need at least {MIN_NODES} nodes per direction"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

/// Uniform tensor grid on `[0, 2π)²` with nodes θ_i = i·Δθ, φ_j = j·Δφ and
/// periodic index arithmetic in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    n_theta: usize,
    n_phi: usize,
}

impl PeriodicGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, GridError> {
        if n_theta < MIN_NODES || n_phi < MIN_NODES {
            return Err(GridError::TooFewNodes { n_theta, n_phi });
        }
        Ok(PeriodicGrid { n_theta, n_phi })
    }

    /// Square grid, n nodes in each direction.
    pub fn square(n: usize) -> Result<Self, GridError> {
        PeriodicGrid::new(n, n)
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n_theta * self.n_phi
    }

    #[inline]
    pub fn d_theta(&self) -> f64 {
        math::TAU / self.n_theta as f64
    }

    #[inline]
    pub fn d_phi(&self) -> f64 {
        math::TAU / self.n_phi as f64
    }

    #[inline]
    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.d_theta()
    }

    #[inline]
    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.d_phi()
    }

    /// Row-major storage index of node (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_theta && j < self.n_phi);
        i * self.n_phi + j
    }
}

/// A real scalar sampled at the nodes of a [`PeriodicGrid`], stored row-major
/// (θ-index major, φ-index minor).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PeriodicGrid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        ScalarField {
            grid,
            data: vec![0.0; grid.node_count()],
        }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        ScalarField {
            grid,
            data: vec![value; grid.node_count()],
        }
    }

    /// Samples `f(θ_i, φ_j)` at every node.
    pub fn from_fn(grid: PeriodicGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.node_count());
        for i in 0..grid.n_theta() {
            let theta = grid.theta(i);
            for j in 0..grid.n_phi() {
                data.push(f(theta, grid.phi(j)));
            }
        }
        ScalarField { grid, data }
    }

    /// Wraps existing row-major data; panics if the length does not match.
    pub fn from_data(grid: PeriodicGrid, data: Vec<f64>) -> Self {
        assert!(
            data.len() == grid.node_count(),
            "field data length {} does not match grid {}x{}",
            data.len(),
            grid.n_theta(),
            grid.n_phi()
        );
        ScalarField { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.idx(i, j);
        self.data[k] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Consumes the field, returning its row-major data.
    #[inline]
    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// The contiguous φ-row at θ-index i.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.n_phi();
        &self.data[i * m..(i + 1) * m]
    }

    /// (min, max) over all nodes.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    pub fn max_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for &v in &self.data {
            let a = math::abs(v);
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Deviation from 2-oddness: max |f(σ(p)) + f(p)| over nodes, where σ is
    /// the grid-compatible point reflection (i, j) → (−i mod n, −j mod m).
    /// Fields odd under σ stay odd under the gradient flow, which is what
    /// keeps symmetric initial data on the symmetric slice.
    pub fn two_odd_defect(&self) -> f64 {
        let n = self.grid.n_theta();
        let m = self.grid.n_phi();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let si = (n - i) % n;
            for j in 0..m {
                let sj = (m - j) % m;
                let d = math::abs(self.at(i, j) + self.at(si, sj));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}
