//! Winding sectors of director fields and the harmonic lifts realizing them.
//!
//! The deviation angle of a director field on the torus is single-valued only
//! up to its winding: going once around the poloidal (θ) or toroidal (φ)
//! circle, α may gain 2π·h_θ or 2π·h_φ. Each pair `(h_θ, h_φ)` of integers
//! labels a topological sector. We represent a sector-(h) configuration as
//!
//! ```text
//! α(θ, φ) = u(θ, φ) + ψ_h(θ, φ)
//! ```
//!
//! with `u` doubly periodic and ψ_h the harmonic lift of the sector: the
//! unique (up to a constant) multivalued angle with Δψ_h = 0 carrying exactly
//! the winding h. On the axisymmetric torus it is explicit:
//!
//! ```text
//! ψ_h(θ, φ) = h_θ √(b²−1) F(θ) + h_φ φ,
//! F(θ) = ∫₀^θ dt / (b + cos t),
//! ```
//!
//! so that ∂θψ grows like h_θ·2π per poloidal loop (F(2π) = 2π/√(b²−1)) and
//! the φ-part winds h_φ times. Storing `(u, h)` instead of a wrapped α keeps
//! fields smooth and makes winding conservation trivial to monitor.

use alloc::vec::Vec;

use crate::geometry::TorusShape;
use crate::grid::{PeriodicGrid, ScalarField};
use crate::math;

/// Largest acceptable distance between a per-line average winding and the
/// nearest integer before [`winding_of`] refuses to classify the field.
pub const WINDING_RESIDUAL_TOL: f64 = 0.1;

/// Pair of integer winding numbers (poloidal, toroidal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WindingIndex {
    /// Winding of α around the small circle (θ-direction).
    pub h_theta: i32,
    /// Winding of α around the large circle (φ-direction).
    pub h_phi: i32,
}

impl WindingIndex {
    pub fn new(h_theta: i32, h_phi: i32) -> Self {
        WindingIndex { h_theta, h_phi }
    }
}

impl core::fmt::Display for WindingIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.h_theta, self.h_phi)
    }
}

/// Why a stored field could not be split into sector data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorError {
    /// The averaged loop increments are not close to integer multiples of 2π;
    /// the samples do not look like a continuously wound angle field.
    NonIntegerWinding { raw_theta: f64, raw_phi: f64 },
}

impl core::fmt::Display for SectorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SectorError::NonIntegerWinding {
                raw_theta,
                raw_phi,
            } => write!(
                f,
                "loop increments ({raw_theta:.6}, {raw_phi:.6})x2pi are not near integers"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SectorError {}

/// Antiderivative F(θ) = ∫₀^θ dt / (b + cos t), evaluated in closed form.
///
/// The Weierstrass form `(2/√(b²−1))·atan(√((b−1)/(b+1)) tan(θ/2))` is only
/// valid per branch; this implementation splits θ = 2πk + w with
/// w ∈ [−π, π] and uses the atan2 half-angle form, which is continuous
/// through the seam (cos(w/2) ≥ 0 on the whole reduced interval):
///
/// F(θ) = k·2π/√(b²−1) + (2/√(b²−1))·atan2((b−1)·sin(w/2), √(b²−1)·cos(w/2)).
///
/// Odd in θ, and F(θ + 2π) = F(θ) + 2π/√(b²−1).
pub fn poloidal_antiderivative(aspect: f64, theta: f64) -> f64 {
    debug_assert!(aspect > 1.0);
    let s = math::sqrt(aspect * aspect - 1.0);
    let k = math::round(theta / math::TAU);
    let w = theta - math::TAU * k;
    let (sh, ch) = math::sin_cos(0.5 * w);
    (math::TAU * k + 2.0 * math::atan2((aspect - 1.0) * sh, s * ch)) / s
}

/// The harmonic lift ψ_h at raw (unreduced) angles:
/// ψ_h(θ, φ) = h_θ·√(b²−1)·F(θ) + h_φ·φ.
///
/// Harmonic (Δψ_h = 0), odd under (θ, φ) → (−θ, −φ), and additive in h.
pub fn harmonic_lift(shape: TorusShape, index: WindingIndex, theta: f64, phi: f64) -> f64 {
    let b = shape.aspect();
    let s = math::sqrt(b * b - 1.0);
    f64::from(index.h_theta) * s * poloidal_antiderivative(b, theta)
        + f64::from(index.h_phi) * phi
}

/// Samples ψ_h at the nodes of a grid.
pub fn harmonic_lift_field(
    shape: TorusShape,
    grid: PeriodicGrid,
    index: WindingIndex,
) -> ScalarField {
    ScalarField::from_fn(grid, |theta, phi| harmonic_lift(shape, index, theta, phi))
}

/// Dirichlet energy of the lift against the one-constant measure:
/// ∫|∇ₛψ_h|² dVol = 4π²(h_θ²·√(b²−1) + h_φ²/√(b²−1)).
pub fn lift_dirichlet_integral(aspect: f64, index: WindingIndex) -> f64 {
    let s = math::sqrt(aspect * aspect - 1.0);
    let ht = f64::from(index.h_theta);
    let hp = f64::from(index.h_phi);
    4.0 * core::f64::consts::PI * core::f64::consts::PI * (ht * ht * s + hp * hp / s)
}

/// A sector-tagged configuration: total deviation angle α = u + ψ_h with `u`
/// doubly periodic on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorField {
    shape: TorusShape,
    index: WindingIndex,
    u: ScalarField,
}

impl SectorField {
    /// Wraps a periodic part `u` for the given shape and sector.
    pub fn new(shape: TorusShape, index: WindingIndex, u: ScalarField) -> Self {
        SectorField { shape, index, u }
    }

    /// The constant-angle configuration α ≡ value in the given sector
    /// (u ≡ value, so the lift supplies all the winding).
    pub fn constant(
        shape: TorusShape,
        grid: PeriodicGrid,
        index: WindingIndex,
        value: f64,
    ) -> Self {
        SectorField::new(shape, index, ScalarField::constant(grid, value))
    }

    #[inline]
    pub fn shape(&self) -> TorusShape {
        self.shape
    }

    #[inline]
    pub fn index(&self) -> WindingIndex {
        self.index
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.u.grid()
    }

    /// The periodic part u.
    #[inline]
    pub fn periodic_part(&self) -> &ScalarField {
        &self.u
    }

    #[inline]
    pub fn periodic_part_mut(&mut self) -> &mut ScalarField {
        &mut self.u
    }

    /// α at node (i, j) using the principal branch of the lift
    /// (θ, φ taken in [0, 2π) as the grid samples them).
    pub fn total_at(&self, i: usize, j: usize) -> f64 {
        let grid = self.grid();
        self.u.at(i, j) + harmonic_lift(self.shape, self.index, grid.theta(i), grid.phi(j))
    }

    /// The total angle α = u + ψ_h sampled over the grid (principal branch).
    pub fn total(&self) -> ScalarField {
        let shape = self.shape;
        let index = self.index;
        let mut total = harmonic_lift_field(shape, self.u.grid(), index);
        for (t, u) in total.as_mut_slice().iter_mut().zip(self.u.as_slice()) {
            *t += *u;
        }
        total
    }
}

/// Result of measuring the winding of a stored total-angle field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingMeasurement {
    pub index: WindingIndex,
    /// Distance of the averaged θ-loop increment from h_θ (in turns).
    pub residual_theta: f64,
    /// Distance of the averaged φ-loop increment from h_φ (in turns).
    pub residual_phi: f64,
}

/// Measures the winding pair of a sampled total angle.
///
/// Along every grid line the increments are wrapped to their nearest-period
/// representatives and summed; each closed loop of a continuously sampled
/// angle field then telescopes to an exact multiple of 2π. The per-direction
/// results are averaged over lines, rounded, and validated against
/// [`WINDING_RESIDUAL_TOL`].
pub fn winding_of(total: &ScalarField) -> Result<WindingMeasurement, SectorError> {
    winding_from_slice(total.grid(), total.as_slice())
}

pub(crate) fn winding_from_slice(
    grid: PeriodicGrid,
    data: &[f64],
) -> Result<WindingMeasurement, SectorError> {
    let n = grid.n_theta();
    let m = grid.n_phi();

    // θ-direction: for each φ-column, sum wrapped increments down the column.
    let mut theta_turns = 0.0;
    for j in 0..m {
        let mut acc = 0.0;
        for i in 0..n {
            let here = data[i * m + j];
            let next = data[((i + 1) % n) * m + j];
            acc += math::wrap_to_pi(next - here);
        }
        theta_turns += acc;
    }
    theta_turns /= m as f64 * math::TAU;

    // φ-direction: for each θ-row, sum wrapped increments along the row.
    let mut phi_turns = 0.0;
    for i in 0..n {
        let row = &data[i * m..(i + 1) * m];
        let mut acc = 0.0;
        for j in 0..m {
            acc += math::wrap_to_pi(row[(j + 1) % m] - row[j]);
        }
        phi_turns += acc;
    }
    phi_turns /= n as f64 * math::TAU;

    let h_theta = math::round(theta_turns);
    let h_phi = math::round(phi_turns);
    let residual_theta = math::abs(theta_turns - h_theta);
    let residual_phi = math::abs(phi_turns - h_phi);
    if residual_theta > WINDING_RESIDUAL_TOL || residual_phi > WINDING_RESIDUAL_TOL {
        return Err(SectorError::NonIntegerWinding {
            raw_theta: theta_turns,
            raw_phi: phi_turns,
        });
    }
    Ok(WindingMeasurement {
        index: WindingIndex::new(h_theta as i32, h_phi as i32),
        residual_theta,
        residual_phi,
    })
}

/// Splits a sampled total angle into its sector data: measures the winding,
/// subtracts the harmonic lift, and returns the periodic remainder.
pub fn decompose(total: &ScalarField, shape: TorusShape) -> Result<SectorField, SectorError> {
    let measured = winding_of(total)?;
    let grid = total.grid();
    let lift = harmonic_lift_field(shape, grid, measured.index);
    let mut u = Vec::with_capacity(grid.node_count());
    for (t, p) in total.as_slice().iter().zip(lift.as_slice()) {
        u.push(t - p);
    }
    Ok(SectorField::new(
        shape,
        measured.index,
        ScalarField::from_data(grid, u),
    ))
}
