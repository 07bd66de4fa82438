//! Nematic director configurations on an axisymmetric torus.
//!
//! A director field tangent to a torus is described, per winding sector, by a
//! scalar deviation angle α measured against the meridian/parallel frame. This
//! crate evaluates the surface Frank elastic energy of such configurations,
//! relaxes them by an explicit L²-gradient flow that conserves the winding
//! sector, and analyzes stationary states:
//!
//! - [`geometry`]: closed-form frames, curvatures, spin connection, and
//!   Darboux invariants of the parametrized torus.
//! - [`grid`]: uniform periodic sampling of the parameter square and scalar
//!   fields on it.
//! - [`sectors`]: winding indices, the analytic harmonic lift realizing each
//!   sector, and the decomposition α = u + ψ_h.
//! - [`energy`]: discrete and closed-form energies (one-constant and full
//!   three-constant models) plus the bifurcation scalars of the constant-state
//!   analysis.
//! - [`flow`]: forward-Euler gradient flow with CFL control, energy
//!   monotonicity monitoring, and winding conservation.
//! - [`stationary`]: Euler–Lagrange residuals, second variation, constant-state
//!   stability classification, and the critical-aspect-ratio search.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the default `std`
//! feature and enable `libm` to supply the float math.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("nematic-torus needs either the `std` feature or the `libm` feature");

extern crate alloc;

pub mod energy;
pub mod flow;
pub mod geometry;
pub mod grid;
mod math;
pub mod sectors;
pub mod stationary;

pub use energy::{ElasticConstants, EnergyBreakdown};
pub use geometry::TorusShape;
pub use grid::{PeriodicGrid, ScalarField};
pub use sectors::{SectorField, WindingIndex};
