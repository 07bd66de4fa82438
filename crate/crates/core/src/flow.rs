//! L²-gradient flow of the one-constant energy within a winding sector.
//!
//! The flow integrates ∂ₜα = κ(Δα + η sin 2α) by forward Euler on the stored
//! total angle, with the winding jumps applied across the grid seams. Because
//! the right-hand side is built as the exact negative gradient of the discrete
//! energy of [`crate::energy`] (flux-form Laplacian against the area-weighted
//! inner product), the discrete energy decreases monotonically whenever the
//! step size respects the CFL bound, and the winding pair is conserved
//! exactly.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::energy;
use crate::geometry::TorusShape;
use crate::grid::{PeriodicGrid, ScalarField};
use crate::math;
use crate::sectors::{self, SectorField, WindingIndex};

/// Default fraction of the CFL-stable step used by [`TimeStep::Auto`].
pub const DEFAULT_CFL_SAFETY: f64 = 0.9;

/// Default energy-decrement threshold of the stopping rule.
pub const DEFAULT_STOP_TOL: f64 = 1e-4;

/// Default number of steps between snapshots (and stop-rule checks).
pub const DEFAULT_SNAPSHOT_EVERY: usize = 10;

/// Relative slack granted to the per-comparison energy monotonicity check,
/// covering accumulated roundoff of the two sums being compared.
pub const ENERGY_INCREASE_SLACK: f64 = 1e-12;

/// A final state whose total angle varies by less than this (radians) across
/// the whole grid is classified as a constant state.
pub const CONSTANT_STATE_RANGE: f64 = 1e-2;

/// Name of the pseudo-random generator used for noisy initial data; fixed so
/// that seeds stay meaningful across versions.
pub const NOISE_RNG_NAME: &str = "chacha8";

/// Step-size policy of the explicit integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `safety` times the CFL-stable bound of [`cfl_max_dt`]; `safety`
    /// must lie in (0, 1].
    Auto { safety: f64 },
    /// A fixed step, taken as-is.
    Fixed(f64),
}

impl Default for TimeStep {
    fn default() -> Self {
        TimeStep::Auto {
            safety: DEFAULT_CFL_SAFETY,
        }
    }
}

/// Parameters of a relaxation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    /// One-constant modulus κ > 0.
    pub kappa: f64,
    pub time_step: TimeStep,
    /// Hard cap on the number of Euler steps.
    pub max_steps: usize,
    /// Stop once |ΔE| between consecutive snapshots falls below this.
    pub stop_tol: f64,
    /// Snapshot (and stop-rule) cadence in steps.
    pub snapshot_every: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            kappa: 1.0,
            time_step: TimeStep::default(),
            max_steps: 100_000,
            stop_tol: DEFAULT_STOP_TOL,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(FlowError::InvalidParams("kappa must be positive"));
        }
        match self.time_step {
            TimeStep::Auto { safety } => {
                if !(safety.is_finite() && safety > 0.0 && safety <= 1.0) {
                    return Err(FlowError::InvalidParams("cfl safety must lie in (0, 1]"));
                }
            }
            TimeStep::Fixed(dt) => {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(FlowError::InvalidParams("fixed time step must be positive"));
                }
            }
        }
        if self.max_steps == 0 {
            return Err(FlowError::InvalidParams("max_steps must be at least 1"));
        }
        if !(self.stop_tol.is_finite() && self.stop_tol > 0.0) {
            return Err(FlowError::InvalidParams("stop_tol must be positive"));
        }
        if self.snapshot_every == 0 {
            return Err(FlowError::InvalidParams("snapshot_every must be at least 1"));
        }
        Ok(())
    }
}

/// Why a flow could not be run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowError {
    InvalidParams(&'static str),
}

impl core::fmt::Display for FlowError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FlowError::InvalidParams(what) => write!(f, "invalid flow parameters: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FlowError {}

/// Largest forward-Euler step for which the linearized update is stable:
///
/// dt_max = 1 / ( 2κ [ 1/(r²Δθ²) + 1/((R−r)²Δφ²) + max|η| ] ).
///
/// The diffusion part uses the tightest parallel radius R−r; max|η| bounds
/// the Lipschitz constant of the sine forcing. [`TimeStep::Auto`] scales this
/// by its safety factor, which also absorbs the O(Δθ²) excess of the
/// flux-averaged coefficients over the bound near θ = π.
pub fn cfl_max_dt(shape: TorusShape, grid: PeriodicGrid, kappa: f64) -> f64 {
    let r = shape.minor_radius();
    let rho_min = shape.major_radius() - r;
    let dt2 = grid.d_theta() * grid.d_theta();
    let dp2 = grid.d_phi() * grid.d_phi();
    let diffusion = 1.0 / (r * r * dt2) + 1.0 / (rho_min * rho_min * dp2);
    1.0 / (2.0 * kappa * (diffusion + shape.eta_max_abs()))
}

/// Flux-form Laplace–Beltrami operator applied to the total angle of a sector
/// field, second-order accurate:
///
/// (Δ_d α)ᵢⱼ = [P_{i+1/2}(αᵢ₊₁ⱼ−αᵢⱼ) − P_{i−1/2}(αᵢⱼ−αᵢ₋₁ⱼ)]/(μᵢΔθ²)
///            + (αᵢⱼ₊₁ − 2αᵢⱼ + αᵢⱼ₋₁)/(ρᵢ²Δφ²),
///
/// with P = ρ/r, μ = rρ, and the winding jumps added to differences that
/// cross a seam. This is the exact (negative) gradient of the discrete
/// Dirichlet energy with respect to the area-weighted inner product.
pub fn discrete_laplacian(field: &SectorField) -> ScalarField {
    apply_stencil(field, |lap, _eta, _t| lap)
}

/// Right-hand side of the gradient flow, κ(Δ_d α + η sin 2α); equal to the
/// exact negative L²-gradient of the discrete one-constant energy.
pub fn flow_rhs(field: &SectorField, kappa: f64) -> ScalarField {
    apply_stencil(field, move |lap, eta, t| kappa * (lap + eta * math::sin(2.0 * t)))
}

fn apply_stencil(field: &SectorField, f: impl Fn(f64, f64, f64) -> f64) -> ScalarField {
    let grid = field.grid();
    let shape = field.shape();
    let totals = field.total();
    let data = totals.as_slice();
    let n = grid.n_theta();
    let m = grid.n_phi();
    let geom = RowGeometry::build(shape, grid);
    let jumps = SeamJumps::of(field.index());

    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        let row = &data[i * m..(i + 1) * m];
        let up_start = ((i + 1) % n) * m;
        let up = &data[up_start..up_start + m];
        let dn_start = ((i + n - 1) % n) * m;
        let dn = &data[dn_start..dn_start + m];
        let jt_up = if i + 1 == n { jumps.theta } else { 0.0 };
        let jt_dn = if i == 0 { -jumps.theta } else { 0.0 };
        let g = &geom.rows[i];
        for j in 0..m {
            let left = if j == 0 {
                row[m - 1] - jumps.phi
            } else {
                row[j - 1]
            };
            let right = if j + 1 == m {
                row[0] + jumps.phi
            } else {
                row[j + 1]
            };
            let t = row[j];
            let lap = g.flux_up * (up[j] + jt_up - t) + g.flux_dn * (dn[j] + jt_dn - t)
                + g.flux_pp * (left - 2.0 * t + right);
            out.push(f(lap, g.eta, t));
        }
    }
    ScalarField::from_data(grid, out)
}

/// Per-row stencil coefficients of the flux Laplacian.
struct RowStencil {
    flux_up: f64,
    flux_dn: f64,
    flux_pp: f64,
    eta: f64,
}

struct RowGeometry {
    rows: Vec<RowStencil>,
}

impl RowGeometry {
    fn build(shape: TorusShape, grid: PeriodicGrid) -> Self {
        let n = grid.n_theta();
        let r = shape.minor_radius();
        let dt2 = grid.d_theta() * grid.d_theta();
        let dp2 = grid.d_phi() * grid.d_phi();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let theta = grid.theta(i);
            let rho = shape.rho(theta);
            let mu = shape.area_density(theta);
            let p_up = shape.rho(theta + 0.5 * grid.d_theta()) / r;
            let p_dn = shape.rho(theta - 0.5 * grid.d_theta()) / r;
            rows.push(RowStencil {
                flux_up: p_up / (mu * dt2),
                flux_dn: p_dn / (mu * dt2),
                flux_pp: 1.0 / (rho * rho * dp2),
                eta: shape.eta(theta),
            });
        }
        RowGeometry { rows }
    }
}

struct SeamJumps {
    theta: f64,
    phi: f64,
}

impl SeamJumps {
    fn of(index: WindingIndex) -> Self {
        SeamJumps {
            theta: math::TAU * f64::from(index.h_theta),
            phi: math::TAU * f64::from(index.h_phi),
        }
    }
}

/// State of the flow recorded every `snapshot_every` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSnapshot {
    pub step: usize,
    /// Physical time step·dt.
    pub time: f64,
    /// One-constant discrete energy (geometric background included).
    pub energy: f64,
    /// Max-norm of the stationarity residual Δα + η sin 2α.
    pub residual_max: f64,
    /// Winding measured from the stored samples; None if the field has become
    /// too rough to classify.
    pub winding: Option<WindingIndex>,
}

/// How a relaxation run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowOutcome {
    /// The stopping rule fired: |ΔE| between consecutive snapshots fell below
    /// `stop_tol`.
    Converged,
    /// The step cap was reached first.
    MaxSteps,
    /// The discrete energy rose between snapshots beyond roundoff slack —
    /// the step size violates the dissipation guarantee.
    EnergyIncreased {
        step: usize,
        previous: f64,
        current: f64,
    },
}

/// Snapshot history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub snapshots: Vec<FlowSnapshot>,
    pub outcome: FlowOutcome,
    /// Step size actually used.
    pub dt: f64,
    /// Number of Euler steps taken.
    pub steps: usize,
}

impl FlowTrace {
    pub fn final_snapshot(&self) -> &FlowSnapshot {
        self.snapshots
            .last()
            .expect("a flow trace always holds the initial snapshot")
    }

    pub fn initial_energy(&self) -> f64 {
        self.snapshots[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.final_snapshot().energy
    }
}

/// Outcome of [`run_flow`]: the relaxed configuration plus its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub field: SectorField,
    pub trace: FlowTrace,
}

/// Relaxes a sector field under the one-constant gradient flow.
///
/// The periodic part is recombined with the harmonic lift once at the start;
/// the total angle is then evolved in place, seam jumps standing in for the
/// multivaluedness, so the winding pair cannot change. Energy is monitored at
/// snapshot cadence: any increase beyond roundoff slack aborts the run with
/// [`FlowOutcome::EnergyIncreased`].
pub fn run_flow(initial: &SectorField, params: &FlowParams) -> Result<FlowResult, FlowError> {
    params.validate()?;
    let shape = initial.shape();
    let grid = initial.grid();
    let index = initial.index();
    let kappa = params.kappa;
    let dt = match params.time_step {
        TimeStep::Auto { safety } => safety * cfl_max_dt(shape, grid, kappa),
        TimeStep::Fixed(dt) => dt,
    };

    let mut stepper = Stepper::new(shape, grid, index, kappa, dt, initial.total().into_data());

    let mut snapshots = Vec::new();
    let record = |stepper: &Stepper, step: usize, snapshots: &mut Vec<FlowSnapshot>| -> f64 {
        let energy = stepper.energy();
        let residual_max = stepper.residual_max();
        let winding =
            sectors::winding_from_slice(grid, stepper.totals()).ok().map(|w| w.index);
        snapshots.push(FlowSnapshot {
            step,
            time: step as f64 * dt,
            energy,
            residual_max,
            winding,
        });
        energy
    };

    let mut previous_energy = record(&stepper, 0, &mut snapshots);
    let mut outcome = FlowOutcome::MaxSteps;
    let mut steps_taken = 0;

    for step in 1..=params.max_steps {
        stepper.step();
        steps_taken = step;
        let due = step % params.snapshot_every == 0 || step == params.max_steps;
        if !due {
            continue;
        }
        let energy = record(&stepper, step, &mut snapshots);
        if energy > previous_energy + ENERGY_INCREASE_SLACK * (1.0 + math::abs(previous_energy)) {
            outcome = FlowOutcome::EnergyIncreased {
                step,
                previous: previous_energy,
                current: energy,
            };
            break;
        }
        if math::abs(energy - previous_energy) < params.stop_tol {
            outcome = FlowOutcome::Converged;
            break;
        }
        previous_energy = energy;
    }

    let field = stepper.into_sector_field();
    Ok(FlowResult {
        field,
        trace: FlowTrace {
            snapshots,
            outcome,
            dt,
            steps: steps_taken,
        },
    })
}

/// Forward-Euler stepper on the total-angle buffer; also used by the
/// threshold search, which does its own monitoring.
pub(crate) struct Stepper {
    shape: TorusShape,
    grid: PeriodicGrid,
    index: WindingIndex,
    kappa: f64,
    rows: Vec<StepRow>,
    jumps: SeamJumps,
    cur: Vec<f64>,
    next: Vec<f64>,
}

/// Row coefficients with dt·κ folded in.
struct StepRow {
    up: f64,
    dn: f64,
    pp: f64,
    pot: f64,
}

impl Stepper {
    pub(crate) fn new(
        shape: TorusShape,
        grid: PeriodicGrid,
        index: WindingIndex,
        kappa: f64,
        dt: f64,
        totals: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(totals.len(), grid.node_count());
        let geom = RowGeometry::build(shape, grid);
        let scale = dt * kappa;
        let rows = geom
            .rows
            .iter()
            .map(|g| StepRow {
                up: scale * g.flux_up,
                dn: scale * g.flux_dn,
                pp: scale * g.flux_pp,
                pot: scale * g.eta,
            })
            .collect();
        let next = vec![0.0; totals.len()];
        Stepper {
            shape,
            grid,
            index,
            kappa,
            rows,
            jumps: SeamJumps::of(index),
            cur: totals,
            next,
        }
    }

    #[inline]
    pub(crate) fn totals(&self) -> &[f64] {
        &self.cur
    }

    /// One forward-Euler step.
    pub(crate) fn step(&mut self) {
        let n = self.grid.n_theta();
        let m = self.grid.n_phi();
        let cur = &self.cur;
        let next = &mut self.next;
        for i in 0..n {
            let row = &cur[i * m..(i + 1) * m];
            let up_start = ((i + 1) % n) * m;
            let up = &cur[up_start..up_start + m];
            let dn_start = ((i + n - 1) % n) * m;
            let dn = &cur[dn_start..dn_start + m];
            let jt_up = if i + 1 == n { self.jumps.theta } else { 0.0 };
            let jt_dn = if i == 0 { -self.jumps.theta } else { 0.0 };
            let c = &self.rows[i];
            let out = &mut next[i * m..(i + 1) * m];

            let update = |t: f64, nb_up: f64, nb_dn: f64, left: f64, right: f64| {
                t + c.up * (nb_up - t)
                    + c.dn * (nb_dn - t)
                    + c.pp * (left - 2.0 * t + right)
                    + c.pot * math::sin(2.0 * t)
            };

            out[0] = update(
                row[0],
                up[0] + jt_up,
                dn[0] + jt_dn,
                row[m - 1] - self.jumps.phi,
                row[1],
            );
            for j in 1..m - 1 {
                out[j] = update(row[j], up[j] + jt_up, dn[j] + jt_dn, row[j - 1], row[j + 1]);
            }
            out[m - 1] = update(
                row[m - 1],
                up[m - 1] + jt_up,
                dn[m - 1] + jt_dn,
                row[m - 2],
                row[0] + self.jumps.phi,
            );
        }
        core::mem::swap(&mut self.cur, &mut self.next);
    }

    /// Discrete one-constant energy of the current state.
    pub(crate) fn energy(&self) -> f64 {
        energy::one_constant_total_from_slice(
            self.shape,
            self.grid,
            &self.cur,
            self.index.h_theta,
            self.index.h_phi,
            self.kappa,
        )
    }

    /// Max-norm of Δα + η sin 2α over the current state.
    pub(crate) fn residual_max(&self) -> f64 {
        let n = self.grid.n_theta();
        let m = self.grid.n_phi();
        let geom = RowGeometry::build(self.shape, self.grid);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let row = &self.cur[i * m..(i + 1) * m];
            let up_start = ((i + 1) % n) * m;
            let up = &self.cur[up_start..up_start + m];
            let dn_start = ((i + n - 1) % n) * m;
            let dn = &self.cur[dn_start..dn_start + m];
            let jt_up = if i + 1 == n { self.jumps.theta } else { 0.0 };
            let jt_dn = if i == 0 { -self.jumps.theta } else { 0.0 };
            let g = &geom.rows[i];
            for j in 0..m {
                let left = if j == 0 {
                    row[m - 1] - self.jumps.phi
                } else {
                    row[j - 1]
                };
                let right = if j + 1 == m {
                    row[0] + self.jumps.phi
                } else {
                    row[j + 1]
                };
                let t = row[j];
                let res = g.flux_up * (up[j] + jt_up - t) + g.flux_dn * (dn[j] + jt_dn - t)
                    + g.flux_pp * (left - 2.0 * t + right)
                    + g.eta * math::sin(2.0 * t);
                let a = math::abs(res);
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }

    /// Repackages the evolved totals as a sector field (periodic part =
    /// totals − lift).
    pub(crate) fn into_sector_field(self) -> SectorField {
        let lift = sectors::harmonic_lift_field(self.shape, self.grid, self.index);
        let mut u = self.cur;
        for (v, p) in u.iter_mut().zip(lift.as_slice()) {
            *v -= *p;
        }
        SectorField::new(self.shape, self.index, ScalarField::from_data(self.grid, u))
    }
}

/// Classification of a relaxed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalState {
    /// The total angle is constant over the grid to within
    /// [`CONSTANT_STATE_RANGE`]; `angle` is its area-weighted circular mean
    /// reduced to [0, 2π).
    Constant { angle: f64 },
    /// The state keeps genuine spatial structure; `range` = max − min of the
    /// total angle.
    NonConstant { range: f64 },
}

/// Classifies the final state of a flow by the spread of its total angle.
pub fn classify_final(field: &SectorField) -> FinalState {
    let totals = field.total();
    let (lo, hi) = totals.min_max();
    let range = hi - lo;
    if range < CONSTANT_STATE_RANGE {
        let shape = field.shape();
        let grid = field.grid();
        let mut sin_acc = 0.0;
        let mut cos_acc = 0.0;
        for i in 0..grid.n_theta() {
            let mu = shape.area_density(grid.theta(i));
            for j in 0..grid.n_phi() {
                let (s, c) = math::sin_cos(totals.at(i, j));
                sin_acc += mu * s;
                cos_acc += mu * c;
            }
        }
        FinalState::Constant {
            angle: math::wrap_angle(math::atan2(sin_acc, cos_acc)),
        }
    } else {
        FinalState::NonConstant { range }
    }
}

/// Recipes for initial periodic parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// u ≡ value.
    Constant { value: f64 },
    /// u = value + amplitude·ξ with ξ i.i.d. uniform on [−1, 1) per node,
    /// drawn from the seeded `chacha8` stream.
    NoisyConstant { value: f64, amplitude: f64, seed: u64 },
    /// The poloidal band u = mid + amplitude·cos θ.
    Band { mid: f64, amplitude: f64 },
}

/// Builds the initial sector field for a flow.
pub fn build_initial(
    shape: TorusShape,
    grid: PeriodicGrid,
    index: WindingIndex,
    data: &InitialData,
) -> SectorField {
    let u = match *data {
        InitialData::Constant { value } => ScalarField::constant(grid, value),
        InitialData::NoisyConstant {
            value,
            amplitude,
            seed,
        } => {
            let mut field = uniform_noise_field(grid, seed, amplitude);
            for v in field.as_mut_slice() {
                *v += value;
            }
            field
        }
        InitialData::Band { mid, amplitude } => {
            ScalarField::from_fn(grid, |theta, _phi| mid + amplitude * math::cos(theta))
        }
    };
    SectorField::new(shape, index, u)
}

/// Seeded node-wise uniform noise in [−amplitude, amplitude), reproducible
/// across platforms (`chacha8` stream, row-major draw order).
pub fn uniform_noise_field(grid: PeriodicGrid, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(grid.node_count());
    for _ in 0..grid.node_count() {
        let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        data.push(amplitude * (2.0 * unit - 1.0));
    }
    ScalarField::from_data(grid, data)
}
