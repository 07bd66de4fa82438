//! Surface Frank elastic energies of director configurations.
//!
//! Two models are evaluated on sector fields α = u + ψ_h:
//!
//! - the **full three-constant energy**
//!   `W = ½ ∫ { K₁ κ_t² + K₂ τ_n² + K₃ (κ_n² + c_n²) } dVol`
//!   (splay, twist, and bend moduli acting on the Darboux invariants), and
//! - the **one-constant energy**, its K₁ = K₂ = K₃ = κ form rewritten in the
//!   deviation angle:
//!   `W_κ = (κ/2) ∫ { |∇ₛα|² + η(θ) cos 2α } dVol + κ G(b)`,
//!   where η = (c₁² − c₂²)/2 and G(b) collects the α-independent curvature
//!   background.
//!
//! Both discrete evaluators use the same staggered quadrature (differences on
//! cell edges, curvature terms at nodes, seam-corrected for the winding), so
//! the one-constant evaluator is *exactly* the equal-constant specialization
//! of the full one in its α-dependence, and the gradient flow of
//! [`crate::flow`] is the exact negative L²-gradient of the discrete energy.
//!
//! Closed forms for constant-angle states and the scalars governing their
//! bifurcations are provided alongside.

use crate::geometry::TorusShape;
use crate::grid::PeriodicGrid;
use crate::math;
use crate::sectors::SectorField;

const PI: f64 = core::f64::consts::PI;

/// Why a set of elastic constants is not admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantsError {
    /// Every modulus must be finite and ≥ 0.
    NegativeModulus,
    /// At least one modulus must be strictly positive.
    AllZero,
}

impl core::fmt::Display for ConstantsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConstantsError::NegativeModulus => {
                write!(f, "elastic constants must be finite and non-negative")
            }
            ConstantsError::AllZero => write!(f, "at least one elastic constant must be positive"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConstantsError {}

/// Splay, twist, and bend moduli (K₁, K₂, K₃), validated non-negative with a
/// positive sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticConstants {
    k1: f64,
    k2: f64,
    k3: f64,
}

impl ElasticConstants {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self, ConstantsError> {
        let all_finite = k1.is_finite() && k2.is_finite() && k3.is_finite();
        if !all_finite || k1 < 0.0 || k2 < 0.0 || k3 < 0.0 {
            return Err(ConstantsError::NegativeModulus);
        }
        if k1 + k2 + k3 <= 0.0 {
            return Err(ConstantsError::AllZero);
        }
        Ok(ElasticConstants { k1, k2, k3 })
    }

    /// Equal moduli K₁ = K₂ = K₃ = κ.
    pub fn one_constant(kappa: f64) -> Result<Self, ConstantsError> {
        ElasticConstants::new(kappa, kappa, kappa)
    }

    #[inline]
    pub fn k1(&self) -> f64 {
        self.k1
    }

    #[inline]
    pub fn k2(&self) -> f64 {
        self.k2
    }

    #[inline]
    pub fn k3(&self) -> f64 {
        self.k3
    }

    /// Some(κ) when all three moduli coincide exactly.
    pub fn as_one_constant(&self) -> Option<f64> {
        if self.k1 == self.k2 && self.k2 == self.k3 {
            Some(self.k1)
        } else {
            None
        }
    }
}

/// Itemized energy of a configuration.
///
/// The one-constant evaluator fills `dirichlet`, `potential`, and `geometric`
/// (their sum is `total`); the full evaluator fills `splay`, `twist`, and
/// `bend` (their sum is `total`). Unused components are zero. For smooth,
/// resolved fields every component of the active model is non-negative except
/// `potential`, which carries the sign of cos 2α.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    /// (κ/2) ∫ |∇ₛα|² dVol — one-constant mode only.
    pub dirichlet: f64,
    /// (κ/2) ∫ η cos 2α dVol — one-constant mode only.
    pub potential: f64,
    /// κ G(b), the α-independent curvature background — one-constant mode only.
    pub geometric: f64,
    /// (K₁/2) ∫ κ_t² dVol — full mode only.
    pub splay: f64,
    /// (K₂/2) ∫ τ_n² dVol — full mode only.
    pub twist: f64,
    /// (K₃/2) ∫ (κ_n² + c_n²) dVol — full mode only.
    pub bend: f64,
    /// Sum of the active components.
    pub total: f64,
    /// `total / π²`, the natural scale of the closed-form constant-state
    /// energies.
    pub total_over_pi2: f64,
}

/// One-constant discrete energy of a sector field.
pub fn energy_one_constant(field: &SectorField, kappa: f64) -> EnergyBreakdown {
    let total = field.total();
    let (dirichlet, potential) = one_constant_parts(
        field.shape(),
        field.grid(),
        total.as_slice(),
        field.index().h_theta,
        field.index().h_phi,
        kappa,
    );
    let geometric = geometric_constant(field.shape().aspect(), kappa);
    let sum = dirichlet + potential + geometric;
    EnergyBreakdown {
        dirichlet,
        potential,
        geometric,
        total: sum,
        total_over_pi2: sum / (PI * PI),
        ..EnergyBreakdown::default()
    }
}

/// Full three-constant discrete energy of a sector field.
pub fn energy_full(field: &SectorField, constants: &ElasticConstants) -> EnergyBreakdown {
    let total = field.total();
    let (splay, twist, bend) = full_parts(
        field.shape(),
        field.grid(),
        total.as_slice(),
        field.index().h_theta,
        field.index().h_phi,
        constants,
    );
    let sum = splay + twist + bend;
    EnergyBreakdown {
        splay,
        twist,
        bend,
        total: sum,
        total_over_pi2: sum / (PI * PI),
        ..EnergyBreakdown::default()
    }
}

/// One-constant energy evaluated directly on a total-angle buffer
/// (used by the flow loop, which owns the evolving buffer).
pub(crate) fn one_constant_total_from_slice(
    shape: TorusShape,
    grid: PeriodicGrid,
    data: &[f64],
    h_theta: i32,
    h_phi: i32,
    kappa: f64,
) -> f64 {
    let (dir, pot) = one_constant_parts(shape, grid, data, h_theta, h_phi, kappa);
    dir + pot + geometric_constant(shape.aspect(), kappa)
}

/// Dirichlet and potential parts of the one-constant energy.
///
/// Quadrature layout: squared θ-differences live on θ-edges with the midpoint
/// area weight, squared φ-differences on φ-edges with the row weight, and the
/// potential at nodes. Crossing the grid seams adds the winding jumps
/// 2π·h_θ / 2π·h_φ to the differences, which makes the sums independent of
/// where the branch cut of the stored total angle sits.
pub(crate) fn one_constant_parts(
    shape: TorusShape,
    grid: PeriodicGrid,
    data: &[f64],
    h_theta: i32,
    h_phi: i32,
    kappa: f64,
) -> (f64, f64) {
    let n = grid.n_theta();
    let m = grid.n_phi();
    debug_assert_eq!(data.len(), n * m);
    let d_theta = grid.d_theta();
    let d_phi = grid.d_phi();
    let r = shape.minor_radius();
    let jump_theta = math::TAU * f64::from(h_theta);
    let jump_phi = math::TAU * f64::from(h_phi);

    let mut theta_sum = 0.0; // Σ_i P_{i+1/2} Σ_j (δθ T)²
    let mut phi_sum = 0.0; // Σ_i S_i Σ_j (δφ T)²
    let mut pot_sum = 0.0; // Σ_i η_i μ_i Σ_j cos 2T

    for i in 0..n {
        let theta = grid.theta(i);
        let rho = shape.rho(theta);
        let p_half = shape.rho(theta + 0.5 * d_theta) / r;
        let s_row = r / rho;
        let eta_mu = shape.eta(theta) * shape.area_density(theta);
        let row = &data[i * m..(i + 1) * m];
        let up_start = ((i + 1) % n) * m;
        let up = &data[up_start..up_start + m];
        let jt = if i + 1 == n { jump_theta } else { 0.0 };

        let mut row_theta = 0.0;
        let mut row_phi = 0.0;
        let mut row_pot = 0.0;
        for j in 0..m {
            let d_t = up[j] + jt - row[j];
            row_theta += d_t * d_t;
            let right = if j + 1 == m {
                row[0] + jump_phi
            } else {
                row[j + 1]
            };
            let d_p = right - row[j];
            row_phi += d_p * d_p;
            row_pot += math::cos(2.0 * row[j]);
        }
        theta_sum += p_half * row_theta;
        phi_sum += s_row * row_phi;
        pot_sum += eta_mu * row_pot;
    }

    let dirichlet = 0.5 * kappa * (d_phi / d_theta * theta_sum + d_theta / d_phi * phi_sum);
    let potential = 0.5 * kappa * d_theta * d_phi * pot_sum;
    (dirichlet, potential)
}

/// Splay/twist/bend parts of the full energy on a total-angle buffer.
///
/// The quadratic form in the covariant gradient w = ∇ₛα − A is split across
/// the staggered layout: pure w₁² terms on θ-edges, pure w₂² terms on
/// φ-edges (each with the coefficient evaluated at the edge-midpoint angle),
/// and the mixed w₁w₂ term at nodes from centered differences. The curvature
/// potential (τ_n², c_n²) sits at nodes. Regrouping by modulus keeps
/// `splay + twist + bend` exactly equal to the assembled energy, and at
/// K₁ = K₂ = K₃ the α-dependent part collapses to the one-constant quadrature
/// identically (the mixed term's coefficient vanishes).
pub(crate) fn full_parts(
    shape: TorusShape,
    grid: PeriodicGrid,
    data: &[f64],
    h_theta: i32,
    h_phi: i32,
    constants: &ElasticConstants,
) -> (f64, f64, f64) {
    let n = grid.n_theta();
    let m = grid.n_phi();
    debug_assert_eq!(data.len(), n * m);
    let d_theta = grid.d_theta();
    let d_phi = grid.d_phi();
    let r = shape.minor_radius();
    let c1 = shape.c1();
    let jump_theta = math::TAU * f64::from(h_theta);
    let jump_phi = math::TAU * f64::from(h_phi);
    let inv_r_dt = 1.0 / (r * d_theta);
    let cell = d_theta * d_phi;

    let k1 = constants.k1();
    let k2 = constants.k2();
    let k3 = constants.k3();

    let mut splay = 0.0;
    let mut twist = 0.0;
    let mut bend = 0.0;

    for i in 0..n {
        let theta = grid.theta(i);
        let rho = shape.rho(theta);
        let mu = shape.area_density(theta);
        let mu_half = shape.area_density(theta + 0.5 * d_theta);
        let a2 = shape.spin_a_phi(theta);
        let c2 = shape.c2(theta);
        let inv_rho_dp = 1.0 / (rho * d_phi);

        let row = &data[i * m..(i + 1) * m];
        let up_start = ((i + 1) % n) * m;
        let up = &data[up_start..up_start + m];
        let dn_start = ((i + n - 1) % n) * m;
        let dn = &data[dn_start..dn_start + m];
        let jt_up = if i + 1 == n { jump_theta } else { 0.0 };
        let jt_dn = if i == 0 { -jump_theta } else { 0.0 };

        // θ-edges (i+1/2, j): w₁² terms, coefficient split K₁ sin²ᾱ + K₃ cos²ᾱ.
        let w_theta_edge = 0.5 * cell * mu_half;
        for j in 0..m {
            let delta = up[j] + jt_up - row[j];
            let v1 = delta * inv_r_dt;
            let (s_mid, c_mid) = math::sin_cos(row[j] + 0.5 * delta);
            let v1_sq = v1 * v1;
            splay += w_theta_edge * k1 * (s_mid * s_mid) * v1_sq;
            bend += w_theta_edge * k3 * (c_mid * c_mid) * v1_sq;
        }

        // φ-edges (i, j+1/2): w₂² terms, coefficient split K₁ cos²ᾱ + K₃ sin²ᾱ.
        let w_phi_edge = 0.5 * cell * mu;
        for j in 0..m {
            let right = if j + 1 == m {
                row[0] + jump_phi
            } else {
                row[j + 1]
            };
            let delta = right - row[j];
            let v2 = delta * inv_rho_dp - a2;
            let (s_mid, c_mid) = math::sin_cos(row[j] + 0.5 * delta);
            let v2_sq = v2 * v2;
            splay += w_phi_edge * k1 * (c_mid * c_mid) * v2_sq;
            bend += w_phi_edge * k3 * (s_mid * s_mid) * v2_sq;
        }

        // Nodes: mixed w₁w₂ term (coefficient ∓sin 2α) and curvature potential.
        let w_node = 0.5 * cell * mu;
        for j in 0..m {
            let t_up = up[j] + jt_up;
            let t_dn = dn[j] + jt_dn;
            let v1c = (t_up - t_dn) * 0.5 * inv_r_dt;
            let left = if j == 0 { row[m - 1] - jump_phi } else { row[j - 1] };
            let right = if j + 1 == m {
                row[0] + jump_phi
            } else {
                row[j + 1]
            };
            let v2c = (right - left) * 0.5 * inv_rho_dp - a2;
            let (sa, ca) = math::sin_cos(row[j]);
            let sin2a = 2.0 * sa * ca;
            let cross = v1c * v2c * sin2a;
            splay -= w_node * k1 * cross;
            bend += w_node * k3 * cross;

            let tau_n = (c1 - c2) * ca * sa;
            let c_n = c1 * ca * ca + c2 * sa * sa;
            twist += w_node * k2 * tau_n * tau_n;
            bend += w_node * k3 * c_n * c_n;
        }
    }

    (splay, twist, bend)
}

/// The α-independent curvature background of the one-constant energy:
/// κ G(b) with G(b) = π² ( (2 − b²)/√(b²−1) + 2b ).
pub fn geometric_constant(aspect: f64, kappa: f64) -> f64 {
    let s = math::sqrt(aspect * aspect - 1.0);
    kappa * PI * PI * ((2.0 - aspect * aspect) / s + 2.0 * aspect)
}

/// Closed-form full energy of the constant-angle state α ≡ `alpha` in the
/// trivial sector:
///
/// W(α) = π²[(K₁+K₃)A + (K₂+K₃)B/2] + π² cos 2α [(K₁−K₃)A + K₃C]
///        + π² cos²2α (K₃−K₂)B/2,
///
/// with the aspect-only scalars A, B, C of [`bifurcation_scalars`].
pub fn energy_constant_closed_form(
    shape: TorusShape,
    constants: &ElasticConstants,
    alpha: f64,
) -> f64 {
    let s = bifurcation_scalars(shape.aspect());
    let k1 = constants.k1();
    let k2 = constants.k2();
    let k3 = constants.k3();
    let c2a = math::cos(2.0 * alpha);
    PI * PI
        * ((k1 + k3) * s.a
            + 0.5 * (k2 + k3) * s.b
            + c2a * ((k1 - k3) * s.a + k3 * s.c)
            + c2a * c2a * 0.5 * (k3 - k2) * s.b)
}

/// dW/dα of [`energy_constant_closed_form`]:
/// W′(α) = 2π² sin 2α [ A(K₃−K₁) + B cos 2α (K₂−K₃) − C K₃ ].
pub fn constant_energy_derivative(
    shape: TorusShape,
    constants: &ElasticConstants,
    alpha: f64,
) -> f64 {
    let s = bifurcation_scalars(shape.aspect());
    let k1 = constants.k1();
    let k2 = constants.k2();
    let k3 = constants.k3();
    let (s2a, c2a) = math::sin_cos(2.0 * alpha);
    2.0 * PI * PI * s2a * (s.a * (k3 - k1) + s.b * c2a * (k2 - k3) - s.c * k3)
}

/// Aspect-ratio scalars controlling the constant-state energy landscape.
///
/// With s = √(b²−1): A = b − s, B = b²/s, C = 2b − b²/s. The anisotropy
/// measure η_b = C/B = 2s/b − 1 lies in (−1, 1), crosses zero at b = 2/√3,
/// and yields the one-constant marginal moduli λ₁ = 1/(1+η_b) (meridian) and
/// λ₂ = 1/(1−η_b) (parallel) of the two-parameter reduced model where
/// K₁ = K₃ = λ, K₂ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationScalars {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// η_b = C/B ∈ (−1, 1).
    pub eta_scalar: f64,
    /// 1/(1+η_b): meridian-family marginal modulus of the reduced model.
    pub lambda1: f64,
    /// 1/(1−η_b): parallel-family marginal modulus of the reduced model.
    pub lambda2: f64,
}

/// Computes the constant-state bifurcation scalars for aspect ratio b > 1.
pub fn bifurcation_scalars(aspect: f64) -> BifurcationScalars {
    assert!(
        aspect > 1.0 && aspect.is_finite(),
        "aspect ratio must exceed 1"
    );
    let s = math::sqrt(aspect * aspect - 1.0);
    let a = aspect - s;
    let b = aspect * aspect / s;
    let c = 2.0 * aspect - b;
    let eta_scalar = c / b;
    BifurcationScalars {
        a,
        b,
        c,
        eta_scalar,
        lambda1: 1.0 / (1.0 + eta_scalar),
        lambda2: 1.0 / (1.0 - eta_scalar),
    }
}

/// The three poloidal circle integrals behind every closed form here,
/// for b > 1:
///
/// - ∫₀²π dθ/(b+cos θ)        = 2π/√(b²−1)
/// - ∫₀²π sin²θ/(b+cos θ) dθ  = 2π(b − √(b²−1))
/// - ∫₀²π cos²θ/(b+cos θ) dθ  = 2πb(b/√(b²−1) − 1)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleIntegrals {
    pub inv: f64,
    pub sin_sq: f64,
    pub cos_sq: f64,
}

pub fn circle_integrals(aspect: f64) -> CircleIntegrals {
    let s = math::sqrt(aspect * aspect - 1.0);
    CircleIntegrals {
        inv: math::TAU / s,
        sin_sq: math::TAU * (aspect - s),
        cos_sq: math::TAU * aspect * (aspect / s - 1.0),
    }
}

/// Exact surface integrals of the curvature fields (any minor radius; all are
/// scale-invariant):
///
/// - ∫|A|² dVol = 4π²(b − √(b²−1)) (spin connection)
/// - ∫H² dVol = π²b²/√(b²−1) (mean curvature; equals ∫(c₁²+c₂²)/4 because the
///   Gaussian term integrates to zero)
/// - ∫c₁c₂ dVol = 0 (Gauss–Bonnet on the torus)
/// - ∫η dVol = 2π²b(2 − b/√(b²−1)) (deviatoric weight of the potential)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricIntegrals {
    pub spin_sq: f64,
    pub mean_curv_sq: f64,
    pub gauss: f64,
    pub eta: f64,
}

pub fn geometric_integrals(aspect: f64) -> GeometricIntegrals {
    let s = math::sqrt(aspect * aspect - 1.0);
    GeometricIntegrals {
        spin_sq: 4.0 * PI * PI * (aspect - s),
        mean_curv_sq: PI * PI * aspect * aspect / s,
        gauss: 0.0,
        eta: 2.0 * PI * PI * aspect * (2.0 - aspect / s),
    }
}
