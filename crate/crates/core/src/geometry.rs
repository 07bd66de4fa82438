//! Closed-form differential geometry of the axisymmetric torus.
//!
//! The surface is parametrized over `(θ, φ) ∈ [0,2π)²` by
//!
//! ```text
//! X(θ, φ) = ((R + r cos θ) cos φ, (R + r cos θ) sin φ, r sin θ)
//! ```
//!
//! with major radius `R` and minor radius `r`, `0 < r < R`. θ runs around the
//! small (poloidal) circle, φ around the large (toroidal) one. All geometric
//! quantities below are exact closed forms in θ; nothing is discretized here.

use crate::math;

/// Aspect ratios this close to 1 (the horn-torus limit) are rejected: the
/// parallel radius `R + r cos θ` degenerates at θ = π and every `1/√(b²−1)`
/// formula loses all accuracy.
pub const MIN_ASPECT_EXCESS: f64 = 1e-9;

/// Why a pair of radii is not an admissible torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeError {
    /// The minor radius must be strictly positive and finite.
    BadMinorRadius,
    /// The major radius must be strictly greater than the minor one, with
    /// aspect ratio at least `1 + MIN_ASPECT_EXCESS`.
    AspectTooSmall,
    /// A radius was NaN or infinite.
    NotFinite,
}

impl core::fmt::Display for ShapeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ShapeError::BadMinorRadius => write!(f, "minor radius must be positive"),
            ShapeError::AspectTooSmall => write!(
                f,
                "aspect ratio R/r must exceed 1 + {MIN_ASPECT_EXCESS:e}"
            ),
            ShapeError::NotFinite => write!(f, "torus radii must be finite"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ShapeError {}

/// An embedded torus, `0 < r < R`, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusShape {
    major: f64,
    minor: f64,
}

impl TorusShape {
    /// Builds a torus with major radius `major` (= R) and minor radius
    /// `minor` (= r).
    pub fn new(major: f64, minor: f64) -> Result<Self, ShapeError> {
        if !major.is_finite() || !minor.is_finite() {
            return Err(ShapeError::NotFinite);
        }
        if minor <= 0.0 {
            return Err(ShapeError::BadMinorRadius);
        }
        if major / minor <= 1.0 + MIN_ASPECT_EXCESS {
            return Err(ShapeError::AspectTooSmall);
        }
        Ok(TorusShape { major, minor })
    }

    /// Unit minor radius torus with the given aspect ratio `b = R/r`.
    pub fn with_aspect(aspect: f64) -> Result<Self, ShapeError> {
        TorusShape::new(aspect, 1.0)
    }

    /// Major radius R.
    #[inline]
    pub fn major_radius(&self) -> f64 {
        self.major
    }

    /// Minor radius r.
    #[inline]
    pub fn minor_radius(&self) -> f64 {
        self.minor
    }

    /// Aspect ratio b = R/r (> 1).
    #[inline]
    pub fn aspect(&self) -> f64 {
        self.major / self.minor
    }

    /// Distance from the symmetry axis: ρ(θ) = R + r cos θ.
    #[inline]
    pub fn rho(&self, theta: f64) -> f64 {
        self.major + self.minor * math::cos(theta)
    }

    /// Normal curvature along e₁ (the meridian direction): c₁ = 1/r,
    /// constant over the surface.
    #[inline]
    pub fn c1(&self) -> f64 {
        1.0 / self.minor
    }

    /// c₂(θ) = cos θ / ρ(θ), the companion principal-frame curvature.
    #[inline]
    pub fn c2(&self, theta: f64) -> f64 {
        math::cos(theta) / self.rho(theta)
    }

    /// Geodesic curvature κ₂(θ) = −sin θ / ρ(θ) of the parallels
    /// (the meridians are geodesics, κ₁ = 0).
    #[inline]
    pub fn kappa2(&self, theta: f64) -> f64 {
        -math::sin(theta) / self.rho(theta)
    }

    /// The φ-component A₂(θ) = sin θ / ρ(θ) of the spin connection in the
    /// orthonormal coordinate frame; the θ-component vanishes.
    #[inline]
    pub fn spin_a_phi(&self, theta: f64) -> f64 {
        math::sin(theta) / self.rho(theta)
    }

    /// Deviatoric curvature weight η(θ) = (c₁² − c₂²)/2 multiplying
    /// cos 2α in the one-constant energy density.
    #[inline]
    pub fn eta(&self, theta: f64) -> f64 {
        let c1 = self.c1();
        let c2 = self.c2(theta);
        0.5 * (c1 * c1 - c2 * c2)
    }

    /// Supremum of |η| over the surface.
    ///
    /// η(θ) depends on θ through x = cos θ; dη/dx vanishes only at x = 0, so
    /// the extrema lie at θ ∈ {0, π/2, π} and the maximum of the three
    /// absolute values is exact.
    pub fn eta_max_abs(&self) -> f64 {
        let candidates = [
            math::abs(self.eta(0.0)),
            math::abs(self.eta(core::f64::consts::FRAC_PI_2)),
            math::abs(self.eta(core::f64::consts::PI)),
        ];
        let mut best = 0.0;
        for c in candidates {
            if c > best {
                best = c;
            }
        }
        best
    }

    /// Area density √g(θ) = r·ρ(θ): `dVol = √g dθ dφ`.
    #[inline]
    pub fn area_density(&self, theta: f64) -> f64 {
        self.minor * self.rho(theta)
    }

    /// Total surface area 4π²Rr.
    #[inline]
    pub fn area(&self) -> f64 {
        4.0 * core::f64::consts::PI * core::f64::consts::PI * self.major * self.minor
    }

    /// Coefficients of the Laplace–Beltrami operator on scalars,
    /// Δf = a_tt ∂²θf + a_t ∂θf + a_pp ∂²φf.
    #[inline]
    pub fn laplace_coeffs(&self, theta: f64) -> LaplaceCoeffs {
        let r = self.minor;
        let rho = self.rho(theta);
        LaplaceCoeffs {
            a_tt: 1.0 / (r * r),
            a_t: -math::sin(theta) / (r * rho),
            a_pp: 1.0 / (rho * rho),
        }
    }

    /// The full pointwise geometry at a parameter point.
    pub fn geometry_at(&self, point: SurfacePoint) -> GeometrySample {
        let theta = point.theta();
        let phi = point.phi();
        let (frame_e1, frame_e2, normal) = self.frame(theta, phi);
        let rho = self.rho(theta);
        GeometrySample {
            c1: self.c1(),
            c2: self.c2(theta),
            kappa1: 0.0,
            kappa2: self.kappa2(theta),
            spin_a_theta: 0.0,
            spin_a_phi: self.spin_a_phi(theta),
            area_density: self.area_density(theta),
            g_inv_theta: 1.0 / (self.minor * self.minor),
            g_inv_phi: 1.0 / (rho * rho),
            e1: frame_e1,
            e2: frame_e2,
            normal,
        }
    }

    /// Embedding X(θ, φ) ∈ ℝ³.
    pub fn embed(&self, theta: f64, phi: f64) -> [f64; 3] {
        let (st, ct) = math::sin_cos(theta);
        let (sp, cp) = math::sin_cos(phi);
        let rho = self.major + self.minor * ct;
        [rho * cp, rho * sp, self.minor * st]
    }

    /// Orthonormal tangent frame and inner unit normal:
    /// e₁ along ∂θ, e₂ along ∂φ, ν = e₁ × e₂ pointing into the hole.
    pub fn frame(&self, theta: f64, phi: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let (st, ct) = math::sin_cos(theta);
        let (sp, cp) = math::sin_cos(phi);
        let e1 = [-st * cp, -st * sp, ct];
        let e2 = [-sp, cp, 0.0];
        let normal = [-ct * cp, -ct * sp, -st];
        (e1, e2, normal)
    }

    /// Unit director n = cos α e₁ + sin α e₂ at the given point.
    pub fn director(&self, theta: f64, phi: f64, alpha: f64) -> [f64; 3] {
        let (e1, e2, _) = self.frame(theta, phi);
        let (sa, ca) = math::sin_cos(alpha);
        [
            ca * e1[0] + sa * e2[0],
            ca * e1[1] + sa * e2[1],
            ca * e1[2] + sa * e2[2],
        ]
    }

    /// Darboux-frame invariants of the director field at a point, from the
    /// deviation angle and its coordinate partials ∂θα, ∂φα.
    ///
    /// The covariant deviation gradient is w = ∇ₛα − A with orthonormal
    /// components w₁ = ∂θα/r and w₂ = ∂φα/ρ − A₂(θ); the invariants are its
    /// projections on the director n and its tangent normal t, plus the purely
    /// geometric normal curvature and geodesic torsion of n:
    ///
    /// - κ_n = w·n (director-line geodesic curvature, the bend-in-surface part)
    /// - κ_t = w·t (splay, equal to div_s n)
    /// - c_n = c₁cos²α + c₂sin²α (normal curvature along n)
    /// - τ_n = (c₁−c₂) cos α sin α (geodesic torsion; n·curl_s n = −τ_n)
    pub fn darboux_invariants(
        &self,
        theta: f64,
        alpha: f64,
        d_theta_alpha: f64,
        d_phi_alpha: f64,
    ) -> DarbouxInvariants {
        let rho = self.rho(theta);
        let w1 = d_theta_alpha / self.minor;
        let w2 = d_phi_alpha / rho - self.spin_a_phi(theta);
        let (sa, ca) = math::sin_cos(alpha);
        let c1 = self.c1();
        let c2 = self.c2(theta);
        DarbouxInvariants {
            kappa_n: w1 * ca + w2 * sa,
            kappa_t: -w1 * sa + w2 * ca,
            c_n: c1 * ca * ca + c2 * sa * sa,
            tau_n: (c1 - c2) * ca * sa,
        }
    }
}

/// A point on the parameter square, both angles reduced to `[0, 2π)` on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    theta: f64,
    phi: f64,
}

impl SurfacePoint {
    /// Wraps both angles into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        SurfacePoint {
            theta: math::wrap_angle(theta),
            phi: math::wrap_angle(phi),
        }
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Coefficients of the Laplace–Beltrami operator at fixed θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceCoeffs {
    /// Multiplies ∂²θ.
    pub a_tt: f64,
    /// Multiplies ∂θ.
    pub a_t: f64,
    /// Multiplies ∂²φ.
    pub a_pp: f64,
}

/// Pointwise geometric data of the torus in the orthonormal frame (e₁, e₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySample {
    /// Normal curvature along e₁ (meridian direction): 1/r.
    pub c1: f64,
    /// Normal curvature along e₂ (parallel direction): cos θ / ρ.
    pub c2: f64,
    /// Geodesic curvature of meridians (identically zero).
    pub kappa1: f64,
    /// Geodesic curvature of parallels: −sin θ / ρ.
    pub kappa2: f64,
    /// θ-component of the spin connection (identically zero).
    pub spin_a_theta: f64,
    /// φ-component of the spin connection: sin θ / ρ.
    pub spin_a_phi: f64,
    /// Area density √g = rρ.
    pub area_density: f64,
    /// Inverse metric coefficient gᶿᶿ = 1/r².
    pub g_inv_theta: f64,
    /// Inverse metric coefficient gᵠᵠ = 1/ρ².
    pub g_inv_phi: f64,
    /// Unit tangent along ∂θ.
    pub e1: [f64; 3],
    /// Unit tangent along ∂φ.
    pub e2: [f64; 3],
    /// Inner unit normal e₁ × e₂.
    pub normal: [f64; 3],
}

/// Darboux-frame invariants of a director configuration at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxInvariants {
    /// Geodesic curvature of the director integral lines, κ_n = w·n.
    pub kappa_n: f64,
    /// Splay κ_t = w·t = div_s n.
    pub kappa_t: f64,
    /// Normal curvature along the director, c_n.
    pub c_n: f64,
    /// Geodesic torsion τ_n; the twist is n·curl_s n = −τ_n.
    pub tau_n: f64,
}

impl DarbouxInvariants {
    /// |∇ₛn|² = κ_n² + κ_t² + c_n² + τ_n².
    pub fn gradient_norm_squared(&self) -> f64 {
        self.kappa_n * self.kappa_n
            + self.kappa_t * self.kappa_t
            + self.c_n * self.c_n
            + self.tau_n * self.tau_n
    }
}
