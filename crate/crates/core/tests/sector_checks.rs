//! Winding sectors: the poloidal antiderivative, harmonic lifts, winding
//! measurement, and total-angle decomposition, checked against adaptive
//! quadrature and the discrete Laplacian.

mod common;

use common::{adaptive_simpson, axisymmetric_integral, rel_err, trig_polynomial, TAU};
use nematic_torus::flow::discrete_laplacian;
use nematic_torus::sectors::{
    decompose, harmonic_lift, harmonic_lift_field, lift_dirichlet_integral,
    poloidal_antiderivative, winding_of, SectorError,
};
use nematic_torus::{PeriodicGrid, ScalarField, SectorField, TorusShape, WindingIndex};

#[test]
fn poloidal_antiderivative_matches_quadrature() {
    let thetas = [
        0.3, 1.0, 2.9, 3.4, 6.0, 7.4, 11.9, -2.4, -9.0, 15.2,
    ];
    for &b in &[1.05, 1.3, 2.0, 5.0] {
        for &theta in &thetas {
            let reference = adaptive_simpson(&|u: f64| 1.0 / (b + u.cos()), 0.0, theta, 1e-13);
            let value = poloidal_antiderivative(b, theta);
            assert!(
                rel_err(value, reference) < 1e-11,
                "antiderivative off at b={b}, theta={theta}: {value} vs {reference}"
            );
        }
    }
}

#[test]
fn poloidal_antiderivative_symmetries() {
    for &b in &[1.02, 1.4, 3.0] {
        let s = (b * b - 1.0f64).sqrt();
        let period = TAU / s;
        for k in 0..40 {
            let theta = -7.0 + 0.37 * k as f64;
            let f = poloidal_antiderivative(b, theta);
            let f_neg = poloidal_antiderivative(b, -theta);
            assert!((f + f_neg).abs() < 1e-12 * (1.0 + f.abs()), "not odd at {theta}");
            let f_shift = poloidal_antiderivative(b, theta + TAU);
            assert!(
                (f_shift - f - period).abs() < 1e-12 * (1.0 + f_shift.abs()),
                "period defect at b={b}, theta={theta}"
            );
        }
        // Continuity through the two seams of the reduced representation.
        for &seam in &[core::f64::consts::PI, TAU, -core::f64::consts::PI, 3.0 * TAU] {
            let eps = 1e-8;
            let jump = poloidal_antiderivative(b, seam + eps) - poloidal_antiderivative(b, seam - eps);
            let slope_bound = 1.0 / (b - 1.0);
            assert!(
                jump.abs() <= 4.0 * eps * slope_bound,
                "seam jump at b={b}, seam={seam}: {jump}"
            );
            assert!(jump > 0.0, "antiderivative must be strictly increasing");
        }
    }
}

#[test]
fn harmonic_lift_is_additive_and_odd() {
    let shape = TorusShape::with_aspect(1.6).unwrap();
    let pairs = [(1, 0), (0, 1), (2, -1), (-3, 2)];
    for k in 0..25 {
        let theta = -5.0 + 0.41 * k as f64;
        let phi = 0.13 + 0.52 * k as f64;
        for &(ht, hp) in &pairs {
            let h = WindingIndex::new(ht, hp);
            let lift = harmonic_lift(shape, h, theta, phi);
            let via_parts = f64::from(ht) * harmonic_lift(shape, WindingIndex::new(1, 0), theta, phi)
                + f64::from(hp) * harmonic_lift(shape, WindingIndex::new(0, 1), theta, phi);
            assert!(
                (lift - via_parts).abs() < 1e-11 * (1.0 + lift.abs()),
                "lift not additive in the winding pair at ({ht}, {hp})"
            );
            let odd = harmonic_lift(shape, h, -theta, -phi);
            assert!(
                (lift + odd).abs() < 1e-11 * (1.0 + lift.abs()),
                "lift not odd under (theta, phi) -> (-theta, -phi)"
            );
        }
    }
}

/// The lift solves the continuum Laplace equation, so the flux-form discrete
/// Laplacian applied to a pure-lift sector field must shrink at second order.
#[test]
fn harmonic_lift_has_second_order_laplacian_defect() {
    let shape = TorusShape::with_aspect(1.4).unwrap();
    let index = WindingIndex::new(2, 1);
    let defect = |n: usize| -> f64 {
        let grid = PeriodicGrid::square(n).unwrap();
        let field = SectorField::constant(shape, grid, index, 0.0);
        discrete_laplacian(&field).max_abs()
    };
    let coarse = defect(64);
    let fine = defect(128);
    assert!(coarse < 5e-3, "lift Laplacian defect too large on 64x64: {coarse}");
    let order = (coarse / fine).log2();
    assert!(
        (1.8..=2.2).contains(&order),
        "lift harmonicity defect should vanish at second order, got {order:.3}"
    );
}

#[test]
fn lift_dirichlet_integral_matches_quadrature() {
    for &b in &[1.2, 1.7, 3.5] {
        for &(ht, hp) in &[(1, 0), (0, 1), (2, -1), (3, 3)] {
            let index = WindingIndex::new(ht, hp);
            let s = (b * b - 1.0f64).sqrt();
            // |grad psi|^2 dVol with d(theta)psi = h_theta s/(b + cos theta)
            // and d(phi)psi = h_phi; the r factors cancel, leaving the r-free
            // density (b + cos theta).
            let g = |theta: f64| {
                let rho_over_r = b + theta.cos();
                let grad_theta = f64::from(ht) * s / rho_over_r;
                (grad_theta * grad_theta
                    + f64::from(hp) * f64::from(hp) / (rho_over_r * rho_over_r))
                    * rho_over_r
            };
            let reference = axisymmetric_integral(&g, 1e-13);
            let value = lift_dirichlet_integral(b, index);
            assert!(
                rel_err(value, reference) < 1e-11,
                "Dirichlet integral off at b={b}, h=({ht}, {hp}): {value} vs {reference}"
            );
        }
    }
}

#[test]
fn winding_measurement_is_exact_on_smooth_fields() {
    let shape = TorusShape::with_aspect(1.4).unwrap();
    let grid = PeriodicGrid::new(48, 40).unwrap();
    let mut seed = 100;
    for ht in -2..=2 {
        for hp in -2..=2 {
            seed += 1;
            let index = WindingIndex::new(ht, hp);
            let u = trig_polynomial(grid, seed, 3, 0.5);
            let total = SectorField::new(shape, index, u).total();
            let measured = winding_of(&total).expect("smooth field must have coherent winding");
            assert_eq!(measured.index, index, "winding misread for h=({ht}, {hp})");
            assert!(
                measured.residual_theta < 1e-10 && measured.residual_phi < 1e-10,
                "loop residuals should be pure roundoff, got ({}, {})",
                measured.residual_theta,
                measured.residual_phi
            );
        }
    }
}

#[test]
fn winding_rejects_fields_with_incoherent_loops() {
    let grid = PeriodicGrid::square(32).unwrap();
    // Half the theta-rows carry one full phi-turn, half carry none: the
    // averaged phi-winding sits at 1/2 turn, far outside the residual band.
    let split = ScalarField::from_fn(grid, |theta, phi| {
        if theta < core::f64::consts::PI {
            phi
        } else {
            0.0
        }
    });
    match winding_of(&split) {
        Err(SectorError::NonIntegerWinding { raw_theta, raw_phi }) => {
            assert!(raw_theta.abs() < 1e-10, "theta loops are coherent here");
            assert!(
                (raw_phi - 0.5).abs() < 1e-10,
                "phi average should sit at half a turn, got {raw_phi}"
            );
        }
        other => panic!("expected NonIntegerWinding, got {other:?}"),
    }
}

#[test]
fn decompose_round_trips_the_total_angle() {
    let shape = TorusShape::with_aspect(2.0).unwrap();
    let grid = PeriodicGrid::new(40, 56).unwrap();
    for &(ht, hp, seed) in &[(0, 0, 5), (1, 0, 6), (-1, 2, 7), (2, 2, 8)] {
        let index = WindingIndex::new(ht, hp);
        let u = trig_polynomial(grid, seed, 2, 0.6);
        let built = SectorField::new(shape, index, u.clone());
        let total = built.total();

        let recovered = decompose(&total, shape).expect("decomposition must succeed");
        assert_eq!(recovered.index(), index);
        let mut max_diff: f64 = 0.0;
        for (a, b) in recovered
            .periodic_part()
            .as_slice()
            .iter()
            .zip(u.as_slice())
        {
            max_diff = max_diff.max((a - b).abs());
        }
        assert!(
            max_diff < 1e-12,
            "periodic part not recovered exactly, max diff {max_diff}"
        );

        // And the sector field reproduces the stored totals node for node.
        let back = recovered.total();
        for i in 0..grid.n_theta() {
            for j in 0..grid.n_phi() {
                assert!(
                    (back.at(i, j) - total.at(i, j)).abs() < 1e-12,
                    "total mismatch at node ({i}, {j})"
                );
                assert!(
                    (recovered.total_at(i, j) - total.at(i, j)).abs() < 1e-12,
                    "total_at disagrees with the assembled field at ({i}, {j})"
                );
            }
        }
    }
}

#[test]
fn lift_field_matches_pointwise_lift() {
    let shape = TorusShape::with_aspect(1.9).unwrap();
    let grid = PeriodicGrid::new(16, 24).unwrap();
    let index = WindingIndex::new(-1, 3);
    let field = harmonic_lift_field(shape, grid, index);
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            let direct = harmonic_lift(shape, index, grid.theta(i), grid.phi(j));
            assert!(
                (field.at(i, j) - direct).abs() < 1e-14 * (1.0 + direct.abs()),
                "sampled lift differs from the pointwise lift at ({i}, {j})"
            );
        }
    }
}

#[test]
fn winding_index_displays_as_a_pair() {
    assert_eq!(WindingIndex::new(2, -1).to_string(), "(2, -1)");
    assert_eq!(WindingIndex::new(0, 0).to_string(), "(0, 0)");
}
