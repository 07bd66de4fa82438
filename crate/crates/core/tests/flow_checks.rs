//! The relaxation flow: its right-hand side against a finite-difference
//! energy gradient, dissipation and winding conservation along runs, the
//! step-size monitor, symmetry preservation, determinism, and the classifiers
//! for relaxed states.

mod common;

use common::trig_polynomial;
use nematic_torus::energy::energy_one_constant;
use nematic_torus::flow::{
    build_initial, cfl_max_dt, classify_final, discrete_laplacian, flow_rhs, run_flow,
    uniform_noise_field, FinalState, FlowError, FlowOutcome, FlowParams, InitialData, TimeStep,
};
use nematic_torus::{PeriodicGrid, ScalarField, SectorField, TorusShape, WindingIndex};

const STOP_NEVER: f64 = 1e-300;

fn row_mean(field: &ScalarField, i: usize) -> f64 {
    let row = field.row(i);
    row.iter().sum::<f64>() / row.len() as f64
}

#[test]
fn flow_rhs_is_minus_the_energy_gradient() {
    let shape = TorusShape::with_aspect(1.5).unwrap();
    let grid = PeriodicGrid::new(16, 16).unwrap();
    let cases = [
        (WindingIndex::new(0, 0), 1.0, 71),
        (WindingIndex::new(1, 0), 1.3, 72),
        (WindingIndex::new(1, -1), 1.0, 73),
    ];
    let eps = 1e-6;
    let cell = grid.d_theta() * grid.d_phi();
    for &(index, kappa, seed) in &cases {
        let field = SectorField::new(shape, index, trig_polynomial(grid, seed, 3, 0.8));
        let rhs = flow_rhs(&field, kappa);

        // Finite-difference gradient of the discrete energy, node by node.
        let mut fd = ScalarField::zeros(grid);
        let mut scale: f64 = 0.0;
        for i in 0..grid.n_theta() {
            for j in 0..grid.n_phi() {
                let mut poke = |delta: f64| -> f64 {
                    let mut bumped = field.clone();
                    let v = bumped.periodic_part().at(i, j);
                    bumped.periodic_part_mut().set(i, j, v + delta);
                    energy_one_constant(&bumped, kappa).total
                };
                let grad = (poke(eps) - poke(-eps)) / (2.0 * eps);
                fd.set(i, j, grad);
                scale = scale.max(grad.abs());
            }
        }

        for i in 0..grid.n_theta() {
            let mu = shape.area_density(grid.theta(i));
            for j in 0..grid.n_phi() {
                let predicted = -rhs.at(i, j) * mu * cell;
                let err = (fd.at(i, j) - predicted).abs();
                assert!(
                    err <= 1e-6 * (1.0 + scale),
                    "flow right-hand side is not the negative energy gradient at \
                     node ({i}, {j}), h={index}: fd {} vs {predicted}",
                    fd.at(i, j)
                );
            }
        }
    }
}

#[test]
fn flow_dissipates_energy_and_conserves_winding() {
    let shape = TorusShape::with_aspect(1.7).unwrap();
    let grid = PeriodicGrid::square(32).unwrap();
    let params = FlowParams {
        max_steps: 500,
        stop_tol: STOP_NEVER,
        snapshot_every: 1,
        ..FlowParams::default()
    };
    for &(ht, hp, seed) in &[(0, 0, 14), (1, 0, 15), (0, -1, 16)] {
        let index = WindingIndex::new(ht, hp);
        let initial = SectorField::new(shape, index, trig_polynomial(grid, seed, 3, 1.2));
        let result = run_flow(&initial, &params).unwrap();
        let trace = &result.trace;

        assert_eq!(trace.outcome, FlowOutcome::MaxSteps);
        assert_eq!(trace.steps, 500);
        assert_eq!(trace.snapshots.len(), 501, "snapshot_every=1 records every step");
        assert_eq!(trace.dt, 0.9 * cfl_max_dt(shape, grid, 1.0));

        for pair in trace.snapshots.windows(2) {
            assert!(
                pair[1].energy <= pair[0].energy + 1e-12 * (1.0 + pair[0].energy.abs()),
                "energy rose between steps {} and {} for h={index}",
                pair[0].step,
                pair[1].step
            );
        }
        assert!(
            trace.final_energy() < trace.initial_energy(),
            "500 steps from rough data must dissipate a measurable amount"
        );
        for snap in &trace.snapshots {
            assert_eq!(
                snap.winding,
                Some(index),
                "winding changed by step {} for h={index}",
                snap.step
            );
        }
        assert_eq!(result.field.index(), index);
    }
}

#[test]
fn oversized_time_steps_are_caught_by_the_energy_monitor() {
    let shape = TorusShape::with_aspect(1.5).unwrap();
    let grid = PeriodicGrid::square(16).unwrap();
    let initial = build_initial(
        shape,
        grid,
        WindingIndex::new(0, 0),
        &InitialData::NoisyConstant {
            value: 0.9,
            amplitude: 0.5,
            seed: 3,
        },
    );
    let params = FlowParams {
        time_step: TimeStep::Fixed(3.0 * cfl_max_dt(shape, grid, 1.0)),
        max_steps: 2000,
        stop_tol: STOP_NEVER,
        snapshot_every: 1,
        ..FlowParams::default()
    };
    let result = run_flow(&initial, &params).unwrap();
    match result.trace.outcome {
        FlowOutcome::EnergyIncreased { previous, current, .. } => {
            assert!(current > previous, "the report must carry the offending pair");
        }
        other => panic!("a 3x-CFL step must trip the energy monitor, got {other:?}"),
    }
}

#[test]
fn relaxation_reaches_the_parallel_state_on_a_fat_torus() {
    let shape = TorusShape::with_aspect(2.5).unwrap();
    let grid = PeriodicGrid::square(48).unwrap();
    let initial = build_initial(
        shape,
        grid,
        WindingIndex::new(0, 0),
        &InitialData::NoisyConstant {
            value: 1.0,
            amplitude: 0.4,
            seed: 11,
        },
    );
    let params = FlowParams {
        max_steps: 60_000,
        stop_tol: 1e-10,
        snapshot_every: 50,
        ..FlowParams::default()
    };
    let result = run_flow(&initial, &params).unwrap();
    assert_eq!(result.trace.outcome, FlowOutcome::Converged);
    match classify_final(&result.field) {
        FinalState::Constant { angle } => {
            let off = (angle - 0.5 * core::f64::consts::PI)
                .abs()
                .min((angle - 1.5 * core::f64::consts::PI).abs());
            assert!(
                off < 1e-3,
                "a fat torus must relax to the parallel alignment, got angle {angle}"
            );
        }
        other => panic!("expected a constant relaxed state, got {other:?}"),
    }
    assert!(
        result.trace.final_snapshot().residual_max < 1e-2,
        "stationarity residual should be small at convergence"
    );
}

#[test]
fn band_data_keeps_spatial_structure_on_a_thin_torus() {
    let shape = TorusShape::with_aspect(1.2).unwrap();
    let grid = PeriodicGrid::square(48).unwrap();
    let quarter = 0.25 * core::f64::consts::PI;
    let initial = build_initial(
        shape,
        grid,
        WindingIndex::new(0, 0),
        &InitialData::Band {
            mid: quarter,
            amplitude: quarter,
        },
    );
    let params = FlowParams {
        max_steps: 80_000,
        stop_tol: 1e-9,
        snapshot_every: 50,
        ..FlowParams::default()
    };
    let result = run_flow(&initial, &params).unwrap();
    match classify_final(&result.field) {
        FinalState::NonConstant { range } => {
            assert!(range > 0.5, "the relaxed band should keep a wide profile, got {range}");
        }
        other => panic!("a thin torus must keep the banded structure, got {other:?}"),
    }
    let totals = result.field.total();
    let outer = row_mean(&totals, 0);
    let inner = row_mean(&totals, grid.n_theta() / 2);
    assert!(
        outer - inner > 0.5,
        "the profile must stay peaked on the outer ring: outer {outer}, inner {inner}"
    );
}

#[test]
fn flow_preserves_the_double_reflection_symmetry() {
    let shape = TorusShape::with_aspect(1.7).unwrap();
    let grid = PeriodicGrid::square(32).unwrap();
    let u0 = ScalarField::from_fn(grid, |theta, phi| {
        0.3 * theta.sin() + 0.2 * (theta + phi).sin()
    });
    assert!(u0.two_odd_defect() < 1e-13, "the seed profile is odd under double reflection");
    let initial = SectorField::new(shape, WindingIndex::new(1, 1), u0);
    let params = FlowParams {
        max_steps: 200,
        stop_tol: STOP_NEVER,
        snapshot_every: 50,
        ..FlowParams::default()
    };
    let result = run_flow(&initial, &params).unwrap();
    let defect = result.field.periodic_part().two_odd_defect();
    assert!(
        defect < 1e-12,
        "the flow must preserve double-reflection symmetry, defect {defect}"
    );
}

#[test]
fn flows_are_deterministic() {
    let shape = TorusShape::with_aspect(1.6).unwrap();
    let grid = PeriodicGrid::square(32).unwrap();
    let data = InitialData::NoisyConstant {
        value: 0.7,
        amplitude: 0.3,
        seed: 99,
    };
    let params = FlowParams {
        max_steps: 300,
        stop_tol: STOP_NEVER,
        snapshot_every: 25,
        ..FlowParams::default()
    };
    let run = || {
        let initial = build_initial(shape, grid, WindingIndex::new(1, 0), &data);
        run_flow(&initial, &params).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first.field, second.field, "identical runs must agree bitwise");
    assert_eq!(first.trace.snapshots.len(), second.trace.snapshots.len());
    for (a, b) in first.trace.snapshots.iter().zip(&second.trace.snapshots) {
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.residual_max.to_bits(), b.residual_max.to_bits());
    }
}

#[test]
fn final_state_classifier_and_initial_builders() {
    let shape = TorusShape::with_aspect(1.8).unwrap();
    let grid = PeriodicGrid::square(16).unwrap();

    let constant = SectorField::constant(shape, grid, WindingIndex::new(0, 0), 2.0);
    match classify_final(&constant) {
        FinalState::Constant { angle } => assert!((angle - 2.0).abs() < 1e-12),
        other => panic!("constant field misclassified: {other:?}"),
    }
    let wrapped = SectorField::constant(
        shape,
        grid,
        WindingIndex::new(0, 0),
        core::f64::consts::TAU + 0.3,
    );
    match classify_final(&wrapped) {
        FinalState::Constant { angle } => assert!(
            (angle - 0.3).abs() < 1e-12,
            "reported angle must sit in [0, 2pi), got {angle}"
        ),
        other => panic!("constant field misclassified: {other:?}"),
    }

    let band = build_initial(
        shape,
        grid,
        WindingIndex::new(0, 0),
        &InitialData::Band { mid: 0.8, amplitude: 0.5 },
    );
    for i in 0..grid.n_theta() {
        let expected = 0.8 + 0.5 * grid.theta(i).cos();
        assert!(
            (band.periodic_part().at(i, 3) - expected).abs() < 1e-14,
            "band profile wrong at row {i}"
        );
    }
    assert!(matches!(
        classify_final(&band),
        FinalState::NonConstant { range } if (range - 1.0).abs() < 1e-12
    ));

    let noise = uniform_noise_field(grid, 5, 0.2);
    assert!(noise.max_abs() <= 0.2, "noise must respect its amplitude bound");
    assert_eq!(
        noise,
        uniform_noise_field(grid, 5, 0.2),
        "the noise stream is seeded and reproducible"
    );
    assert_ne!(noise, uniform_noise_field(grid, 6, 0.2));
    let mean = noise.as_slice().iter().sum::<f64>() / grid.node_count() as f64;
    assert!(mean.abs() < 0.05, "noise should be nearly centered, mean {mean}");
}

#[test]
fn discrete_laplacian_matches_the_smooth_operator() {
    let shape = TorusShape::with_aspect(1.5).unwrap();
    let max_error = |n: usize| -> f64 {
        let grid = PeriodicGrid::square(n).unwrap();
        let field = SectorField::new(
            shape,
            WindingIndex::new(0, 0),
            ScalarField::from_fn(grid, |theta, phi| theta.cos() + 0.5 * phi.sin()),
        );
        let lap = discrete_laplacian(&field);
        let r = shape.minor_radius();
        let mut worst: f64 = 0.0;
        for i in 0..grid.n_theta() {
            let theta = grid.theta(i);
            let rho = shape.rho(theta);
            for j in 0..grid.n_phi() {
                let phi = grid.phi(j);
                let exact = -theta.cos() / (r * r) + theta.sin() * theta.sin() / (r * rho)
                    - 0.5 * phi.sin() / (rho * rho);
                worst = worst.max((lap.at(i, j) - exact).abs());
            }
        }
        worst
    };
    let coarse = max_error(64);
    let fine = max_error(128);
    assert!(coarse < 1e-2, "64x64 defect unexpectedly large: {coarse}");
    let order = (coarse / fine).log2();
    assert!(
        (1.8..=2.2).contains(&order),
        "the flux stencil should be second-order accurate, got order {order:.3}"
    );
}

#[test]
fn step_size_bound_and_parameter_guards() {
    let shape = TorusShape::with_aspect(1.5).unwrap();
    let coarse = cfl_max_dt(shape, PeriodicGrid::square(64).unwrap(), 1.0);
    let fine = cfl_max_dt(shape, PeriodicGrid::square(128).unwrap(), 1.0);
    assert!(coarse > 0.0 && fine > 0.0);
    let ratio = coarse / fine;
    assert!(
        (3.5..=4.3).contains(&ratio),
        "the stable step should shrink by about 4x per refinement, got {ratio:.3}"
    );
    assert!(
        cfl_max_dt(shape, PeriodicGrid::square(64).unwrap(), 2.0) < coarse,
        "a larger modulus tightens the step bound"
    );

    let bad = [
        FlowParams { kappa: -1.0, ..FlowParams::default() },
        FlowParams { kappa: f64::NAN, ..FlowParams::default() },
        FlowParams { time_step: TimeStep::Fixed(0.0), ..FlowParams::default() },
        FlowParams { time_step: TimeStep::Auto { safety: 1.5 }, ..FlowParams::default() },
        FlowParams { max_steps: 0, ..FlowParams::default() },
        FlowParams { stop_tol: 0.0, ..FlowParams::default() },
        FlowParams { snapshot_every: 0, ..FlowParams::default() },
    ];
    for params in &bad {
        assert!(
            matches!(params.validate(), Err(FlowError::InvalidParams(_))),
            "parameters should have been rejected: {params:?}"
        );
    }
}
