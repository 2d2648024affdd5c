//! Error growth as evaluation circles approach the boundary.
use std::f64::consts::TAU;

use vortex_panel::boundary_method::{solve_boundary, sup_error_on_set, EvalSet};
use vortex_panel::{Point2, VorticityConfig};

const GAPS: [f64; 3] = [0.5, 0.25, 0.125];

fn sup_error_at_gap(config: &VorticityConfig, n: usize, gap: f64) -> f64 {
    let problem = solve_boundary(config, n).unwrap();
    let points = EvalSet::Circle { radius: 1.0 + gap, points: 720 }.points().unwrap();
    sup_error_on_set(&problem, &points).unwrap()
}

fn bound_constant(config: &VorticityConfig, n: usize) -> f64 {
    GAPS.iter()
        .map(|&d| sup_error_at_gap(config, n, d) * d.powi(4) * (n * n) as f64)
        .fold(0.0, f64::max)
}

fn assert_gap_scaling(config: &VorticityConfig) {
    let constants: Vec<f64> = [16, 32, 64].iter().map(|&n| bound_constant(config, n)).collect();
    for pair in constants.windows(2) {
        assert!(pair[1] <= pair[0], "bound constants {constants:?} grow with n");
    }
}

#[test]
fn single_vortex_error_grows_no_faster_than_inverse_fourth_power() {
    let config = VorticityConfig::single_vortex(Point2::new(2.0, 0.0), TAU, 0.5).unwrap();
    assert_gap_scaling(&config);
}

#[test]
fn two_vortex_error_grows_no_faster_than_inverse_fourth_power() {
    let config = VorticityConfig::new(
        vec![
            vortex_panel::PointVortex::new(Point2::new(1.8, 0.6), TAU),
            vortex_panel::PointVortex::new(Point2::new(-1.3, -1.2), -2.0),
        ],
        vec![],
        0.3,
    )
    .unwrap();
    assert_gap_scaling(&config);
}
