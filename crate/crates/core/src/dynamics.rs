//! Free point vortices advected by each other and by the boundary vortex sheet.
//!
//! Each free vortex moves with the plane field of the others plus the
//! approximate remainder flow `u_app`, whose boundary densities are recomputed
//! from the instantaneous positions at every Runge–Kutta stage. The boundary
//! circulation `γ` is held constant. With no boundary the system reduces to
//! the classical plane point-vortex equations.
//!
//! The optional regularization replaces `|d|²` by `|d|² + δ²` in the
//! vortex-vortex interaction only; the boundary data always uses the exact
//! kernel.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::boundary_method::{BoundaryProblem, BoundarySolver};
use crate::error::{Error, Result};
use crate::fields::{PointVortex, VorticityConfig};
use crate::kernels::{Point2, Vec2};

/// Smallest admissible pairwise distance for the unregularized kernel.
pub const COLLISION_CUTOFF: f64 = 1e-8;

/// Smallest admissible clearance `|y_k| - 1` in exterior runs.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

/// Positions and constant strengths of the free vortices at time `time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeVortexState {
    pub positions: Vec<Point2>,
    pub strengths: Vec<f64>,
    #[serde(default)]
    pub time: f64,
}

impl FreeVortexState {
    pub fn new(positions: Vec<Point2>, strengths: Vec<f64>) -> Result<Self> {
        let state = Self {
            positions,
            strengths,
            time: 0.0,
        };
        state.check_shape()?;
        Ok(state)
    }

    fn check_shape(&self) -> Result<()> {
        if self.positions.len() != self.strengths.len() {
            return Err(Error::SizeMismatch {
                expected: self.positions.len(),
                got: self.strengths.len(),
            });
        }
        if self.positions.iter().any(|p| !p.is_finite()) || self.strengths.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("vortex state has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `Σ α_k`.
    pub fn total_circulation(&self) -> f64 {
        self.strengths.iter().sum()
    }

    /// `min_k |y_k| - 1`, or `None` without vortices.
    pub fn min_boundary_distance(&self) -> Option<f64> {
        self.positions
            .iter()
            .map(|p| p.norm() - 1.0)
            .reduce(f64::min)
    }

    /// Smallest pairwise distance, or `None` for fewer than two vortices.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = (self.positions[i] - self.positions[j]).norm();
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }

    fn check_boundary(&self) -> Result<()> {
        for (index, p) in self.positions.iter().enumerate() {
            let radius = p.norm();
            if !(radius > 1.0 + BOUNDARY_MARGIN) {
                return Err(Error::BoundaryCollision { index, radius });
            }
        }
        Ok(())
    }

    fn check_collisions(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let distance = (self.positions[i] - self.positions[j]).norm();
                if !(distance > COLLISION_CUTOFF) {
                    return Err(Error::Collision {
                        first: i,
                        second: j,
                        distance,
                    });
                }
            }
        }
        Ok(())
    }

    fn advanced(&self, velocity: &[Vec2], h: f64) -> Self {
        Self {
            positions: self
                .positions
                .iter()
                .zip(velocity)
                .map(|(&p, &v)| p + v * h)
                .collect(),
            strengths: self.strengths.clone(),
            time: self.time + h,
        }
    }

    fn to_config(&self, gamma: f64) -> VorticityConfig {
        VorticityConfig {
            vortices: self
                .positions
                .iter()
                .zip(&self.strengths)
                .map(|(&p, &s)| PointVortex::new(p, s))
                .collect(),
            blobs: Vec::new(),
            gamma,
            separation_margin: BOUNDARY_MARGIN,
        }
    }
}

/// Time stepping parameters. `n_boundary = None` runs the plane system without an obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub n_boundary: Option<usize>,
    #[serde(default)]
    pub gamma: f64,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub blob_delta: f64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be positive and finite, got {}", self.dt)));
        }
        if !(self.blob_delta >= 0.0) || !self.blob_delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "blob_delta must be non-negative and finite, got {}",
                self.blob_delta
            )));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidArgument("gamma must be finite".into()));
        }
        if let Some(n) = self.n_boundary {
            if n < 2 {
                return Err(Error::InvalidArgument(format!("n_boundary must be at least 2, got {n}")));
            }
        }
        Ok(())
    }
}

/// `ẏ_k = (1/2π) Σ_{j≠k} α_j (y_k - y_j)^⊥ / (|y_k - y_j|² + δ²)`.
pub fn rhs_free_plane(state: &FreeVortexState, blob_delta: f64) -> Result<Vec<Vec2>> {
    state.check_shape()?;
    if blob_delta == 0.0 {
        state.check_collisions()?;
    }
    let d2 = blob_delta * blob_delta;
    let m = state.len();
    let mut out = vec![Vec2::ZERO; m];
    for k in 0..m {
        for j in 0..m {
            if j == k {
                continue;
            }
            let d = state.positions[k] - state.positions[j];
            let denom = d.norm_sq() + d2;
            if denom > 0.0 {
                out[k] += d.perp() * (state.strengths[j] / (TAU * denom));
            }
        }
    }
    Ok(out)
}

/// The right-hand side of the combined method, with the boundary system factorized once.
#[derive(Debug, Clone)]
pub struct CombinedDynamics {
    solver: Option<BoundarySolver>,
    gamma: f64,
    blob_delta: f64,
}

impl CombinedDynamics {
    pub fn new(sim: &SimulationConfig) -> Result<Self> {
        sim.validate()?;
        Ok(Self {
            solver: sim.n_boundary.map(BoundarySolver::new).transpose()?,
            gamma: sim.gamma,
            blob_delta: sim.blob_delta,
        })
    }

    pub fn has_boundary(&self) -> bool {
        self.solver.is_some()
    }

    /// Velocities of all free vortices and, in exterior runs, the boundary solve they used.
    pub fn rhs_with_problem(&self, state: &FreeVortexState) -> Result<(Vec<Vec2>, Option<BoundaryProblem>)> {
        let mut velocity = rhs_free_plane(state, self.blob_delta)?;
        let Some(solver) = &self.solver else {
            return Ok((velocity, None));
        };
        state.check_boundary()?;
        let problem = solver.solve(&state.to_config(self.gamma))?;
        for (v, &y) in velocity.iter_mut().zip(&state.positions) {
            *v += problem.velocity_approx(y)?;
        }
        Ok((velocity, Some(problem)))
    }

    pub fn rhs(&self, state: &FreeVortexState) -> Result<Vec<Vec2>> {
        Ok(self.rhs_with_problem(state)?.0)
    }

    /// One classical Runge–Kutta step; negative `dt` integrates backward.
    pub fn step(&self, state: &FreeVortexState, dt: f64) -> Result<FreeVortexState> {
        Ok(self.step_with_problem(state, dt)?.0)
    }

    fn step_with_problem(
        &self,
        state: &FreeVortexState,
        dt: f64,
    ) -> Result<(FreeVortexState, Option<BoundaryProblem>)> {
        let (k1, problem) = self.rhs_with_problem(state)?;
        let k2 = self.rhs(&state.advanced(&k1, dt / 2.0))?;
        let k3 = self.rhs(&state.advanced(&k2, dt / 2.0))?;
        let k4 = self.rhs(&state.advanced(&k3, dt))?;
        let combined: Vec<Vec2> = (0..state.len())
            .map(|k| (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (1.0 / 6.0))
            .collect();
        Ok((state.advanced(&combined, dt), problem))
    }
}

/// Velocities of the combined method for one state.
pub fn rhs_combined(state: &FreeVortexState, sim: &SimulationConfig) -> Result<Vec<Vec2>> {
    CombinedDynamics::new(sim)?.rhs(state)
}

pub fn step_rk4(state: &FreeVortexState, sim: &SimulationConfig) -> Result<FreeVortexState> {
    CombinedDynamics::new(sim)?.step(state, sim.dt)
}

/// Per-state diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub time: f64,
    pub total_circulation: f64,
    pub min_boundary_distance: Option<f64>,
    /// `⟨γ^N⟩` of the boundary solve at this state.
    pub mean_density: Option<f64>,
}

/// Recorded states, one diagnostics entry per state, and the abort reason if stepping failed.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<FreeVortexState>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub warnings: Vec<String>,
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn last(&self) -> &FreeVortexState {
        self.states.last().expect("a trajectory holds its initial state")
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    /// `max_t |⟨γ^N(t)⟩ - γ|` over recorded states.
    pub fn circulation_drift(&self, gamma: f64) -> Option<f64> {
        self.diagnostics
            .iter()
            .filter_map(|d| d.mean_density)
            .map(|m| (m - gamma).abs())
            .reduce(f64::max)
    }
}

fn diagnostics(step: usize, state: &FreeVortexState, problem: Option<&BoundaryProblem>) -> StepDiagnostics {
    StepDiagnostics {
        step,
        time: state.time,
        total_circulation: state.total_circulation(),
        min_boundary_distance: problem.and(state.min_boundary_distance()),
        mean_density: problem.map(|p| p.densities().mean()),
    }
}

/// Integrates `sim.steps` steps of size `sim.dt`.
///
/// Invalid initial data is an error. A collision during stepping stops
/// the run and is reported in [`Trajectory::failure`] with every state
/// reached so far.
pub fn simulate(initial: &FreeVortexState, sim: &SimulationConfig) -> Result<Trajectory> {
    let dynamics = CombinedDynamics::new(sim)?;
    initial.check_shape()?;
    if dynamics.has_boundary() {
        initial.check_boundary().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    if sim.blob_delta == 0.0 {
        initial.check_collisions().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }

    let mut warnings = Vec::new();
    let (v0, _) = dynamics.rhs_with_problem(initial)?;
    let speed = v0.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let length = if dynamics.has_boundary() {
        initial.min_boundary_distance()
    } else {
        initial.min_separation()
    };
    if let Some(length) = length {
        if speed * sim.dt > 0.1 * length {
            warnings.push(format!(
                "dt = {} moves a vortex {:.3e}, more than a tenth of the clearance {:.3e}",
                sim.dt,
                speed * sim.dt,
                length
            ));
        }
    }

    let mut states = vec![initial.clone()];
    let mut diags = Vec::with_capacity(sim.steps + 1);
    let mut failure = None;
    for step in 0..sim.steps {
        let current = states.last().expect("nonempty");
        match dynamics.step_with_problem(current, sim.dt) {
            Ok((next, problem)) => {
                diags.push(diagnostics(step, current, problem.as_ref()));
                states.push(next);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let last_index = states.len() - 1;
    let last = &states[last_index];
    match dynamics.rhs_with_problem(last) {
        Ok((_, problem)) => diags.push(diagnostics(last_index, last, problem.as_ref())),
        Err(e) => {
            diags.push(diagnostics(last_index, last, None));
            failure.get_or_insert(e);
        }
    }
    Ok(Trajectory {
        states,
        diagnostics: diags,
        warnings,
        failure,
    })
}

/// Self-advection speed `(1/2π)[(γ + Γ)/d - Γ d/(d² - 1)]` of a lone vortex at distance `d` outside the disk.
pub fn single_vortex_speed(strength: f64, distance: f64, gamma: f64) -> f64 {
    ((gamma + strength) / distance - strength * distance / (distance * distance - 1.0)) / TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn plane(dt: f64, steps: usize) -> SimulationConfig {
        SimulationConfig {
            n_boundary: None,
            gamma: 0.0,
            dt,
            steps,
            blob_delta: 0.0,
        }
    }

    fn exterior(n: usize, gamma: f64, dt: f64, steps: usize) -> SimulationConfig {
        SimulationConfig {
            n_boundary: Some(n),
            gamma,
            dt,
            steps,
            blob_delta: 0.0,
        }
    }

    fn single(d: f64, strength: f64) -> FreeVortexState {
        FreeVortexState::new(vec![Point2::new(d, 0.0)], vec![strength]).unwrap()
    }

    #[test]
    fn lone_plane_vortex_is_still() {
        let v = rhs_free_plane(&single(3.0, 1.0), 0.0).unwrap();
        assert_eq!(v, vec![Vec2::ZERO]);
    }

    #[test]
    fn equal_pair_rotates_about_midpoint() {
        let gamma = 1.7;
        let s = FreeVortexState::new(vec![Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)], vec![gamma, gamma]).unwrap();
        let v = rhs_free_plane(&s, 0.0).unwrap();
        let speed = gamma / (4.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(v[0].u1, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(v[0].u2, speed, epsilon = 1e-16);
        assert_abs_diff_eq!(v[1].u2, -speed, epsilon = 1e-16);
    }

    #[test]
    fn pair_separation_is_conserved_over_a_period() {
        let gamma = TAU;
        let s = FreeVortexState::new(vec![Point2::new(1.0, 0.0), Point2::new(-1.0, 0.0)], vec![gamma, gamma]).unwrap();
        // angular speed Γ/(π D²) with separation D = 2
        let period = TAU / (gamma / (std::f64::consts::PI * 4.0));
        let steps = 2000;
        let traj = simulate(&s, &plane(period / steps as f64, steps)).unwrap();
        assert!(traj.completed());
        for st in &traj.states {
            assert!(((st.positions[0] - st.positions[1]).norm() - 2.0).abs() <= 1e-8);
        }
        assert!((traj.last().positions[0] - Point2::new(1.0, 0.0)).norm() <= 1e-8);
    }

    #[test]
    fn regularized_kernel_tolerates_coincident_vortices() {
        let s = FreeVortexState::new(vec![Point2::new(2.0, 2.0), Point2::new(2.0, 2.0)], vec![1.0, -1.0]).unwrap();
        let v = rhs_free_plane(&s, 0.1).unwrap();
        assert!(v.iter().all(|u| u.is_finite()));
        assert!(matches!(rhs_free_plane(&s, 0.0), Err(Error::Collision { .. })));
    }

    #[test]
    fn single_vortex_self_advection_matches_images() {
        let (d, strength) = (2.0, TAU);
        let v = rhs_combined(&single(d, strength), &exterior(256, 0.0, 1e-3, 1)).unwrap();
        let expected = single_vortex_speed(strength, d, 0.0);
        assert_abs_diff_eq!(expected, -1.0 / 6.0, epsilon = 1e-15);
        assert!(v[0].u1.abs() <= 1e-6);
        assert!((v[0].u2 - expected).abs() <= 1e-6);
    }

    #[test]
    fn zero_strength_vortex_rides_the_harmonic_field() {
        let d = 2.5;
        let v = rhs_combined(&single(d, 0.0), &exterior(256, TAU, 1e-3, 1)).unwrap();
        assert!(v[0].u1.abs() <= 1e-8);
        assert!((v[0].u2 - 1.0 / d).abs() <= 1e-8);
    }

    #[test]
    fn mirror_pair_has_mirror_velocities() {
        let s = FreeVortexState::new(vec![Point2::new(2.0, 0.7), Point2::new(2.0, -0.7)], vec![1.3, -1.3]).unwrap();
        let v = rhs_combined(&s, &exterior(128, 0.0, 1e-3, 1)).unwrap();
        assert!((v[0].u1 - v[1].u1).abs() <= 1e-9);
        assert!((v[0].u2 + v[1].u2).abs() <= 1e-9);
    }

    #[test]
    fn boundary_collisions_are_reported() {
        let dynamics = CombinedDynamics::new(&exterior(32, 0.0, 0.1, 1)).unwrap();
        assert!(matches!(
            dynamics.rhs(&single(1.0 + 1e-7, 1.0)),
            Err(Error::BoundaryCollision { index: 0, .. })
        ));
        assert!(matches!(
            simulate(&single(0.5, 1.0), &exterior(32, 0.0, 0.1, 1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn abort_keeps_partial_trajectory() {
        // a dipole heading for the wall, with a step longer than the gap
        let s = FreeVortexState::new(vec![Point2::new(1.8, 0.05), Point2::new(1.8, -0.05)], vec![-1.0, 1.0]).unwrap();
        let traj = simulate(&s, &exterior(64, 0.0, 1.0, 400)).unwrap();
        assert!(!traj.completed());
        assert!(traj.states.len() >= 1 && traj.states.len() < 401);
        assert_eq!(traj.states.len(), traj.diagnostics.len());
        assert!(matches!(
            traj.failure,
            Some(Error::BoundaryCollision { .. } | Error::Collision { .. })
        ));
    }

    #[test]
    fn still_state_stays_still() {
        let traj = simulate(&single(2.0, 0.0), &exterior(32, 0.0, 0.1, 10)).unwrap();
        assert!(traj.completed());
        for st in &traj.states {
            assert_eq!(st.positions, vec![Point2::new(2.0, 0.0)]);
        }
    }

    #[test]
    fn diagnostics_and_warning() {
        let sim = exterior(64, 0.4, 0.01, 20);
        let s = FreeVortexState::new(vec![Point2::new(2.0, 0.0), Point2::new(-1.5, 1.5)], vec![1.0, -0.5]).unwrap();
        let traj = simulate(&s, &sim).unwrap();
        assert!(traj.warnings.is_empty());
        assert_eq!(traj.diagnostics.len(), 21);
        assert!(traj.circulation_drift(0.4).unwrap() <= 1e-12);
        for d in &traj.diagnostics {
            assert_eq!(d.total_circulation, 0.5);
            assert!(d.min_boundary_distance.unwrap() > 0.0);
        }
        let coarse = SimulationConfig { dt: 5.0, steps: 0, ..sim };
        let traj = simulate(&s, &coarse).unwrap();
        assert_eq!(traj.warnings.len(), 1);
    }

    #[test]
    fn orbit_radius_over_a_partial_revolution() {
        let d = 2.0;
        let omega = single_vortex_speed(TAU, d, 0.0) / d;
        let steps = 2000;
        let dt = 0.01;
        let traj = simulate(&single(d, TAU), &exterior(128, 0.0, dt, steps)).unwrap();
        assert!(traj.completed());
        let end = traj.last().positions[0];
        assert!((end.norm() - d).abs() <= 1e-8);
        let expected = Point2::polar(d, omega * dt * steps as f64);
        assert!((end - expected).norm() <= 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order_at_coarse_steps() {
        let d = 2.0;
        let omega = single_vortex_speed(TAU, d, 0.0) / d;
        let horizon = 20.0;
        let err = |dt: f64| {
            let steps = (horizon / dt).round() as usize;
            let traj = simulate(&single(d, TAU), &exterior(64, 0.0, dt, steps)).unwrap();
            (traj.last().positions[0] - Point2::polar(d, omega * horizon)).norm()
        };
        let ratio = err(2.0) / err(1.0);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn time_reversal_returns_home() {
        let sim = exterior(64, 0.3, 0.02, 100);
        let s = FreeVortexState::new(vec![Point2::new(2.0, 0.3), Point2::new(-1.8, -0.9)], vec![1.0, 0.6]).unwrap();
        let dynamics = CombinedDynamics::new(&sim).unwrap();
        let mut state = s.clone();
        for _ in 0..sim.steps {
            state = dynamics.step(&state, sim.dt).unwrap();
        }
        for _ in 0..sim.steps {
            state = dynamics.step(&state, -sim.dt).unwrap();
        }
        for (a, b) in state.positions.iter().zip(&s.positions) {
            assert!((*a - *b).norm() <= 1e-6);
        }
        assert!(state.time.abs() <= 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(CombinedDynamics::new(&plane(0.0, 1)).is_err());
        assert!(CombinedDynamics::new(&plane(-1.0, 1)).is_err());
        assert!(CombinedDynamics::new(&SimulationConfig { blob_delta: -0.1, ..plane(0.1, 1) }).is_err());
        assert!(CombinedDynamics::new(&exterior(1, 0.0, 0.1, 1)).is_err());
        assert!(FreeVortexState::new(vec![Point2::new(2.0, 0.0)], vec![]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn plane_rhs_conserves_linear_impulse(
            xs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -2.0f64..2.0), 2..6),
        ) {
            let s = FreeVortexState::new(
                xs.iter().map(|&(a, b, _)| Point2::new(a, b)).collect(),
                xs.iter().map(|&(_, _, g)| g).collect(),
            ).unwrap();
            prop_assume!(s.min_separation().unwrap() > 0.05);
            let v = rhs_free_plane(&s, 0.0).unwrap();
            let impulse: Vec2 = v.iter().zip(&s.strengths).map(|(u, &g)| *u * g).sum();
            prop_assert!(impulse.norm() <= 1e-9 * (1.0 + v.iter().map(|u| u.norm()).sum::<f64>()));
        }

        #[test]
        fn mean_density_conserved_along_steps(gamma in -2.0f64..2.0, y in 1.6f64..3.0) {
            let sim = exterior(48, gamma, 0.05, 5);
            let traj = simulate(&single(y, 1.0), &sim).unwrap();
            prop_assert!(traj.circulation_drift(gamma).unwrap() <= 1e-12);
        }
    }
}
