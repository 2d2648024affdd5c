//! The boundary point-vortex method.
//!
//! Given a vorticity configuration, the boundary data `f = 4π u_P·n` is
//! sampled at the mesh midpoints, the constrained cotangent system yields the
//! densities `γ^N`, and the approximate remainder flow is the field of the
//! `N` boundary point vortices of strength `γ_j^N / N`:
//!
//! ```text
//! u_app(x) = (1/2π) Σ_j (γ_j^N / N) (x - x_j)^⊥ / |x - x_j|^2.
//! ```
//!
//! The module also runs convergence sweeps against the exact image flow and
//! evaluates the continuous identities behind the method as quadrature checks.

use std::f64::consts::TAU;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circle_mesh::UniformBoundaryMesh;
use crate::error::{Error, Result};
use crate::fields::{velocity_plane, velocity_remainder_exact, ValidityDomain, VelocityField, VorticityConfig};
use crate::hilbert_solver::{hilbert_spectral, BoundaryDensities, CotangentSystem, GridKind, PeriodicSamples};
use crate::kernels::{biot_savart_plane, harmonic_field, normal, Point2, Vec2};

/// Largest point count used by [`refine_ball_circulation`].
pub const MAX_REFINEMENT_POINTS: usize = 1 << 20;

/// `f(θ̃_i) = 4π u_P(x̃_i)·x̃_i` at every midpoint.
pub fn trace_f(config: &VorticityConfig, mesh: &UniformBoundaryMesh) -> Result<PeriodicSamples> {
    config.validate()?;
    let values = mesh
        .midpoints()
        .iter()
        .map(|&x| Ok(2.0 * TAU * velocity_plane(config, x)?.dot(normal(x))))
        .collect::<Result<Vec<_>>>()?;
    PeriodicSamples::new(values, GridKind::Midpoint)
}

/// An assembled and factorized system for one mesh size, reusable across configurations.
#[derive(Debug, Clone)]
pub struct BoundarySolver {
    system: Arc<CotangentSystem>,
}

impl BoundarySolver {
    pub fn new(n: usize) -> Result<Self> {
        let mesh = Arc::new(UniformBoundaryMesh::new(n)?);
        Ok(Self {
            system: Arc::new(CotangentSystem::assemble(mesh)?),
        })
    }

    pub fn from_system(system: Arc<CotangentSystem>) -> Self {
        Self { system }
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn mesh(&self) -> &UniformBoundaryMesh {
        self.system.mesh()
    }

    pub fn system(&self) -> &CotangentSystem {
        &self.system
    }

    pub fn solve(&self, config: &VorticityConfig) -> Result<BoundaryProblem> {
        let mesh = self.system.shared_mesh();
        let f_trace = trace_f(config, &mesh)?;
        let n = mesh.n();
        let densities = self
            .system
            .solve_constrained(&f_trace.values()[..n - 1], config.gamma)?;
        Ok(BoundaryProblem {
            config: config.clone(),
            mesh,
            densities,
            f_trace,
        })
    }
}

/// A solved boundary problem.
#[derive(Debug, Clone)]
pub struct BoundaryProblem {
    config: VorticityConfig,
    mesh: Arc<UniformBoundaryMesh>,
    densities: BoundaryDensities,
    f_trace: PeriodicSamples,
}

impl BoundaryProblem {
    pub fn config(&self) -> &VorticityConfig {
        &self.config
    }

    pub fn mesh(&self) -> &UniformBoundaryMesh {
        &self.mesh
    }

    pub fn densities(&self) -> &BoundaryDensities {
        &self.densities
    }

    pub fn f_trace(&self) -> &PeriodicSamples {
        &self.f_trace
    }

    pub fn n(&self) -> usize {
        self.mesh.n()
    }

    pub fn velocity_approx(&self, x: Point2) -> Result<Vec2> {
        velocity_approx(self, x)
    }

    /// Largest violation of the collocation rows `u_app(x̃_i)·x̃_i = -u_P(x̃_i)·x̃_i`, `i < N-1`.
    pub fn interpolation_residual(&self) -> Result<f64> {
        let n = self.n();
        let mut worst = 0.0f64;
        for &x in &self.mesh.midpoints()[..n - 1] {
            let lhs = self.velocity_approx(x)?.dot(normal(x));
            let rhs = -velocity_plane(&self.config, x)?.dot(normal(x));
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }

    /// `|⟨γ^N⟩ - γ|`.
    pub fn circulation_residual(&self) -> f64 {
        (self.densities.mean() - self.config.gamma).abs()
    }
}

impl VelocityField for BoundaryProblem {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        velocity_approx(self, x)
    }
    fn domain(&self) -> ValidityDomain {
        ValidityDomain::ExteriorMinusSingularities
    }
}

/// Builds the mesh and system for `n` and solves for `config`.
pub fn solve_boundary(config: &VorticityConfig, n: usize) -> Result<BoundaryProblem> {
    BoundarySolver::new(n)?.solve(config)
}

pub fn velocity_approx(problem: &BoundaryProblem, x: Point2) -> Result<Vec2> {
    let n = problem.n() as f64;
    let mut u = Vec2::ZERO;
    for (&node, &g) in problem.mesh.nodes().iter().zip(problem.densities.values()) {
        u += biot_savart_plane(x, node)? * (g / n);
    }
    Ok(u)
}

/// `max_k |u_R(x_k) - u_app(x_k)|`.
pub fn sup_error_on_set(problem: &BoundaryProblem, eval_points: &[Point2]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in eval_points {
        let e = (velocity_remainder_exact(&problem.config, x)? - velocity_approx(problem, x)?).norm();
        worst = worst.max(e);
    }
    Ok(worst)
}

/// A closed evaluation set in the fluid domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EvalSet {
    /// Equally spaced points `radius·(cos 2πk/P, sin 2πk/P)`.
    Circle {
        #[serde(default = "default_eval_radius")]
        radius: f64,
        #[serde(default = "default_eval_points")]
        points: usize,
    },
    Points { points: Vec<Point2> },
}

fn default_eval_radius() -> f64 {
    1.5
}

fn default_eval_points() -> usize {
    360
}

impl Default for EvalSet {
    fn default() -> Self {
        EvalSet::Circle {
            radius: default_eval_radius(),
            points: default_eval_points(),
        }
    }
}

impl EvalSet {
    pub fn circle(radius: f64, points: usize) -> Self {
        EvalSet::Circle { radius, points }
    }

    pub fn points(&self) -> Result<Vec<Point2>> {
        let pts = match self {
            EvalSet::Circle { radius, points } => {
                if *points == 0 {
                    return Err(Error::InvalidArgument("evaluation circle needs at least one point".into()));
                }
                (0..*points)
                    .map(|k| Point2::polar(*radius, TAU * k as f64 / *points as f64))
                    .collect()
            }
            EvalSet::Points { points } => points.clone(),
        };
        if pts.is_empty() {
            return Err(Error::InvalidArgument("evaluation set is empty".into()));
        }
        if let Some(p) = pts.iter().find(|p| !p.is_finite() || !(p.norm() > 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "evaluation point ({}, {}) is not strictly outside the unit disk",
                p.x1, p.x2
            )));
        }
        Ok(pts)
    }

    pub fn descriptor(&self) -> String {
        match self {
            EvalSet::Circle { radius, points } => format!("circle(r={radius},points={points})"),
            EvalSet::Points { points } => format!("points({})", points.len()),
        }
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub sup_error: f64,
    pub eval_set_descriptor: String,
    pub runtime_seconds: f64,
}

/// Records of a sweep in increasing `N`, with the least-squares log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSweep {
    pub records: Vec<ConvergenceRecord>,
    /// `None` when fewer than two nonzero errors remain.
    pub slope: Option<f64>,
}

impl ConvergenceSweep {
    /// `e_{k-1} / e_k` for each record after the first.
    pub fn error_ratios(&self) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.records.windows(2) {
            let r = w[0].sup_error / w[1].sup_error;
            out.push(r.is_finite().then_some(r));
        }
        out.truncate(self.records.len());
        out
    }
}

/// Ordinary least-squares slope of `ln e` against `ln n`, ignoring zero or non-finite errors.
pub fn fit_loglog_slope(data: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = data
        .iter()
        .filter(|(n, e)| *n > 0.0 && *e > 0.0 && e.is_finite())
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn sweep_one(config: &VorticityConfig, n: usize, points: &[Point2], descriptor: &str) -> Result<ConvergenceRecord> {
    let start = Instant::now();
    let problem = solve_boundary(config, n)?;
    let sup_error = sup_error_on_set(&problem, points)?;
    Ok(ConvergenceRecord {
        n,
        sup_error,
        eval_set_descriptor: descriptor.to_string(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Single-threaded sweep.
pub fn convergence_sweep(config: &VorticityConfig, n_list: &[usize], eval: &EvalSet) -> Result<ConvergenceSweep> {
    convergence_sweep_with_workers(config, n_list, eval, 1)
}

/// Sweep with each `N` handled by one of at most `workers` threads. Results do not depend on `workers`.
pub fn convergence_sweep_with_workers(
    config: &VorticityConfig,
    n_list: &[usize],
    eval: &EvalSet,
    workers: usize,
) -> Result<ConvergenceSweep> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty list of mesh sizes".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("mesh sizes must be strictly increasing".into()));
    }
    if n_list[0] < 2 {
        return Err(Error::InvalidArgument(format!("mesh size {} is below 2", n_list[0])));
    }
    config.validate()?;
    let points = eval.points()?;
    let descriptor = eval.descriptor();
    let workers = workers.clamp(1, n_list.len());

    let records: Vec<Result<ConvergenceRecord>> = if workers == 1 {
        n_list.iter().map(|&n| sweep_one(config, n, &points, &descriptor)).collect()
    } else {
        let mut slots: Vec<Option<Result<ConvergenceRecord>>> = vec![None; n_list.len()];
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let points = &points;
                    let descriptor = &descriptor;
                    scope.spawn(move || {
                        (w..n_list.len())
                            .step_by(workers)
                            .map(|i| (i, sweep_one(config, n_list[i], points, descriptor)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("sweep worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every mesh size is assigned")).collect()
    };
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let slope = fit_loglog_slope(
        &records
            .iter()
            .map(|r| (r.n as f64, r.sup_error))
            .collect::<Vec<_>>(),
    );
    Ok(ConvergenceSweep { records, slope })
}

fn require_exterior(x: Point2) -> Result<()> {
    if !(x.norm() > 1.0) {
        return Err(Error::Domain(format!(
            "identity checks need |x| > 1, got |x| = {}",
            x.norm()
        )));
    }
    Ok(())
}

/// `((1/2π) ∮ (x-y)^⊥/|x-y|² dy, x^⊥/|x|²)`, the left side by the rectangle rule at node angles.
pub fn check_ball_circulation(x: Point2, quadrature_points: usize) -> Result<(Vec2, Vec2)> {
    require_exterior(x)?;
    if quadrature_points == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    let q = quadrature_points as f64;
    let mut lhs = Vec2::ZERO;
    for j in 0..quadrature_points {
        lhs += biot_savart_plane(x, Point2::on_unit_circle(TAU * j as f64 / q))?;
    }
    let lhs = lhs * (TAU / q);
    Ok((lhs, harmonic_field(x)? * TAU))
}

/// Result of a geometric point-count refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementReport {
    pub points: usize,
    pub lhs: Vec2,
    pub rhs: Vec2,
    pub residual: f64,
    pub converged: bool,
}

/// Doubles the point count from 64 until successive estimates differ by less than `target / 10`.
pub fn refine_ball_circulation(x: Point2, target: f64) -> Result<RefinementReport> {
    let mut q = 64;
    let (mut prev, rhs) = check_ball_circulation(x, q)?;
    loop {
        let next_q = q * 2;
        let (next, _) = check_ball_circulation(x, next_q)?;
        let converged = (next - prev).norm() < target / 10.0;
        if converged || next_q >= MAX_REFINEMENT_POINTS {
            return Ok(RefinementReport {
                points: next_q,
                lhs: next,
                rhs,
                residual: (next - rhs).norm(),
                converged,
            });
        }
        prev = next;
        q = next_q;
    }
}

/// Both sides of the boundary vortex identity at `x` and `y = (cos φ, sin φ)`.
///
/// The left side `(1/2π) PV ∮ (x - z)/|x - z|² cot((φ - θ)/2) dθ` uses
/// nodes `θ_j = φ + 2π (j + ½)/q`, symmetric about the singular angle.
pub fn check_vortex_identity(x: Point2, phi: f64, quadrature_points: usize) -> Result<(Vec2, Vec2)> {
    require_exterior(x)?;
    if quadrature_points < 2 {
        return Err(Error::InvalidArgument("vortex identity quadrature needs at least 2 points".into()));
    }
    let q = quadrature_points as f64;
    let mut lhs = Vec2::ZERO;
    for j in 0..quadrature_points {
        let half = std::f64::consts::PI * (j as f64 + 0.5) / q;
        let z = Point2::on_unit_circle(phi + 2.0 * half);
        let d = x - z;
        // cot((φ - θ_j)/2) = -cot(half)
        lhs += d * (-1.0 / (d.norm_sq() * half.tan()));
    }
    let lhs = lhs * (1.0 / q);
    let y = Point2::on_unit_circle(phi);
    let rhs = biot_savart_plane(x, y)? * TAU - harmonic_field(x)? * TAU;
    Ok((lhs, rhs))
}

fn normal_trace(config: &VorticityConfig, samples: usize) -> Result<PeriodicSamples> {
    config.validate()?;
    PeriodicSamples::new(
        (0..samples)
            .map(|j| {
                let y = Point2::on_unit_circle(GridKind::Node.angle(j, samples));
                Ok(velocity_plane(config, y)?.dot(normal(y)))
            })
            .collect::<Result<Vec<_>>>()?,
        GridKind::Node,
    )
}

/// `g = -(1/π) H[u_P·n] + γ/2π` on a node grid of `samples` points.
pub fn density_g(config: &VorticityConfig, samples: usize) -> Result<PeriodicSamples> {
    let h = hilbert_spectral(&normal_trace(config, samples)?)?;
    let shift = config.gamma / TAU;
    PeriodicSamples::new(
        h.values().iter().map(|v| -v / std::f64::consts::PI + shift).collect(),
        GridKind::Node,
    )
}

/// `h = -2 u_P·n` on a node grid of `samples` points.
pub fn density_h(config: &VorticityConfig, samples: usize) -> Result<PeriodicSamples> {
    let un = normal_trace(config, samples)?;
    PeriodicSamples::new(un.values().iter().map(|v| -2.0 * v).collect(), GridKind::Node)
}

fn sheet_points(samples: &PeriodicSamples) -> impl Iterator<Item = (Point2, f64)> + '_ {
    samples
        .angles()
        .into_iter()
        .zip(samples.values().iter().copied())
        .map(|(t, v)| (Point2::on_unit_circle(t), v))
}

/// `u_R` from the tangential sheet `g`: the zero-mean part by quadrature,
/// the mean part `(∫ g) H(x)` in closed form.
pub fn remainder_from_g(g: &PeriodicSamples, x: Point2) -> Result<Vec2> {
    require_exterior(x)?;
    let mean = g.mean();
    let mut u = Vec2::ZERO;
    for (y, v) in sheet_points(g) {
        u += biot_savart_plane(x, y)? * (v - mean);
    }
    let w = TAU / g.len() as f64;
    Ok(u * w + harmonic_field(x)? * g.integral())
}

/// `u_R` from the normal sheet `h`: `(1/2π) ∮ (x - y)/|x - y|² h dy + γ H(x)`.
pub fn remainder_from_h(h: &PeriodicSamples, gamma: f64, x: Point2) -> Result<Vec2> {
    require_exterior(x)?;
    let mut u = Vec2::ZERO;
    for (y, v) in sheet_points(h) {
        let d = x - y;
        u += d * (v / d.norm_sq());
    }
    Ok(u * (1.0 / h.len() as f64) + harmonic_field(x)? * gamma)
}
