//! `identities`: the exact identities of the method as numerical residual checks.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use vortex_panel::boundary_method::{check_ball_circulation, check_vortex_identity, solve_boundary};
use vortex_panel::hilbert_solver::{
    assemble_system, density_bound, hilbert_spectral, isometry_gap, norms, GridKind, PeriodicSamples,
};
use vortex_panel::{Point2, UniformBoundaryMesh, VorticityConfig};

use crate::config::IdentitiesConfig;
use crate::report::{CliError, Exit, Outcome};

const INVOLUTION_SAMPLES: usize = 256;
const INVOLUTION_DRAWS: usize = 20;
const INVOLUTION_MAX_DEGREE: usize = 64;

struct Check {
    name: &'static str,
    params: Value,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }

    fn to_json(&self) -> Value {
        json!({
            "identity": self.name,
            "params": self.params,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed(),
        })
    }
}

pub fn run(cfg: &IdentitiesConfig, seed: u64, tolerance_scale: f64) -> Result<Outcome, CliError> {
    if cfg.sizes.is_empty() || cfg.sizes.iter().any(|&n| n < 2) {
        return Err(CliError::invalid("sizes must be a nonempty list of integers ≥ 2").with_key("sizes"));
    }
    if !(tolerance_scale >= 0.0) || !tolerance_scale.is_finite() {
        return Err(CliError::invalid("tolerance scale must be finite and non-negative").with_key("tolerance_scale"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let tol = |t: f64| t * tolerance_scale;

    let benchmark = VorticityConfig::single_vortex(Point2::new(2.0, 0.0), TAU, 0.5)?;
    for &n in &cfg.sizes {
        let mesh = UniformBoundaryMesh::new(n)?;
        checks.push(Check {
            name: "cancellation",
            params: json!({ "n": n }),
            residual: mesh.cancellation_residual(),
            tolerance: tol(n as f64 * 1e-12),
        });

        let system = assemble_system(&mesh)?;
        let mut worst = 0.0f64;
        for _ in 0..cfg.random_vectors {
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (l, r) = isometry_gap(&system, &z)?;
            worst = worst.max((l - r).abs() / (1.0 + l));
        }
        checks.push(Check {
            name: "l2_isometry",
            params: json!({ "n": n, "vectors": cfg.random_vectors }),
            residual: worst,
            tolerance: tol(1e-9),
        });

        let mut excess = 0.0f64;
        let mut violations = 0usize;
        for _ in 0..cfg.random_vectors {
            let v: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let gamma = rng.gen_range(-2.0..2.0);
            let z = system.solve_constrained(&v, gamma)?;
            let over = norms::l2(z.values()) - density_bound(&v, gamma, n);
            if over > 0.0 {
                violations += 1;
                excess = excess.max(over);
            }
        }
        checks.push(Check {
            name: "solver_estimate",
            params: json!({ "n": n, "draws": cfg.random_vectors, "violations": violations }),
            residual: excess,
            tolerance: 0.0,
        });

        let problem = solve_boundary(&benchmark, n)?;
        checks.push(Check {
            name: "interpolation_rows",
            params: json!({ "n": n }),
            residual: problem.interpolation_residual()?,
            tolerance: tol(1e-9),
        });
        checks.push(Check {
            name: "mean_circulation",
            params: json!({ "n": n }),
            residual: problem.circulation_residual(),
            tolerance: tol(1e-12),
        });
    }

    let mut worst = 0.0f64;
    for _ in 0..INVOLUTION_DRAWS {
        let degree = rng.gen_range(1..=INVOLUTION_MAX_DEGREE);
        let coeffs: Vec<(f64, f64)> = (0..=degree)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let g = PeriodicSamples::from_fn(INVOLUTION_SAMPLES, GridKind::Node, |t| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                .sum()
        })?;
        let hh = hilbert_spectral(&hilbert_spectral(&g)?)?;
        let mean = g.mean();
        let err = g
            .values()
            .iter()
            .zip(hh.values())
            .map(|(v, h)| (h + 4.0 * PI * PI * (v - mean)).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(err / norms::linf(g.values()));
    }
    checks.push(Check {
        name: "involution",
        params: json!({ "m": INVOLUTION_SAMPLES, "draws": INVOLUTION_DRAWS, "max_degree": INVOLUTION_MAX_DEGREE }),
        residual: worst,
        tolerance: tol(1e-8),
    });

    for (x, q, t) in [
        (Point2::new(2.0, 0.0), 512, 1e-10),
        (Point2::new(10.0, 10.0), 512, 1e-10),
        (Point2::new(1.05, 0.0), 4096, 1e-6),
    ] {
        let (lhs, rhs) = check_ball_circulation(x, q)?;
        checks.push(Check {
            name: "ball_circulation",
            params: json!({ "x": [x.x1, x.x2], "points": q }),
            residual: (lhs - rhs).norm(),
            tolerance: tol(t),
        });
    }

    for (x, phi) in [(Point2::new(2.0, 0.0), 0.0), (Point2::new(1.7, -0.6), 0.9)] {
        let (lhs, rhs) = check_vortex_identity(x, phi, 1024)?;
        checks.push(Check {
            name: "vortex_identity",
            params: json!({ "x": [x.x1, x.x2], "phi": phi, "points": 1024 }),
            residual: (lhs - rhs).norm(),
            tolerance: tol(1e-6),
        });
    }

    let passed = checks.iter().filter(|c| c.passed()).count();
    let failed = checks.len() - passed;
    let status = if failed == 0 { "pass" } else { "fail" };
    let report = json!({
        "seed": seed,
        "tolerance_scale": tolerance_scale,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "passed": passed,
        "failed": failed,
        "status": status,
    });
    let summary = json!({ "command": "identities", "passed": passed, "failed": failed, "status": status });
    Ok(Outcome {
        primary: Some(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
        summary,
        exit: if failed == 0 { Exit::Success } else { Exit::CheckFailure },
    })
}
