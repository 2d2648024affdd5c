//! Circular Hilbert transforms and the staggered cotangent system.
//!
//! The continuous transform is
//!
//! ```text
//! H g(θ) = PV ∫₀^{2π} cot((θ - φ)/2) g(φ) dφ
//! ```
//!
//! With normalized Fourier coefficients `ĝ(k) = (1/2π) ∫ g e^{-ikθ} dθ` it is
//! the multiplier `-2πi sign(k)`, which makes `H² g = -4π² (g - mean g)` hold
//! exactly. The discrete counterpart lives on the staggered mesh: nodes
//! `θ_j`, midpoints `θ̃_i`, matrix `A_N[i][j] = cot((θ̃_i - θ_j)/2)`. Odd
//! symmetry across the stagger realizes the principal value without any
//! singularity subtraction, and `A_N` is circulant because the entry
//! depends only on `(i - j) mod N`.
//!
//! The boundary densities `z` solve `(1/N) A_{N-1,N} z = v` together with
//! `⟨z⟩ = γ`. The dropped last row is recovered by cancellation: the full
//! right-hand side `(v, -Σ v)` lies in the range of `A_N / N`.
//!
//! The weak pairing `∫ (f_app - f) φ` uses
//! `∫ cot((θ - θ_j)/2) φ(θ) dθ = -Hφ(θ_j)`, so its principal value is
//! taken spectrally rather than by quadrature of a singular integrand.
//!
//! All ℓ^p norms carry the 1/length normalization,
//! `‖z‖_p = ((1/N) Σ |z_i|^p)^{1/p}`.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, LU};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::circle_mesh::UniformBoundaryMesh;
use crate::error::{Error, Result};
use crate::kernels::{wrap_angle, DEFAULT_SINGULAR_CUTOFF};

/// Normalized ℓ^p helpers.
pub mod norms {
    /// `⟨z⟩ = (1/N) Σ z_i`.
    pub fn mean(z: &[f64]) -> f64 {
        z.iter().sum::<f64>() / z.len() as f64
    }

    pub fn lp(z: &[f64], p: f64) -> f64 {
        (z.iter().map(|v| v.abs().powf(p)).sum::<f64>() / z.len() as f64).powf(1.0 / p)
    }

    pub fn l2(z: &[f64]) -> f64 {
        (z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64).sqrt()
    }

    pub fn linf(z: &[f64]) -> f64 {
        z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Which uniform grid a set of periodic samples lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Angles `2π j / M`.
    Node,
    /// Angles `2π (j + ½) / M`.
    Midpoint,
}

impl GridKind {
    pub fn angle(self, j: usize, m: usize) -> f64 {
        match self {
            GridKind::Node => j as f64 * TAU / m as f64,
            GridKind::Midpoint => (j as f64 + 0.5) * TAU / m as f64,
        }
    }
}

/// Samples of a 2π-periodic function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamples {
    values: Vec<f64>,
    grid: GridKind,
}

impl PeriodicSamples {
    pub fn new(values: Vec<f64>, grid: GridKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "periodic samples need at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {j} is not finite")));
        }
        Ok(Self { values, grid })
    }

    pub fn from_fn(m: usize, grid: GridKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..m).map(|j| f(grid.angle(j, m))).collect(), grid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> GridKind {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        let m = self.len();
        (0..m).map(|j| self.grid.angle(j, m)).collect()
    }

    pub fn mean(&self) -> f64 {
        norms::mean(&self.values)
    }

    /// Periodic rectangle rule `(2π/M) Σ values`.
    pub fn integral(&self) -> f64 {
        TAU * self.mean()
    }
}

/// Spectral circular Hilbert transform on the samples' own grid.
///
/// The Nyquist coefficient of an even-length grid has no sign and is
/// discarded, like the mean.
pub fn hilbert_spectral(samples: &PeriodicSamples) -> Result<PeriodicSamples> {
    let m = samples.len();
    if m < 4 {
        return Err(Error::InvalidArgument(format!(
            "spectral Hilbert transform needs at least 4 samples, got {m}"
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    let mut buf: Vec<Complex<f64>> = samples.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward.process(&mut buf);
    // Grid shifts only rotate coefficient phases, which a diagonal multiplier preserves.
    let scale = TAU / m as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let sign = if k == 0 || 2 * k == m {
            0.0
        } else if 2 * k < m {
            1.0
        } else {
            -1.0
        };
        // ĝ(k) = X_k / M, multiplied by -2πi sign(k)
        *c = Complex::new(0.0, -sign * scale) * *c;
    }
    inverse.process(&mut buf);
    PeriodicSamples::new(buf.into_iter().map(|c| c.re).collect(), samples.grid)
}

/// `cot(π (k + ½) / N)` for `k = 0..N`: row 0 of the circulant `A_N`.
fn cotangent_row(mesh: &UniformBoundaryMesh) -> Vec<f64> {
    (0..mesh.n()).map(|k| 1.0 / mesh.half_offset(k, 0).tan()).collect()
}

/// Staggered PV quadrature `(2π/N) Σ_j cot((θ̃_i - θ_j)/2) g(θ_j)`, node grid in, midpoint grid out.
pub fn hilbert_pv(samples: &PeriodicSamples, mesh: &UniformBoundaryMesh) -> Result<PeriodicSamples> {
    let n = mesh.n();
    if samples.grid() != GridKind::Node {
        return Err(Error::InvalidArgument(
            "staggered PV quadrature takes node-grid samples".into(),
        ));
    }
    if samples.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: samples.len(),
        });
    }
    let row = cotangent_row(mesh);
    let g = samples.values();
    let weight = TAU / n as f64;
    let out = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| row[(i + n - j) % n] * g[j])
                .sum::<f64>()
                * weight
        })
        .collect();
    PeriodicSamples::new(out, GridKind::Midpoint)
}

/// Periodic midpoint rule `(2π/N) Σ_i g(θ̃_i)`.
pub fn midpoint_sum(g: impl Fn(f64) -> f64, mesh: &UniformBoundaryMesh) -> f64 {
    mesh.theta_tilde().iter().map(|&t| g(t)).sum::<f64>() * TAU / mesh.n() as f64
}

/// Solved per-node boundary densities `γ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensities {
    gamma_n: Vec<f64>,
    mean: f64,
}

impl BoundaryDensities {
    pub fn new(gamma_n: Vec<f64>) -> Self {
        let mean = norms::mean(&gamma_n);
        Self { gamma_n, mean }
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma_n
    }

    /// `⟨γ^N⟩`, which the solve pins to the prescribed circulation.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.gamma_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_n.is_empty()
    }
}

/// The assembled cotangent matrix and a factorization of the constrained system.
#[derive(Debug, Clone)]
pub struct CotangentSystem {
    mesh: Arc<UniformBoundaryMesh>,
    row: Vec<f64>,
    a_n: DMatrix<f64>,
    constrained: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    cancellation_residual: f64,
}

impl CotangentSystem {
    pub fn assemble(mesh: Arc<UniformBoundaryMesh>) -> Result<Self> {
        let n = mesh.n();
        let row = cotangent_row(&mesh);
        let a_n = DMatrix::from_fn(n, n, |i, j| row[(i + n - j) % n]);
        let inv_n = 1.0 / n as f64;
        let constrained = DMatrix::from_fn(n, n, |i, j| if i + 1 < n { a_n[(i, j)] * inv_n } else { inv_n });

        let cancellation_residual = (0..n)
            .map(|i| a_n.row(i).sum().abs().max(a_n.column(i).sum().abs()))
            .fold(0.0f64, f64::max);

        let lu = constrained.clone().lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].abs()).collect();
        let max = diag.iter().cloned().fold(0.0f64, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 1e-12 * max) {
            return Err(Error::NumericalSingularity(format!(
                "constrained cotangent system of size {n} is rank deficient (pivot ratio {:e})",
                min / max
            )));
        }
        Ok(Self {
            mesh,
            row,
            a_n,
            constrained,
            lu,
            cancellation_residual,
        })
    }

    pub fn n(&self) -> usize {
        self.mesh.n()
    }

    pub fn mesh(&self) -> &UniformBoundaryMesh {
        &self.mesh
    }

    pub fn shared_mesh(&self) -> Arc<UniformBoundaryMesh> {
        Arc::clone(&self.mesh)
    }

    /// `A_N`, entries `cot((θ̃_i - θ_j)/2)`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a_n
    }

    /// `A_{N-1,N}`: the first `N-1` rows of `A_N`.
    pub fn reduced_rows(&self) -> DMatrix<f64> {
        self.a_n.rows(0, self.n() - 1).into_owned()
    }

    /// The square matrix actually factorized: `A_{N-1,N}/N` stacked on `(1/N, …, 1/N)`.
    pub fn constrained_matrix(&self) -> &DMatrix<f64> {
        &self.constrained
    }

    /// Largest row or column sum of `A_N` recorded at assembly.
    pub fn cancellation_residual(&self) -> f64 {
        self.cancellation_residual
    }

    /// `A_N z`, using the circulant row.
    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if z.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: z.len(),
            });
        }
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.row[(i + n - j) % n] * z[j]).sum())
            .collect())
    }

    /// Unique `z` with `(1/N) Σ_j z_j cot((θ̃_i - θ_j)/2) = f_i` for `i < N-1` and `⟨z⟩ = γ`.
    pub fn solve_constrained(&self, f_values: &[f64], gamma: f64) -> Result<BoundaryDensities> {
        let n = self.n();
        if f_values.len() != n - 1 {
            return Err(Error::SizeMismatch {
                expected: n - 1,
                got: f_values.len(),
            });
        }
        let rhs = DVector::from_fn(n, |i, _| if i + 1 < n { f_values[i] } else { gamma });
        let z = self.lu.solve(&rhs).ok_or_else(|| {
            Error::NumericalSingularity(format!("LU solve failed for system of size {n}"))
        })?;
        Ok(BoundaryDensities::new(z.iter().copied().collect()))
    }
}

/// Builds the mesh-sharing system for `mesh`.
pub fn assemble_system(mesh: &UniformBoundaryMesh) -> Result<CotangentSystem> {
    CotangentSystem::assemble(Arc::new(mesh.clone()))
}

/// Both sides of the ℓ² isometry `‖z - ⟨z⟩1‖ = (1/N) ‖A_N z‖`.
pub fn isometry_gap(system: &CotangentSystem, z: &[f64]) -> Result<(f64, f64)> {
    let az = system.apply(z)?;
    let mean = norms::mean(z);
    let centered: Vec<f64> = z.iter().map(|v| v - mean).collect();
    Ok((norms::l2(&centered), norms::l2(&az) / system.n() as f64))
}

/// Right-hand side of the a-priori bound `‖z‖_2 ≤ ‖v‖_∞ + |γ| + √N |⟨v⟩|`.
pub fn density_bound(v: &[f64], gamma: f64, n: usize) -> f64 {
    norms::linf(v) + gamma.abs() + (n as f64).sqrt() * norms::mean(v).abs()
}

/// `f_app(θ) = (1/N) Σ_j γ_j cot((θ - θ_j)/2)`.
pub fn f_app(densities: &BoundaryDensities, mesh: &UniformBoundaryMesh, theta: f64) -> Result<f64> {
    let n = mesh.n();
    if densities.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: densities.len(),
        });
    }
    let mut acc = 0.0;
    for (&g, &t) in densities.values().iter().zip(mesh.theta()) {
        let sep = wrap_angle(theta - t).abs();
        if !(sep >= DEFAULT_SINGULAR_CUTOFF) {
            return Err(Error::SingularEvaluation {
                what: "f_app at a node angle",
                distance: sep,
                cutoff: DEFAULT_SINGULAR_CUTOFF,
            });
        }
        acc += g / ((theta - t) * 0.5).tan();
    }
    Ok(acc / n as f64)
}

const PAIRING_SPECTRAL_POINTS: usize = 2048;
const PAIRING_QUADRATURE_POINTS: usize = 4096;

/// `∫₀^{2π} (f_app - f) φ dθ` with the principal value taken spectrally.
///
/// Evaluated as `-(1/N) Σ_j γ_j Hφ(θ_j) - ∫ f φ`, with `Hφ` from a
/// spectral transform on a node grid refining the mesh and `∫ f φ` by the
/// periodic rectangle rule, which is spectrally accurate for smooth data.
pub fn weak_pairing(
    densities: &BoundaryDensities,
    mesh: &UniformBoundaryMesh,
    f: impl Fn(f64) -> f64,
    phi: impl Fn(f64) -> f64,
) -> Result<f64> {
    let n = mesh.n();
    if densities.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: densities.len(),
        });
    }
    let f_samples = PeriodicSamples::from_fn(PAIRING_QUADRATURE_POINTS, GridKind::Midpoint, &f)?;
    let scale = 1.0 + f_samples.values().iter().map(|v| v.abs()).sum::<f64>() * TAU
        / PAIRING_QUADRATURE_POINTS as f64;
    if f_samples.integral().abs() > 1e-9 * scale {
        return Err(Error::InvalidArgument(format!(
            "weak pairing needs zero-mean data, got ∫ f = {:e}",
            f_samples.integral()
        )));
    }
    let f_phi: f64 = f_samples
        .angles()
        .iter()
        .zip(f_samples.values())
        .map(|(&t, &fv)| fv * phi(t))
        .sum::<f64>()
        * TAU
        / PAIRING_QUADRATURE_POINTS as f64;

    let refine = PAIRING_SPECTRAL_POINTS.div_ceil(n).max(1);
    let m = (n * refine).max(4);
    let h_phi = hilbert_spectral(&PeriodicSamples::from_fn(m, GridKind::Node, &phi)?)?;
    let app_phi: f64 = -densities
        .values()
        .iter()
        .enumerate()
        .map(|(j, &g)| g * h_phi.values()[j * refine])
        .sum::<f64>()
        / n as f64;
    Ok(app_phi - f_phi)
}
