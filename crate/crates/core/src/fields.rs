//! Vorticity configurations and the exact flows they induce.
//!
//! For vorticity `ω` supported in the exterior of the unit disk and a
//! prescribed boundary circulation `γ`, the velocity splits as
//! `u = u_P + u_R`, where `u_P` is the plane Biot–Savart flow of `ω` and
//! `u_R` is the harmonic remainder that cancels the normal trace of `u_P`
//! on the circle. For the disk, `u_R` has the closed image form
//!
//! ```text
//! u_R(x) = -(1/2π) ∫ (x - y*)^⊥ / |x - y*|^2 ω(y) dy + α H(x),   α = γ + ∫ ω.
//! ```

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{biot_savart_plane, harmonic_field, image_point, Point2, Vec2};

/// Default clearance between vorticity support and the unit circle.
pub const DEFAULT_SEPARATION_MARGIN: f64 = 1e-6;

/// Default stopping tolerance of the blob image-term quadrature.
pub const DEFAULT_BLOB_QUADRATURE_TOLERANCE: f64 = 1e-10;

const BLOB_QUADRATURE_MAX_LEVEL: u32 = 9;

/// A Dirac vortex `α δ_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointVortex {
    pub position: Point2,
    pub strength: f64,
}

impl PointVortex {
    pub fn new(position: Point2, strength: f64) -> Self {
        Self { position, strength }
    }
}

/// Radial vorticity profile of a blob with support radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// Constant vorticity `ω0` on the disk of radius `R` (a Rankine patch).
    Uniform { vorticity: f64 },
    /// `ω(r) = peak · (1 - r²/R²)²`, a C¹ bump.
    Bump { peak: f64 },
}

impl RadialProfile {
    pub fn vorticity(&self, r: f64, support_radius: f64) -> f64 {
        if r > support_radius {
            return 0.0;
        }
        match *self {
            RadialProfile::Uniform { vorticity } => vorticity,
            RadialProfile::Bump { peak } => {
                let s = 1.0 - (r / support_radius).powi(2);
                peak * s * s
            }
        }
    }

    /// `Γ(r)`: vorticity integrated over the disk of radius `min(r, R)`.
    pub fn cumulative(&self, r: f64, support_radius: f64) -> f64 {
        let r = r.clamp(0.0, support_radius);
        match *self {
            RadialProfile::Uniform { vorticity } => vorticity * PI * r * r,
            RadialProfile::Bump { peak } => {
                let r2 = r * r;
                let big2 = support_radius * support_radius;
                TAU * peak * (r2 / 2.0 - r2 * r2 / (2.0 * big2) + r2 * r2 * r2 / (6.0 * big2 * big2))
            }
        }
    }
}

/// Compactly supported radially symmetric vorticity about `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialBlob {
    pub center: Point2,
    pub support_radius: f64,
    pub profile: RadialProfile,
}

impl RadialBlob {
    pub fn new(center: Point2, support_radius: f64, profile: RadialProfile) -> Self {
        Self {
            center,
            support_radius,
            profile,
        }
    }

    pub fn vorticity_at(&self, y: Point2) -> f64 {
        self.profile.vorticity((y - self.center).norm(), self.support_radius)
    }

    pub fn cumulative_circulation(&self, r: f64) -> f64 {
        self.profile.cumulative(r, self.support_radius)
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative_circulation(self.support_radius)
    }

    /// Plane flow of the blob via the circulation shortcut `Γ(r)/(2π r)`.
    fn plane_velocity(&self, x: Point2) -> Vec2 {
        let d = x - self.center;
        let r2 = d.norm_sq();
        if r2 == 0.0 {
            return Vec2::ZERO;
        }
        d.perp() * (self.cumulative_circulation(r2.sqrt()) / (TAU * r2))
    }

    /// `∫ K(x, y) ω(y) dy` over the blob in polar coordinates about the center,
    /// with Romberg extrapolation of the midpoint rule in the radius.
    fn integrate<K>(&self, kernel: K, tolerance: f64) -> Result<Vec2>
    where
        K: Fn(Point2) -> Result<Vec2>,
    {
        let big_r = self.support_radius;
        let level_sum = |level: u32| -> Result<Vec2> {
            let n_r = 4usize << level;
            let n_phi = 8usize << level;
            let dr = big_r / n_r as f64;
            let dphi = TAU / n_phi as f64;
            let mut acc = Vec2::ZERO;
            for ir in 0..n_r {
                let r = (ir as f64 + 0.5) * dr;
                let weight = self.profile.vorticity(r, big_r) * r * dr * dphi;
                if weight == 0.0 {
                    continue;
                }
                let mut ring = Vec2::ZERO;
                for ip in 0..n_phi {
                    let phi = (ip as f64 + 0.5) * dphi;
                    ring += kernel(self.center + Point2::polar(r, phi).to_vec())?;
                }
                acc += ring * weight;
            }
            Ok(acc)
        };

        let mut table: Vec<Vec<Vec2>> = vec![vec![level_sum(0)?]];
        for level in 1..=BLOB_QUADRATURE_MAX_LEVEL {
            let mut row = vec![level_sum(level)?];
            for k in 1..=level as usize {
                let fine = row[k - 1];
                let coarse = table[level as usize - 1][k - 1];
                let factor = 4f64.powi(k as i32) - 1.0;
                row.push(fine + (fine - coarse) * (1.0 / factor));
            }
            let best = row[level as usize];
            let prev = table[level as usize - 1][level as usize - 1];
            table.push(row);
            if (best - prev).norm() <= tolerance * (1.0 + best.norm()) {
                return Ok(best);
            }
        }
        let last = BLOB_QUADRATURE_MAX_LEVEL as usize;
        Ok(table[last][last])
    }
}

/// Point vortices and blobs in the exterior of the unit disk, with boundary circulation `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VorticityConfig {
    #[serde(default)]
    pub vortices: Vec<PointVortex>,
    #[serde(default)]
    pub blobs: Vec<RadialBlob>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "default_margin")]
    pub separation_margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_SEPARATION_MARGIN
}

impl Default for VorticityConfig {
    fn default() -> Self {
        Self {
            vortices: Vec::new(),
            blobs: Vec::new(),
            gamma: 0.0,
            separation_margin: DEFAULT_SEPARATION_MARGIN,
        }
    }
}

impl VorticityConfig {
    /// Validated configuration with the default separation margin.
    pub fn new(vortices: Vec<PointVortex>, blobs: Vec<RadialBlob>, gamma: f64) -> Result<Self> {
        let config = Self {
            vortices,
            blobs,
            gamma,
            separation_margin: DEFAULT_SEPARATION_MARGIN,
        };
        config.validate()?;
        Ok(config)
    }

    /// No vorticity, circulation `γ` only.
    pub fn circulation_only(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn single_vortex(position: Point2, strength: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![PointVortex::new(position, strength)], Vec::new(), gamma)
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty() && self.blobs.is_empty()
    }

    /// Checks finiteness and that all support stays clear of the closed unit disk.
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(Error::InvalidArgument("circulation gamma must be finite".into()));
        }
        if !(self.separation_margin >= 0.0) {
            return Err(Error::InvalidArgument("separation margin must be non-negative".into()));
        }
        let limit = 1.0 + self.separation_margin;
        for (k, v) in self.vortices.iter().enumerate() {
            if !v.position.is_finite() || !v.strength.is_finite() {
                return Err(Error::InvalidArgument(format!("vortex {k} has non-finite data")));
            }
            if v.position.norm() <= limit {
                return Err(Error::InvalidArgument(format!(
                    "vortex {k} at radius {} is not outside the unit disk plus margin {}",
                    v.position.norm(),
                    self.separation_margin
                )));
            }
        }
        for (k, b) in self.blobs.iter().enumerate() {
            if !b.center.is_finite() || !(b.support_radius > 0.0) || !b.support_radius.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "blob {k} needs a finite center and positive support radius"
                )));
            }
            let total = b.total_mass();
            if !total.is_finite() {
                return Err(Error::InvalidArgument(format!("blob {k} has non-finite vorticity")));
            }
            if b.center.norm() - b.support_radius <= limit {
                return Err(Error::InvalidArgument(format!(
                    "blob {k} support reaches within margin {} of the unit disk",
                    self.separation_margin
                )));
            }
        }
        Ok(())
    }
}

/// `α = γ + ∫ ω`, the coefficient of the harmonic field in the exact flow.
pub fn alpha(config: &VorticityConfig) -> f64 {
    config.gamma
        + config.vortices.iter().map(|v| v.strength).sum::<f64>()
        + config.blobs.iter().map(RadialBlob::total_mass).sum::<f64>()
}

/// Plane flow `u_P = K_{R²}[ω]`. The circulation `γ` does not enter.
pub fn velocity_plane(config: &VorticityConfig, x: Point2) -> Result<Vec2> {
    let mut u = Vec2::ZERO;
    for v in &config.vortices {
        u += biot_savart_plane(x, v.position)? * v.strength;
    }
    for b in &config.blobs {
        u += b.plane_velocity(x);
    }
    Ok(u)
}

/// Exact remainder `u_R` from the image formula, with the default blob tolerance.
pub fn velocity_remainder_exact(config: &VorticityConfig, x: Point2) -> Result<Vec2> {
    velocity_remainder_exact_with_tolerance(config, x, DEFAULT_BLOB_QUADRATURE_TOLERANCE)
}

pub fn velocity_remainder_exact_with_tolerance(
    config: &VorticityConfig,
    x: Point2,
    blob_tolerance: f64,
) -> Result<Vec2> {
    if !(x.norm() > 1.0) {
        return Err(Error::Domain(format!(
            "remainder flow is defined outside the unit disk, got |x| = {}",
            x.norm()
        )));
    }
    let image_kernel = |y: Point2| -> Result<Vec2> { biot_savart_plane(x, image_point(y)?) };
    let mut u = harmonic_field(x)? * alpha(config);
    for v in &config.vortices {
        u += image_kernel(v.position)? * (-v.strength);
    }
    for b in &config.blobs {
        u += -b.integrate(image_kernel, blob_tolerance)?;
    }
    Ok(u)
}

/// Exact exterior solution `u = u_P + u_R`.
pub fn velocity_total_exact(config: &VorticityConfig, x: Point2) -> Result<Vec2> {
    Ok(velocity_plane(config, x)? + velocity_remainder_exact(config, x)?)
}

/// Where a field may be evaluated without error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityDomain {
    /// The whole plane minus point singularities of the sources.
    Plane,
    /// `|x| > 1`.
    ExteriorDisk,
    /// `|x| > 1` minus point singularities.
    ExteriorMinusSingularities,
}

/// Anything that can be sampled as a velocity field.
pub trait VelocityField {
    fn velocity(&self, x: Point2) -> Result<Vec2>;
    fn domain(&self) -> ValidityDomain;
}

/// `u_P` of a configuration.
#[derive(Debug, Clone, Copy)]
pub struct PlaneFlow<'a>(pub &'a VorticityConfig);

/// Exact `u_R` of a configuration.
#[derive(Debug, Clone, Copy)]
pub struct RemainderFlow<'a>(pub &'a VorticityConfig);

/// Exact `u_P + u_R` of a configuration.
#[derive(Debug, Clone, Copy)]
pub struct TotalFlow<'a>(pub &'a VorticityConfig);

/// Pointwise sum or difference of two fields.
#[derive(Debug, Clone, Copy)]
pub struct Combination<A, B> {
    pub first: A,
    pub second: B,
    pub second_sign: f64,
}

impl<A, B> Combination<A, B> {
    pub fn sum(first: A, second: B) -> Self {
        Self {
            first,
            second,
            second_sign: 1.0,
        }
    }

    pub fn difference(first: A, second: B) -> Self {
        Self {
            first,
            second,
            second_sign: -1.0,
        }
    }
}

impl VelocityField for PlaneFlow<'_> {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        velocity_plane(self.0, x)
    }
    fn domain(&self) -> ValidityDomain {
        ValidityDomain::Plane
    }
}

impl VelocityField for RemainderFlow<'_> {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        velocity_remainder_exact(self.0, x)
    }
    fn domain(&self) -> ValidityDomain {
        ValidityDomain::ExteriorDisk
    }
}

impl VelocityField for TotalFlow<'_> {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        velocity_total_exact(self.0, x)
    }
    fn domain(&self) -> ValidityDomain {
        ValidityDomain::ExteriorMinusSingularities
    }
}

impl<A: VelocityField, B: VelocityField> VelocityField for Combination<A, B> {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        Ok(self.first.velocity(x)? + self.second.velocity(x)? * self.second_sign)
    }
    fn domain(&self) -> ValidityDomain {
        use ValidityDomain::*;
        match (self.first.domain(), self.second.domain()) {
            (Plane, Plane) => Plane,
            (ExteriorDisk, ExteriorDisk) => ExteriorDisk,
            _ => ExteriorMinusSingularities,
        }
    }
}

impl<F: VelocityField + ?Sized> VelocityField for &F {
    fn velocity(&self, x: Point2) -> Result<Vec2> {
        (**self).velocity(x)
    }
    fn domain(&self) -> ValidityDomain {
        (**self).domain()
    }
}

/// `∮ u·τ ds` around the circle of given center and radius, counterclockwise,
/// by the periodic midpoint rule.
pub fn line_circulation<F: VelocityField + ?Sized>(
    field: &F,
    center: Point2,
    radius: f64,
    points: usize,
) -> Result<f64> {
    circle_quadrature(field, center, radius, points, |u, dir| u.dot(dir.perp()))
}

/// Outward flux `∮ u·n ds` through the circle of given center and radius.
pub fn line_flux<F: VelocityField + ?Sized>(
    field: &F,
    center: Point2,
    radius: f64,
    points: usize,
) -> Result<f64> {
    circle_quadrature(field, center, radius, points, |u, dir| u.dot(dir))
}

fn circle_quadrature<F, G>(field: &F, center: Point2, radius: f64, points: usize, g: G) -> Result<f64>
where
    F: VelocityField + ?Sized,
    G: Fn(Vec2, Vec2) -> f64,
{
    let dphi = TAU / points as f64;
    let mut acc = 0.0;
    for k in 0..points {
        let phi = (k as f64 + 0.5) * dphi;
        let dir = Point2::on_unit_circle(phi).to_vec();
        acc += g(field.velocity(center + dir * radius)?, dir);
    }
    Ok(acc * radius * dphi)
}
