//! Pointwise kernels of the exterior-disk problem.
//!
//! Conventions used throughout the crate:
//!
//! * `v^⊥ = (-v2, v1)`, the rotation by π/2.
//! * On the unit circle the normal is `n(x) = x`, pointing from the disk
//!   into the fluid, and the tangent is `τ(x) = x^⊥`. With this orientation
//!   the normal trace of the plane Biot–Savart kernel is exactly the
//!   circular Hilbert kernel `-(1/2) cot((θ-φ)/2)`.
//!
//! The potentials themselves (the fundamental solution `-(1/2π) log|x|` and
//! the Dirichlet Green function of the exterior disk) are never evaluated;
//! only their rotated gradients are.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance to a kernel's singular set below which evaluation is refused.
pub const DEFAULT_SINGULAR_CUTOFF: f64 = 1e-14;

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

/// A velocity (or any displacement) vector of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub u1: f64,
    pub u2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// The point `(cos θ, sin θ)` of the unit circle.
    pub fn on_unit_circle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn polar(radius: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(radius * c, radius * s)
    }

    /// Position vector `x - 0`.
    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x1, self.x2)
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn norm_sq(self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn angle(self) -> f64 {
        self.x2.atan2(self.x1)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Rotation about the origin by `angle`.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { u1: 0.0, u2: 0.0 };

    pub const fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    /// Rotation by π/2: `(u1, u2)^⊥ = (-u2, u1)`.
    pub fn perp(self) -> Self {
        Self::new(-self.u2, self.u1)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.u1 * other.u1 + self.u2 * other.u2
    }

    pub fn norm(self) -> f64 {
        self.u1.hypot(self.u2)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.u1 - s * self.u2, s * self.u1 + c * self.u2)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x1, x2]: [f64; 2]) -> Self {
        Self::new(x1, x2)
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x1, p.x2]
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([u1, u2]: [f64; 2]) -> Self {
        Self::new(u1, u2)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.u1, v.u2]
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x1 + rhs.u1, self.x2 + rhs.u2)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.u1 + rhs.u1, self.u2 + rhs.u2)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.u1 += rhs.u1;
        self.u2 += rhs.u2;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.u1 - rhs.u1, self.u2 - rhs.u2)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.u1, -self.u2)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self * rhs.u1, self * rhs.u2)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.u1 * rhs, self.u2 * rhs)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |acc, v| acc + v)
    }
}

/// Outward normal of the unit circle at `x`, as seen from the fluid: `n(x) = x`.
pub fn normal(x: Point2) -> Vec2 {
    x.to_vec()
}

/// Tangent of the unit circle at `x`: `τ(x) = n(x)^⊥`.
pub fn tangent(x: Point2) -> Vec2 {
    x.to_vec().perp()
}

/// `v^⊥ / |v|^2` with singularity check on `|v|`.
fn rotated_inverse(v: Vec2, what: &'static str, cutoff: f64) -> Result<Vec2> {
    let r2 = v.norm_sq();
    let r = r2.sqrt();
    if !(r >= cutoff) {
        return Err(Error::SingularEvaluation {
            what,
            distance: r,
            cutoff,
        });
    }
    Ok(v.perp() * (1.0 / r2))
}

/// Plane Biot–Savart kernel `(1/2π) (x-y)^⊥ / |x-y|^2`.
pub fn biot_savart_plane(x: Point2, y: Point2) -> Result<Vec2> {
    biot_savart_plane_with_cutoff(x, y, DEFAULT_SINGULAR_CUTOFF)
}

pub fn biot_savart_plane_with_cutoff(x: Point2, y: Point2, cutoff: f64) -> Result<Vec2> {
    Ok(rotated_inverse(x - y, "plane Biot-Savart kernel at x = y", cutoff)? * (0.5 / PI))
}

/// Harmonic field `H(x) = (1/2π) x^⊥ / |x|^2`, tangent to every circle about the origin.
pub fn harmonic_field(x: Point2) -> Result<Vec2> {
    Ok(rotated_inverse(x.to_vec(), "harmonic field at the origin", DEFAULT_SINGULAR_CUTOFF)?
        * (0.5 / PI))
}

/// Reflection across the unit circle, `y* = y / |y|^2`.
pub fn image_point(y: Point2) -> Result<Point2> {
    let r2 = y.norm_sq();
    if !(r2.sqrt() >= DEFAULT_SINGULAR_CUTOFF) {
        return Err(Error::SingularEvaluation {
            what: "image of the origin",
            distance: r2.sqrt(),
            cutoff: DEFAULT_SINGULAR_CUTOFF,
        });
    }
    Ok(Point2::new(y.x1 / r2, y.x2 / r2))
}

/// Rotated gradient of the exterior-disk Dirichlet Green function,
/// `(1/2π) [ (x-y)^⊥/|x-y|^2 - (x-y*)^⊥/|x-y*|^2 ]`.
///
/// The formula is evaluated for any `x ≠ y, y*`; the exterior restriction
/// `|x|, |y| > 1` is where it equals the Green kernel.
pub fn exterior_green_kernel(x: Point2, y: Point2) -> Result<Vec2> {
    let direct = rotated_inverse(x - y, "exterior Green kernel at x = y", DEFAULT_SINGULAR_CUTOFF)?;
    let y_star = image_point(y)?;
    let image = rotated_inverse(
        x - y_star,
        "exterior Green kernel at x = y*",
        DEFAULT_SINGULAR_CUTOFF,
    )?;
    Ok((direct - image) * (0.5 / PI))
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_angle(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

fn check_angle_separation(theta: f64, phi: f64, what: &'static str) -> Result<()> {
    let sep = wrap_angle(theta - phi).abs();
    if !(sep >= DEFAULT_SINGULAR_CUTOFF) {
        return Err(Error::SingularEvaluation {
            what,
            distance: sep,
            cutoff: DEFAULT_SINGULAR_CUTOFF,
        });
    }
    Ok(())
}

/// Normal trace of the unnormalized kernel on the circle:
/// `((x-y)^⊥/|x-y|^2)·n(x) = -(1/2) cot((θ-φ)/2)`.
pub fn cot_kernel_normal(theta: f64, phi: f64) -> Result<f64> {
    check_angle_separation(theta, phi, "cotangent kernel at θ = φ")?;
    Ok(-0.5 / ((theta - phi) * 0.5).tan())
}

/// `((x-y)/|x-y|^2)·n(x)` for two points of the unit circle; identically 1/2.
///
/// Computed from the geometry rather than returned as a constant so that it
/// doubles as a check of the normal convention.
pub fn radial_kernel_normal(theta: f64, phi: f64) -> Result<f64> {
    check_angle_separation(theta, phi, "radial kernel at θ = φ")?;
    let x = Point2::on_unit_circle(theta);
    let y = Point2::on_unit_circle(phi);
    let d = x - y;
    Ok(d.dot(normal(x)) / d.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn plane_kernel_unit_offsets() {
        let v = biot_savart_plane(Point2::new(1.0, 0.0), Point2::ORIGIN).unwrap();
        assert_abs_diff_eq!(v.u1, 0.0);
        assert_abs_diff_eq!(v.u2, 1.0 / TAU, epsilon = 1e-16);

        let v = biot_savart_plane(Point2::new(0.5, 2.5), Point2::new(0.5, 0.5)).unwrap();
        assert_abs_diff_eq!(v.u1, -1.0 / (4.0 * PI), epsilon = 1e-16);
        assert_abs_diff_eq!(v.u2, 0.0);
    }

    #[test]
    fn plane_kernel_rejects_coincident_points() {
        let p = Point2::new(0.3, -0.2);
        assert!(matches!(
            biot_savart_plane(p, p),
            Err(Error::SingularEvaluation { .. })
        ));
        assert!(biot_savart_plane_with_cutoff(p, Point2::new(0.3, -0.2 + 1e-6), 1e-3).is_err());
    }

    #[test]
    fn harmonic_field_values_and_tangency() {
        let v = harmonic_field(Point2::new(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.u2, 1.0 / (4.0 * PI), epsilon = 1e-16);
        let v = harmonic_field(Point2::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v.u1, -1.0 / TAU, epsilon = 1e-16);
        for k in 0..64 {
            let x = Point2::on_unit_circle(k as f64 * 0.1);
            assert_abs_diff_eq!(harmonic_field(x).unwrap().dot(normal(x)), 0.0, epsilon = 1e-16);
        }
        assert!(harmonic_field(Point2::ORIGIN).is_err());
    }

    #[test]
    fn image_point_values() {
        assert_eq!(image_point(Point2::new(2.0, 0.0)).unwrap(), Point2::new(0.5, 0.0));
        assert_eq!(image_point(Point2::new(0.0, 4.0)).unwrap(), Point2::new(0.0, 0.25));
        let p = Point2::on_unit_circle(1.3);
        let q = image_point(p).unwrap();
        assert_abs_diff_eq!(p.x1, q.x1, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2, q.x2, epsilon = 1e-15);
        let y = Point2::new(-3.1, 1.7);
        let back = image_point(image_point(y).unwrap()).unwrap();
        assert_abs_diff_eq!(back.x1, y.x1, epsilon = 1e-14);
        assert_abs_diff_eq!(back.x2, y.x2, epsilon = 1e-14);
        assert!(image_point(Point2::ORIGIN).is_err());
    }

    #[test]
    fn exterior_green_kernel_hand_value() {
        // y* = (1/2, 0): (1/2π) [ (0,1) - (0, 2/5) ] = (0, 3/(10π))
        let v = exterior_green_kernel(Point2::new(3.0, 0.0), Point2::new(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.u1, 0.0, epsilon = 1e-17);
        assert_abs_diff_eq!(v.u2, 3.0 / (10.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn exterior_green_kernel_is_tangent_on_the_circle() {
        let y = Point2::new(2.0, 0.0);
        for k in 0..360 {
            let x = Point2::on_unit_circle(k as f64 * TAU / 360.0);
            let v = exterior_green_kernel(x, y).unwrap();
            assert!(v.dot(normal(x)).abs() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn exterior_green_kernel_singular_at_image() {
        let y = Point2::new(2.0, 0.0);
        assert!(exterior_green_kernel(y, y).is_err());
        assert!(exterior_green_kernel(Point2::new(0.5, 0.0), y).is_err());
    }

    /// The kernel is ∇⊥_x G(x, y). Recovering G(x, y) - G(x0, y) by a line
    /// integral of -K^⊥ and comparing both argument orders checks the
    /// symmetry of the Green function.
    #[test]
    fn exterior_green_potential_is_symmetric() {
        fn potential_difference(from: Point2, to: Point2, source: Point2) -> f64 {
            // ∇_x G = -(∇⊥_x G)^⊥, integrated along the segment by the midpoint rule.
            let steps = 20_000;
            let d = to - from;
            (0..steps)
                .map(|k| {
                    let t = (k as f64 + 0.5) / steps as f64;
                    let p = from + d * t;
                    let grad = -exterior_green_kernel(p, source).unwrap().perp();
                    grad.dot(d) / steps as f64
                })
                .sum()
        }
        // G vanishes on the circle, so integrate from a boundary point.
        let base = Point2::new(0.0, 1.0);
        let x = Point2::new(1.7, 1.1);
        let y = Point2::new(-0.4, 2.3);
        let gxy = potential_difference(base, x, y);
        let gyx = potential_difference(base, y, x);
        assert!((gxy - gyx).abs() < 1e-7, "{gxy} vs {gyx}");
        let closed = (1.0 / TAU) * ((x - y).norm() / ((x - image_point(y).unwrap()).norm() * y.norm())).ln();
        assert!((gxy - closed).abs() < 1e-7, "{gxy} vs {closed}");
    }

    #[test]
    fn cot_kernel_examples() {
        assert_abs_diff_eq!(cot_kernel_normal(PI / 2.0, 0.0).unwrap(), -0.5, epsilon = 1e-15);
        let x = Point2::on_unit_circle(PI / 2.0);
        let y = Point2::on_unit_circle(0.0);
        let geometric = -(y.to_vec().perp().dot(x.to_vec())) / (x - y).norm_sq();
        assert_abs_diff_eq!(geometric, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cot_kernel_normal(PI, 0.0).unwrap(), 0.0, epsilon = 1e-16);
        let mut prev = cot_kernel_normal(1e-1, 0.0).unwrap();
        for e in 2..12 {
            let v = cot_kernel_normal(10f64.powi(-e), 0.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(cot_kernel_normal(0.4, 0.4).is_err());
        assert!(cot_kernel_normal(0.4, 0.4 + TAU).is_err());
    }

    #[test]
    fn radial_kernel_examples() {
        assert_abs_diff_eq!(radial_kernel_normal(PI / 2.0, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(radial_kernel_normal(0.1, 5.9).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(radial_kernel_normal(PI, 0.0).unwrap(), 0.5, epsilon = 1e-16);
        assert!(radial_kernel_normal(2.0, 2.0).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(-0.5), -0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(wrap_angle(TAU + 0.25), 0.25, epsilon = 1e-15);
    }
}
