//! Uniform node/midpoint mesh of the unit circle.
//!
//! Node `i` (0-based) sits at `θ_i = 2π i / N` and midpoint `i` at
//! `θ̃_i = 2π (i + ½) / N`, so 0-based index `i` corresponds to the 1-based
//! index `i + 1` of the usual mathematical notation. Midpoint `i` lies
//! between nodes `i` and `i + 1 (mod N)`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::kernels::Point2;

/// Immutable staggered mesh: `N` boundary vortex nodes and `N` collocation midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformBoundaryMesh {
    n: usize,
    theta: Vec<f64>,
    theta_tilde: Vec<f64>,
    nodes: Vec<Point2>,
    midpoints: Vec<Point2>,
}

impl UniformBoundaryMesh {
    /// Builds the mesh with `n ≥ 2` nodes.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "a boundary mesh needs at least 2 nodes, got {n}"
            )));
        }
        let nf = n as f64;
        let theta: Vec<f64> = (0..n).map(|i| i as f64 * TAU / nf).collect();
        let theta_tilde: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * TAU / nf).collect();
        let nodes = theta.iter().map(|&t| Point2::on_unit_circle(t)).collect();
        let midpoints = theta_tilde.iter().map(|&t| Point2::on_unit_circle(t)).collect();
        Ok(Self {
            n,
            theta,
            theta_tilde,
            nodes,
            midpoints,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Node angles `θ_i`, strictly increasing in `[0, 2π)`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Midpoint angles `θ̃_i ∈ (θ_i, θ_{i+1})`.
    pub fn theta_tilde(&self) -> &[f64] {
        &self.theta_tilde
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn midpoints(&self) -> &[Point2] {
        &self.midpoints
    }

    /// Half the angular offset `(θ̃_i - θ_j) / 2 = π (i - j + ½) / N`.
    ///
    /// Computed from the integer offset so that the pair `(i - j, j - i - 1)`
    /// yields exactly opposite arguments and the cotangent sums cancel
    /// pairwise in floating point.
    pub fn half_offset(&self, midpoint: usize, node: usize) -> f64 {
        let k = midpoint as f64 - node as f64;
        (k + 0.5) * PI / self.n as f64
    }

    /// Row and column cotangent sums of the staggered mesh.
    ///
    /// `row[i] = Σ_j cot((θ̃_i - θ_j)/2)` and `column[i] = Σ_j cot((θ̃_j - θ_i)/2)`;
    /// both vanish for the uniform mesh by odd symmetry of the cotangent.
    pub fn cancellation_sums(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let row = (0..n)
            .map(|i| (0..n).map(|j| 1.0 / self.half_offset(i, j).tan()).sum())
            .collect();
        let column = (0..n)
            .map(|i| (0..n).map(|j| 1.0 / self.half_offset(j, i).tan()).sum())
            .collect();
        (row, column)
    }

    /// Largest absolute row or column cotangent sum.
    pub fn cancellation_residual(&self) -> f64 {
        let (row, column) = self.cancellation_sums();
        row.iter()
            .chain(column.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}
