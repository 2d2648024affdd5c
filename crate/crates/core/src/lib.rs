//! Boundary point-vortex method for two-dimensional ideal flow outside the unit disk.
//!
//! The velocity outside the disk is split into the whole-plane field induced
//! by the vorticity and a harmonic remainder. The remainder is approximated by
//! `N` point vortices on the unit circle whose strengths solve a staggered
//! cotangent system; the approximation converges as the mesh is refined.
//!
//! Modules, bottom up:
//!
//! - [`kernels`]: points, vectors and the elementary kernels.
//! - [`circle_mesh`]: the node/midpoint mesh of the circle.
//! - [`fields`]: vorticity configurations and exact reference flows.
//! - [`hilbert_solver`]: circular Hilbert transforms and the cotangent system.
//! - [`boundary_method`]: the boundary solve, error sweeps and identity checks.
//! - [`dynamics`]: vortex motion driven by the approximate flow.

pub mod boundary_method;
pub mod circle_mesh;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod hilbert_solver;
pub mod kernels;

pub use circle_mesh::UniformBoundaryMesh;
pub use error::{Error, Result};
pub use fields::{PointVortex, RadialBlob, RadialProfile, VelocityField, VorticityConfig};
pub use kernels::{Point2, Vec2};
