//! Pseudo-spectral simulation of biaxial nematic frame hydrodynamics on the
//! periodic square, with Littlewood–Paley diagnostics for comparing runs.
//!
//! The order parameter is a field of orthonormal frames `(n1, n2, n3)` coupled
//! to an incompressible in-plane velocity. The crate is organized bottom-up:
//!
//! - [`frame`]: pointwise SO(3) algebra (tangent bases, rotational
//!   derivatives, the local tensor basis);
//! - [`spectral`]: grids, fields and Fourier-space calculus;
//! - [`elasticity`]: the orientational elastic energy and its forces;
//! - [`hydro`]: kinematics, frame and momentum right-hand sides, the energy
//!   ledger;
//! - [`lp`]: dyadic blocks, Besov norms and twin-run difference metrics;
//! - [`sim`]: time stepping, initial data and twin experiments;
//! - [`io`]: configuration, snapshots and CSV output.

pub mod elasticity;
pub mod error;
pub mod frame;
pub mod frame_field;
pub mod hydro;
pub mod io;
pub mod lp;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use frame::Frame;
pub use frame_field::{FrameField, FrameGradients};
pub use spectral::{Grid2D, Spectral};
