//! Numerical building blocks: complex Gamma, adaptive quadrature, bracketed
//! root finding, phase unwrapping, interpolation and an adaptive RK stepper.
//!
//! Everything here is a pure function of its inputs.

mod gamma;
mod interp;
mod ode;
mod quad;
mod roots;
mod unwrap;

pub use gamma::{complex_gamma, complex_rgamma};
pub use interp::cubic_interp;
pub use ode::dopri5;
pub use quad::{adaptive_quad, adaptive_quad_with, QuadOptions, QuadratureResult};
pub use roots::{find_root_1d, find_root_newton};
pub use unwrap::{track_arg, unwrap_arg, wrap_angle, ArgTrace, TRACK_MAX_JUMP};
