//! Inverse scattering data and long-time asymptotics for the integrable
//! nonlocal focusing NLS equation
//!
//! ```text
//! i q_t + q_xx + 2 q(x,t)^2 conj(q(-x,t)) = 0
//! ```
//!
//! with step-like initial data `q0(x) -> 0` as `x -> -inf` and `q0(x) -> A`
//! as `x -> +inf`, in particular the shifted step `q0 = A H(x - R)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: complex Gamma, adaptive Gauss-Kronrod quadrature, bracketed
//!   root finding, phase unwrapping, a Dormand-Prince stepper.
//! * [`scattering`]: spectral functions `a1`, `a2`, `b` (closed form or from
//!   the Jost ODE) and the reflection coefficients `r1`, `r2`.
//! * [`spectrum`]: zeros of `a1`, thresholds `omega_j`, winding of `arg a1`,
//!   norming constants.
//! * [`deformation`]: sector classification, `nu`, the `chi_s` integrals,
//!   `delta`, modified reflection coefficients and the residue constants.
//! * [`asymptotics`]: the long-time formulas for `q(x,t)` in every sector and
//!   an algebraically independent reconstruction through the parabolic
//!   cylinder parametrix data.
//! * [`oracle`]: a Crank-Nicolson integrator for the PDE itself and ray-wise
//!   comparison against the asymptotics.

pub mod asymptotics;
pub mod deformation;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod scattering;
pub mod spectrum;

pub use num_complex::Complex64;
pub use scattering::{Profile, ReflectionPair, SpectralData, StepParams};
pub use spectrum::{DiscreteSpectrum, NormingConstants};
pub use deformation::{DeltaContext, SectorKind, SectorLabel, TheoremCase};
pub use asymptotics::{AsymptoticEval, BPipelineEval, Correction, RemainderOrder, SectorRow};
pub use oracle::{FieldState, GridConfig, Scheme};
pub use error::{Error, Result};
pub use numerics::QuadratureResult;

/// Complex number type used throughout.
pub type ComplexValue = Complex64;

/// Shorthand constructor.
#[cfg(test)]
#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
