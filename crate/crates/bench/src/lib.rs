//! Shared fixtures for the pipeline benchmarks.

use std::f64::consts::PI;
use std::sync::Arc;

use nnls_core::asymptotics::SectorData;
use nnls_core::scattering::{reflection_coeffs, shifted_step_spectral, Reflection};
use nnls_core::{DiscreteSpectrum, StepParams};

/// `(A, R)` with n = 0, 1, 2 zeros.
pub const CONFIGS: [(f64, f64); 3] = [(1.0, 1.0), (1.0, PI), (1.0, 2.0 * PI)];

pub fn params(a: f64, r: f64) -> StepParams {
    StepParams::new(a, r).expect("valid bench parameters")
}

pub fn reflection(p: StepParams) -> Arc<dyn Reflection + Send> {
    Arc::new(reflection_coeffs(&shifted_step_spectral(p)))
}

pub fn spectrum(p: StepParams) -> DiscreteSpectrum {
    DiscreteSpectrum::compute(p).expect("regular bench parameters")
}

pub fn sector(p: StepParams, xi: f64) -> (DiscreteSpectrum, SectorData) {
    let ds = spectrum(p);
    let sd = SectorData::new(xi, &ds, reflection(p), 1e-10).expect("interior ray");
    (ds, sd)
}

pub fn k_grid(n: usize, k_max: f64) -> Vec<f64> {
    (0..n).map(|i| -k_max + 2.0 * k_max * (i as f64 + 0.5) / n as f64).filter(|k| k.abs() > 1e-3).collect()
}
