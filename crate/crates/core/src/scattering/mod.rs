//! Spectral functions `a1`, `a2`, `b` and reflection coefficients.

mod jost;
mod profile;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::cubic_interp;

pub use jost::{ode_scattering, OdeOptions};
pub use profile::Profile;

/// Default radius of the excluded neighbourhood of `k = 0`.
pub const K_PUNCTURE: f64 = 1e-3;

/// The shifted step `q0 = A` for `x > R`, `0` for `x < R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepParams {
    pub a: f64,
    pub r: f64,
}

impl StepParams {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!("A must be a positive finite number, got {a}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("R must be a positive finite number, got {r}")));
        }
        Ok(StepParams { a, r })
    }
}

/// Where a [`SpectralData`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ClosedForm,
    Ode,
}

/// Scattering matrix samples on a real grid, produced by [`ode_scattering`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledScattering {
    /// Increasing grid, never containing 0.
    pub ks: Vec<f64>,
    /// `[S11, S12, S21, S22] = [a1, -conj(b(-k)), b, a2]` per node.
    pub s: Vec<[Complex64; 4]>,
    pub right_limit: f64,
}

impl SampledScattering {
    fn entry(&self, k: Complex64, idx: usize) -> Result<Complex64> {
        if k.im != 0.0 {
            return Err(Error::Domain(format!("ODE spectral data is only available on the real line, got k = {k}")));
        }
        let k = k.re;
        let n = self.ks.len();
        if n == 0 || k < self.ks[0] || k > self.ks[n - 1] {
            return Err(Error::Domain(format!("k = {k} outside the sampled range")));
        }
        // never interpolate across the puncture at k = 0
        let split = self.ks.partition_point(|&v| v < 0.0);
        let (xs, lo) = if k < 0.0 { (&self.ks[..split], 0) } else { (&self.ks[split..], split) };
        let ys: Vec<Complex64> = self.s[lo..lo + xs.len()].iter().map(|row| row[idx]).collect();
        cubic_interp(xs, &ys, k).ok_or_else(|| Error::Domain(format!("k = {k} falls in the gap around k = 0")))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    ClosedForm(StepParams),
    Sampled(Arc<SampledScattering>),
}

/// Evaluators for `a1`, `a2`, `b` with their provenance.
///
/// The closed form is entire in `k` off the origin. Sampled data answer only
/// at real `k` inside the grid range.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    kind: Kind,
}

/// Closed-form spectral data of the shifted step.
pub fn shifted_step_spectral(params: StepParams) -> SpectralData {
    SpectralData { kind: Kind::ClosedForm(params) }
}

fn check_nonzero(k: Complex64) -> Result<()> {
    if k.norm() == 0.0 || !k.re.is_finite() || !k.im.is_finite() {
        return Err(Error::SingularPoint(format!("{k}")));
    }
    Ok(())
}

impl SpectralData {
    pub fn from_samples(samples: SampledScattering) -> Self {
        SpectralData { kind: Kind::Sampled(Arc::new(samples)) }
    }

    pub fn source(&self) -> Source {
        match self.kind {
            Kind::ClosedForm(_) => Source::ClosedForm,
            Kind::Sampled(_) => Source::Ode,
        }
    }

    /// Step parameters for closed-form data.
    pub fn params(&self) -> Option<StepParams> {
        match self.kind {
            Kind::ClosedForm(p) => Some(p),
            Kind::Sampled(_) => None,
        }
    }

    pub fn samples(&self) -> Option<&SampledScattering> {
        match &self.kind {
            Kind::ClosedForm(_) => None,
            Kind::Sampled(s) => Some(s),
        }
    }

    /// Background amplitude `A`.
    pub fn amplitude(&self) -> f64 {
        match &self.kind {
            Kind::ClosedForm(p) => p.a,
            Kind::Sampled(s) => s.right_limit,
        }
    }

    /// Real interval on which the evaluators are defined (`None` = everywhere).
    pub fn support(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::ClosedForm(_) => None,
            Kind::Sampled(s) => Some((s.ks[0], s.ks[s.ks.len() - 1])),
        }
    }

    pub fn a1(&self, k: Complex64) -> Result<Complex64> {
        check_nonzero(k)?;
        match &self.kind {
            Kind::ClosedForm(p) => {
                let i = Complex64::i();
                Ok(1.0 + p.a * p.a / (4.0 * k * k) * (4.0 * i * k * p.r).exp())
            }
            Kind::Sampled(s) => s.entry(k, 0),
        }
    }

    pub fn a2(&self, k: Complex64) -> Result<Complex64> {
        check_nonzero(k)?;
        match &self.kind {
            Kind::ClosedForm(_) => Ok(Complex64::new(1.0, 0.0)),
            Kind::Sampled(s) => s.entry(k, 3),
        }
    }

    pub fn b(&self, k: Complex64) -> Result<Complex64> {
        check_nonzero(k)?;
        match &self.kind {
            Kind::ClosedForm(p) => {
                let i = Complex64::i();
                Ok(p.a / (2.0 * i * k) * (2.0 * i * k * p.r).exp())
            }
            Kind::Sampled(s) => s.entry(k, 2),
        }
    }

    /// `conj(b(-conj k))`, the numerator of `r2`. For the closed form this
    /// is the analytic continuation (and equals `b(k)`); for sampled data it
    /// is read off the `S12` entry.
    pub fn b_star(&self, k: Complex64) -> Result<Complex64> {
        check_nonzero(k)?;
        match &self.kind {
            Kind::ClosedForm(_) => Ok(self.b(-k.conj())?.conj()),
            Kind::Sampled(s) => Ok(-s.entry(k, 1)?),
        }
    }

    /// `d a1/dk` (closed form only).
    pub fn a1_prime(&self, k: Complex64) -> Result<Complex64> {
        check_nonzero(k)?;
        match &self.kind {
            Kind::ClosedForm(p) => {
                let i = Complex64::i();
                let e = (4.0 * i * k * p.r).exp();
                Ok(p.a * p.a / 4.0 * e * (4.0 * i * p.r / (k * k) - 2.0 / (k * k * k)))
            }
            Kind::Sampled(_) => Err(Error::Domain("a1' is only available in closed form".into())),
        }
    }

    /// Residual of `a1 a2 + b conj(b(-k)) = 1` at real `k`.
    pub fn determinant_residual(&self, k: f64) -> Result<f64> {
        let kc = Complex64::new(k, 0.0);
        let d = self.a1(kc)? * self.a2(kc)? + self.b(kc)? * self.b_star(kc)?;
        Ok((d - 1.0).norm())
    }
}

/// Which algebraic route [`ReflectionPair`] uses for `1 + r1 r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// `1 + r1(k) r2(k)` from the reflection coefficients.
    #[default]
    Product,
    /// `1 / (a1(k) a2(k))`.
    InverseA,
}

/// Reflection data on the real line as needed by the scalar RH problem.
pub trait Reflection: Sync {
    fn r1(&self, k: f64) -> Result<Complex64>;
    fn r2(&self, k: f64) -> Result<Complex64>;

    fn one_plus_r1r2(&self, k: f64) -> Result<Complex64> {
        Ok(1.0 + self.r1(k)? * self.r2(k)?)
    }

    /// `d/dk ln(1 + r1 r2)`, by default a central difference.
    fn dlog(&self, k: f64) -> Result<Complex64> {
        let h = 1e-5 * k.abs().max(1.0);
        let fp = self.one_plus_r1r2(k + h)?;
        let fm = self.one_plus_r1r2(k - h)?;
        let f0 = self.one_plus_r1r2(k)?;
        Ok((fp - fm) / (2.0 * h * f0))
    }

    /// Largest `|k|` at which data exist (infinite for analytic data).
    fn extent(&self) -> f64 {
        f64::INFINITY
    }

    /// Bound `C` with `|1 + r1 r2 - 1| <= C / k^2` for large `|k|`.
    fn tail_constant(&self) -> f64;

    /// Sampling step that resolves the phase of `1 + r1 r2` on `(-inf, -xi]`.
    fn phase_step(&self, _xi: f64) -> f64 {
        0.01
    }

    /// Typical oscillation period of `1 + r1 r2`; quadratures pre-split
    /// their intervals at this spacing.
    fn period(&self) -> f64 {
        1.0
    }

    /// Left end `-Z` of the truncated half-line: beyond it `|1 + r1 r2 - 1|`
    /// stays below 1/2 and the neglected part of the `chi_0` integral is
    /// below `tol`.
    fn tail_start(&self, xi: f64, tol: f64) -> Result<f64> {
        let c = self.tail_constant();
        let mut z = (50.0f64).max(2.0 * xi).max((c / tol.max(1e-300)).sqrt().min(1e6));
        if z > self.extent() {
            z = self.extent();
        }
        Ok(z)
    }
}

/// `r1 = b / a1`, `r2 = conj(b(-conj k)) / a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionPair {
    sd: SpectralData,
    route: Route,
}

pub fn reflection_coeffs(sd: &SpectralData) -> ReflectionPair {
    ReflectionPair { sd: sd.clone(), route: Route::Product }
}

fn pole_check(a: Complex64, k: Complex64) -> Result<Complex64> {
    if a.norm() < 1e-14 {
        return Err(Error::ReflectionPole(format!("{k}")));
    }
    Ok(a)
}

impl ReflectionPair {
    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.sd
    }

    pub fn r1_at(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.sd.b(k)? / pole_check(self.sd.a1(k)?, k)?)
    }

    pub fn r2_at(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.sd.b_star(k)? / pole_check(self.sd.a2(k)?, k)?)
    }
}

impl Reflection for ReflectionPair {
    fn r1(&self, k: f64) -> Result<Complex64> {
        self.r1_at(Complex64::new(k, 0.0))
    }

    fn r2(&self, k: f64) -> Result<Complex64> {
        self.r2_at(Complex64::new(k, 0.0))
    }

    fn one_plus_r1r2(&self, k: f64) -> Result<Complex64> {
        match self.route {
            Route::Product => Ok(1.0 + self.r1(k)? * self.r2(k)?),
            Route::InverseA => {
                let kc = Complex64::new(k, 0.0);
                let a = self.sd.a1(kc)? * self.sd.a2(kc)?;
                Ok(1.0 / pole_check(a, kc)?)
            }
        }
    }

    fn dlog(&self, k: f64) -> Result<Complex64> {
        let kc = Complex64::new(k, 0.0);
        match self.sd.source() {
            // a2 = 1, so ln(1 + r1 r2) = -ln a1
            Source::ClosedForm => Ok(-self.sd.a1_prime(kc)? / pole_check(self.sd.a1(kc)?, kc)?),
            Source::Ode => {
                let h = 1e-5 * k.abs().max(1.0);
                let fp = self.one_plus_r1r2(k + h)?;
                let fm = self.one_plus_r1r2(k - h)?;
                Ok((fp - fm) / (2.0 * h * self.one_plus_r1r2(k)?))
            }
        }
    }

    fn extent(&self) -> f64 {
        match self.sd.support() {
            None => f64::INFINITY,
            Some((lo, hi)) => lo.abs().min(hi.abs()),
        }
    }

    fn tail_constant(&self) -> f64 {
        let a = self.sd.amplitude();
        a * a / 4.0
    }

    fn phase_step(&self, xi: f64) -> f64 {
        match (self.sd.params(), self.sd.samples()) {
            (Some(p), _) => 0.25 * std::f64::consts::PI / (4.0 * p.r + 2.0 / xi),
            (None, Some(s)) => min_spacing(&s.ks),
            _ => 0.01,
        }
    }

    fn period(&self) -> f64 {
        match (self.sd.params(), self.sd.samples()) {
            (Some(p), _) => std::f64::consts::PI / (2.0 * p.r),
            (None, Some(s)) => 8.0 * min_spacing(&s.ks),
            _ => 1.0,
        }
    }

    fn tail_start(&self, xi: f64, tol: f64) -> Result<f64> {
        match self.sd.params() {
            Some(p) => {
                // the tail remainder after one integration by parts is about
                // C / (4 R Z^3) for the oscillating closed form
                let c = self.tail_constant();
                let mut z = (50.0f64)
                    .max(20.0 / p.r)
                    .max(2.0 * xi)
                    .max((c / (4.0 * p.r * tol.max(1e-300))).cbrt().min(1e6));
                while (self.one_plus_r1r2(-z)? - 1.0).norm() > 0.5 {
                    z *= 2.0;
                }
                Ok(z)
            }
            None => {
                let z = self.extent();
                let dev = (self.one_plus_r1r2(-z)? - 1.0).norm();
                if dev > 0.5 {
                    return Err(Error::Domain(format!(
                        "|r1 r2| = {dev:e} at the end of the grid k = {}; extend the grid",
                        -z
                    )));
                }
                Ok(z)
            }
        }
    }
}

fn min_spacing(ks: &[f64]) -> f64 {
    ks.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
}

/// Maximum residuals of the scattering identities over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitarityReport {
    /// `max |a1 a2 + b conj(b(-k)) - 1|`.
    pub determinant: f64,
    /// `max |conj(a1(-k)) - a1(k)|` and the same for `a2`.
    pub symmetry_a1: f64,
    pub symmetry_a2: f64,
    /// `max |S12(k) + conj(b(-k))|`; only meaningful for sampled data where
    /// both `k` and `-k` are available, 0 otherwise.
    pub symmetry_b: f64,
    pub points: usize,
}

impl UnitarityReport {
    pub fn max(&self) -> f64 {
        self.determinant.max(self.symmetry_a1).max(self.symmetry_a2).max(self.symmetry_b)
    }
}

/// Checks the determinant identity and the `k -> -conj k` symmetries. Grid
/// points inside the puncture or without data are skipped.
pub fn validate_unitarity(sd: &SpectralData, k_grid: &[f64]) -> UnitarityReport {
    let mut rep = UnitarityReport { determinant: 0.0, symmetry_a1: 0.0, symmetry_a2: 0.0, symmetry_b: 0.0, points: 0 };
    for &k in k_grid {
        if k.abs() < K_PUNCTURE {
            continue;
        }
        let Ok(det) = sd.determinant_residual(k) else { continue };
        rep.points += 1;
        rep.determinant = rep.determinant.max(det);
        let kp = Complex64::new(k, 0.0);
        let km = Complex64::new(-k, 0.0);
        if let (Ok(a), Ok(am)) = (sd.a1(kp), sd.a1(km)) {
            rep.symmetry_a1 = rep.symmetry_a1.max((am.conj() - a).norm());
        }
        if let (Ok(a), Ok(am)) = (sd.a2(kp), sd.a2(km)) {
            rep.symmetry_a2 = rep.symmetry_a2.max((am.conj() - a).norm());
        }
        if sd.source() == Source::Ode {
            if let (Ok(bs), Ok(bm)) = (sd.b_star(kp), sd.b(km)) {
                rep.symmetry_b = rep.symmetry_b.max((bs - bm.conj()).norm());
            }
        }
    }
    rep
}
