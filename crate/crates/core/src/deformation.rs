//! Scalar RH machinery: sector classification, `nu`, the `chi_s` integrals,
//! `delta`, the modified reflection coefficients and the residue constants.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_quad_with, track_arg, QuadOptions};
use crate::scattering::Reflection;
use crate::spectrum::{DiscreteSpectrum, RAY_TOL};

/// Which row of the asymptotic picture a ray falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    /// `q -> A delta^2(0, xi) prod (omega/p)^2`, `xi > 0`.
    PlateauRight,
    Decay,
    /// The conjugated plateau for `xi < 0`.
    PlateauLeft,
}

/// The four cases of the long-time theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

impl TheoremCase {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremCase::I => "i",
            TheoremCase::II => "ii",
            TheoremCase::III => "iii",
            TheoremCase::IV => "iv",
        }
    }

    /// Cases stated for `xi < 0` and evaluated through the mirror pipeline.
    pub fn is_mirrored(self) -> bool {
        matches!(self, TheoremCase::II | TheoremCase::IV)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorLabel {
    pub xi: f64,
    /// Number of thresholds `omega_j` above `|xi|`.
    pub m: usize,
    pub kind: SectorKind,
    pub case: TheoremCase,
}

impl SectorLabel {
    /// `|xi|`, the point at which the direct pipeline is run.
    pub fn xi_direct(&self) -> f64 {
        self.xi.abs()
    }
}

/// Boundary rays `{0, +-omega_j, +-Re p_j}`, sorted.
pub fn boundary_rays(ds: &DiscreteSpectrum) -> Vec<f64> {
    let mut v = vec![0.0];
    for &w in &ds.omegas {
        v.push(w);
        v.push(-w);
    }
    for p in &ds.p {
        v.push(p.re);
        v.push(-p.re);
    }
    v.sort_by(f64::total_cmp);
    v
}

/// Sector containing `xi`, with the exclusion zone `tol` around boundary rays.
pub fn classify_sector_with(xi: f64, ds: &DiscreteSpectrum, tol: f64) -> Result<SectorLabel> {
    if !xi.is_finite() {
        return Err(Error::InvalidInput(format!("xi must be finite, got {xi}")));
    }
    ds.require_regular()?;
    for ray in boundary_rays(ds) {
        if (xi - ray).abs() <= tol {
            return Err(Error::BoundaryRay { xi, ray, tol });
        }
    }
    let xp = xi.abs();
    let m = ds.omegas.iter().filter(|&&w| w > xp).count();
    let beyond = xp > -ds.re_p(ds.n - m);
    let (kind, case) = match (xi > 0.0, beyond) {
        (true, true) => (SectorKind::PlateauRight, TheoremCase::I),
        (true, false) => (SectorKind::Decay, TheoremCase::III),
        (false, true) => (SectorKind::Decay, TheoremCase::II),
        (false, false) => (SectorKind::PlateauLeft, TheoremCase::IV),
    };
    Ok(SectorLabel { xi, m, kind, case })
}

pub fn classify_sector(xi: f64, ds: &DiscreteSpectrum) -> Result<SectorLabel> {
    classify_sector_with(xi, ds, RAY_TOL)
}

/// Continuous argument of `1 + r1 r2` on `(-inf, -xi]`, together with the
/// start of the truncated half-line.
pub fn winding_of_reflection(refl: &dyn Reflection, xi: f64, tol: f64) -> Result<f64> {
    let z = refl.tail_start(xi, tol)?;
    if !(-z < -xi) {
        return Err(Error::Domain(format!("xi = {xi} outside the data range")));
    }
    Ok(track_arg(|k| refl.one_plus_r1r2(k), -z, -xi, refl.phase_step(xi), 0)?.last_arg())
}

/// `nu(-xi) = -(1/2pi) ln|1 + r1 r2(-xi)| - (i/2pi)(W(-xi) + 2 pi m)`.
pub fn nu_of(refl: &dyn Reflection, xi: f64, m: usize, tol: f64) -> Result<Complex64> {
    if !(xi > 0.0) {
        return Err(Error::InvalidInput(format!("nu is evaluated at xi > 0, got {xi}")));
    }
    let w = winding_of_reflection(refl, xi, tol)?;
    let f = refl.one_plus_r1r2(-xi)?;
    let nu = Complex64::new(-f.norm().ln() / (2.0 * PI), -(w + 2.0 * PI * m as f64) / (2.0 * PI));
    if !(nu.im > -0.5 && nu.im < 0.5) {
        return Err(Error::AssumptionsViolated(format!(
            "Im nu(-xi) = {} outside (-1/2, 1/2) at xi = {xi} with m = {m}",
            nu.im
        )));
    }
    Ok(nu)
}

/// Which side of the cut a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// How the kernel `ln(k - zeta)` is evaluated.
#[derive(Debug, Clone, Copy)]
enum Point {
    /// Any `k` off the cut (real `k >= -xi` allowed).
    Off(Complex64),
    /// Boundary value at `zeta0` on the cut.
    On(f64, Side),
}

/// Everything needed to evaluate `delta(k, xi)` for one `xi > 0`.
#[derive(Clone)]
pub struct DeltaContext {
    pub xi: f64,
    pub m: usize,
    pub nu: Complex64,
    /// `omega_{n-s}` for `s = 0..m-1` (the poles of `delta` sit at their
    /// negatives).
    pub omegas_in_use: Vec<f64>,
    /// Segment `s` of the cut is `(segments[s].0, segments[s].1)`; the first
    /// starts at the truncation point `-Z`.
    pub segments: Vec<(f64, f64)>,
    pub tol: f64,
    /// `ln(1 + r1 r2)` at `-Z` on the principal branch.
    tail_log: Complex64,
    refl: Arc<dyn Reflection + Send>,
}

impl std::fmt::Debug for DeltaContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeltaContext")
            .field("xi", &self.xi)
            .field("m", &self.m)
            .field("nu", &self.nu)
            .field("omegas_in_use", &self.omegas_in_use)
            .field("segments", &self.segments)
            .field("tol", &self.tol)
            .finish()
    }
}

impl DeltaContext {
    /// `omegas` is the full threshold list `omega_1 < .. < omega_n`.
    pub fn new(refl: Arc<dyn Reflection + Send>, omegas: &[f64], xi: f64, tol: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidInput(format!("delta is built for xi > 0, got {xi}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        for &w in omegas {
            if (xi - w).abs() <= RAY_TOL {
                return Err(Error::BoundaryRay { xi, ray: w, tol: RAY_TOL });
            }
        }
        let n = omegas.len();
        let m = omegas.iter().filter(|&&w| w > xi).count();
        let omegas_in_use: Vec<f64> = (0..m).map(|s| omegas[n - s - 1]).collect();
        let z = refl.tail_start(xi, tol)?;
        if omegas_in_use.first().map_or(false, |&w| -z >= -w) {
            return Err(Error::Domain(format!("truncation point -{z} does not clear the thresholds")));
        }
        let mut cuts = vec![-z];
        cuts.extend(omegas_in_use.iter().map(|w| -w));
        cuts.push(-xi);
        let segments = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        let nu = nu_of(refl.as_ref(), xi, m, tol)?;
        let tail_log = refl.one_plus_r1r2(-z)?.ln();
        Ok(DeltaContext { xi, m, nu, omegas_in_use, segments, tol, tail_log, refl })
    }

    pub fn reflection(&self) -> &dyn Reflection {
        self.refl.as_ref()
    }

    /// Quadrature breakpoints on `[a, b]`: one per oscillation period plus
    /// the extra points.
    fn points(&self, a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
        let period = self.refl.period();
        let chunks = ((b - a) / period).ceil().clamp(1.0, 1e6) as usize;
        let mut pts: Vec<f64> = (0..=chunks).map(|i| a + (b - a) * i as f64 / chunks as f64).collect();
        pts.extend(extra.iter().copied().filter(|&x| x > a && x < b));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn opts(&self) -> QuadOptions {
        QuadOptions { abs_tol: self.tol, rel_tol: 1e-14, max_subdivisions: 200_000 }
    }

    /// `int_a^b ln|c - zeta| g(zeta) dzeta` with `c` one of the endpoints.
    /// Next to `c` the value `g(c)` is subtracted and its `ln` integrated
    /// exactly; the rest of the interval is regular.
    fn log_endpoint(&self, a: f64, b: f64, c: f64) -> Result<Complex64> {
        let h = (0.5 * self.refl.period()).min(0.25).min(b - a);
        let (na, nb) = if c == b { (b - h, b) } else { (a, a + h) };
        let refl = &self.refl;
        let gc = refl.dlog(c)?;
        let f = |z: f64| -> Result<Complex64> {
            let d = (c - z).abs();
            if d == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok((refl.dlog(z)? - gc) * d.ln())
        };
        let near = adaptive_quad_with(f, &[na, nb], self.opts())?.value + gc * (h * h.ln() - h);
        let far = if c == b { (a, na) } else { (nb, b) };
        if far.1 - far.0 <= 0.0 {
            return Ok(near);
        }
        let g = |z: f64| -> Result<Complex64> { Ok(refl.dlog(z)? * (c - z).abs().ln()) };
        Ok(near + adaptive_quad_with(g, &self.points(far.0, far.1, &[]), self.opts())?.value)
    }

    /// `int_a^b ln(k - zeta) g(zeta) dzeta` over one piece of the cut.
    fn kernel_integral(&self, a: f64, b: f64, at: Point) -> Result<Complex64> {
        match at {
            Point::Off(k) => {
                if k.im == 0.0 && (k.re == b || k.re == a) {
                    // real k at an end: k - zeta has fixed sign on (a, b)
                    let c = k.re;
                    let mut v = self.log_endpoint(a, b, c)?;
                    if c == a {
                        // k - zeta < 0 on (a, b]: principal branch gives +i pi
                        v += Complex64::new(0.0, PI) * self.plain(a, b)?;
                    }
                    return Ok(v);
                }
                let refl = &self.refl;
                let f = |z: f64| -> Result<Complex64> { Ok((k - z).ln() * refl.dlog(z)?) };
                Ok(adaptive_quad_with(f, &self.points(a, b, &[k.re]), self.opts())?.value)
            }
            Point::On(z0, side) => {
                if z0 <= a {
                    let v = self.log_endpoint_or_plain(a, b, z0)?;
                    return Ok(v + Complex64::new(0.0, side.sign() * PI) * self.plain(a, b)?);
                }
                if z0 >= b {
                    return self.log_endpoint_or_plain(a, b, z0);
                }
                let left = self.log_endpoint(a, z0, z0)?;
                let right = self.log_endpoint(z0, b, z0)?;
                Ok(left + right + Complex64::new(0.0, side.sign() * PI) * self.plain(z0, b)?)
            }
        }
    }

    /// `int_a^b ln|c - zeta| g` for `c` outside or at an end of `[a, b]`.
    fn log_endpoint_or_plain(&self, a: f64, b: f64, c: f64) -> Result<Complex64> {
        if c == a || c == b {
            return self.log_endpoint(a, b, c);
        }
        let refl = &self.refl;
        let f = |z: f64| -> Result<Complex64> { Ok(refl.dlog(z)? * (c - z).abs().ln()) };
        Ok(adaptive_quad_with(f, &self.points(a, b, &[]), self.opts())?.value)
    }

    /// `int_a^b g = L(b) - L(a)` by quadrature (branch-free).
    fn plain(&self, a: f64, b: f64) -> Result<Complex64> {
        let refl = &self.refl;
        Ok(adaptive_quad_with(|z| refl.dlog(z), &self.points(a, b, &[]), self.opts())?.value)
    }

    fn tail_term(&self, at: Point) -> Complex64 {
        let z = -self.segments[0].0;
        let lk = match at {
            Point::Off(k) => (k + z).ln(),
            Point::On(z0, _) => Complex64::new((z0 + z).ln(), 0.0),
        };
        self.tail_log * lk
    }

    fn chi_at(&self, s: usize, at: Point) -> Result<Complex64> {
        let (a, b) = *self
            .segments
            .get(s)
            .ok_or_else(|| Error::InvalidInput(format!("chi index {s} > m = {}", self.m)))?;
        let mut integral = self.kernel_integral(a, b, at)?;
        if s == 0 {
            integral += self.tail_term(at);
        }
        Ok(-integral / Complex64::new(0.0, 2.0 * PI))
    }

    fn check_off_cut(&self, k: Complex64) -> Result<()> {
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::InvalidInput(format!("k = {k} is not finite")));
        }
        if k.im == 0.0 && k.re < -self.xi {
            return Err(Error::BranchCut(format!("{k}")));
        }
        if k.im == 0.0 && k.re == -self.xi {
            return Err(Error::SingularPoint(format!("{k}")));
        }
        Ok(())
    }

    /// `chi_s(k)`, `s = 0..m`. Real `k = -xi` is allowed (the endpoint
    /// value entering the amplitudes).
    pub fn chi(&self, s: usize, k: Complex64) -> Result<Complex64> {
        if k.im == 0.0 && k.re < -self.xi {
            return Err(Error::BranchCut(format!("{k}")));
        }
        self.chi_at(s, Point::Off(k))
    }

    /// `sum_{s=0}^m chi_s(k)`.
    pub fn chi_sum(&self, k: Complex64) -> Result<Complex64> {
        (0..=self.m).map(|s| self.chi(s, k)).sum()
    }

    /// `delta(k, xi)` off the cut `(-inf, -xi]`.
    pub fn delta(&self, k: Complex64) -> Result<Complex64> {
        self.check_off_cut(k)?;
        let mut v = (Complex64::i() * self.nu * (k + self.xi).ln()).exp();
        for &w in &self.omegas_in_use {
            v /= k + w;
        }
        Ok(v * self.chi_sum(k)?.exp())
    }

    /// Boundary value `delta_+` or `delta_-` at `zeta0` on the cut, away from
    /// the poles `-omega`.
    pub fn delta_boundary(&self, zeta0: f64, side: Side) -> Result<Complex64> {
        let z = -self.segments[0].0;
        if !(zeta0 < -self.xi && zeta0 > -z) {
            return Err(Error::InvalidInput(format!("{zeta0} is not inside the cut (-{z}, {})", -self.xi)));
        }
        for &w in &self.omegas_in_use {
            if (zeta0 + w).abs() <= RAY_TOL {
                return Err(Error::SingularPoint(format!("{zeta0}")));
            }
        }
        let log_k = Complex64::new((-(zeta0 + self.xi)).ln(), side.sign() * PI);
        let mut v = (Complex64::i() * self.nu * log_k).exp();
        for &w in &self.omegas_in_use {
            v /= zeta0 + w;
        }
        let chi: Complex64 = (0..=self.m).map(|s| self.chi_at(s, Point::On(zeta0, side))).sum::<Result<_>>()?;
        Ok(v * chi.exp())
    }

    /// `delta(0, xi)`.
    pub fn delta0(&self) -> Result<Complex64> {
        self.delta(Complex64::new(0.0, 0.0))
    }

    /// `sum_s chi_s(-xi)`.
    pub fn chi_sum_at_stationary(&self) -> Result<Complex64> {
        self.chi_sum(Complex64::new(-self.xi, 0.0))
    }
}

/// `r^as_1(k)`, `r^as_2(k)`: the reflection coefficients dressed with the
/// rational factors of the sector, optionally with `d(k) = k/(k - p_{n-m})`.
pub fn r_as(
    refl: &dyn Reflection,
    k: f64,
    ds: &DiscreteSpectrum,
    m: usize,
    with_d: bool,
) -> Result<(Complex64, Complex64)> {
    let kc = Complex64::new(k, 0.0);
    let mut f = Complex64::new(1.0, 0.0);
    for s in 0..m {
        let j = ds.n - s;
        let num = kc - ds.p_at(j);
        let den = kc + ds.omega_at(j);
        if den.norm() == 0.0 {
            return Err(Error::SingularPoint(format!("{k}")));
        }
        f *= (num / den).powi(2);
    }
    if with_d {
        if m >= ds.n {
            return Err(Error::InvalidInput(format!("d(k) needs m < n, got m = {m}, n = {}", ds.n)));
        }
        let d = kc / (kc - ds.p_at(ds.n - m));
        if d.norm() == 0.0 {
            return Err(Error::SingularPoint(format!("{k}")));
        }
        f /= d * d;
    }
    Ok((refl.r1(k)? * f, refl.r2(k)? / f))
}

/// The residue constants `c0^as` and, for `m < n`, `c0^as#`.
pub fn c0_constants(ds: &DiscreteSpectrum, m: usize, delta0: Complex64) -> (Complex64, Option<Complex64>) {
    let a = ds.params.a;
    let mut prod = Complex64::new(1.0, 0.0);
    for s in 0..m {
        let j = ds.n - s;
        prod *= (ds.omega_at(j) / ds.p_at(j)).powi(2);
    }
    let d2 = delta0 * delta0;
    let c0 = a * d2 / Complex64::new(0.0, 2.0) * prod;
    let sharp = (m < ds.n).then(|| {
        let p = ds.p_at(ds.n - m);
        Complex64::new(0.0, 2.0) * p * p / (a * d2) / prod
    });
    (c0, sharp)
}
