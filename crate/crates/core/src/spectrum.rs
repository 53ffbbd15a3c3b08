//! Discrete spectrum of the shifted step: zeros of `a1`, thresholds
//! `omega_j`, winding of `arg a1` and norming constants.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root_1d, find_root_newton, track_arg};
use crate::scattering::{shifted_step_spectral, SpectralData, StepParams};

/// Relative distance to `(2n+1)pi/(2A)` below which `R` counts as a boundary
/// value.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroCount {
    pub n: usize,
    /// Number of zeros of `a1` in the closed upper half-plane.
    pub total: usize,
    /// `R = (2n+1)pi/(2A)`: two extra real zeros at `+-A/2`.
    pub boundary: bool,
}

/// `n` with `(2n-1)pi/(2A) < R < (2n+1)pi/(2A)`.
pub fn zero_count(params: StepParams) -> ZeroCount {
    let x = 2.0 * params.a * params.r / PI;
    // nearest odd integer 2n+1 to x
    let odd = 2.0 * ((x - 1.0) / 2.0).round() + 1.0;
    let r_b = odd * PI / (2.0 * params.a);
    if odd >= 1.0 && (params.r - r_b).abs() <= BOUNDARY_TOL * params.r.max(1.0) {
        let n = ((odd - 1.0) / 2.0) as usize;
        return ZeroCount { n, total: 2 * n + 3, boundary: true };
    }
    let n = (x / 2.0).round() as usize;
    ZeroCount { n, total: 2 * n + 1, boundary: false }
}

/// Positive root of `k = (A/2) e^{-2kR}`.
pub fn solve_k0(params: StepParams) -> f64 {
    let StepParams { a, r } = params;
    let f = |k: f64| k - 0.5 * a * (-2.0 * k * r).exp();
    let df = |k: f64| 1.0 + a * r * (-2.0 * k * r).exp();
    // f(0) = -A/2 < 0 < f(A/2)
    find_root_newton(f, df, 0.0, 0.5 * a, 1e-6 * a, 1e-15 * a).expect("k0 bracket always changes sign")
}

/// Complex Newton on `a1` starting from `k`; stops when the residual stops
/// improving.
fn polish(sd: &SpectralData, mut k: Complex64) -> Result<Complex64> {
    let mut res = sd.a1(k)?.norm();
    for _ in 0..20 {
        if res <= 1e-15 {
            break;
        }
        let step = sd.a1(k)? / sd.a1_prime(k)?;
        let next = k - step;
        let r_next = sd.a1(next)?.norm();
        if !(r_next < res) {
            break;
        }
        k = next;
        res = r_next;
    }
    Ok(k)
}

/// Zeros `p_1 .. p_n` in the second quadrant, `Re p_j` decreasing.
///
/// `k1 = -Re p_j` solves `k1 = s_j (A/2) sin(2 k1 R) e^{2 k1 R cot(2 k1 R)}`
/// with `s_j = (-1)^{j+1}` on `((2j-1)pi/(4R), j pi/(2R))`, where the right
/// side decreases from `A/2` to 0.
pub fn solve_pj(params: StepParams, n: usize) -> Result<Vec<Complex64>> {
    let StepParams { a, r } = params;
    let sd = shifted_step_spectral(params);
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let s = if j % 2 == 1 { 1.0 } else { -1.0 };
        let lo = (2 * j - 1) as f64 * PI / (4.0 * r);
        let hi = j as f64 * PI / (2.0 * r);
        let f = |k1: f64| {
            let th = 2.0 * k1 * r;
            if k1 >= hi {
                return k1;
            }
            let e = th * th.cos() / th.sin();
            k1 - s * 0.5 * a * th.sin() * e.exp()
        };
        let k1 = find_root_1d(f, lo, hi, 1e-15 * hi)?;
        let k2 = -k1 * (2.0 * k1 * r).cos() / (2.0 * k1 * r).sin();
        out.push(polish(&sd, Complex64::new(-k1, k2))?);
    }
    Ok(out)
}

/// `omega_j = (2j-1)pi/(4R)`, `j = 1..n`.
pub fn omegas(r: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| (2 * j - 1) as f64 * PI / (4.0 * r)).collect()
}

/// The zeros of `a1` and the thresholds of one shifted step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSpectrum {
    pub params: StepParams,
    pub n: usize,
    pub k0: f64,
    /// `p_1 .. p_n`, `Re p_n < .. < Re p_1 < 0`, `Im p_j > 0`.
    pub p: Vec<Complex64>,
    pub omegas: Vec<f64>,
    pub boundary: bool,
}

impl DiscreteSpectrum {
    pub fn compute(params: StepParams) -> Result<Self> {
        let zc = zero_count(params);
        Ok(DiscreteSpectrum {
            params,
            n: zc.n,
            k0: solve_k0(params),
            p: solve_pj(params, zc.n)?,
            omegas: omegas(params.r, zc.n),
            boundary: zc.boundary,
        })
    }

    /// Mirror zeros `-conj p_j`.
    pub fn mirrors(&self) -> Vec<Complex64> {
        self.p.iter().map(|p| -p.conj()).collect()
    }

    /// All `2n+1` zeros in the upper half-plane.
    pub fn all_zeros(&self) -> Vec<Complex64> {
        let mut z = vec![Complex64::new(0.0, self.k0)];
        z.extend(self.p.iter().copied());
        z.extend(self.mirrors());
        z
    }

    /// Errors on the boundary case, which the asymptotics do not cover.
    pub fn require_regular(&self) -> Result<()> {
        if self.boundary {
            return Err(Error::BoundaryStep { r: self.params.r, n: self.n });
        }
        Ok(())
    }

    /// `p_j` with the 1-based index used by the formulas; `p_0` is not a
    /// zero and callers must treat `j = 0` through `re_p(0) = 0`.
    pub fn p_at(&self, j: usize) -> Complex64 {
        self.p[j - 1]
    }

    pub fn omega_at(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else if j > self.n {
            f64::INFINITY
        } else {
            self.omegas[j - 1]
        }
    }

    /// `Re p_j`, with `Re p_0 = 0`.
    pub fn re_p(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.p[j - 1].re
        }
    }

    /// Checks `-omega_{n+1} < Re p_n < -omega_n < .. < Re p_1 < -omega_1 < 0`
    /// with the given margin.
    pub fn interleaving_holds(&self, margin: f64) -> bool {
        if self.p.len() != self.n || self.omegas.len() != self.n {
            return false;
        }
        let mut seq = vec![0.0];
        for j in 1..=self.n {
            seq.push(-self.omegas[j - 1]);
            seq.push(self.p[j - 1].re);
        }
        let increasing = seq.windows(2).all(|w| w[1] < w[0] - margin);
        increasing && self.p.iter().all(|p| p.im > margin)
    }

    /// Largest `|a1|` over all reported zeros.
    pub fn max_residual(&self) -> f64 {
        let sd = shifted_step_spectral(self.params);
        self.all_zeros().iter().map(|&z| sd.a1(z).map(|v| v.norm()).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

/// Boundary-ray tolerance used by [`winding_arg`] and the sector logic.
pub const RAY_TOL: f64 = 1e-9;

/// Continuous argument of `a1 a2` accumulated along `(-inf, -xi]`.
///
/// Once `|a1 a2 - 1| < 1` the principal argument is continuous all the way
/// to `-inf`, so starting the trace there with the principal value is exact.
/// The start is `max(50, 20/R)`, pushed out until the sample satisfies
/// `|a1 a2 - 1| <= 1/2`. For sampled data the start is the end of the grid;
/// `tol` bounds the allowed `|a1 a2 - 1|` there.
pub fn winding_arg(sd: &SpectralData, xi: f64, tol: f64) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidInput(format!("winding needs xi > 0, got {xi}")));
    }
    let f = |k: f64| -> Result<Complex64> {
        let kc = Complex64::new(k, 0.0);
        Ok(sd.a1(kc)? * sd.a2(kc)?)
    };
    let (start, step) = match sd.params() {
        Some(params) => {
            let zc = zero_count(params);
            for w in omegas(params.r, zc.n) {
                if (xi - w).abs() <= RAY_TOL {
                    return Err(Error::BoundaryRay { xi, ray: w, tol: RAY_TOL });
                }
            }
            let mut z = (50.0f64).max(20.0 / params.r).max(xi * 2.0);
            while (f(-z)? - 1.0).norm() > 0.5 {
                z *= 2.0;
            }
            // phase of e^{4ikR}/k^2 turns at rate 4R + 2/|k|
            let rate = 4.0 * params.r + 2.0 / xi;
            (z, 0.25 * PI / rate)
        }
        None => {
            let (lo, _) = sd.support().expect("sampled data have a support");
            let s = sd.samples().expect("sampled");
            let dk = s.ks.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            let dev = (f(lo)? - 1.0).norm();
            if dev > tol.max(0.5) {
                return Err(Error::Domain(format!(
                    "|a1 a2 - 1| = {dev:e} at the end of the grid k = {lo}; extend the grid"
                )));
            }
            (-lo, dk)
        }
    };
    if -start >= -xi {
        return Err(Error::Domain(format!("xi = {xi} outside the data range")));
    }
    Ok(track_arg(f, -start, -xi, step, 0)?.last_arg())
}

/// Counts zeros of `f` inside a closed contour given as pieces
/// `t in [0,1] -> k(t)`, each traced with at least `steps` samples.
fn contour_count<F>(f: F, pieces: &[(&dyn Fn(f64) -> Complex64, usize)]) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut total = 0.0;
    for (path, steps) in pieces {
        let trace = track_arg(|t| f(path(t)), 0.0, 1.0, 1.0 / *steps as f64, 0)?;
        total += trace.last_arg() - trace.args[0];
    }
    Ok(total / (2.0 * PI))
}

/// Argument-principle count of zeros of `a1` in the upper half-disc of radius
/// `10 max(A, 1/R)`, indented above the double pole at `k = 0`.
pub fn count_zeros_upper(params: StepParams) -> Result<f64> {
    let StepParams { a, r } = params;
    let sd = shifted_step_spectral(params);
    let rho = 10.0 * a.max(1.0 / r);
    // eps < k0 because g(k) = k - (A/2)e^{-2kR} is negative there, and
    // eps < omega_1 keeps the p_j outside the indentation
    let eps = find_root_1d(|k| k - 0.25 * a * (-2.0 * k * r).exp(), 0.0, 0.25 * a, 1e-14)?.min(PI / (8.0 * r));
    let (lr, le) = (rho.ln(), eps.ln());
    let turns = |len: f64| (8.0 * (4.0 * r * rho + 2.0) * len).ceil() as usize + 64;
    let left = |t: f64| Complex64::new(-(lr + t * (le - lr)).exp(), 0.0);
    let small = |t: f64| Complex64::from_polar(eps, PI * (1.0 - t));
    let right = |t: f64| Complex64::new((le + t * (lr - le)).exp(), 0.0);
    let big = |t: f64| Complex64::from_polar(rho, PI * t);
    let n_real = turns(lr - le);
    contour_count(|k| sd.a1(k), &[(&left, n_real), (&small, 256), (&right, n_real), (&big, turns(PI))])
}

/// Argument-principle count of zeros of `a2` in the lower half-disc of
/// radius `rho`, indented below 0 by `eps`.
pub fn count_zeros_lower(sd: &SpectralData, rho: f64, eps: f64) -> Result<f64> {
    let left = |t: f64| Complex64::new(-rho + t * (rho - eps), 0.0);
    let small = |t: f64| Complex64::from_polar(eps, -PI * (1.0 - t));
    let right = |t: f64| Complex64::new(eps + t * (rho - eps), 0.0);
    let big = |t: f64| Complex64::from_polar(rho, -PI * t);
    // the pieces run clockwise around the lower region
    let c = contour_count(|k| sd.a2(k), &[(&right, 512), (&big, 512), (&left, 512), (&small, 64)])?;
    Ok(-c)
}

/// Per-clause outcome of the structural assumptions check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionsReport {
    /// (a-1): every zero has `|a1| <= 1e-10` and `Im p_j > 0`.
    pub zeros_ok: bool,
    pub max_zero_residual: f64,
    /// (a-2): number of zeros of `a2` in the lower half-disc.
    pub a2_zero_count: Option<i64>,
    pub a2_ok: bool,
    /// Interleaving of `Re p_j` and `-omega_j`.
    pub ordering_ok: bool,
    /// (b): winding at probes between thresholds lies in the expected band.
    pub winding_ok: bool,
    pub winding_probes: Vec<(f64, f64)>,
}

impl AssumptionsReport {
    pub fn passed(&self) -> bool {
        self.zeros_ok && self.a2_ok && self.ordering_ok && self.winding_ok
    }
}

pub fn validate_assumptions_a(sd: &SpectralData, ds: &DiscreteSpectrum) -> AssumptionsReport {
    let max_zero_residual = ds
        .all_zeros()
        .iter()
        .map(|&z| sd.a1(z).map(|v| v.norm()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let zeros_ok = max_zero_residual <= 1e-10 && ds.p.iter().all(|p| p.im > 0.0) && !ds.boundary;

    let a2_zero_count = sd.params().and_then(|p| {
        let rho = 10.0 * p.a.max(1.0 / p.r);
        count_zeros_lower(sd, rho, 1e-3).ok().map(|c| c.round() as i64)
    });
    let a2_ok = a2_zero_count.map_or(true, |c| c == 0);

    let ordering_ok = ds.omegas.windows(2).all(|w| w[0] < w[1]) && ds.interleaving_holds(0.0);

    // one probe per open band between consecutive thresholds
    let mut cuts = vec![0.0];
    cuts.extend(ds.omegas.iter().copied());
    let mut probes: Vec<f64> = cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let last = *cuts.last().unwrap();
    probes.push(if last > 0.0 { 2.0 * last } else { 1.0 });
    let mut winding_ok = true;
    let mut winding_probes = Vec::new();
    for xi in probes {
        let m = ds.omegas.iter().filter(|&&w| w > xi).count() as f64;
        match winding_arg(sd, xi, 1e-6) {
            Ok(w) => {
                winding_ok &= w > (2.0 * m - 1.0) * PI && w < (2.0 * m + 1.0) * PI;
                winding_probes.push((xi, w));
            }
            Err(_) => winding_ok = false,
        }
    }
    AssumptionsReport {
        zeros_ok,
        max_zero_residual,
        a2_zero_count,
        a2_ok,
        ordering_ok,
        winding_ok,
        winding_probes,
    }
}

/// Residue data at the discrete spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormingConstants {
    /// `b(i k0)`; always of unit modulus.
    pub gamma0: Complex64,
    /// `b(p_j)`.
    pub eta: Vec<Complex64>,
}

pub fn norming_constants(params: StepParams, ds: &DiscreteSpectrum) -> Result<NormingConstants> {
    let sd = shifted_step_spectral(params);
    Ok(NormingConstants {
        gamma0: sd.b(Complex64::new(0.0, ds.k0))?,
        eta: ds.p.iter().map(|&p| sd.b(p)).collect::<Result<_>>()?,
    })
}

/// One row of the zero-evolution table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroRow {
    pub r: f64,
    pub j: usize,
    pub p: Complex64,
    pub k0: f64,
}

/// Zeros `p_j` for each `R` in `rs` (one row per `(R, j)`, plus a `j = 0`
/// row carrying only `k0` when `n = 0`). Boundary values of `R` are skipped.
pub fn zero_table(a: f64, rs: &[f64]) -> Result<Vec<ZeroRow>> {
    let mut rows = Vec::new();
    for &r in rs {
        let params = StepParams::new(a, r)?;
        let ds = DiscreteSpectrum::compute(params)?;
        if ds.boundary {
            continue;
        }
        if ds.n == 0 {
            rows.push(ZeroRow { r, j: 0, p: Complex64::new(0.0, 0.0), k0: ds.k0 });
        }
        for (j, &p) in ds.p.iter().enumerate() {
            rows.push(ZeroRow { r, j: j + 1, p, k0: ds.k0 });
        }
    }
    Ok(rows)
}
