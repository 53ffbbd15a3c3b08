//! Long-time asymptotics of `q(x,t)` in every sector, and the independent
//! reconstruction through the parabolic-cylinder parametrix data.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::deformation::{classify_sector_with, c0_constants, r_as, DeltaContext, SectorKind, SectorLabel, TheoremCase};
use crate::error::{Error, Result};
use crate::numerics::complex_rgamma;
use crate::scattering::Reflection;
use crate::spectrum::{DiscreteSpectrum, RAY_TOL};

/// `theta(k, xi) = 4 k xi + 2 k^2`.
pub fn theta(k: Complex64, xi: f64) -> Complex64 {
    4.0 * k * xi + 2.0 * k * k
}

/// Order of the neglected terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RemainderOrder {
    /// `O(1/t)`.
    TInv,
    /// `O(ln t / t)`.
    TInvLog,
    /// `O(t^{-1+2|Im nu|})`.
    TPow { exponent: f64 },
}

impl RemainderOrder {
    pub fn label(&self) -> String {
        match self {
            RemainderOrder::TInv => "t^-1".to_string(),
            RemainderOrder::TInvLog => "t^-1 ln t".to_string(),
            RemainderOrder::TPow { exponent } => format!("t^{exponent}"),
        }
    }

    /// Size of the remainder scale at time `t` (constant 1).
    pub fn scale(&self, t: f64) -> f64 {
        match *self {
            RemainderOrder::TInv => 1.0 / t,
            RemainderOrder::TInvLog => t.ln() / t,
            RemainderOrder::TPow { exponent } => t.powf(exponent),
        }
    }
}

const NU_ZERO: f64 = 1e-12;

fn r1_tag(im: f64) -> RemainderOrder {
    if im.abs() < NU_ZERO {
        RemainderOrder::TInvLog
    } else if im > 0.0 {
        RemainderOrder::TInv
    } else {
        RemainderOrder::TPow { exponent: -1.0 + 2.0 * im.abs() }
    }
}

fn r2_tag(im: f64) -> RemainderOrder {
    if im.abs() < NU_ZERO {
        RemainderOrder::TInvLog
    } else if im > 0.0 {
        RemainderOrder::TPow { exponent: -1.0 + 2.0 * im.abs() }
    } else {
        RemainderOrder::TInv
    }
}

fn r3_tag(im: f64) -> RemainderOrder {
    if im.abs() < NU_ZERO {
        RemainderOrder::TInvLog
    } else {
        RemainderOrder::TPow { exponent: -1.0 + 2.0 * im.abs() }
    }
}

/// One oscillatory term `t^exponent * amplitude * exp(sign (4 i t xi^2 - i Re nu ln t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correction {
    /// Which amplitude: 1..6.
    pub alpha: u8,
    pub amplitude: Complex64,
    pub exponent: f64,
    /// `+1` for `exp(4 i t xi^2 - i Re nu ln t)`, `-1` for the conjugate phase.
    pub phase_sign: i8,
    pub value: Complex64,
}

/// The asymptotic formula evaluated at one `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEval {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub sector: SectorLabel,
    /// 1, 2, 3 for the `Im nu` bands of the plateau cases, 0 otherwise.
    pub subcase: u8,
    /// `nu(-|xi|)` from the direct pipeline.
    pub nu: Complex64,
    pub leading: Complex64,
    pub corrections: Vec<Correction>,
    pub remainder: RemainderOrder,
    pub value: Complex64,
    /// Plateau plus every oscillatory term of the case, whatever the subcase.
    pub value_all_terms: Complex64,
}

/// The flat JSON record of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRecord {
    pub schema: u32,
    pub x: f64,
    pub xi: f64,
    pub t: f64,
    pub m: usize,
    pub case: TheoremCase,
    pub kind: SectorKind,
    pub subcase: u8,
    pub nu: Complex64,
    pub leading: Complex64,
    pub corrections: Vec<Correction>,
    pub remainder: String,
    pub value: Complex64,
}

impl AsymptoticEval {
    pub fn record(&self) -> AsymptoticRecord {
        AsymptoticRecord {
            schema: 1,
            x: self.x,
            xi: self.xi,
            t: self.t,
            m: self.sector.m,
            case: self.sector.case,
            kind: self.sector.kind,
            subcase: self.subcase,
            nu: self.nu,
            leading: self.leading,
            corrections: self.corrections.clone(),
            remainder: self.remainder.label(),
            value: self.value,
        }
    }
}

/// All `t`-independent constants for one `xi`; shared by both pipelines.
#[derive(Debug, Clone)]
pub struct SectorData {
    pub label: SectorLabel,
    /// Direct pipeline at `|xi|`.
    pub ctx: DeltaContext,
    pub delta0: Complex64,
    /// `sum_s chi_s(-|xi|)`.
    pub chi_stationary: Complex64,
    pub c0: Complex64,
    pub c0_sharp: Option<Complex64>,
    pub r1: Complex64,
    pub r2: Complex64,
}

impl SectorData {
    pub fn new(xi: f64, ds: &DiscreteSpectrum, refl: Arc<dyn Reflection + Send>, tol: f64) -> Result<Self> {
        Self::with_ray_tol(xi, ds, refl, tol, RAY_TOL)
    }

    pub fn with_ray_tol(
        xi: f64,
        ds: &DiscreteSpectrum,
        refl: Arc<dyn Reflection + Send>,
        tol: f64,
        ray_tol: f64,
    ) -> Result<Self> {
        let label = classify_sector_with(xi, ds, ray_tol)?;
        let xp = label.xi_direct();
        let ctx = DeltaContext::new(refl, &ds.omegas, xp, tol)?;
        debug_assert_eq!(ctx.m, label.m);
        let delta0 = ctx.delta0()?;
        let chi_stationary = ctx.chi_sum_at_stationary()?;
        let (c0, c0_sharp) = c0_constants(ds, label.m, delta0);
        let r1 = ctx.reflection().r1(-xp)?;
        let r2 = ctx.reflection().r2(-xp)?;
        Ok(SectorData { label, ctx, delta0, chi_stationary, c0, c0_sharp, r1, r2 })
    }

    pub fn nu(&self) -> Complex64 {
        self.ctx.nu
    }

    fn xp(&self) -> f64 {
        self.label.xi_direct()
    }

    /// `prod_{s=0}^{upto-1} (|xi| + p_{n-s})^e`.
    fn p_prod(&self, ds: &DiscreteSpectrum, upto: usize, e: i32) -> Complex64 {
        (0..upto).map(|s| (self.xp() + ds.p_at(ds.n - s)).powi(e)).product()
    }

    fn c0_sharp(&self) -> Result<Complex64> {
        self.c0_sharp
            .ok_or_else(|| Error::InvalidInput(format!("c0^as# is undefined for m = n in sector {:?}", self.label)))
    }
}

/// The sector's plateau constant; zero in decay sectors.
pub fn plateau_constant(sd: &SectorData) -> Result<Complex64> {
    Ok(match sd.label.kind {
        SectorKind::Decay => Complex64::new(0.0, 0.0),
        // 2i c0^as = A delta^2(0,xi) prod (omega/p)^2
        SectorKind::PlateauRight => Complex64::new(0.0, 2.0) * sd.c0,
        // -2i conj(c0^as#) = -4 conj(p)^2 / (A conj(delta^2)) prod (conj p / omega)^2
        SectorKind::PlateauLeft => Complex64::new(0.0, -2.0) * sd.c0_sharp()?.conj(),
    })
}

/// The amplitude `alpha_j`, `j = 1..6`, for the sector of `sd`.
pub fn alpha(j: u8, sd: &SectorData, ds: &DiscreteSpectrum) -> Result<Complex64> {
    let nu = sd.nu();
    let nub = nu.conj();
    let x = sd.chi_stationary;
    let xb = x.conj();
    let xp = sd.xp();
    let m = sd.label.m;
    let i = Complex64::i();
    let sqrt_pi = PI.sqrt();
    let e = |arg: Complex64| arg.exp();
    let v = match j {
        1 => {
            sqrt_pi * sd.c0 * sd.c0 * sd.p_prod(ds, m, 2) * complex_rgamma(i * nu) / (xp * xp * sd.r2)
                * e(-PI / 2.0 * nu + 0.75 * PI * i - 2.0 * x + 3.0 * i * nu * LN_2)
        }
        2 => {
            sqrt_pi * sd.p_prod(ds, m, -2) * complex_rgamma(-i * nu) / sd.r1
                * e(-PI / 2.0 * nu + 0.25 * PI * i + 2.0 * x - 3.0 * i * nu * LN_2)
        }
        3 => {
            sqrt_pi * sd.p_prod(ds, m, 2).conj() * complex_rgamma(-i * nub) / sd.r2.conj()
                * e(-PI / 2.0 * nub + 0.25 * PI * i - 2.0 * xb - 3.0 * i * nub * LN_2)
        }
        4 => {
            sqrt_pi * xp * xp * sd.p_prod(ds, m + 1, -2) * complex_rgamma(-i * nu) / sd.r1
                * e(-PI / 2.0 * nu + 0.25 * PI * i + 2.0 * x - 3.0 * i * nu * LN_2)
        }
        5 => {
            sqrt_pi * sd.p_prod(ds, m + 1, 2).conj() * complex_rgamma(-i * nub) / (xp * xp * sd.r2.conj())
                * e(-PI / 2.0 * nub + 0.25 * PI * i - 2.0 * xb - 3.0 * i * nub * LN_2)
        }
        6 => {
            let cs = sd.c0_sharp()?.conj();
            sqrt_pi * cs * cs * sd.p_prod(ds, m + 1, -2).conj() * complex_rgamma(i * nub) / sd.r1.conj()
                * e(-PI / 2.0 * nub + 0.75 * PI * i + 2.0 * xb + 3.0 * i * nub * LN_2)
        }
        _ => return Err(Error::InvalidInput(format!("alpha index must be 1..6, got {j}"))),
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Domain(format!("alpha_{j} is not finite at xi = {}", sd.label.xi)));
    }
    Ok(v)
}

fn term(j: u8, amp: Complex64, sign: i8, nu: Complex64, t: f64, xi: f64) -> Correction {
    // t^{-1/2 - sign' Im nu} with the phase exp(sign (4 i t xi^2 - i Re nu ln t))
    let exponent = match j {
        1 | 3 | 5 => -0.5 - nu.im,
        _ => -0.5 + nu.im,
    };
    let phase = sign as f64 * (4.0 * t * xi * xi - nu.re * t.ln());
    let value = amp * t.powf(exponent) * Complex64::from_polar(1.0, phase);
    Correction { alpha: j, amplitude: amp, exponent, phase_sign: sign, value }
}

/// Theorem-level evaluation from precomputed sector constants.
pub fn evaluate(sd: &SectorData, ds: &DiscreteSpectrum, t: f64) -> Result<AsymptoticEval> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let nu = sd.nu();
    let im = nu.im;
    let xi = sd.label.xi;
    let leading = plateau_constant(sd)?;
    let band = if im <= -1.0 / 6.0 {
        1
    } else if im < 1.0 / 6.0 {
        2
    } else {
        3
    };
    let (subcase, all, used, remainder): (u8, Vec<Correction>, Vec<u8>, RemainderOrder) = match sd.label.case {
        TheoremCase::I => {
            let all = vec![term(1, alpha(1, sd, ds)?, -1, nu, t, xi), term(2, alpha(2, sd, ds)?, 1, nu, t, xi)];
            let (used, rem) = match band {
                1 => (vec![1], r1_tag(im)),
                2 => (vec![1, 2], r3_tag(im)),
                _ => (vec![2], r2_tag(im)),
            };
            (band, all, used, rem)
        }
        TheoremCase::II => (0, vec![term(3, alpha(3, sd, ds)?, 1, nu, t, xi)], vec![3], r2_tag(im)),
        TheoremCase::III => (0, vec![term(4, alpha(4, sd, ds)?, 1, nu, t, xi)], vec![4], r2_tag(im)),
        TheoremCase::IV => {
            let all = vec![term(5, alpha(5, sd, ds)?, 1, nu, t, xi), term(6, alpha(6, sd, ds)?, -1, nu, t, xi)];
            let (used, rem) = match band {
                1 => (vec![5], r1_tag(im)),
                2 => (vec![5, 6], r3_tag(im)),
                _ => (vec![6], r2_tag(im)),
            };
            (band, all, used, rem)
        }
    };
    let value_all_terms = leading + all.iter().map(|c| c.value).sum::<Complex64>();
    let corrections: Vec<Correction> = all.into_iter().filter(|c| used.contains(&c.alpha)).collect();
    let value = leading + corrections.iter().map(|c| c.value).sum::<Complex64>();
    Ok(AsymptoticEval {
        x: 4.0 * xi * t,
        t,
        xi,
        sector: sd.label,
        subcase,
        nu,
        leading,
        corrections,
        remainder,
        value,
        value_all_terms,
    })
}

/// `q(x, t)` from the long-time formulas.
pub fn q_asymptotic(
    x: f64,
    t: f64,
    ds: &DiscreteSpectrum,
    refl: Arc<dyn Reflection + Send>,
    tol: f64,
) -> Result<AsymptoticEval> {
    if !(t > 0.0 && t.is_finite() && x.is_finite()) {
        return Err(Error::InvalidInput(format!("need finite x and t > 0, got x = {x}, t = {t}")));
    }
    let sd = SectorData::new(x / (4.0 * t), ds, refl, tol)?;
    evaluate(&sd, ds, t)
}

/// Intermediate quantities of the parametrix route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BPipelineEval {
    pub beta: Complex64,
    pub gamma: Complex64,
    /// `[[B11, B12], [B21, B22]]`.
    pub b: [[Complex64; 2]; 2],
    pub b_as: [[Complex64; 2]; 2],
    pub q: Complex64,
}

/// `q` reconstructed from `beta`, `gamma`, the `B` matrix and `B^as`,
/// without going through the closed-form amplitudes.
pub fn q_via_b_pipeline(sd: &SectorData, ds: &DiscreteSpectrum, t: f64) -> Result<BPipelineEval> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let case = sd.label.case;
    let with_d = matches!(case, TheoremCase::III | TheoremCase::IV);
    let xp = sd.xp();
    let m = sd.label.m;
    let nu = sd.nu();
    let i = Complex64::i();
    let (r1as, r2as) = r_as(sd.ctx.reflection(), -xp, ds, m, with_d)?;
    let pre = (2.0 * PI).sqrt() * (-PI / 2.0 * nu).exp();
    let beta = pre * Complex64::from_polar(1.0, -0.75 * PI) * complex_rgamma(-i * nu) / r1as;
    let gamma = pre * Complex64::from_polar(1.0, -0.25 * PI) * complex_rgamma(i * nu) / r2as;
    let w: Complex64 = (0..m).map(|s| Complex64::new(ds.omega_at(ds.n - s) - xp, 0.0).powi(2)).product();
    let x = sd.chi_stationary;
    let l8t = (8.0 * t).ln();
    let ph = 4.0 * t * xp * xp;
    let b12 = -i * beta * (i * ph + 2.0 * x).exp() * (-i * nu * l8t).exp() / w;
    let b21 = i * gamma * (-i * ph - 2.0 * x).exp() * (i * nu * l8t).exp() * w;
    let zero = Complex64::new(0.0, 0.0);
    let s8 = (8.0 * t).sqrt();
    let (b_as, q) = match case {
        TheoremCase::I | TheoremCase::II => {
            let c = sd.c0 / xp;
            let b_as = [[c * b21 / s8, (c * c * b21 - b12) / s8], [-b21 / s8, -c * b21 / s8]];
            let q = if case == TheoremCase::I {
                Complex64::new(0.0, 2.0) * (sd.c0 + b_as[0][1])
            } else {
                Complex64::new(0.0, -2.0) * b_as[1][0].conj()
            };
            (b_as, q)
        }
        TheoremCase::III | TheoremCase::IV => {
            let cs = sd.c0_sharp()?;
            let c = cs / xp;
            let b_as = [[-c * b12 / s8, -b12 / s8], [(c * c * b12 - b21) / s8, c * b12 / s8]];
            let q = if case == TheoremCase::III {
                Complex64::new(0.0, 2.0) * b_as[0][1]
            } else {
                Complex64::new(0.0, -2.0) * (cs.conj() + b_as[1][0].conj())
            };
            (b_as, q)
        }
    };
    Ok(BPipelineEval { beta, gamma, b: [[zero, b12], [b21, zero]], b_as, q })
}

/// One open sector of the `xi` line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorRow {
    pub lo: f64,
    pub hi: f64,
    pub kind: SectorKind,
    pub case: TheoremCase,
    pub m: usize,
    /// Human-readable plateau formula, empty for decay sectors.
    pub formula: String,
}

/// The `4n + 2` sectors in increasing `xi`.
pub fn sector_table(ds: &DiscreteSpectrum) -> Result<Vec<SectorRow>> {
    ds.require_regular()?;
    let rays = crate::deformation::boundary_rays(ds);
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(rays.iter().copied());
    edges.push(f64::INFINITY);
    edges
        .windows(2)
        .map(|w| {
            let probe = match (w[0].is_finite(), w[1].is_finite()) {
                (false, _) => w[1] - 1.0,
                (_, false) => w[0] + 1.0,
                _ => 0.5 * (w[0] + w[1]),
            };
            let l = classify_sector_with(probe, ds, 0.0)?;
            let formula = match l.kind {
                SectorKind::Decay => String::new(),
                SectorKind::PlateauRight if l.m == 0 => "A delta(0,xi)^2".to_string(),
                SectorKind::PlateauRight => format!("A delta(0,xi)^2 prod_(s<{}) (omega_(n-s)/p_(n-s))^2", l.m),
                SectorKind::PlateauLeft if l.m == 0 => {
                    "-4 conj(p_n)^2 / (A conj(delta(0,-xi))^2)".to_string()
                }
                SectorKind::PlateauLeft => format!(
                    "-4 conj(p_(n-{m}))^2 / (A conj(delta(0,-xi))^2) prod_(s<{m}) (conj(p_(n-s))/omega_(n-s))^2",
                    m = l.m
                ),
            };
            Ok(SectorRow { lo: w[0], hi: w[1], kind: l.kind, case: l.case, m: l.m, formula })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{reflection_coeffs, shifted_step_spectral, ReflectionPair, StepParams};

    fn setup(a: f64, r: f64) -> (DiscreteSpectrum, Arc<ReflectionPair>) {
        let p = StepParams::new(a, r).unwrap();
        (DiscreteSpectrum::compute(p).unwrap(), Arc::new(reflection_coeffs(&shifted_step_spectral(p))))
    }

    #[test]
    fn theta_at_stationary_point() {
        for &xi in &[0.3, -1.2, 2.0] {
            assert!((theta(Complex64::new(-xi, 0.0), xi) + 2.0 * xi * xi).norm() < 1e-14);
        }
    }

    #[test]
    fn sector_tables() {
        let (ds, _) = setup(1.0, 1.0);
        let t = sector_table(&ds).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].kind, t[1].kind), (SectorKind::Decay, SectorKind::PlateauRight));
        let (ds, _) = setup(1.0, PI);
        assert_eq!(sector_table(&ds).unwrap().len(), 6);
        let (ds, _) = setup(1.0, 2.0 * PI);
        assert_eq!(sector_table(&ds).unwrap().len(), 10);
    }

    #[test]
    fn n0_plateau_and_decay() {
        let (ds, rp) = setup(1.0, 1.0);
        let sd = SectorData::new(1.0, &ds, rp.clone(), 1e-10).unwrap();
        let d0 = sd.delta0;
        assert!((plateau_constant(&sd).unwrap() - d0 * d0).norm() < 1e-14);
        let ev = evaluate(&sd, &ds, 10.0).unwrap();
        assert!(ev.corrections.iter().all(|c| c.amplitude.norm().is_finite()));
        let sd = SectorData::new(-1.0, &ds, rp, 1e-10).unwrap();
        assert_eq!(plateau_constant(&sd).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn plateau_left_n1() {
        let (ds, rp) = setup(1.0, PI);
        let xi = 0.5 * (ds.p[0].re - 0.25);
        let sd = SectorData::new(xi, &ds, rp, 1e-10).unwrap();
        assert_eq!(sd.label.kind, SectorKind::PlateauLeft);
        let p = ds.p[0];
        let d2 = sd.delta0 * sd.delta0;
        let expect = -4.0 * p.conj() * p.conj() / (1.0 * d2.conj());
        assert!((plateau_constant(&sd).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn pipelines_agree_all_sectors() {
        for &(a, r) in &[(1.0, 1.0), (1.0, PI)] {
            let (ds, rp) = setup(a, r);
            for row in sector_table(&ds).unwrap() {
                let lo = if row.lo.is_finite() { row.lo } else { row.hi - 2.0 };
                let hi = if row.hi.is_finite() { row.hi } else { row.lo + 2.0 };
                for f in [0.3, 0.7] {
                    let xi = lo + f * (hi - lo);
                    let sd = SectorData::new(xi, &ds, rp.clone(), 1e-10).unwrap();
                    for &t in &[3.0, 40.0] {
                        let ev = evaluate(&sd, &ds, t).unwrap();
                        let b = q_via_b_pipeline(&sd, &ds, t).unwrap();
                        let err = (b.q - ev.value_all_terms).norm();
                        assert!(err <= 1e-10 * (1.0 + b.q.norm()), "xi {xi} t {t}: {} vs {}", b.q, ev.value_all_terms);
                        assert_eq!(b.b[0][0], Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_bookkeeping() {
        let (ds, rp) = setup(1.0, PI);
        for &xi in &[0.1, 0.3, 2.0, -0.1, -0.35, -2.0] {
            let sd = SectorData::new(xi, &ds, rp.clone(), 1e-10).unwrap();
            let ev = evaluate(&sd, &ds, 20.0).unwrap();
            assert!(!ev.corrections.is_empty() && ev.corrections.len() <= 2);
            for c in &ev.corrections {
                assert!(c.exponent > -1.0 && c.exponent < 0.0);
                let expect = match c.alpha {
                    1 | 3 | 5 => -0.5 - ev.nu.im,
                    _ => -0.5 + ev.nu.im,
                };
                assert_eq!(c.exponent, expect);
            }
        }
    }

    #[test]
    fn xi_scaling_invariance() {
        let (ds, rp) = setup(1.0, 1.0);
        let a = q_asymptotic(8.0, 2.0, &ds, rp.clone(), 1e-10).unwrap();
        let b = q_asymptotic(16.0, 4.0, &ds, rp, 1e-10).unwrap();
        assert_eq!(a.sector, b.sector);
        assert_eq!(a.nu, b.nu);
        assert_eq!(a.leading, b.leading);
        for (ca, cb) in a.corrections.iter().zip(&b.corrections) {
            assert_eq!(ca.amplitude, cb.amplitude);
        }
    }

    #[test]
    fn remainder_tags() {
        assert_eq!(r1_tag(0.0), RemainderOrder::TInvLog);
        assert_eq!(r2_tag(0.0), RemainderOrder::TInvLog);
        assert_eq!(r1_tag(0.2), RemainderOrder::TInv);
        assert_eq!(r2_tag(-0.2), RemainderOrder::TInv);
        assert_eq!(r3_tag(-0.25), RemainderOrder::TPow { exponent: -0.5 });
    }

    #[test]
    fn b12_scales_with_t() {
        let (ds, rp) = setup(1.0, 1.0);
        let sd = SectorData::new(0.7, &ds, rp, 1e-10).unwrap();
        let b1 = q_via_b_pipeline(&sd, &ds, 10.0).unwrap().b[0][1].norm();
        let b2 = q_via_b_pipeline(&sd, &ds, 40.0).unwrap().b[0][1].norm();
        assert!(((b2 / b1).ln() / 4f64.ln() - sd.nu().im).abs() < 1e-10);
    }
}
