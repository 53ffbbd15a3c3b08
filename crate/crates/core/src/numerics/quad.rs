use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Kronrod 21-point abscissae (positive half, descending) and weights; the
// odd-indexed abscissae are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

/// Tolerances and limits for [`adaptive_quad_with`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 0.0, max_subdivisions: 4000 }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions { abs_tol: tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss-Kronrod 10/21 panel with the QUADPACK error heuristic.
fn gk21<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Panel { a, b, value, error: err })
}

/// Adaptive integration of a complex integrand over `[a, b]` to absolute
/// tolerance `tol`.
pub fn adaptive_quad<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    adaptive_quad_with(|x| Ok(f(x)), &[a, b], QuadOptions::abs(tol))
}

/// Globally adaptive Gauss-Kronrod integration over the polyline `points`
/// (ascending breakpoints; the integrand may be singular at breakpoints).
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_quad_with<F>(f: F, points: &[f64], opts: QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if points.len() < 2 {
        return Err(Error::InvalidInput("quadrature needs at least two points".into()));
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::InvalidInput(format!(
                "quadrature breakpoints must be finite and increasing, got {} >= {}",
                w[0], w[1]
            )));
        }
    }
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
    }

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let p = gk21(&f, w[0], w[1])?;
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    let mut subdivisions = heap.len();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate_re: total.re,
                estimate_im: total.im,
                error_estimate: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // panel cannot be split further in floating point
            return Err(Error::QuadratureNonConvergence {
                estimate_re: total.re,
                estimate_im: total.im,
                error_estimate: total_err,
                subdivisions,
            });
        }
        let left = gk21(&f, worst.a, mid)?;
        let right = gk21(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // re-sum to shed the drift of the incremental updates
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
    let error_estimate = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult { value, error_estimate, subdivisions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_sine() {
        let r = adaptive_quad(|x| Complex64::new(x, 0.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-14);
        assert!(r.error_estimate <= 1e-10);
        assert!(r.subdivisions >= 1);
        let r = adaptive_quad(|x| Complex64::new(x.sin(), 0.0), 0.0, PI, 1e-10).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
    }

    /// Brute-force oracle: substitute x = u^4 to flatten the log singularity,
    /// then composite Simpson.
    fn log_oscillatory_oracle(panels: usize) -> Complex64 {
        let g = |u: f64| {
            if u == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = u * u * u * u;
            Complex64::from_polar(x.ln() * 4.0 * u * u * u, x)
        };
        let h = 1.0 / panels as f64;
        let mut s = g(0.0) + g(1.0);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += g(i as f64 * h) * w;
        }
        s * (h / 3.0)
    }

    #[test]
    fn log_endpoint_singularity() {
        let coarse = log_oscillatory_oracle(20_000);
        let fine = log_oscillatory_oracle(200_000);
        assert!((coarse - fine).norm() < 1e-12, "oracle not converged");
        let r = adaptive_quad(|x| Complex64::from_polar(x.ln(), x), 0.0, 1.0, 1e-8).unwrap();
        assert!((r.value - fine).norm() < 1e-8, "{} vs {}", r.value, fine);
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 0.0, max_subdivisions: 3 };
        let err = adaptive_quad_with(|x: f64| Ok(Complex64::new((1.0 / x).sin(), 0.0)), &[1e-6, 1.0], opts)
            .unwrap_err();
        match err {
            Error::QuadratureNonConvergence { subdivisions, .. } => assert_eq!(subdivisions, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(adaptive_quad(|x| Complex64::new(x, 0.0), 1.0, 0.0, 1e-8).is_err());
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| Complex64::from_polar(1.0 / (1.0 + x * x), 7.0 * x);
        let a = adaptive_quad(f, -3.0, 5.0, 1e-12).unwrap();
        let b = adaptive_quad(f, -3.0, 5.0, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    proptest::proptest! {
        #[test]
        fn additive(c in 0.01f64..0.99) {
            let f = |x: f64| Complex64::from_polar(x.ln().abs().sqrt() + 1.0, 5.0 * x);
            let tol = 1e-9;
            let whole = adaptive_quad(f, 0.0, 1.0, tol).unwrap().value;
            let left = adaptive_quad(f, 0.0, c, tol).unwrap().value;
            let right = adaptive_quad(f, c, 1.0, tol).unwrap().value;
            proptest::prop_assert!((whole - left - right).norm() <= 2.0 * tol);
        }
    }
}
