use crate::error::{Error, Result};

fn check_bracket(flo: f64, fhi: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo * fhi > 0.0 {
        return Err(Error::Bracket { lo, hi });
    }
    Ok(())
}

/// Bisection on a sign-changing bracket until its width is at most `tol`.
///
/// Returns the midpoint of the final bracket (or an exact zero if one is hit).
pub fn find_root_1d<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    check_bracket(flo, fhi, lo, hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let tol = tol.max(0.0);
    // bisection halves the width; 2200 halvings exhaust any f64 bracket
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection down to `coarse` width, then safeguarded Newton using the
/// analytic derivative `df`. Newton steps leaving the current bracket fall
/// back to bisection.
pub fn find_root_newton<F, D>(f: F, df: D, lo: f64, hi: f64, coarse: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut lo0 = lo;
    let mut hi0 = hi;
    let flo0 = f(lo0);
    check_bracket(flo0, f(hi0), lo0, hi0)?;
    let x0 = find_root_1d(&f, lo0, hi0, coarse.max(tol))?;
    // re-derive a bracket around x0
    let half = 0.5 * coarse.max(tol);
    lo0 = (x0 - half).max(lo);
    hi0 = (x0 + half).min(hi);
    let (mut a, mut b) = (lo0, hi0);
    let mut fa = f(a);
    if fa * f(b) > 0.0 {
        a = lo;
        b = hi;
        fa = flo0;
    }
    let mut x = x0;
    for _ in 0..100 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= tol || b - a <= tol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = find_root_1d(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn omega_constant() {
        // x = e^{-x}: independent fixed-point oracle
        let mut w = 0.5f64;
        for _ in 0..200 {
            w = (-w).exp();
        }
        let r = find_root_1d(|x| x - (-x).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((r - w).abs() < 1e-12);
        assert!((r - 0.567_143_290_4).abs() < 1e-10);
        let n = find_root_newton(|x| x - (-x).exp(), |x| 1.0 + (-x).exp(), 0.0, 1.0, 1e-3, 1e-15).unwrap();
        assert!((n - w).abs() < 1e-15);
    }

    #[test]
    fn exact_zero_midpoint() {
        assert_eq!(find_root_1d(|x| x, -1.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(find_root_1d(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::Bracket { .. })));
    }

    proptest::proptest! {
        #[test]
        fn residual_bounded_by_lipschitz(c in -0.9f64..0.9, tol in 1e-12f64..1e-4) {
            // f' = 3x^2 + 1 <= 4 on [-1, 1]
            let f = |x: f64| x * x * x + x - c;
            let r = find_root_1d(f, -1.0, 1.0, tol).unwrap();
            proptest::prop_assert!(f(r).abs() <= 4.0 * tol);
        }
    }
}
