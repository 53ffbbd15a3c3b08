use num_complex::Complex64;

/// Four-point Lagrange interpolation on an increasing (not necessarily
/// uniform) grid. Falls back to a shorter stencil at the ends.
pub fn cubic_interp(xs: &[f64], ys: &[Complex64], x: f64) -> Option<Complex64> {
    let n = xs.len();
    if n == 0 || ys.len() != n || !(x >= xs[0] && x <= xs[n - 1]) {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    // index of the left node of the bracketing cell
    let i = match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(j) => return Some(ys[j]),
        Err(j) => j - 1,
    };
    let lo = i.saturating_sub(1);
    let hi = (lo + 3).min(n - 1);
    let lo = hi.saturating_sub(3);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in lo..=hi {
        let mut w = 1.0;
        for m in lo..=hi {
            if m != j {
                w *= (x - xs[m]) / (xs[j] - xs[m]);
            }
        }
        acc += ys[j] * w;
    }
    Some(acc)
}
