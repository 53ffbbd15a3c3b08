use num_complex::Complex64;
use rayon::prelude::*;

use super::{Profile, SampledScattering, SpectralData, K_PUNCTURE};
use crate::error::{Error, Result};
use crate::numerics::dopri5;

/// Settings for [`ode_scattering`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Integration interval; defaults to `[-R - 40, R + 40]` around the
    /// profile centre.
    pub x_span: Option<(f64, f64)>,
    /// Local error tolerance of the stepper and the tail-decay check.
    pub tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { x_span: None, tol: 1e-10 }
    }
}

type M = [Complex64; 4];

/// Right-hand side of `Psi' = ik (Psi s3 - s3 Psi) + U Psi` with
/// `U = [[0, q(x)], [-conj q(-x), 0]]`, entries stored row-major.
fn rhs(k: f64, q: Complex64, qt: Complex64, p: &M) -> M {
    let ik = Complex64::new(0.0, k);
    [
        q * p[2],
        -2.0 * ik * p[1] + q * p[3],
        2.0 * ik * p[2] - qt * p[0],
        -qt * p[1],
    ]
}

fn integrate(profile: &Profile, k: f64, y0: M, nodes: &[f64], tol: f64) -> Result<M> {
    let mut y = y0;
    for w in nodes.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (lo, hi) = (x0.min(x1), x0.max(x1));
        let pad = 1e-12 * (hi - lo);
        // keep stage evaluations on the correct side of a jump
        let f = |x: f64, p: &M| {
            let xc = x.clamp(lo + pad, hi - pad);
            rhs(k, profile.eval(xc), profile.eval(-xc).conj(), p)
        };
        y = dopri5(f, x0, x1, y, tol)?;
    }
    Ok(y)
}

fn scattering_at(profile: &Profile, k: f64, x_min: f64, x_max: f64, x_m: f64, tol: f64) -> Result<M> {
    let a = profile.right_limit();
    let ik = Complex64::new(0.0, k);
    let c = a / (2.0 * ik);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let n_minus = [one, zero, c, one];
    let n_plus = [one, c, zero, one];

    let mut cuts: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .flat_map(|b| [b, -b])
        .filter(|&b| b > x_min && b < x_max && b != x_m)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut left = vec![x_min];
    left.extend(cuts.iter().copied().filter(|&b| b < x_m));
    left.push(x_m);
    let mut right = vec![x_max];
    right.extend(cuts.iter().rev().copied().filter(|&b| b > x_m));
    right.push(x_m);

    let p1 = integrate(profile, k, n_minus, &left, tol)?;
    let p2 = integrate(profile, k, n_plus, &right, tol)?;

    let det = p2[0] * p2[3] - p2[1] * p2[2];
    let inv = [p2[3] / det, -p2[1] / det, -p2[2] / det, p2[0] / det];
    let s = [
        inv[0] * p1[0] + inv[1] * p1[2],
        inv[0] * p1[1] + inv[1] * p1[3],
        inv[2] * p1[0] + inv[3] * p1[2],
        inv[2] * p1[1] + inv[3] * p1[3],
    ];
    let e = (2.0 * ik * x_m).exp();
    Ok([s[0], s[1] * e, s[2] / e, s[3]])
}

/// Scattering matrix of a step-like profile by integrating the Jost
/// equation from both ends and matching at `x = -R`.
///
/// The grid is sorted; points inside the puncture around 0 are rejected.
pub fn ode_scattering(profile: &Profile, k_grid: &[f64], opts: OdeOptions) -> Result<SpectralData> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let r = profile.center();
    let (x_min, x_max) = opts.x_span.unwrap_or((-r.abs() - 40.0, r.abs() + 40.0));
    if !(x_min < -r.abs() && x_max > r.abs()) {
        return Err(Error::InvalidInput(format!("x span [{x_min}, {x_max}] must contain [-|R|, |R|]")));
    }
    profile.check_tails(x_min, x_max, opts.tol.max(1e-12))?;

    let mut ks = k_grid.to_vec();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    if ks.is_empty() {
        return Err(Error::InvalidInput("empty k grid".into()));
    }
    if let Some(k) = ks.iter().find(|k| k.abs() < K_PUNCTURE || !k.is_finite()) {
        return Err(Error::InvalidInput(format!("k grid contains {k}, inside the puncture |k| < {K_PUNCTURE}")));
    }
    let s = ks
        .par_iter()
        .map(|&k| scattering_at(profile, k, x_min, x_max, -r, opts.tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralData::from_samples(SampledScattering { ks, s, right_limit: profile.right_limit() }))
}
