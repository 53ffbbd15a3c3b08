use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest neighbour phase jump the adaptive tracker accepts.
pub const TRACK_MAX_JUMP: f64 = PI / 2.0;

/// Wrap an angle difference into `(-pi, pi]`.
#[inline]
pub fn wrap_angle(d: f64) -> f64 {
    let mut w = d % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Continuous argument along an ordered sample sequence.
///
/// The first output is `arg(samples[0]) + 2 pi start_turns`, which lets the
/// caller pin the branch (for instance to the limit at `-inf`). Neighbour
/// jumps are taken as the wrapped difference; a jump whose magnitude reaches
/// pi cannot be disambiguated and is reported as a resolution error.
pub fn unwrap_arg(samples: &[Complex64], start_turns: i64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(samples.len());
    let Some(first) = samples.first() else {
        return Ok(out);
    };
    for (i, s) in samples.iter().enumerate() {
        if s.norm() == 0.0 || !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::DegeneratePoint(i));
        }
    }
    let mut acc = first.arg() + 2.0 * PI * start_turns as f64;
    out.push(acc);
    for (i, w) in samples.windows(2).enumerate() {
        let jump = wrap_angle(w[1].arg() - w[0].arg());
        if jump.abs() >= PI * (1.0 - 1e-12) {
            return Err(Error::Resolution { index: i, jump });
        }
        acc += jump;
        out.push(acc);
    }
    Ok(out)
}

/// Phase trace of a complex function along a real interval.
#[derive(Debug, Clone)]
pub struct ArgTrace {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub args: Vec<f64>,
}

impl ArgTrace {
    pub fn last_arg(&self) -> f64 {
        *self.args.last().expect("trace is never empty")
    }
}

/// Samples `f` on `[a, b]` starting from a uniform grid of spacing at most
/// `base_step`, halving any gap whose wrapped phase jump is `>= pi/2`, then
/// unwraps. Gaps narrower than `min_step` that still jump are an error.
pub fn track_arg<F>(f: F, a: f64, b: f64, base_step: f64, start_turns: i64) -> Result<ArgTrace>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(a < b) || !(base_step > 0.0) {
        return Err(Error::InvalidInput(format!("bad tracking interval [{a}, {b}] step {base_step}")));
    }
    let min_step = (b - a).abs().max(a.abs()).max(b.abs()) * 1e-13;
    let n = ((b - a) / base_step).ceil().max(1.0) as usize;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let x0 = a;
    let mut prev_x = x0;
    let mut prev_v = f(x0)?;
    if prev_v.norm() == 0.0 {
        return Err(Error::DegeneratePoint(0));
    }
    nodes.push(prev_x);
    values.push(prev_v);
    for i in 1..=n {
        let x = if i == n { b } else { a + (b - a) * (i as f64 / n as f64) };
        // refine the gap (prev_x, x] depth-first
        let mut stack = vec![(x, f(x)?)];
        while let Some(&(xr, vr)) = stack.last() {
            if vr.norm() == 0.0 {
                return Err(Error::DegeneratePoint(nodes.len()));
            }
            let jump = wrap_angle(vr.arg() - prev_v.arg());
            if jump.abs() < TRACK_MAX_JUMP {
                stack.pop();
                nodes.push(xr);
                values.push(vr);
                prev_x = xr;
                prev_v = vr;
            } else {
                if xr - prev_x < min_step {
                    return Err(Error::Resolution { index: nodes.len() - 1, jump });
                }
                let xm = 0.5 * (prev_x + xr);
                stack.push((xm, f(xm)?));
            }
        }
    }
    let args = unwrap_arg(&values, start_turns)?;
    Ok(ArgTrace { nodes, values, args })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_sequence() {
        let s = vec![Complex64::new(1.0, 0.0); 3];
        assert_eq!(unwrap_arg(&s, 0).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_full_windings() {
        let s: Vec<_> = (0..=32).map(|i| Complex64::from_polar(1.0, i as f64 * PI / 8.0)).collect();
        let u = unwrap_arg(&s, 0).unwrap();
        assert!((u.last().unwrap() - 4.0 * PI).abs() < 1e-12);
        let shifted = unwrap_arg(&s, -1).unwrap();
        assert!((shifted[0] + 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn zero_sample_rejected() {
        let s = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(unwrap_arg(&s, 0), Err(Error::DegeneratePoint(1)));
    }

    #[test]
    fn antipodal_jump_rejected() {
        let s = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert!(matches!(unwrap_arg(&s, 0), Err(Error::Resolution { index: 0, .. })));
    }

    #[test]
    fn tracker_densifies_fast_rotation() {
        // e^{i 40 x} on [0, 1]: 40 rad total, 2 rad per coarse gap
        let tr = track_arg(|x| Ok(Complex64::from_polar(1.0, 40.0 * x)), 0.0, 1.0, 0.05, 0).unwrap();
        assert!((tr.last_arg() - 40.0).abs() < 1e-12);
        assert!(tr.nodes.len() > 25, "{}", tr.nodes.len());
        for w in tr.args.windows(2) {
            assert!((w[1] - w[0]).abs() < TRACK_MAX_JUMP);
        }
    }

    proptest! {
        #[test]
        fn differs_from_principal_by_full_turns(phases in proptest::collection::vec(-3.0f64..3.0, 2..50)) {
            let mut theta = 0.0;
            let mut s = Vec::new();
            for d in &phases {
                theta += d;
                s.push(Complex64::from_polar(1.5, theta));
            }
            let u = unwrap_arg(&s, 2).unwrap();
            for (ui, si) in u.iter().zip(&s) {
                let k = (ui - si.arg()) / (2.0 * PI);
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
        }
    }
}
