use num_complex::Complex64;

use super::StepParams;
use crate::error::{Error, Result};
use crate::numerics::cubic_interp;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Zero,
    Step(StepParams),
    TanhStep { params: StepParams, eps: f64 },
    Tabulated { xs: Vec<f64>, qs: Vec<Complex64> },
}

/// Step-like initial datum `q0(x)` with `q0 -> 0` on the left and
/// `q0 -> A` on the right.
///
/// Tails are assumed to approach their limits exponentially fast;
/// `decay_scale` is the e-folding length of that approach (0 for data that
/// is exactly constant outside a compact set).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    shape: Shape,
    right_limit: f64,
    decay_scale: f64,
    center: f64,
}

impl Profile {
    /// The pure shifted step `A H(x - R)`.
    pub fn step(params: StepParams) -> Self {
        Profile { shape: Shape::Step(params), right_limit: params.a, decay_scale: 0.0, center: params.r }
    }

    /// `(A/2)(1 + tanh((x - R)/eps))`.
    pub fn tanh_step(params: StepParams, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("smoothing width must be positive, got {eps}")));
        }
        Ok(Profile {
            shape: Shape::TanhStep { params, eps },
            right_limit: params.a,
            decay_scale: eps / 2.0,
            center: params.r,
        })
    }

    /// `q0 = 0` with right limit 0; only useful as a smoke test.
    pub fn zero() -> Self {
        Profile { shape: Shape::Zero, right_limit: 0.0, decay_scale: 0.0, center: 0.0 }
    }

    /// Tabulated profile, interpolated by cubic Lagrange inside the table and
    /// extended by its limits `0` and `right_limit` outside.
    pub fn tabulated(xs: Vec<f64>, qs: Vec<Complex64>, right_limit: f64) -> Result<Self> {
        if xs.len() < 4 || xs.len() != qs.len() {
            return Err(Error::InvalidInput("tabulated profile needs at least 4 (x, q) rows".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("profile x values must be strictly increasing".into()));
        }
        if !(right_limit >= 0.0 && right_limit.is_finite()) {
            return Err(Error::InvalidInput(format!("right limit must be finite and >= 0, got {right_limit}")));
        }
        let center = xs
            .iter()
            .zip(&qs)
            .find(|(_, q)| q.norm() >= 0.5 * right_limit)
            .map(|(x, _)| *x)
            .unwrap_or(0.0);
        let decay_scale = (xs[1] - xs[0]).max(0.0);
        Ok(Profile { shape: Shape::Tabulated { xs, qs }, right_limit, decay_scale, center })
    }

    /// Reads `x, Re q0, Im q0` rows. Blank lines, `#` comments and a
    /// non-numeric header line are skipped.
    pub fn from_csv_str(text: &str, right_limit: f64) -> Result<Self> {
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 3 => {
                    xs.push(v[0]);
                    qs.push(Complex64::new(v[1], v[2]));
                }
                Ok(v) => {
                    return Err(Error::InvalidInput(format!(
                        "profile line {}: expected 3 columns, found {}",
                        lineno + 1,
                        v.len()
                    )))
                }
                Err(_) if xs.is_empty() && qs.is_empty() => continue,
                Err(e) => return Err(Error::InvalidInput(format!("profile line {}: {e}", lineno + 1))),
            }
        }
        Profile::tabulated(xs, qs, right_limit)
    }

    /// Built-in named profiles: `step` and `tanh-step` (needs `eps`).
    pub fn named(name: &str, params: StepParams, eps: Option<f64>) -> Result<Self> {
        match name {
            "step" => Ok(Profile::step(params)),
            "tanh-step" => Profile::tanh_step(params, eps.ok_or_else(|| {
                Error::InvalidInput("tanh-step needs a smoothing width eps".into())
            })?),
            other => Err(Error::InvalidInput(format!("unknown profile '{other}'"))),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.shape {
            Shape::Zero => Complex64::new(0.0, 0.0),
            Shape::Step(p) => {
                if x > p.r {
                    Complex64::new(p.a, 0.0)
                } else if x < p.r {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.5 * p.a, 0.0)
                }
            }
            Shape::TanhStep { params, eps } => {
                Complex64::new(0.5 * params.a * (1.0 + ((x - params.r) / eps).tanh()), 0.0)
            }
            Shape::Tabulated { xs, qs } => {
                if x < xs[0] {
                    Complex64::new(0.0, 0.0)
                } else if x > xs[xs.len() - 1] {
                    Complex64::new(self.right_limit, 0.0)
                } else {
                    cubic_interp(xs, qs, x).expect("x inside table")
                }
            }
        }
    }

    pub fn right_limit(&self) -> f64 {
        self.right_limit
    }

    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }

    /// Location of the transition (R for the built-in steps).
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Points where the profile is not smooth; integrators split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Step(p) => vec![p.r],
            Shape::Tabulated { xs, .. } => vec![xs[0], xs[xs.len() - 1]],
            _ => Vec::new(),
        }
    }

    /// Verifies `|q0(x_min)| <= tol` and `|q0(x_max) - A| <= tol`, plus the
    /// mirrored points the nonlocal potential also samples.
    pub fn check_tails(&self, x_min: f64, x_max: f64, tol: f64) -> Result<()> {
        let left = self.eval(x_min).norm().max(self.eval(-x_max).norm());
        let right = (self.eval(x_max) - self.right_limit).norm().max((self.eval(-x_min) - self.right_limit).norm());
        if left > tol || right > tol {
            return Err(Error::Domain(format!(
                "profile tails not converged on [{x_min}, {x_max}]: left {left:e}, right {right:e} (tol {tol:e})"
            )));
        }
        Ok(())
    }
}
