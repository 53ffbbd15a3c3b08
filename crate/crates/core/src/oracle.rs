//! Direct time integration of `i q_t + q_xx + 2 q^2 conj(q(-x)) = 0` on a
//! mirror-symmetric grid, and ray-wise comparison with the asymptotics.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::cubic_interp;
use crate::scattering::{Profile, StepParams};

/// Time stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Crank-Nicolson in `q_xx`, Heun predictor-corrector in the nonlinearity.
    CrankNicolsonFd,
    /// Classical RK4 method of lines.
    Rk4Fd,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crank_nicolson_fd" | "cn" => Ok(Scheme::CrankNicolsonFd),
            "rk4_fd" | "rk4" => Ok(Scheme::Rk4Fd),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Cell-centred grid on `[-L, L]`: `x_i = (i + 1/2 - N/2) dx`, so cell `i`
/// and cell `N-1-i` sit at exactly opposite points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub l: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub smoothing_eps: f64,
    pub scheme: Scheme,
    /// Abort when `max |q| > blowup_cap * A`.
    pub blowup_cap: f64,
    /// Boundary influence speed `c_g = 4 k_max`; comparisons need `|x| <= L - c_g t`.
    pub window_speed: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            l: 200.0,
            n: 16384,
            dt: 5e-4,
            t_end: 40.0,
            smoothing_eps: 0.5,
            scheme: Scheme::CrankNicolsonFd,
            blowup_cap: 50.0,
            window_speed: 10.0,
        }
    }
}

impl GridConfig {
    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5 - 0.5 * self.n as f64) * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Half-width of the region not yet reached by boundary effects.
    pub fn window(&self, t: f64) -> f64 {
        self.l - self.window_speed * t
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.l > 0.0 && self.l.is_finite()) {
            return bad(format!("L must be positive, got {}", self.l));
        }
        if self.n < 8 || self.n % 2 != 0 {
            return bad(format!("N must be even and >= 8, got {}", self.n));
        }
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.dt <= self.t_end && self.t_end.is_finite()) {
            return bad(format!("need 0 < dt <= t_end, got dt {} t_end {}", self.dt, self.t_end));
        }
        if !(self.smoothing_eps > 0.0 && self.blowup_cap > 0.0 && self.window_speed >= 0.0) {
            return bad("eps, blow-up cap must be positive and window speed non-negative".into());
        }
        if self.scheme == Scheme::Rk4Fd {
            // RK4 covers the imaginary axis up to 2 sqrt 2; spectrum of i D2 reaches 4/dx^2
            let limit = 0.95 * 2.0 * 2f64.sqrt() * self.dx() * self.dx() / 4.0;
            if self.dt > limit {
                return bad(format!("rk4_fd needs dt <= {limit:e} at dx = {}", self.dx()));
            }
        }
        Ok(())
    }
}

/// `(A/2)(1 + tanh((x - R)/eps))`.
pub fn smooth_step(params: StepParams, eps: f64) -> Result<Profile> {
    Profile::tanh_step(params, eps)
}

/// One stored snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub q: Vec<Complex64>,
    /// Far-field values carried in the ghost cells at `x = -L - dx/2` and `L + dx/2`.
    pub ghost: [Complex64; 2],
}

impl FieldState {
    pub fn max_abs(&self) -> f64 {
        max_norm(&self.q)
    }
}

/// Result of a run: requested snapshots in time order plus diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub cfg: GridConfig,
    pub states: Vec<FieldState>,
    /// Largest `|q|` in the first and last cell over the run, minus its far-field value.
    pub boundary_drift: [f64; 2],
    pub warnings: Vec<String>,
    /// Set when the run stopped early; `states` then holds the snapshots reached.
    pub aborted: Option<Error>,
}

#[inline]
fn nonlin(q: &[Complex64], out: &mut [Complex64]) {
    let n = q.len();
    for i in 0..n {
        out[i] = 2.0 * q[i] * q[i] * q[n - 1 - i].conj();
    }
}

fn ghost_rhs(g: [Complex64; 2]) -> [Complex64; 2] {
    let i2 = Complex64::new(0.0, 2.0);
    [i2 * g[0] * g[0] * g[1].conj(), i2 * g[1] * g[1] * g[0].conj()]
}

/// One RK4 step of the far-field ODE `g' = 2 i g^2 conj(g_mirror)`.
fn ghost_step(g: [Complex64; 2], h: f64) -> [Complex64; 2] {
    let add = |a: [Complex64; 2], b: [Complex64; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    let k1 = ghost_rhs(g);
    let k2 = ghost_rhs(add(g, k1, h / 2.0));
    let k3 = ghost_rhs(add(g, k2, h / 2.0));
    let k4 = ghost_rhs(add(g, k3, h));
    [
        g[0] + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0),
        g[1] + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0),
    ]
}

/// Thomas factorisation of the constant CN matrix `tridiag(-i a, 1 + 2 i a, -i a)`.
struct Tridiag {
    off: Complex64,
    cp: Vec<Complex64>,
    inv_den: Vec<Complex64>,
}

impl Tridiag {
    fn new(n: usize, alpha: f64) -> Self {
        let diag = Complex64::new(1.0, 2.0 * alpha);
        let off = Complex64::new(0.0, -alpha);
        let mut cp = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_den = vec![Complex64::new(0.0, 0.0); n];
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let den = diag - off * prev;
            inv_den[i] = 1.0 / den;
            cp[i] = off * inv_den[i];
            prev = cp[i];
        }
        Tridiag { off, cp, inv_den }
    }

    fn solve(&self, d: &mut [Complex64]) {
        let n = d.len();
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..n {
            d[i] = (d[i] - self.off * prev) * self.inv_den[i];
            prev = d[i];
        }
        for i in (0..n - 1).rev() {
            d[i] = d[i] - self.cp[i] * d[i + 1];
        }
    }
}

/// Runs the PDE from a profile sampled at the cell centres.
pub fn evolve(q0: &Profile, cfg: &GridConfig, snapshots: &[f64]) -> Result<Trajectory> {
    evolve_partial(q0, cfg, snapshots).and_then(finish)
}

/// Like [`evolve`], but a blow-up returns the snapshots taken before it
/// with `aborted` set instead of an error.
pub fn evolve_partial(q0: &Profile, cfg: &GridConfig, snapshots: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    let init: Vec<Complex64> = (0..cfg.n).map(|i| q0.eval(cfg.x(i))).collect();
    let ghost = [q0.eval(-cfg.l - 0.5 * cfg.dx()), q0.eval(cfg.l + 0.5 * cfg.dx())];
    run(init, ghost, q0.right_limit(), cfg, snapshots)
}

/// Runs the PDE from explicit cell values and ghost values. `amplitude`
/// scales the blow-up cap.
pub fn evolve_from(
    init: Vec<Complex64>,
    ghost: [Complex64; 2],
    amplitude: f64,
    cfg: &GridConfig,
    snapshots: &[f64],
) -> Result<Trajectory> {
    run(init, ghost, amplitude, cfg, snapshots).and_then(finish)
}

fn finish(tr: Trajectory) -> Result<Trajectory> {
    match tr.aborted {
        Some(e) => Err(e),
        None => Ok(tr),
    }
}

fn run(
    init: Vec<Complex64>,
    ghost: [Complex64; 2],
    amplitude: f64,
    cfg: &GridConfig,
    snapshots: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    if init.len() != cfg.n {
        return Err(Error::InvalidInput(format!("initial data has {} cells, grid has {}", init.len(), cfg.n)));
    }
    let mut want: Vec<(usize, usize)> = Vec::with_capacity(snapshots.len());
    for (k, &ts) in snapshots.iter().enumerate() {
        if !(ts >= 0.0 && ts <= cfg.t_end * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!("snapshot time {ts} outside [0, {}]", cfg.t_end)));
        }
        want.push(((ts / cfg.dt).round() as usize, k));
    }
    want.sort();
    let cap = cfg.blowup_cap * amplitude.max(init.iter().map(|z| z.norm()).fold(0.0, f64::max)).max(1e-300);

    let n = cfg.n;
    let dx = cfg.dx();
    let dt = cfg.dt;
    let inv_dx2 = 1.0 / (dx * dx);
    let iu = Complex64::i();
    let mut q = init;
    let mut g = ghost;
    let mut out: Vec<Option<FieldState>> = vec![None; snapshots.len()];
    let mut drift = [0.0f64; 2];
    let mut wi = 0;
    let take = |step: usize, q: &[Complex64], g: [Complex64; 2], out: &mut Vec<Option<FieldState>>, wi: &mut usize| {
        while *wi < want.len() && want[*wi].0 == step {
            out[want[*wi].1] = Some(FieldState { t: step as f64 * dt, q: q.to_vec(), ghost: g });
            *wi += 1;
        }
    };
    take(0, &q, g, &mut out, &mut wi);

    let laplace = |q: &[Complex64], g: [Complex64; 2], out: &mut [Complex64]| {
        for i in 0..n {
            let l = if i == 0 { g[0] } else { q[i - 1] };
            let r = if i == n - 1 { g[1] } else { q[i + 1] };
            out[i] = (l - 2.0 * q[i] + r) * inv_dx2;
        }
    };

    let steps = cfg.steps();
    let mut aborted = None;
    let mut n0 = vec![Complex64::new(0.0, 0.0); n];
    let mut n1 = vec![Complex64::new(0.0, 0.0); n];
    let mut lap = vec![Complex64::new(0.0, 0.0); n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut pred = vec![Complex64::new(0.0, 0.0); n];
    match cfg.scheme {
        Scheme::CrankNicolsonFd => {
            let alpha = dt / (2.0 * dx * dx);
            let tri = Tridiag::new(n, alpha);
            let ia = Complex64::new(0.0, alpha);
            for step in 1..=steps {
                let g1 = ghost_step(g, dt);
                laplace(&q, g, &mut lap);
                nonlin(&q, &mut n0);
                // explicit half of CN plus boundary terms of the implicit half
                for i in 0..n {
                    rhs[i] = q[i] + iu * (0.5 * dt) * lap[i];
                }
                rhs[0] += ia * g1[0];
                rhs[n - 1] += ia * g1[1];
                for i in 0..n {
                    pred[i] = rhs[i] + iu * dt * n0[i];
                }
                tri.solve(&mut pred);
                nonlin(&pred, &mut n1);
                for i in 0..n {
                    pred[i] = rhs[i] + iu * (0.5 * dt) * (n0[i] + n1[i]);
                }
                tri.solve(&mut pred);
                std::mem::swap(&mut q, &mut pred);
                g = g1;
                if let Err(e) = post_step(step, dt, &q, g, cap, &mut drift) {
                    aborted = Some(e);
                    break;
                }
                take(step, &q, g, &mut out, &mut wi);
            }
        }
        Scheme::Rk4Fd => {
            let rhs_fn = |q: &[Complex64], g: [Complex64; 2], lap: &mut [Complex64], nl: &mut [Complex64], out: &mut [Complex64]| {
                laplace(q, g, lap);
                nonlin(q, nl);
                for i in 0..n {
                    out[i] = iu * (lap[i] + nl[i]);
                }
            };
            let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 4];
            let mut stage = vec![Complex64::new(0.0, 0.0); n];
            for step in 1..=steps {
                let gh = ghost_step(g, 0.5 * dt);
                let g1 = ghost_step(g, dt);
                let gs = [g, gh, gh, g1];
                let w = [0.0, 0.5, 0.5, 1.0];
                for s in 0..4 {
                    if s == 0 {
                        stage.copy_from_slice(&q);
                    } else {
                        for i in 0..n {
                            stage[i] = q[i] + k[s - 1][i] * (w[s] * dt);
                        }
                    }
                    let (lo, hi) = k.split_at_mut(s);
                    let _ = lo;
                    rhs_fn(&stage, gs[s], &mut lap, &mut n0, &mut hi[0]);
                }
                for i in 0..n {
                    q[i] += (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]) * (dt / 6.0);
                }
                g = g1;
                if let Err(e) = post_step(step, dt, &q, g, cap, &mut drift) {
                    aborted = Some(e);
                    break;
                }
                take(step, &q, g, &mut out, &mut wi);
            }
        }
    }
    // snapshots are returned in time order
    let mut order: Vec<usize> = (0..snapshots.len()).collect();
    order.sort_by(|&a, &b| snapshots[a].total_cmp(&snapshots[b]));
    let states: Vec<FieldState> = order.into_iter().filter_map(|k| out[k].take()).collect();
    let mut warnings = Vec::new();
    let last = snapshots.iter().copied().fold(0.0, f64::max);
    if cfg.window(last) <= 0.0 {
        warnings.push(format!(
            "boundary influence cone covers the whole grid by t = {last} (L = {}, c_g = {})",
            cfg.l, cfg.window_speed
        ));
    }
    Ok(Trajectory { cfg: cfg.clone(), states, boundary_drift: drift, warnings, aborted })
}

// NaN-propagating, so an overflowed field never looks small
fn max_norm(q: &[Complex64]) -> f64 {
    q.iter().map(|z| z.norm()).fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn post_step(step: usize, dt: f64, q: &[Complex64], g: [Complex64; 2], cap: f64, drift: &mut [f64; 2]) -> Result<()> {
    let n = q.len();
    drift[0] = drift[0].max((q[0] - g[0]).norm());
    drift[1] = drift[1].max((q[n - 1] - g[1]).norm());
    if step % 16 == 0 || !q[n / 2].re.is_finite() {
        let m = max_norm(q);
        if !(m <= cap) {
            return Err(Error::BlowUp { t: step as f64 * dt, max_abs: m, cap });
        }
    }
    Ok(())
}

/// `q_num` at `x` by cubic interpolation on the grid.
pub fn sample(state: &FieldState, cfg: &GridConfig, x: f64) -> Option<Complex64> {
    let xs = cfg.xs();
    cubic_interp(&xs, &state.q, x)
}

/// One comparison row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayRow {
    pub t: f64,
    pub xi: f64,
    pub x: f64,
    /// `|q_num - q_asym|`.
    pub err_abs: f64,
    pub q_num_abs: f64,
    pub q_asym_abs: f64,
    /// `| |q_num| - |q_asym| |`, insensitive to the constant phase convention.
    pub err_mod: f64,
}

/// Samples the trajectory along `x = 4 xi t` and compares with `asym(x, t)`.
pub fn compare_ray<F>(traj: &Trajectory, xi: f64, asym: F) -> Result<Vec<RayRow>>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    compare_ray_each(traj, xi, asym).into_iter().map(|(_, r)| r).collect()
}

/// Per-snapshot version of [`compare_ray`]: a failing snapshot does not
/// hide the others.
pub fn compare_ray_each<F>(traj: &Trajectory, xi: f64, asym: F) -> Vec<(f64, Result<RayRow>)>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    let cfg = &traj.cfg;
    let xs = cfg.xs();
    traj.states
        .iter()
        .map(|s| {
            let row = (|| {
                let x = 4.0 * xi * s.t;
                let limit = cfg.window(s.t);
                if x.abs() > limit {
                    return Err(Error::Window { x, t: s.t, limit });
                }
                let qn = cubic_interp(&xs, &s.q, x).ok_or(Error::Window { x, t: s.t, limit })?;
                let qa = asym(x, s.t)?;
                Ok(RayRow {
                    t: s.t,
                    xi,
                    x,
                    err_abs: (qn - qa).norm(),
                    q_num_abs: qn.norm(),
                    q_asym_abs: qa.norm(),
                    err_mod: (qn.norm() - qa.norm()).abs(),
                })
            })();
            (s.t, row)
        })
        .collect()
}

/// Least-squares fit `err ~ C t^p`; returns `(C, p)`.
pub fn fit_power_law(ts: &[f64], errs: &[f64]) -> Result<(f64, f64)> {
    if ts.len() < 2 || ts.len() != errs.len() || errs.iter().any(|e| !(*e > 0.0)) || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("power-law fit needs >= 2 positive (t, err) pairs".into()));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("power-law fit needs distinct times".into()));
    }
    let p = sxy / sxx;
    Ok(((my - p * mx).exp(), p))
}

/// Max-norm differences between successive resolutions `(N, dt)`,
/// `(2N, dt/2)`, `(4N, dt/4)` at `t_end`; returns the differences and the
/// observed order `log2(d1/d2)`.
pub fn self_convergence(q0: &Profile, base: &GridConfig) -> Result<([f64; 2], f64)> {
    let runs: Vec<Vec<Complex64>> = (0..3)
        .map(|lvl| {
            let f = 1usize << lvl;
            let cfg = GridConfig { n: base.n * f, dt: base.dt / f as f64, ..base.clone() };
            evolve(q0, &cfg, &[cfg.t_end]).map(|tr| tr.states.into_iter().next().expect("one snapshot").q)
        })
        .collect::<Result<_>>()?;
    // fine cells 2i, 2i+1 straddle coarse cell i; 4-point midpoint rule
    let restrict = |fine: &[Complex64]| -> Vec<Complex64> {
        let m = fine.len() / 2;
        (0..m)
            .map(|i| {
                let a = 2 * i;
                if a == 0 || a + 2 >= fine.len() {
                    0.5 * (fine[a] + fine[a + 1])
                } else {
                    (9.0 * (fine[a] + fine[a + 1]) - fine[a - 1] - fine[a + 2]) / 16.0
                }
            })
            .collect()
    };
    let max_diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let d1 = max_diff(&runs[0], &restrict(&runs[1]));
    let d2 = max_diff(&runs[1], &restrict(&runs[2]));
    Ok(([d1, d2], (d1 / d2).log2()))
}
