use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants are grouped by the kind of failure rather than by module, so the
/// CLI can map them onto exit codes without knowing where they came from.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Gamma function pole at z = {0}")]
    GammaPole(f64),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate_re}+{estimate_im}i, error {error_estimate:e})")]
    QuadratureNonConvergence {
        estimate_re: f64,
        estimate_im: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("degenerate sample at index {0}: argument undefined at zero")]
    DegeneratePoint(usize),

    #[error("phase jump of {jump:.3} rad between samples {index} and {next}; densify the sampling", next = index + 1)]
    Resolution { index: usize, jump: f64 },

    #[error("spectral function is singular at k = {0}")]
    SingularPoint(String),

    #[error("a1 vanishes at k = {0}; reflection coefficient has a pole")]
    ReflectionPole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration step size underflow at x = {0}")]
    StepSize(f64),

    #[error("xi = {xi} lies on the boundary ray {ray} (within {tol:e})")]
    BoundaryRay { xi: f64, ray: f64, tol: f64 },

    #[error("R = {r} is at the boundary value (2n+1)pi/(2A) for n = {n}; real zeros at +-A/2 are not supported")]
    BoundaryStep { r: f64, n: usize },

    #[error("k = {0} lies on the branch cut of delta")]
    BranchCut(String),

    #[error("assumptions violated: {0}")]
    AssumptionsViolated(String),

    #[error("solution blew up: max |q| = {max_abs:.3e} exceeds cap {cap:.3e} at t = {t}")]
    BlowUp { t: f64, max_abs: f64, cap: f64 },

    #[error("comparison window violated: x = {x} at t = {t} outside |x| <= {limit}")]
    Window { x: f64, t: f64, limit: f64 },
}

impl Error {
    /// True for inputs the theory does not cover (boundary step, boundary rays),
    /// as opposed to malformed inputs or numerical failures.
    pub fn is_unsupported_case(&self) -> bool {
        matches!(self, Error::BoundaryRay { .. } | Error::BoundaryStep { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
