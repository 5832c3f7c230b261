use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate tangent: consecutive centerline points {index} and {} coincide", index + 1)]
    DegenerateTangent { index: usize },

    #[error("grid must be strictly increasing (violated between samples {} and {index})", index - 1)]
    NonMonotonicGrid { index: usize },

    #[error("grid must be uniform (spacing deviates at sample {index})")]
    NonUniformGrid { index: usize },

    #[error("grid length mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("initial propagation direction must point along +z (polar angle {theta0:.3e} rad); rotate the frame first")]
    InitialCondition { theta0: f64 },

    #[error("polar angle {value:.6} rad at sample {index} outside [0, π]")]
    PolarAngleRange { index: usize, value: f64 },

    #[error("azimuth not unwrapped: jump of {jump:.6} rad between samples {} and {index}", index - 1)]
    PhaseWrap { index: usize, jump: f64 },

    #[error("degenerate drive at t = {t:.6e}: detuning and coupling vanish simultaneously")]
    DegenerateDrive { t: f64 },

    #[error("invariant trajectory reached pole proximity at t = {t:.6e} (ς = {varsigma:.3e}); re-seed ς₀ away from 0 and π")]
    PoleProximity { t: f64, varsigma: f64 },

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("state not normalized: |ψ|² = {norm_sq:.12}")]
    Normalization { norm_sq: f64 },

    #[error("matrix not Hermitian: max |A - A†| element {max_asymmetry:.3e}")]
    NonHermitian { max_asymmetry: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenConvergence { sweeps: usize, off: f64 },

    #[error("{name} must be positive, got {value:.6e}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("coupling must be real: {0}")]
    ComplexCoupling(String),

    #[error("both couplings vanish: normalization undefined")]
    DegenerateManifold,

    #[error("plane-wave cutoff too small: lowest bands shifted by {shift:.3e} E_r when the cutoff grows by 2")]
    CutoffTooSmall { shift: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
