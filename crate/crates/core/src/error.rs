use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("Lévy measure fails the (x ∧ x²) integrability requirement: {0}")]
    Integrability(String),

    #[error("criticality indeterminate: {0}")]
    IndeterminateCriticality(String),

    #[error("boundary case, refusing to guess: {0}")]
    BoundaryCase(String),

    #[error("extinction-time integral ∫^∞ dξ/ψ(ξ) diverges (Grey's condition fails){}", fmt_ctx(.0))]
    GreyConditionFails(String),

    #[error("not regularly varying (numerically): {0}")]
    NotRegularlyVarying(String),

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("survival probability underflows at t = {t:e}; use the log-space variant")]
    SurvivalUnderflow { t: f64 },

    #[error("transform inversion diverged: {0}")]
    InversionDiverged(String),

    #[error("transform handle cannot be evaluated at complex arguments and no real-axis fallback was allowed: {0}")]
    RealAxisOnly(String),

    #[error("too few surviving paths ({got} < {need}); increase the path count or decrease t")]
    TooFewSurvivors { got: usize, need: usize },

    #[error("Monte Carlo step too large: {0}")]
    StepTooLarge(String),

    #[error("mechanism is not in the slowly-varying (α = 0) class: {0}")]
    NotAlphaZero(String),

    #[error("supercritical mechanism: cumulant-flow machinery requires ψ'(0+) ≥ 0")]
    Supercritical,
}

fn fmt_ctx(ctx: &str) -> String {
    if ctx.is_empty() {
        String::new()
    } else {
        format!(": {ctx}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
