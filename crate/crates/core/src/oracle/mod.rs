//! Floating-point oracles that cross-check the exact results: singular and
//! oscillatory quadrature, rate fitting, and sampled comparability checks.
//! Nothing in the exact modules depends on these.

pub mod checks;
pub mod cutoff;
pub mod fit;
mod line;
pub mod quad;
pub mod rect;
pub mod roots;
pub mod slice;
pub mod transform;

use alloc::vec::Vec;

use crate::asymptotics::Inapplicable;

pub use checks::{
    check_comparability, check_fstar_equivalence, sharpness_probe, ComparabilityOptions, ComparabilityReport,
    EquivalenceReport, RatioSample, SharpnessOptions, SharpnessReport,
};
pub use cutoff::{CutoffKind, CutoffSpec};
pub use fit::{band_max_fit, fit_frequency_decay, fit_power_log, DecayFit};
pub use rect::{integrate_power_on_rect, DyadicRectangle, PowerBase};
pub use slice::slice_integral;
pub use transform::{oscillatory_transform, FrequencyPoint, OscillatoryIntegral, TransformValue};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("the integral diverges")]
    Divergent,
    #[error("frequency too large for the requested tolerance")]
    BudgetExceeded,
    #[error("tolerance not met (estimate {estimate}, error {error})")]
    ToleranceNotMet { estimate: f64, error: f64 },
    #[error("samples must be positive")]
    NonPositiveSample,
    #[error("{got} samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("the decay prediction does not apply: {0:?}")]
    Inapplicable(Vec<Inapplicable>),
}
