//! Exact asymptotics: the slice sum over polygon blocks, its leading
//! exponent pair, the decay prediction built from both slice directions, and
//! the box-integral envelope.

mod envelope;
mod slices;
mod powerlog;
mod prediction;

pub use envelope::{theorem23_envelope, Envelope, EnvelopePiece, EnvelopeTable, EnvelopeTerm};
pub use slices::{
    boundary_exponents, dominant_vertex, dominant_vertex_exact, eval_fstar, eval_fstar_exact,
    lemma21_sum,
};
pub use powerlog::{decay_pair, DecayPair, PowerLogSum, PowerLogTerm};
pub use prediction::{theorem22_prediction, Inapplicable, Theorem22Prediction};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("the slice integral diverges at this rho")]
    Divergent,
    #[error("rho must be positive")]
    NonPositiveRho,
    #[error("all terms cancel")]
    Cancelled,
    #[error("the dominant term has a nonpositive coefficient")]
    DominantNotPositive,
    #[error("log power {0} exceeds 1")]
    LogPowerTooLarge(u32),
    #[error("the dominant exponent is positive, so the sum is not growing")]
    NegativeEpsilon,
}
