//! Newton-polygon decay theory for Fourier transforms of `|f|^-rho`.
//!
//! Given a bivariate germ `f` written as a finite sum of monomials, this crate
//! computes the Newton polygon `N(f)`, the Newton distance `d(f)`, the
//! well-behavedness verdict, the slice-integral decay pairs `(epsilon, d)`,
//! the resulting Fourier decay bounds and the box-integral envelope. All of
//! that is exact rational arithmetic.
//!
//! The [`oracle`] module is the floating-point side: quadrature of singular
//! and oscillatory integrals, power-law fitting and comparability checks that
//! cross-validate the symbolic results.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod diagnosis;
pub mod newton;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod terms;

pub use asymptotics::{
    decay_pair, dominant_vertex, dominant_vertex_exact, eval_fstar, eval_fstar_exact,
    lemma21_sum, theorem22_prediction, theorem23_envelope, AsymptoticsError, DecayPair,
    Envelope, EnvelopePiece, PowerLogSum, PowerLogTerm, Theorem22Prediction,
};
pub use diagnosis::{edge_zero_orders, is_well_behaved, EdgeZero, WellBehavedReport};
pub use newton::{
    build_polygon, edge_polynomial, newton_distance, reflect_polygon, CompactEdge,
    NewtonDistance, NewtonPolygon, Vertex,
};
pub use rational::Rational;
pub use terms::{parse_terms, MonomialTerm, ParseError, QuadrantSign, TermSum, TermsError};
