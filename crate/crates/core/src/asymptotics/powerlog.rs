//! Finite sums `sum c * r^alpha * |ln r|^p` and their dominant behaviour as
//! `r -> 0+`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::AsymptoticsError;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerLogTerm {
    pub coeff: Rational,
    pub alpha: Rational,
    pub logpow: u32,
}

impl PowerLogTerm {
    pub fn new(coeff: Rational, alpha: Rational, logpow: u32) -> Self {
        PowerLogTerm { coeff, alpha, logpow }
    }

    pub fn eval(&self, r: f64) -> f64 {
        rational::to_f64(&self.coeff)
            * libm::pow(r, rational::to_f64(&self.alpha))
            * libm::pow(libm::fabs(libm::log(r)), f64::from(self.logpow))
    }
}

/// Normalized: distinct `(alpha, logpow)`, nonzero coefficients, dominant
/// term first (smallest `alpha`, then largest `logpow`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PowerLogSum {
    terms: Vec<PowerLogTerm>,
}

fn dominance(a: &PowerLogTerm, b: &PowerLogTerm) -> Ordering {
    a.alpha.cmp(&b.alpha).then(b.logpow.cmp(&a.logpow))
}

impl PowerLogSum {
    pub fn from_terms(terms: impl IntoIterator<Item = PowerLogTerm>) -> Self {
        let mut acc: BTreeMap<(Rational, u32), Rational> = BTreeMap::new();
        for t in terms {
            *acc.entry((t.alpha, t.logpow)).or_insert_with(Rational::zero) += t.coeff;
        }
        let mut terms: Vec<PowerLogTerm> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((alpha, logpow), coeff)| PowerLogTerm { coeff, alpha, logpow })
            .collect();
        terms.sort_by(dominance);
        PowerLogSum { terms }
    }

    pub fn terms(&self) -> &[PowerLogTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dominant(&self) -> Option<&PowerLogTerm> {
        self.terms.first()
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }
}

/// `r^-epsilon * |ln r|^d` growth of a slice integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecayPair {
    pub epsilon: Rational,
    pub d: u32,
}

impl DecayPair {
    pub fn new(epsilon: Rational, d: u32) -> Self {
        DecayPair { epsilon, d }
    }

    /// Fourier decay exponent `epsilon - 1`.
    pub fn bound_exponent(&self) -> Rational {
        &self.epsilon - rational::int(1)
    }
}

/// Reads `(epsilon, d)` off the dominant term.
pub fn decay_pair(s: &PowerLogSum) -> Result<DecayPair, AsymptoticsError> {
    let t = s.dominant().ok_or(AsymptoticsError::Cancelled)?;
    if !t.coeff.is_positive() {
        return Err(AsymptoticsError::DominantNotPositive);
    }
    if t.logpow > 1 {
        return Err(AsymptoticsError::LogPowerTooLarge(t.logpow));
    }
    let epsilon = -t.alpha.clone();
    if epsilon.is_negative() {
        return Err(AsymptoticsError::NegativeEpsilon);
    }
    Ok(DecayPair { epsilon, d: t.logpow })
}
