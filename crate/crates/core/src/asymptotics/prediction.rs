//! Fourier decay exponents from the two slice sums.

use alloc::vec::Vec;

use num_traits::{One, Signed};

use super::slices::lemma21_sum;
use super::powerlog::{decay_pair, DecayPair};
use super::AsymptoticsError;
use crate::diagnosis::is_well_behaved;
use crate::newton::{build_polygon, newton_distance, reflect_polygon};
use crate::rational::{self, Rational};
use crate::terms::TermSum;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inapplicable {
    NotWellBehaved,
    /// `rho >= 1/d(f)`.
    RhoAtOrAboveCritical,
    /// The slice sum for this axis (1 or 2) diverges.
    Divergent { axis: u8 },
    /// `epsilon_axis <= 1/2`.
    EpsilonTooSmall { axis: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem22Prediction {
    pub rho: Rational,
    pub d_f: Rational,
    pub well_behaved: bool,
    /// From `f(x1, x2)`; `None` when the slice sum diverges.
    pub pair1: Option<DecayPair>,
    /// From `f(x2, x1)`.
    pub pair2: Option<DecayPair>,
    /// Empty iff the decay bounds hold.
    pub reasons: Vec<Inapplicable>,
}

impl Theorem22Prediction {
    pub fn applicable(&self) -> bool {
        self.reasons.is_empty()
    }

    /// Bound exponents `epsilon_i - 1` of `|F| <= C (2 + |lambda_i|)^{..}`.
    pub fn bound_exponents(&self) -> [Option<Rational>; 2] {
        [self.pair1.as_ref().map(DecayPair::bound_exponent), self.pair2.as_ref().map(DecayPair::bound_exponent)]
    }

    /// The slower of the two rates with its axis: larger `epsilon - 1`,
    /// ties toward the larger log power.
    pub fn combined(&self) -> Option<(u8, DecayPair)> {
        let (p1, p2) = (self.pair1.as_ref()?, self.pair2.as_ref()?);
        let first = (&p1.epsilon, p1.d) >= (&p2.epsilon, p2.d);
        Some(if first { (1, p1.clone()) } else { (2, p2.clone()) })
    }
}

pub fn theorem22_prediction(f: &TermSum, rho: &Rational) -> Result<Theorem22Prediction, AsymptoticsError> {
    if !rho.is_positive() {
        return Err(AsymptoticsError::NonPositiveRho);
    }
    let polygon = build_polygon(f);
    let d_f = newton_distance(&polygon).0;
    let well_behaved = is_well_behaved(f).verdict;
    let mut reasons = Vec::new();
    if !well_behaved {
        reasons.push(Inapplicable::NotWellBehaved);
    }
    if rho * &d_f >= Rational::one() {
        reasons.push(Inapplicable::RhoAtOrAboveCritical);
    }
    let half = rational::ratio(1, 2);
    let mut pairs = [None, None];
    for (axis, p) in [(1u8, polygon.clone()), (2u8, reflect_polygon(&polygon))] {
        match lemma21_sum(&p, rho) {
            Err(AsymptoticsError::Divergent) => reasons.push(Inapplicable::Divergent { axis }),
            Err(e) => return Err(e),
            Ok(sum) => {
                let pair = decay_pair(&sum)?;
                if pair.epsilon <= half {
                    reasons.push(Inapplicable::EpsilonTooSmall { axis });
                }
                pairs[usize::from(axis - 1)] = Some(pair);
            }
        }
    }
    let [pair1, pair2] = pairs;
    Ok(Theorem22Prediction { rho: rho.clone(), d_f, well_behaved, pair1, pair2, reasons })
}
