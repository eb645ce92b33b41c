//! Integrals of `|g|^{-rho}` over dyadic rectangles.

use alloc::vec::Vec;

use super::line::{integrate_outer, Base, Break, LineOptions, Surface};
use super::quad::QuadResult;
use super::OracleError;
use crate::newton::NewtonPolygon;
use crate::terms::{QuadrantSign, TermSum};

/// `{2^{-j-1} < |x1| < 2^{-j}, 2^{-k-1} < |x2| < 2^{-k}}` in one quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRectangle {
    pub j: u32,
    pub k: u32,
    pub quadrant: QuadrantSign,
}

impl DyadicRectangle {
    pub fn new(j: u32, k: u32, quadrant: QuadrantSign) -> Self {
        DyadicRectangle { j, k, quadrant }
    }

    /// `(lo, hi)` of `|x1|`.
    pub fn range1(&self) -> (f64, f64) {
        dyadic(self.j)
    }

    pub fn range2(&self) -> (f64, f64) {
        dyadic(self.k)
    }

    pub fn area(&self) -> f64 {
        let (a1, b1) = self.range1();
        let (a2, b2) = self.range2();
        (b1 - a1) * (b2 - a2)
    }

    /// All rectangles with `j, k` in `range`, in every quadrant, ordered by
    /// `(j, k, quadrant)`.
    pub fn grid(range: core::ops::RangeInclusive<u32>) -> Vec<DyadicRectangle> {
        let mut out = Vec::new();
        for j in range.clone() {
            for k in range.clone() {
                for q in QuadrantSign::ALL {
                    out.push(DyadicRectangle::new(j, k, q));
                }
            }
        }
        out
    }
}

fn dyadic(j: u32) -> (f64, f64) {
    let hi = libm::ldexp(1.0, -(j as i32));
    (0.5 * hi, hi)
}

/// The function whose power is integrated.
#[derive(Clone, Copy, Debug)]
pub enum PowerBase<'a> {
    Terms(&'a TermSum),
    FStar(&'a NewtonPolygon),
}

/// `int_R |g|^{-rho}` with relative error target `tol`.
pub fn integrate_power_on_rect(
    g: PowerBase<'_>,
    rho: f64,
    rect: &DyadicRectangle,
    tol: f64,
) -> Result<QuadResult<f64>, OracleError> {
    integrate_weighted_on_rect(g, rho, rect, |_| 1.0, tol)
}

/// `int_R w(x) |g(x)|^{-rho} dx` for a smooth weight `w` given in the
/// original coordinates.
pub fn integrate_weighted_on_rect<W: Fn([f64; 2]) -> f64>(
    g: PowerBase<'_>,
    rho: f64,
    rect: &DyadicRectangle,
    weight: W,
    tol: f64,
) -> Result<QuadResult<f64>, OracleError> {
    if !(rho >= 0.0) || !(tol > 0.0) {
        return Err(OracleError::PreconditionViolated("rho must be nonnegative and tol positive"));
    }
    let (a1, b1) = rect.range1();
    let (a2, b2) = rect.range2();
    let base = match g {
        PowerBase::Terms(f) => Base::Poly(f.restrict_quadrant(rect.quadrant)),
        PowerBase::FStar(p) => Base::FStar(p.clone()),
    };
    let surface = Surface::new(base, rho)?;
    let q = rect.quadrant;
    let grid: Vec<f64> = (0..=32).map(|i| a1 + (b1 - a1) * i as f64 / 32.0).collect();
    let mut breaks = alloc::vec![Break { at: a1, singular: false }, Break { at: b1, singular: false }];
    breaks.extend(surface.events(&grid, |_| a2, |_| b2).into_iter().map(|at| Break { at, singular: true }));
    let inner_rel = 0.1 * tol;
    let result = integrate_outer(
        &breaks,
        f64::INFINITY,
        |u1| {
            let opts = LineOptions { extra: &[], panel: f64::INFINITY, abs_tol: 0.0, rel_tol: inner_rel };
            Ok(surface.integrate_line(u1, a2, b2, |u2| weight(q.apply([u1, u2])), &opts))
        },
        0.0,
        tol,
    )?;
    if !result.value.is_finite() {
        return Err(OracleError::Divergent);
    }
    if !result.converged {
        return Err(OracleError::ToleranceNotMet { estimate: result.value, error: result.error });
    }
    Ok(result)
}
