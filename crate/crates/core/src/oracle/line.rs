//! Iterated quadrature of `w(u1, u2) |h(u1, u2)|^{-rho}` over regions of the
//! open positive quadrant.
//!
//! The inner integral runs along a line `u1 = const`. Its breakpoints are the
//! real roots of `h(u1, .)`, the scale breaks `u2 = u1^{m_i}` from the Newton
//! polygon of `h`, and caller-supplied points. Pieces ending at a root use
//! tanh-sinh with the integrand evaluated from the Taylor expansion at that
//! root, so the singular factor is computed from the distance to the root
//! rather than from a cancelling difference.

use alloc::vec::Vec;
use core::cell::RefCell;

use super::quad::{gauss_kronrod, tanh_sinh, QuadResult, QuadValue};
use super::roots::{horner, real_roots, taylor_shift};
use super::OracleError;
use crate::asymptotics::eval_fstar;
use crate::newton::{build_polygon, NewtonPolygon};
use crate::rational;
use crate::terms::TermSum;

const INNER_PANELS: usize = 400;
const OUTER_PANELS: usize = 4000;
const TANH_SINH_LEVELS: u32 = 9;
/// Relative width of the sliver next to a singular outer breakpoint that is
/// left out. Beyond it the polynomial coefficients underflow; the omitted
/// mass is below `SLIVER^{1 - kappa}` for an inner integral growing like
/// `dist^{-kappa}`.
const SLIVER: f64 = 1e-60;

#[derive(Clone, Debug)]
pub(crate) enum Base {
    /// A flag-free polynomial in `u1, u2 > 0` (a quadrant restriction).
    Poly(TermSum),
    /// `f*` of a polygon; depends only on `|x|`.
    FStar(NewtonPolygon),
}

#[derive(Clone, Debug)]
pub(crate) struct Surface {
    base: Base,
    rho: f64,
    slopes: Vec<f64>,
}

pub(crate) struct LineOptions<'a> {
    pub extra: &'a [f64],
    /// Longest piece handed to a single rule.
    pub panel: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

/// A breakpoint of an outer integral; `singular` marks points where the
/// inner integral is not smooth (root events, the origin).
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Break {
    pub at: f64,
    pub singular: bool,
}

impl Surface {
    pub fn new(base: Base, rho: f64) -> Result<Self, OracleError> {
        let slopes = match &base {
            Base::Poly(h) if h.is_zero() => {
                if rho > 0.0 {
                    return Err(OracleError::Divergent);
                }
                Vec::new()
            }
            Base::Poly(h) => build_polygon(h).slopes().iter().map(rational::to_f64).collect(),
            Base::FStar(p) => p.slopes().iter().map(rational::to_f64).collect(),
        };
        Ok(Surface { base, rho, slopes })
    }

    fn coeffs(&self, u1: f64) -> Option<Vec<f64>> {
        match &self.base {
            Base::Poly(h) if !h.is_zero() => Some(h.coeffs_in_x2(u1)),
            _ => None,
        }
    }

    fn power(&self, h: f64) -> f64 {
        if self.rho == 0.0 {
            1.0
        } else {
            libm::pow(libm::fabs(h), -self.rho)
        }
    }

    /// Roots of `h(u1, .)` in `[lo, hi]`.
    pub fn roots(&self, u1: f64, lo: f64, hi: f64) -> Vec<f64> {
        match self.coeffs(u1) {
            Some(c) => real_roots(&c, lo, hi),
            None => Vec::new(),
        }
    }

    /// `|h(u1, u2)|^{-rho}` away from roots.
    pub fn value(&self, u1: f64, u2: f64) -> f64 {
        match &self.base {
            Base::Poly(h) if h.is_zero() => 1.0,
            Base::Poly(h) => self.power(h.eval([u1, u2])),
            Base::FStar(p) => self.power(eval_fstar(p, [u1, u2])),
        }
    }

    /// `int_lo^hi weight(u2) |h(u1, u2)|^{-rho} du2`.
    pub fn integrate_line<V: QuadValue, W: FnMut(f64) -> V>(
        &self,
        u1: f64,
        lo: f64,
        hi: f64,
        mut weight: W,
        opts: &LineOptions<'_>,
    ) -> QuadResult<V> {
        let mut total = QuadResult { value: V::zero(), error: 0.0, evals: 0, converged: true };
        if !(lo < hi) {
            return total;
        }
        let coeffs = self.coeffs(u1);
        let roots = coeffs.as_ref().map(|c| real_roots(c, lo, hi)).unwrap_or_default();
        let mut pts: Vec<f64> = Vec::with_capacity(roots.len() + self.slopes.len() + opts.extra.len() + 2);
        pts.push(lo);
        pts.push(hi);
        pts.extend(roots.iter().copied());
        if u1 > 0.0 {
            pts.extend(self.slopes.iter().map(|&m| libm::pow(u1, m)));
        }
        pts.extend(opts.extra.iter().copied());
        pts.retain(|&x| x >= lo && x <= hi);
        // a break that coincides with a root up to rounding would leave a
        // sliver piece whose nodes sit on the root
        pts.retain(|&x| x == lo || x == hi || roots.contains(&x) || roots.iter().all(|&r| libm::fabs(x - r) > 1e-9 * (hi - lo)));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let taylor_at = |r: f64| -> Option<Vec<f64>> {
            if !roots.contains(&r) {
                return None;
            }
            let mut t = taylor_shift(coeffs.as_ref()?, r);
            t[0] = 0.0;
            Some(t)
        };
        let pieces: usize = pts
            .windows(2)
            .map(|w| libm::ceil((w[1] - w[0]) / opts.panel).max(1.0) as usize)
            .sum();
        let abs_tol = opts.abs_tol / pieces.max(1) as f64;
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let left = taylor_at(p);
            let right = taylor_at(q);
            let n = libm::ceil((q - p) / opts.panel).max(1.0) as usize;
            let step = (q - p) / n as f64;
            for i in 0..n {
                let a = if i == 0 { p } else { p + step * i as f64 };
                let b = if i + 1 == n { q } else { p + step * (i + 1) as f64 };
                let tl = if i == 0 { left.as_ref() } else { None };
                let tr = if i + 1 == n { right.as_ref() } else { None };
                let piece = if tl.is_some() || tr.is_some() {
                    tanh_sinh(
                        |x, da, db| {
                            let h = match (tl, tr) {
                                (Some(t), Some(_)) if da <= db => horner(t, da),
                                (_, Some(t)) => horner(t, -db),
                                (Some(t), None) => horner(t, da),
                                (None, None) => unreachable!(),
                            };
                            weight(x) * self.power(h)
                        },
                        a,
                        b,
                        abs_tol,
                        opts.rel_tol,
                        TANH_SINH_LEVELS,
                    )
                } else {
                    let mut g = |x: f64| match &coeffs {
                        Some(c) => weight(x) * self.power(horner(c, x)),
                        None => weight(x) * self.value(u1, x),
                    };
                    graded_kronrod(&mut g, a, b, abs_tol, opts.rel_tol, INNER_PANELS)
                };
                total.value = total.value + piece.value;
                total.error += piece.error;
                total.evals += piece.evals;
                total.converged &= piece.converged;
            }
        }
        total
    }

    /// Values of `u1` in `(a, b)` where the number of roots of `h(u1, .)` in
    /// `[lo(u1), hi(u1)]` changes, located by sampling and bisection.
    pub fn events(&self, grid: &[f64], lo: impl Fn(f64) -> f64, hi: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.coeffs(1.0).is_none() || self.rho == 0.0 {
            return out;
        }
        let count = |u: f64| self.roots(u, lo(u), hi(u)).len();
        let counts: Vec<usize> = grid.iter().map(|&u| count(u)).collect();
        for i in 1..grid.len() {
            if counts[i] == counts[i - 1] {
                continue;
            }
            let (mut a, mut b) = (grid[i - 1], grid[i]);
            let ca = counts[i - 1];
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if !(a < m && m < b) {
                    break;
                }
                if count(m) == ca {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }
}

/// An outer integrand value carrying the error estimate of the inner
/// integral that produced it, so the outer rule integrates both.
#[derive(Clone, Copy, Debug)]
struct Tracked<V> {
    value: V,
    error: f64,
}

impl<V: QuadValue> core::ops::Add for Tracked<V> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Tracked { value: self.value + o.value, error: self.error + o.error }
    }
}

impl<V: QuadValue> core::ops::Sub for Tracked<V> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Tracked { value: self.value - o.value, error: self.error - o.error }
    }
}

impl<V: QuadValue> core::ops::Mul<f64> for Tracked<V> {
    type Output = Self;
    fn mul(self, w: f64) -> Self {
        Tracked { value: self.value * w, error: self.error * libm::fabs(w) }
    }
}

impl<V: QuadValue> QuadValue for Tracked<V> {
    fn zero() -> Self {
        Tracked { value: V::zero(), error: 0.0 }
    }
    fn norm(self) -> f64 {
        self.value.norm()
    }
    fn is_finite(self) -> bool {
        self.value.is_finite() && self.error.is_finite()
    }
}

/// `int J(u1) du1` over consecutive breakpoints. Panels are at most `panel`
/// long; panels touching a singular breakpoint use tanh-sinh. Errors from
/// `j` abort the integration.
///
/// The reported error is the outer estimate plus the integral of the inner
/// estimates; `converged` holds when that total meets
/// `max(abs_tol, rel_tol * |I|)`.
pub(crate) fn integrate_outer<V: QuadValue, J: FnMut(f64) -> Result<QuadResult<V>, OracleError>>(
    breaks: &[Break],
    panel: f64,
    mut j: J,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult<V>, OracleError> {
    let mut pts: Vec<Break> = breaks.to_vec();
    pts.sort_by(|x, y| x.at.total_cmp(&y.at));
    pts.dedup_by(|x, y| {
        if x.at == y.at {
            y.singular |= x.singular;
            true
        } else {
            false
        }
    });
    let failure: RefCell<Option<OracleError>> = RefCell::new(None);
    let mut eval = |u: f64| -> Tracked<V> {
        if failure.borrow().is_some() {
            return Tracked::zero();
        }
        match j(u) {
            Ok(r) => Tracked { value: r.value, error: r.error },
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                Tracked::zero()
            }
        }
    };
    let pieces: usize = pts
        .windows(2)
        .map(|w| libm::ceil((w[1].at - w[0].at) / panel).max(1.0) as usize)
        .sum();
    let tol = abs_tol / pieces.max(1) as f64;
    let mut total = QuadResult { value: V::zero(), error: 0.0, evals: 0, converged: true };
    let mut inner_error = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let n = libm::ceil((q.at - p.at) / panel).max(1.0) as usize;
        let step = (q.at - p.at) / n as f64;
        for i in 0..n {
            let a = if i == 0 { p.at } else { p.at + step * i as f64 };
            let b = if i + 1 == n { q.at } else { p.at + step * (i + 1) as f64 };
            let (sa, sb) = (i == 0 && p.singular, i + 1 == n && q.singular);
            let piece = if sa || sb {
                let skip = SLIVER * (b - a);
                tanh_sinh(
                    |x, da, db| if (sa && da < skip) || (sb && db < skip) { Tracked::zero() } else { eval(x) },
                    a,
                    b,
                    tol,
                    rel_tol,
                    TANH_SINH_LEVELS,
                )
            } else {
                graded_kronrod(&mut eval, a, b, tol, rel_tol, OUTER_PANELS)
            };
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            total.value = total.value + piece.value.value;
            total.error += piece.error;
            total.evals += piece.evals;
            total.converged &= piece.converged;
            inner_error += piece.value.error;
        }
    }
    total.error += inner_error;
    total.converged &= inner_error <= abs_tol.max(rel_tol * total.value.norm());
    Ok(total)
}

/// Adaptive Gauss-Kronrod, in the variable `ln x` when `[a, b]` spans more
/// than a factor of 4 away from zero, so power-law integrands are resolved
/// at every scale.
fn graded_kronrod<V: QuadValue, F: FnMut(f64) -> V>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult<V> {
    if a > 0.0 && b > 4.0 * a {
        gauss_kronrod(
            |t: f64| {
                let x = libm::exp(t);
                f(x) * x
            },
            libm::log(a),
            libm::log(b),
            abs_tol,
            rel_tol,
            max_panels,
        )
    } else {
        gauss_kronrod(f, a, b, abs_tol, rel_tol, max_panels)
    }
}
