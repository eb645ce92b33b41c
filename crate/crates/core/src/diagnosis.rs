//! Well-behavedness: zeros of the edge polynomials away from the axes and
//! their orders, compared against the Newton distance.
//!
//! An edge polynomial is mixed-homogeneous, so its zero set in each open
//! quadrant is a union of curves `u2 = t0 * u1^(1/m)`. The order of such a
//! zero is the multiplicity of `t0` as a root of the slice `g(t) = f_e(1, t)`
//! restricted to that quadrant.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::newton::{build_polygon, edge_polynomial, newton_distance, CompactEdge, NewtonDistance};
use crate::poly::{RealRoot, UPoly};
use crate::rational::{self, Rational};
use crate::terms::{QuadrantSign, TermSum};

/// A zero curve of an edge polynomial inside one open quadrant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeZero {
    pub quadrant: QuadrantSign,
    /// Positive root of the slice, with its square-free defining polynomial.
    pub t_root: RealRoot,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeReport {
    pub edge: CompactEdge,
    pub zeros: Vec<EdgeZero>,
    /// Quadrants on which the edge polynomial vanishes identically.
    pub vanishing_quadrants: Vec<QuadrantSign>,
}

impl EdgeReport {
    pub fn has_zeros(&self) -> bool {
        !self.zeros.is_empty() || !self.vanishing_quadrants.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellBehavedReport {
    pub verdict: bool,
    pub edges: Vec<EdgeReport>,
    /// Largest zero order over all edges, 0 when there are none.
    pub max_order: u32,
    pub d: NewtonDistance,
    /// Some edge of slope -1 has a zero.
    pub slope_minus_one_violation: bool,
    /// Some edge polynomial vanishes on an open quadrant.
    pub degenerate: bool,
}

/// The slice `g(t) = h(1, t)` of a flag-free sum `h`.
pub fn slice_polynomial(h: &TermSum) -> UPoly {
    let deg = h.terms().iter().map(|t| t.b).max().unwrap_or(0) as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for t in h.terms() {
        c[t.b as usize] += &t.coeff;
    }
    UPoly::new(c)
}

/// Zeros of `f_e` on the four open quadrants, each with its order.
///
/// Quadrants where `f_e` vanishes identically produce no entries here; see
/// [`edge_report`].
pub fn edge_zero_orders(f_e: &TermSum, _e: &CompactEdge) -> Vec<EdgeZero> {
    quadrant_zeros(f_e).0
}

fn quadrant_zeros(f_e: &TermSum) -> (Vec<EdgeZero>, Vec<QuadrantSign>) {
    let mut zeros = Vec::new();
    let mut vanishing = Vec::new();
    for q in QuadrantSign::ALL {
        let h = f_e.restrict_quadrant(q);
        if h.is_zero() {
            vanishing.push(q);
            continue;
        }
        let (_, g) = slice_polynomial(&h).split_zero_root();
        for (factor, order) in g.square_free_decomposition() {
            for t_root in factor.isolate_positive_roots() {
                zeros.push(EdgeZero { quadrant: q, t_root, order });
            }
        }
    }
    zeros.sort_by(|x, y| (x.quadrant, &x.t_root.lo).cmp(&(y.quadrant, &y.t_root.lo)));
    (zeros, vanishing)
}

pub fn edge_report(f: &TermSum, e: &CompactEdge) -> EdgeReport {
    let f_e = edge_polynomial(f, e).expect("edge taken from the polygon of f");
    let (zeros, vanishing_quadrants) = quadrant_zeros(&f_e);
    EdgeReport { edge: e.clone(), zeros, vanishing_quadrants }
}

pub fn is_well_behaved(f: &TermSum) -> WellBehavedReport {
    let polygon = build_polygon(f);
    let d = newton_distance(&polygon);
    let edges: Vec<EdgeReport> = polygon.edges().iter().map(|e| edge_report(f, e)).collect();
    let max_order = edges
        .iter()
        .flat_map(|r| r.zeros.iter().map(|z| z.order))
        .max()
        .unwrap_or(0);
    let one = rational::int(1);
    let slope_minus_one_violation = edges.iter().any(|r| r.edge.m == one && r.has_zeros());
    let degenerate = edges.iter().any(|r| !r.vanishing_quadrants.is_empty());
    // zeros of order equal to d(f) are admitted
    let verdict = rational::int(i64::from(max_order)) <= d.0 && !slope_minus_one_violation && !degenerate;
    WellBehavedReport { verdict, edges, max_order, d, slope_minus_one_violation, degenerate }
}

/// Number of real roots of `g` away from zero, with multiplicity, counted
/// through exact isolation on both half-lines.
pub fn real_nonzero_root_count(g: &UPoly) -> u32 {
    let (_, g) = g.split_zero_root();
    let mut total = 0;
    for (factor, order) in g.square_free_decomposition() {
        let n = factor.isolate_positive_roots().len() + factor.reflect().isolate_positive_roots().len();
        total += order * n as u32;
    }
    total
}

/// `|g^(k)(t)|` for `k = 0..=n` at a rational point.
pub fn derivative_magnitudes(g: &UPoly, t: &Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = g.clone();
    for _ in 0..=n {
        out.push(p.eval(t).abs());
        p = p.derivative();
    }
    out
}
