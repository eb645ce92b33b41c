//! Floating-point real roots of small polynomials on an interval, used to
//! place breakpoints at the zero set of `f` during quadrature.

use alloc::vec::Vec;

/// `sum c[k] x^k`
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// `sum |c[k]| |x|^k`, the scale against which a value counts as zero.
pub fn magnitude(c: &[f64], x: f64) -> f64 {
    let ax = libm::fabs(x);
    c.iter().rev().fold(0.0, |acc, &ck| acc * ax + libm::fabs(ck))
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck).collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// Roots of `c` in the closed interval `[lo, hi]`, increasing.
///
/// The interval is cut at the critical points (recursively), so `p` is
/// monotone on each piece and a sign change brackets exactly one root.
/// Critical points where `|p|` is at rounding level are reported as roots of
/// even multiplicity.
pub fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c);
    let mut out = Vec::new();
    if c.len() <= 1 || !(lo < hi) {
        return out;
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        if r >= lo && r <= hi {
            out.push(r);
        }
        return out;
    }
    let crit = real_roots(&derivative(c), lo, hi);
    let mut pts = Vec::with_capacity(crit.len() + 2);
    pts.push(lo);
    pts.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    pts.push(hi);
    let is_zero = |x: f64| libm::fabs(horner(c, x)) <= 64.0 * f64::EPSILON * magnitude(c, x);
    for (i, &x) in pts.iter().enumerate() {
        if is_zero(x) {
            out.push(x);
            continue;
        }
        if let Some(&y) = pts.get(i + 1) {
            if is_zero(y) {
                continue;
            }
            let (fx, fy) = (horner(c, x), horner(c, y));
            if (fx < 0.0) != (fy < 0.0) {
                out.push(bisect(c, x, y, fx));
            }
        }
    }
    out.dedup_by(|a, b| libm::fabs(*a - *b) <= 4.0 * f64::EPSILON * libm::fabs(*b).max(f64::MIN_POSITIVE));
    out
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, fa: f64) -> f64 {
    let neg_a = fa < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(a < m && m < b) {
            break;
        }
        if (horner(c, m) < 0.0) == neg_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Coefficients of `p(r + d)` in powers of `d`.
pub fn taylor_shift(c: &[f64], r: f64) -> Vec<f64> {
    let mut t = c.to_vec();
    let n = t.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            t[k] += r * t[k + 1];
        }
    }
    t
}

/// Order of vanishing of `c` at the (numerical) root `r`: the number of
/// leading Taylor coefficients at rounding level.
pub fn root_order(c: &[f64], r: f64) -> usize {
    let t = taylor_shift(c, r);
    let scale = magnitude(c, r).max(f64::MIN_POSITIVE);
    let mut k = 0;
    while k + 1 < t.len() && libm::fabs(t[k]) <= 1e-9 * scale {
        k += 1;
    }
    k.max(1)
}
