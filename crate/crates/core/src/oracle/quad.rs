//! One-dimensional quadrature: adaptive Gauss-Kronrod (7/15), tanh-sinh for
//! endpoint singularities, and Gauss-Legendre nodes for fixed-grid
//! references.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Values a rule can accumulate: reals or complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        libm::fabs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<V> {
    pub value: V,
    /// Error estimate (absolute).
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
/// Gauss weights on the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: (Kronrod value, |K - G|).
pub fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[i];
        if i % 2 == 1 {
            g = g + s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7/K15: bisects the panel with the largest error until
/// the total error is below `max(abs_tol, rel_tol * |I|)`.
pub fn gauss_kronrod<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult<V> {
    if a == b {
        return QuadResult { value: V::zero(), error: 0.0, evals: 0, converged: true };
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evals = 15;
    let mut panels = 1;
    loop {
        let target = abs_tol.max(rel_tol * total.norm());
        if total_err <= target {
            return QuadResult { value: total, error: total_err, evals, converged: true };
        }
        if panels >= max_panels {
            return QuadResult { value: total, error: total_err, evals, converged: false };
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // cannot split further in double precision
            return QuadResult { value: total, error: total_err, evals, converged: false };
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        panels += 1;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if panels % 64 == 0 {
            // resum to shed accumulated cancellation
            total = heap.iter().fold(V::zero(), |acc, p| acc + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Largest abscissa parameter; beyond it the node distances underflow.
const TANH_SINH_TMAX: f64 = 6.0;

/// Tanh-sinh (double exponential) quadrature on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` with both distances computed
/// without cancellation, so endpoint singularities are resolved down to
/// distances far below the spacing of doubles near `a` or `b`. Non-finite
/// values are dropped.
pub fn tanh_sinh<V: QuadValue, F: FnMut(f64, f64, f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_level: u32,
) -> QuadResult<V> {
    let len = b - a;
    if len == 0.0 {
        return QuadResult { value: V::zero(), error: 0.0, evals: 0, converged: true };
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    let mut evals = 0;
    let node = |t: f64, f: &mut F| -> V {
        let y = half_pi * libm::sinh(libm::fabs(t));
        let e = libm::exp(-2.0 * y);
        // distance from the nearer endpoint, and the weight dx/dt
        let near = len * e / (1.0 + e);
        let w = len * half_pi * libm::cosh(t) * 2.0 * e / ((1.0 + e) * (1.0 + e));
        if near == 0.0 || w == 0.0 {
            return V::zero();
        }
        let far = len - near;
        let v = if t < 0.0 { f(a + near, near, far) } else { f(b - near, far, near) };
        if v.is_finite() {
            v * w
        } else {
            V::zero()
        }
    };
    let mut h = 1.0;
    let mut sum = node(0.0, &mut f);
    evals += 1;
    let mut k = 1;
    while k as f64 * h <= TANH_SINH_TMAX {
        let t = k as f64 * h;
        sum = sum + node(t, &mut f) + node(-t, &mut f);
        evals += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _ in 0..max_level {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TANH_SINH_TMAX {
            let t = k as f64 * h;
            sum = sum + node(t, &mut f) + node(-t, &mut f);
            evals += 2;
            k += 2;
        }
        let next = sum * h;
        error = (next - estimate).norm();
        estimate = next;
        if error <= abs_tol.max(rel_tol * estimate.norm()) {
            return QuadResult { value: estimate, error, evals, converged: true };
        }
    }
    QuadResult { value: estimate, error, evals, converged: false }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if libm::fabs(dx) < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Fixed composite Gauss-Legendre rule with `panels` equal panels.
pub fn composite_gauss<V: QuadValue, F: FnMut(f64) -> V>(mut f: F, a: f64, b: f64, nodes: &[(f64, f64)], panels: usize) -> V {
    let h = (b - a) / panels as f64;
    let mut acc = V::zero();
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        for &(x, w) in nodes {
            acc = acc + f(c + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_polynomials_and_smooth() {
        let r = gauss_kronrod(|x: f64| x.powi(20), 0.0, 1.0, 1e-14, 0.0, 100);
        assert!(r.converged);
        assert!((r.value - 1.0 / 21.0).abs() < 1e-14);
        let r = gauss_kronrod(|x: f64| x.sin(), 0.0, 10.0, 1e-12, 0.0, 200);
        assert!((r.value - (1.0 - 10f64.cos())).abs() < 1e-12);
        let r = gauss_kronrod(|x: f64| Complex64::new(0.0, x).exp(), 0.0, 100.0, 1e-11, 0.0, 1000);
        let exact = (Complex64::new(0.0, 100.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-10);
    }

    #[test]
    fn kronrod_adapts_to_kinks() {
        let r = gauss_kronrod(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 0.0, 500);
        assert!(r.converged);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // int_0^1 x^{-0.9} dx = 10
        let r = tanh_sinh(|_, da: f64, _| da.powf(-0.9), 0.0, 1.0, 1e-10, 0.0, 12);
        assert!(r.converged, "{r:?}");
        assert!((r.value - 10.0).abs() < 1e-8, "{}", r.value);
        // singular at the right end, off the origin: int_2^3 (3 - x)^{-1/2} = 2
        let r = tanh_sinh(|_, _, db: f64| db.powf(-0.5), 2.0, 3.0, 1e-12, 0.0, 12);
        assert!((r.value - 2.0).abs() < 1e-11);
        // log singularity
        let r = tanh_sinh(|_, da: f64, _| -da.ln(), 0.0, 1.0, 1e-12, 0.0, 12);
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn legendre_rule_exactness() {
        for n in [1, 2, 5, 16, 40] {
            let rule = gauss_legendre(n);
            assert!((rule.iter().map(|p| p.1).sum::<f64>() - 2.0).abs() < 1e-13);
            for k in 0..(2 * n) {
                let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((v - exact).abs() < 1e-12, "n={n} k={k}");
            }
        }
        let v = composite_gauss(|x: f64| x.exp(), 0.0, 2.0, &gauss_legendre(10), 4);
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
    }
}
