//! `F(lambda) = int phi(x) |f(x)|^{-rho} e^{-i (lambda1 x1 + lambda2 x2)} dx`.
//!
//! Each open quadrant is integrated in polar-free iterated form: `u1` outer,
//! `u2` inner, both over `(0, R)` clipped to the disk. Quadrants on which `f`
//! restricts to the same polynomial share one pass with a combined phase
//! kernel. Panels are at most a quarter oscillation period long per axis.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use num_traits::Signed;

use super::cutoff::CutoffSpec;
use super::line::{integrate_outer, Base, Break, LineOptions, Surface};
use super::OracleError;
use crate::newton::{build_polygon, newton_distance};
use crate::rational::{self, Rational};
use crate::terms::{QuadrantSign, TermSum};

/// Largest `|lambda|` component accepted.
pub const LAMBDA_CAP: f64 = 1024.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyPoint {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl FrequencyPoint {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        FrequencyPoint { lambda1, lambda2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    /// Absolute error estimate.
    pub error: f64,
}

struct Group {
    surface: Surface,
    quadrants: Vec<QuadrantSign>,
}

/// A prepared transform: quadrant groups, breakpoints in `u1`, and the
/// zero-frequency value that scales the error target.
pub struct OscillatoryIntegral {
    groups: Vec<(Group, Vec<Break>)>,
    cutoff: CutoffSpec,
    tol: f64,
    trivial: f64,
}

impl OscillatoryIntegral {
    /// Fails with [`OracleError::Divergent`] when `rho >= 1/d(f)`.
    pub fn new(f: &TermSum, rho: f64, cutoff: CutoffSpec, tol: f64) -> Result<Self, OracleError> {
        if !(rho >= 0.0) || !(tol > 0.0) {
            return Err(OracleError::PreconditionViolated("rho must be nonnegative and tol positive"));
        }
        if rho > 0.0 {
            let d = newton_distance(&build_polygon(f)).0;
            let rho_q = rational::from_f64(rho).ok_or(OracleError::PreconditionViolated("rho must be finite"))?;
            if (rho_q * d).abs() >= Rational::from_integer(1.into()) {
                return Err(OracleError::Divergent);
            }
        }
        let radius = cutoff.radius;
        let mut groups: Vec<(TermSum, Vec<QuadrantSign>)> = Vec::new();
        for q in QuadrantSign::ALL {
            if !cutoff.covers_quadrant(q.s1, q.s2) {
                continue;
            }
            let h = f.restrict_quadrant(q);
            match groups.iter_mut().find(|(g, _)| *g == h) {
                Some((_, qs)) => qs.push(q),
                None => groups.push((h, alloc::vec![q])),
            }
        }
        let mut grid: Vec<f64> = (1..=128).map(|i| radius * i as f64 / 128.0).collect();
        grid.extend((1..=40).map(|k| radius * libm::ldexp(1.0, -k)));
        grid.sort_by(f64::total_cmp);
        let mut prepared = Vec::new();
        for (h, quadrants) in groups {
            let surface = Surface::new(Base::Poly(h), rho)?;
            let mut breaks = alloc::vec![
                Break { at: 0.0, singular: true },
                Break { at: 0.5 * radius, singular: false },
                Break { at: radius, singular: false },
            ];
            let upper = |u: f64| libm::sqrt((radius * radius - u * u).max(0.0));
            breaks.extend(surface.events(&grid, |_| 0.0, upper).into_iter().map(|at| Break { at, singular: true }));
            prepared.push((Group { surface, quadrants }, breaks));
        }
        let mut out = OscillatoryIntegral { groups: prepared, cutoff, tol, trivial: 0.0 };
        let zero = out.eval_raw(FrequencyPoint::new(0.0, 0.0), tol, 0.0)?;
        out.trivial = zero.value.re;
        Ok(out)
    }

    /// `int phi |f|^{-rho}`.
    pub fn trivial_bound(&self) -> f64 {
        self.trivial
    }

    /// `F(lambda)` to absolute accuracy `tol * trivial_bound()`.
    pub fn eval(&self, lambda: FrequencyPoint) -> Result<TransformValue, OracleError> {
        if libm::fabs(lambda.lambda1) > LAMBDA_CAP || libm::fabs(lambda.lambda2) > LAMBDA_CAP {
            return Err(OracleError::BudgetExceeded);
        }
        self.eval_raw(lambda, 0.0, self.tol * self.trivial)
    }

    fn eval_raw(&self, lambda: FrequencyPoint, rel_tol: f64, abs_tol: f64) -> Result<TransformValue, OracleError> {
        let radius = self.cutoff.radius;
        let plateau = self.cutoff.plateau();
        let quarter = |l: f64| if l == 0.0 { f64::INFINITY } else { FRAC_PI_2 / libm::fabs(l) };
        let (panel1, panel2) = (quarter(lambda.lambda1), quarter(lambda.lambda2));
        let share = abs_tol / self.groups.len() as f64;
        let mut total = TransformValue { value: Complex64::new(0.0, 0.0), error: 0.0 };
        for (group, breaks) in &self.groups {
            let inner_abs = 0.1 * share / radius;
            // a relative inner error of tol/10 costs at most tol/10 of the
            // trivial bound in total
            let inner_rel = 0.1 * self.tol;
            let result = integrate_outer(
                breaks,
                panel1,
                |u1| {
                    let mut plus = Complex64::new(0.0, 0.0);
                    let mut minus = Complex64::new(0.0, 0.0);
                    for q in &group.quadrants {
                        let phase = Complex64::new(0.0, -lambda.lambda1 * f64::from(q.s1) * u1).exp();
                        if q.s2 > 0 {
                            plus += phase;
                        } else {
                            minus += phase;
                        }
                    }
                    let upper = libm::sqrt((radius * radius - u1 * u1).max(0.0));
                    let mut extra = Vec::new();
                    if u1 < plateau {
                        extra.push(libm::sqrt(plateau * plateau - u1 * u1));
                    }
                    let opts = LineOptions { extra: &extra, panel: panel2, abs_tol: inner_abs, rel_tol: inner_rel };
                    let l2 = lambda.lambda2;
                    let cutoff = &self.cutoff;
                    Ok(group.surface.integrate_line(
                        u1,
                        0.0,
                        upper,
                        |u2| {
                            let phi = cutoff.eval([u1, u2]);
                            if phi == 0.0 {
                                return Complex64::new(0.0, 0.0);
                            }
                            let e = Complex64::new(0.0, -l2 * u2).exp();
                            (plus * e + minus * e.conj()) * phi
                        },
                        &opts,
                    ))
                },
                share,
                rel_tol,
            )?;
            if !result.converged || !result.value.re.is_finite() || !result.value.im.is_finite() {
                return Err(OracleError::BudgetExceeded);
            }
            total.value += result.value;
            total.error += result.error;
        }
        Ok(total)
    }
}

/// One-shot [`OscillatoryIntegral::eval`].
pub fn oscillatory_transform(
    f: &TermSum,
    rho: f64,
    phi: CutoffSpec,
    lambda: FrequencyPoint,
    tol: f64,
) -> Result<Complex64, OracleError> {
    Ok(OscillatoryIntegral::new(f, rho, phi, tol)?.eval(lambda)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::cutoff::{psi, CutoffKind};
    use crate::oracle::quad::tanh_sinh;
    use crate::terms::parse_terms;
    use core::f64::consts::PI;

    /// `2 pi int_0^R psi(r/R) r^{1-2 rho} J0(lambda r) dr`, the transform of
    /// a radial integrand `|x|^{-2 rho} phi`.
    fn radial(rho: f64, lambda: f64, radius: f64) -> f64 {
        let g = |r: f64| psi(r / radius) * libm::pow(r, 1.0 - 2.0 * rho) * libm::j0(lambda * r);
        let n = 64;
        let mut sum = 0.0;
        for i in 0..n {
            let (a, b) = (radius * i as f64 / n as f64, radius * (i + 1) as f64 / n as f64);
            sum += tanh_sinh(|x, _, _| g(x), a, b, 1e-15, 1e-13, 10).value;
        }
        2.0 * PI * sum
    }

    fn squares() -> TermSum {
        parse_terms("|x1|^2 + |x2|^2").unwrap()
    }

    #[test]
    fn zero_frequency_matches_radial_integral() {
        let c = CutoffSpec::default();
        for rho in [0.0, 0.25, 0.9] {
            let oi = OscillatoryIntegral::new(&squares(), rho, c, 1e-9).unwrap();
            let want = radial(rho, 0.0, c.radius);
            assert!(libm::fabs(oi.trivial_bound() - want) <= 2e-9 * want, "rho {rho}: {} vs {want}", oi.trivial_bound());
        }
    }

    #[test]
    fn axis_values_match_bessel_integral() {
        let c = CutoffSpec::default();
        for rho in [0.0, 0.4] {
            let tol = 1e-8;
            let oi = OscillatoryIntegral::new(&squares(), rho, c, tol).unwrap();
            for lambda in [10.0, 100.0, 700.0] {
                let want = radial(rho, lambda, c.radius);
                let got = oi.eval(FrequencyPoint::new(lambda, 0.0)).unwrap();
                let rotated = oi.eval(FrequencyPoint::new(0.0, -lambda)).unwrap();
                let bound = 2.0 * tol * oi.trivial_bound();
                assert!((got.value - want).norm() <= bound, "rho {rho} lambda {lambda}: {} vs {want}", got.value);
                assert!((rotated.value - want).norm() <= bound);
                assert!(got.error <= tol * oi.trivial_bound());
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let f = parse_terms("x1^3 + x2^2").unwrap();
        let tol = 1e-8;
        let oi = OscillatoryIntegral::new(&f, 0.5, CutoffSpec::default(), tol).unwrap();
        for (l1, l2) in [(40.0, 0.0), (13.0, -90.0), (300.0, 200.0)] {
            let a = oi.eval(FrequencyPoint::new(l1, l2)).unwrap().value;
            let b = oi.eval(FrequencyPoint::new(-l1, -l2)).unwrap().value;
            assert!((a - b.conj()).norm() <= 2.0 * tol * oi.trivial_bound(), "{a} vs {b}");
        }
    }

    #[test]
    fn quadrant_bump_is_a_quarter_for_symmetric_f() {
        let f = parse_terms("x1^2*x2^2 + x1^4").unwrap();
        let full = OscillatoryIntegral::new(&f, 0.2, CutoffSpec::default(), 1e-9).unwrap();
        let quarter = OscillatoryIntegral::new(&f, 0.2, CutoffSpec::new(CutoffKind::QuadrantBump, 0.25), 1e-9).unwrap();
        let ratio = full.trivial_bound() / quarter.trivial_bound();
        assert!(libm::fabs(ratio - 4.0) < 1e-7, "{ratio}");
        // one quadrant carries a genuinely complex transform
        let v = quarter.eval(FrequencyPoint::new(50.0, 20.0)).unwrap().value;
        assert!(libm::fabs(v.im) > 1e-6);
    }

    #[test]
    fn errors() {
        let c = CutoffSpec::default();
        let f = parse_terms("x1^2*x2^3").unwrap();
        assert!(matches!(OscillatoryIntegral::new(&f, 0.34, c, 1e-6), Err(OracleError::Divergent)));
        assert!(matches!(OscillatoryIntegral::new(&f, 0.5, c, 1e-6), Err(OracleError::Divergent)));
        let oi = OscillatoryIntegral::new(&f, 0.1, c, 1e-6).unwrap();
        assert_eq!(oi.eval(FrequencyPoint::new(2048.0, 0.0)), Err(OracleError::BudgetExceeded));
        assert!(matches!(OscillatoryIntegral::new(&f, -0.1, c, 1e-6), Err(OracleError::PreconditionViolated(_))));
    }
}
