//! `f*`, its dominant-vertex decomposition and the symbolic slice sum.
//!
//! On the punctured unit square the thresholds `|x2| = |x1|^{m_i}` split the
//! `x2` range into blocks; on block `i` the vertex monomial of `v^i` is the
//! largest one, so `f*` lies between it and `n` times it.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::powerlog::{PowerLogSum, PowerLogTerm};
use super::AsymptoticsError;
use crate::newton::NewtonPolygon;
use crate::rational::{self, Rational};

/// `f*(x) = sum over vertices of |x1|^{v1} |x2|^{v2}`.
pub fn eval_fstar(p: &NewtonPolygon, x: [f64; 2]) -> f64 {
    let (a1, a2) = (libm::fabs(x[0]), libm::fabs(x[1]));
    p.vertices().iter().map(|v| powi(a1, v.v1) * powi(a2, v.v2)).sum()
}

pub fn eval_fstar_exact(p: &NewtonPolygon, x: &[Rational; 2]) -> Rational {
    let (a1, a2) = (x[0].abs(), x[1].abs());
    p.vertices()
        .iter()
        .map(|v| rational::pow_u32(&a1, v.v1) * rational::pow_u32(&a2, v.v2))
        .sum()
}

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    libm::pow(x, f64::from(n))
}

/// Zero-based index of the vertex whose monomial dominates `f*` at `x`.
///
/// The index counts the thresholds `|x1|^{m_k}` lying strictly below `|x2|`,
/// so ties go to the smaller index. `x` must lie in the punctured open unit
/// square.
pub fn dominant_vertex(p: &NewtonPolygon, x: [f64; 2]) -> usize {
    let l1 = libm::log(libm::fabs(x[0]));
    let l2 = libm::log(libm::fabs(x[1]));
    p.edges().iter().filter(|e| rational::to_f64(&e.m) * l1 < l2).count()
}

/// Exact variant of [`dominant_vertex`].
pub fn dominant_vertex_exact(p: &NewtonPolygon, x: &[Rational; 2]) -> usize {
    let (a1, a2) = (x[0].abs(), x[1].abs());
    p.edges()
        .iter()
        .filter(|e| rational::cmp_rational_power(&a1, &e.m, &a2).is_lt())
        .count()
}

/// Block endpoints in `x2`, written as powers of `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Limit {
    Zero,
    /// `r^e`
    Power(Rational),
}

/// The sum `sum_i r^{-rho v1^i} int_{block i} x2^{-rho v2^i} dx2` with the
/// block limits `0 < r^{m_1} < ... < r^{m_{n-1}} < 1`.
pub fn lemma21_sum(p: &NewtonPolygon, rho: &Rational) -> Result<PowerLogSum, AsymptoticsError> {
    if !rho.is_positive() {
        return Err(AsymptoticsError::NonPositiveRho);
    }
    let n = p.vertex_count();
    let mut terms = Vec::new();
    for (i, v) in p.vertices().iter().enumerate() {
        let lower = if i == 0 { Limit::Zero } else { Limit::Power(p.edges()[i - 1].m.clone()) };
        let upper = if i + 1 == n { Rational::zero() } else { p.edges()[i].m.clone() };
        let w = -(rho * rational::int(i64::from(v.v1)));
        let s = rho * rational::int(i64::from(v.v2));
        block_integral(&w, &s, &lower, &upper, &mut terms)?;
    }
    let sum = PowerLogSum::from_terms(terms);
    if sum.is_zero() {
        return Err(AsymptoticsError::Cancelled);
    }
    Ok(sum)
}

/// `r^w * int_{lower}^{r^upper} x^{-s} dx`.
fn block_integral(
    w: &Rational,
    s: &Rational,
    lower: &Limit,
    upper: &Rational,
    out: &mut Vec<PowerLogTerm>,
) -> Result<(), AsymptoticsError> {
    let one = Rational::one();
    let g = &one - s;
    if g.is_zero() {
        // ln(r^upper) - ln(r^lower) = (lower - upper) |ln r|
        let Limit::Power(lo) = lower else {
            return Err(AsymptoticsError::Divergent);
        };
        out.push(PowerLogTerm::new(lo - upper, w.clone(), 1));
        return Ok(());
    }
    out.push(PowerLogTerm::new(g.recip(), w + upper * &g, 0));
    match lower {
        Limit::Zero if g.is_positive() => {}
        Limit::Zero => return Err(AsymptoticsError::Divergent),
        Limit::Power(lo) => out.push(PowerLogTerm::new(-g.recip(), w + lo * &g, 0)),
    }
    Ok(())
}

/// For each compact edge `e_i`, the `r`-exponents of the two contributions
/// meeting at `x2 = r^{m_i}`: the upper end of block `i` and the lower end of
/// block `i + 1`.
pub fn boundary_exponents(p: &NewtonPolygon, rho: &Rational) -> Vec<(Rational, Rational)> {
    let one = Rational::one();
    p.edges()
        .iter()
        .map(|e| {
            let side = |v: crate::newton::Vertex| {
                let s = rho * rational::int(i64::from(v.v2));
                -(rho * rational::int(i64::from(v.v1))) + &e.m * (&one - s)
            };
            (side(e.start), side(e.end))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::powerlog::{decay_pair, DecayPair};
    use crate::newton::{build_polygon, newton_distance, reflect_polygon};
    use crate::rational::{int, ratio};
    use crate::terms::parse_terms;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str) -> NewtonPolygon {
        build_polygon(&parse_terms(s).unwrap())
    }

    #[test]
    fn fstar_examples() {
        assert_eq!(eval_fstar(&poly("x1^2*x2^3"), [2.0, 1.0]), 4.0);
        assert_eq!(eval_fstar(&poly("x1^3 + x2^2"), [1.0, 1.0]), 2.0);
        let p = poly("x1^4 + x1*x2 + x2^4");
        assert_eq!(eval_fstar_exact(&p, &[ratio(1, 2), ratio(1, 2)]), ratio(3, 8));
        assert_eq!(eval_fstar(&p, [-0.5, 0.5]), 0.375);
    }

    #[test]
    fn dominant_vertex_examples() {
        let p = poly("x1^3 + x2^2");
        assert_eq!(p.vertices()[dominant_vertex(&p, [1.0 / 16.0, 1.0 / 256.0])], crate::Vertex::new(3, 0));
        assert_eq!(p.vertices()[dominant_vertex(&p, [1.0 / 16.0, 0.5])], crate::Vertex::new(0, 2));
        assert_eq!(dominant_vertex_exact(&p, &[ratio(1, 16), ratio(1, 256)]), 0);
        assert_eq!(dominant_vertex_exact(&p, &[ratio(-1, 16), ratio(1, 2)]), 1);
        // exact tie on the threshold goes to the smaller index
        assert_eq!(dominant_vertex_exact(&p, &[ratio(1, 16), ratio(1, 64)]), 0);
        let single = poly("x1^2*x2^3");
        assert_eq!(dominant_vertex(&single, [0.3, 0.001]), 0);
    }

    #[test]
    fn example_sums() {
        let s = lemma21_sum(&poly("x1^2"), &ratio(1, 4)).unwrap();
        assert_eq!(s.dominant().unwrap().alpha, ratio(-1, 2));
        assert_eq!(decay_pair(&s).unwrap(), DecayPair::new(ratio(1, 2), 0));

        let p = poly("|x1|^2 + |x2|^2");
        let s = lemma21_sum(&p, &ratio(3, 4)).unwrap();
        let d = s.dominant().unwrap();
        assert_eq!((d.alpha.clone(), d.logpow), (ratio(-1, 2), 0));
        assert_eq!(decay_pair(&s).unwrap(), DecayPair::new(ratio(1, 2), 0));
        // 1/(1 - rho b) - rho b/(1 - rho b) * r^{a/b - rho a} = 3 r^{-1/2} - 2
        assert_eq!(d.coeff, ratio(3, 1));
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.terms()[1].coeff, int(-2));

        let s = lemma21_sum(&p, &ratio(1, 2)).unwrap();
        assert_eq!(decay_pair(&s).unwrap(), DecayPair::new(int(0), 1));
        assert_eq!(s.dominant().unwrap().coeff, int(1));
    }

    #[test]
    fn divergence_and_rho_checks() {
        let p = poly("x1^2*x2^3");
        assert_eq!(lemma21_sum(&p, &ratio(1, 3)), Err(AsymptoticsError::Divergent));
        assert_eq!(lemma21_sum(&p, &ratio(1, 2)), Err(AsymptoticsError::Divergent));
        assert_eq!(lemma21_sum(&p, &int(0)), Err(AsymptoticsError::NonPositiveRho));
        assert_eq!(lemma21_sum(&p, &ratio(-1, 2)), Err(AsymptoticsError::NonPositiveRho));
    }

    fn random_polygon(rng: &mut ChaCha8Rng) -> NewtonPolygon {
        let k = rng.gen_range(1..=7);
        let pts: Vec<(u32, u32)> = (0..k)
            .map(|_| loop {
                let p = (rng.gen_range(0..=8), rng.gen_range(0..=8));
                if p != (0, 0) {
                    break p;
                }
            })
            .collect();
        NewtonPolygon::from_support(&pts).unwrap()
    }

    #[test]
    fn sum_equals_numeric_integral_of_dominant_monomial() {
        // Oracle: the sum is exactly int_0^1 of the largest vertex monomial
        // at x1 = r, raised to -rho. Integrate it by a change of variables
        // x2 = e^{-u} with composite Simpson on a long interval.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 40 {
            let p = random_polygon(&mut rng);
            let rho = ratio(rng.gen_range(1..=9), 20);
            let Ok(sum) = lemma21_sum(&p, &rho) else { continue };
            let r: f64 = 0.125;
            let rf = rational::to_f64(&rho);
            let integrand = |u: f64| {
                let log_m = p
                    .vertices()
                    .iter()
                    .map(|v| f64::from(v.v1) * r.ln() - f64::from(v.v2) * u)
                    .fold(f64::NEG_INFINITY, f64::max);
                (-rf * log_m - u).exp()
            };
            // Integrand ~ e^{-(1 - rho v2) u} with rate at least 1/20; smooth
            // between the thresholds u = m_i ln(1/r).
            let mut cuts: Vec<f64> = p.edges().iter().map(|e| rational::to_f64(&e.m) * -r.ln()).collect();
            cuts.reverse();
            cuts.insert(0, 0.0);
            cuts.push(1200.0);
            let simpson = |a: f64, b: f64| {
                let steps = 20_000;
                let h = (b - a) / steps as f64;
                let mut acc = integrand(a) + integrand(b);
                for k in 1..steps {
                    acc += integrand(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            };
            let numeric: f64 = cuts.windows(2).map(|w| simpson(w[0], w[1])).sum();
            let exact = sum.eval(r);
            assert!((numeric - exact).abs() <= 1e-6 * exact, "{p:?} rho={rho} {numeric} vs {exact}");
            checked += 1;
        }
    }

    #[test]
    fn boundary_exponents_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let p = random_polygon(&mut rng);
            let rho = ratio(rng.gen_range(-20..=20), rng.gen_range(1..=17));
            for (lo, hi) in boundary_exponents(&p, &rho) {
                assert_eq!(lo, hi);
            }
        }
    }

    #[test]
    fn threshold_gives_epsilon_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = 0;
        for _ in 0..400 {
            let p = random_polygon(&mut rng);
            let rho = newton_distance(&p).critical_rho();
            if let Ok(s) = lemma21_sum(&p, &rho) {
                assert_eq!(decay_pair(&s).unwrap().epsilon, int(1), "{p:?}");
                hits += 1;
            }
        }
        assert!(hits > 50);
    }

    #[test]
    fn epsilon_is_monotone_in_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = random_polygon(&mut rng);
            for q in [p.clone(), reflect_polygon(&p)] {
                let mut last: Option<Rational> = None;
                for k in 1..40 {
                    let Ok(s) = lemma21_sum(&q, &ratio(k, 40)) else { break };
                    let e = decay_pair(&s).unwrap().epsilon;
                    if let Some(l) = &last {
                        assert!(e >= *l);
                    }
                    last = Some(e);
                }
            }
        }
    }
}
