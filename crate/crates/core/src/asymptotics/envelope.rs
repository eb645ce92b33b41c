//! The box integral `int_{0<x1<X, 0<x2<Y} (f*)^{-rho}` with `X = 1/|lambda1|`
//! and `Y = 1/|lambda2|` (both capped at 1), in dominant-monomial mode.
//!
//! The integrand is replaced by the dominant vertex monomial on each block
//! of the threshold decomposition, which changes the value by a factor of at
//! most `n^|rho|`. The result is a finite sum of terms
//! `c X^a Y^b (ln X)^p (ln Y)^q`, one formula per corner region
//! `X^{m_{j-1}} <= Y <= X^{m_j}`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::AsymptoticsError;
use crate::newton::NewtonPolygon;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnvelopeTerm {
    pub coeff: Rational,
    /// Power of `X`.
    pub a: Rational,
    /// Power of `Y`.
    pub b: Rational,
    /// Power of `ln X`.
    pub p: u32,
    /// Power of `ln Y`.
    pub q: u32,
}

impl EnvelopeTerm {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        rational::to_f64(&self.coeff)
            * libm::pow(x, rational::to_f64(&self.a))
            * libm::pow(y, rational::to_f64(&self.b))
            * libm::pow(libm::log(x), f64::from(self.p))
            * libm::pow(libm::log(y), f64::from(self.q))
    }
}

/// One line of the symbolic table: on the frequency region
/// `|l1|^{mu_lo} <= |l2| <= |l1|^{mu_hi}`, the envelope is within a bounded
/// factor of `|l1|^alpha1 |ln l1|^log1 |l2|^alpha2 |ln l2|^log2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnvelopePiece {
    /// Zero-based corner region.
    pub region: usize,
    pub mu_lo: Rational,
    /// `None` stands for `+infinity`.
    pub mu_hi: Option<Rational>,
    pub alpha1: Rational,
    pub alpha2: Rational,
    pub log1: u32,
    pub log2: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    /// Box integral over the positive quadrant.
    pub value: f64,
    /// Zero-based corner region of `(X, Y)`.
    pub region: usize,
    pub x: f64,
    pub y: f64,
    /// Closed form valid on that region.
    pub terms: Vec<EnvelopeTerm>,
}

/// Symbolic envelope formulas for every corner region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeTable {
    slopes: Vec<Rational>,
    regions: Vec<Vec<EnvelopeTerm>>,
}

impl EnvelopeTable {
    pub fn new(p: &NewtonPolygon, rho: &Rational) -> Result<Self, AsymptoticsError> {
        let n = p.vertex_count();
        let regions = (1..=n).map(|j| region_terms(p, rho, j)).collect::<Result<Vec<_>, _>>()?;
        Ok(EnvelopeTable { slopes: p.slopes(), regions })
    }

    pub fn regions(&self) -> &[Vec<EnvelopeTerm>] {
        &self.regions
    }

    /// Zero-based region holding the corner `(X, Y)`.
    pub fn locate(&self, x: f64, y: f64) -> usize {
        let (lx, ly) = (libm::log(x), libm::log(y));
        self.slopes.iter().filter(|m| rational::to_f64(m) * lx < ly).count()
    }

    pub fn eval(&self, x: f64, y: f64) -> (usize, f64) {
        let j = self.locate(x, y);
        (j, self.regions[j].iter().map(|t| t.eval(x, y)).sum())
    }

    /// Dominant-term table over `mu = ln|l2| / ln|l1|`.
    pub fn pieces(&self) -> Vec<EnvelopePiece> {
        let n = self.regions.len();
        let mut out: Vec<EnvelopePiece> = Vec::new();
        // Region j spans mu in [m_{j+1}, m_j] with m_0 = inf and m_n = 0
        // (one-based slopes); iterate from large mu to small.
        for (j, terms) in self.regions.iter().enumerate() {
            let hi = if j == 0 { None } else { Some(self.slopes[j - 1].clone()) };
            let lo = if j + 1 == n { Rational::zero() } else { self.slopes[j].clone() };
            for piece in region_pieces(j, terms, &lo, hi.as_ref()) {
                match out.last_mut() {
                    Some(last)
                        if last.region == piece.region
                            && (&last.alpha1, &last.alpha2, last.log1, last.log2)
                                == (&piece.alpha1, &piece.alpha2, piece.log1, piece.log2) =>
                    {
                        last.mu_hi = piece.mu_hi;
                    }
                    _ => out.push(piece),
                }
            }
        }
        out
    }
}

/// Envelope value at the frequency `lambda`.
pub fn theorem23_envelope(p: &NewtonPolygon, rho: &Rational, lambda: [f64; 2]) -> Result<Envelope, AsymptoticsError> {
    let table = EnvelopeTable::new(p, rho)?;
    let side = |l: f64| if libm::fabs(l) <= 1.0 { 1.0 } else { 1.0 / libm::fabs(l) };
    let (x, y) = (side(lambda[0]), side(lambda[1]));
    let (region, value) = table.eval(x, y);
    Ok(Envelope { value, region, x, y, terms: table.regions[region].clone() })
}

/// `c x1^gamma (ln x1)^p Y^beta (ln Y)^q`
#[derive(Clone, Debug)]
struct XTerm {
    c: Rational,
    gamma: Rational,
    p: u32,
    beta: Rational,
    q: u32,
}

#[derive(Clone, Debug)]
enum X2Limit {
    Zero,
    /// `x1^m`
    X1Pow(Rational),
    Y,
}

#[derive(Clone, Debug)]
enum X1Limit {
    Zero,
    X,
    /// `Y^e`
    YPow(Rational),
}

fn slope(p: &NewtonPolygon, k: usize) -> Rational {
    p.edges()[k - 1].m.clone()
}

/// Inner `x2` integral on the `x1` range where `Y` lies in block `k`
/// (one-based): full blocks `1..k` and block `k` cut at `Y`.
fn inner_terms(p: &NewtonPolygon, rho: &Rational, k: usize) -> Result<Vec<XTerm>, AsymptoticsError> {
    let one = Rational::one();
    let mut out = Vec::new();
    for i in 1..=k {
        let v = p.vertices()[i - 1];
        let w = -(rho * rational::int(i64::from(v.v1)));
        let g = &one - rho * rational::int(i64::from(v.v2));
        let lower = if i == 1 { X2Limit::Zero } else { X2Limit::X1Pow(slope(p, i - 1)) };
        let upper = if i < k { X2Limit::X1Pow(slope(p, i)) } else { X2Limit::Y };
        for (limit, sign) in [(upper, one.clone()), (lower, -one.clone())] {
            let zero = Rational::zero();
            let term = match (&limit, g.is_zero()) {
                (X2Limit::Zero, _) if g.is_positive() => continue,
                (X2Limit::Zero, _) => return Err(AsymptoticsError::Divergent),
                (X2Limit::X1Pow(m), false) => XTerm { c: &sign / &g, gamma: &w + m * &g, p: 0, beta: zero, q: 0 },
                (X2Limit::X1Pow(m), true) => XTerm { c: &sign * m, gamma: w.clone(), p: 1, beta: zero, q: 0 },
                (X2Limit::Y, false) => XTerm { c: &sign / &g, gamma: w.clone(), p: 0, beta: g.clone(), q: 0 },
                (X2Limit::Y, true) => XTerm { c: sign, gamma: w.clone(), p: 0, beta: zero, q: 1 },
            };
            out.push(term);
        }
    }
    Ok(merge_x(out))
}

fn merge_x(terms: Vec<XTerm>) -> Vec<XTerm> {
    let mut acc: BTreeMap<(Rational, u32, Rational, u32), Rational> = BTreeMap::new();
    for t in terms {
        *acc.entry((t.gamma, t.p, t.beta, t.q)).or_insert_with(Rational::zero) += t.c;
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((gamma, p, beta, q), c)| XTerm { c, gamma, p, beta, q })
        .collect()
}

/// `int x^gamma (ln x)^p dx` as `(coeff, power, logpow)` triples.
fn antiderivative(gamma: &Rational, p: u32) -> Vec<(Rational, Rational, u32)> {
    let g = gamma + Rational::one();
    match (p, g.is_zero()) {
        (0, false) => vec![(g.recip(), g, 0)],
        (0, true) => vec![(Rational::one(), g, 1)],
        (1, false) => vec![(g.recip(), g.clone(), 1), (-(&g * &g).recip(), g, 0)],
        (1, true) => vec![(rational::ratio(1, 2), g, 2)],
        _ => unreachable!("inner integrals carry at most one logarithm"),
    }
}

fn substitute(
    t: &XTerm,
    limit: &X1Limit,
    sign: &Rational,
    out: &mut Vec<EnvelopeTerm>,
) -> Result<(), AsymptoticsError> {
    for (c, h, r) in antiderivative(&t.gamma, t.p) {
        let c = sign * &t.c * c;
        match limit {
            X1Limit::Zero if h.is_positive() => {}
            X1Limit::Zero => return Err(AsymptoticsError::Divergent),
            X1Limit::X => out.push(EnvelopeTerm { coeff: c, a: h, b: t.beta.clone(), p: r, q: t.q }),
            X1Limit::YPow(e) => out.push(EnvelopeTerm {
                coeff: c * rational::pow_u32(e, r),
                a: Rational::zero(),
                b: &t.beta + e * h,
                p: 0,
                q: t.q + r,
            }),
        }
    }
    Ok(())
}

/// Closed form on the corner region `j` (one-based).
fn region_terms(p: &NewtonPolygon, rho: &Rational, j: usize) -> Result<Vec<EnvelopeTerm>, AsymptoticsError> {
    let n = p.vertex_count();
    let mut out = Vec::new();
    let one = Rational::one();
    for k in j..=n {
        let lower = if k == n { X1Limit::Zero } else { X1Limit::YPow(slope(p, k).recip()) };
        let upper = if k == j { X1Limit::X } else { X1Limit::YPow(slope(p, k - 1).recip()) };
        for t in inner_terms(p, rho, k)? {
            substitute(&t, &upper, &one, &mut out)?;
            substitute(&t, &lower, &-one.clone(), &mut out)?;
        }
    }
    let mut acc: BTreeMap<(Rational, Rational, u32, u32), Rational> = BTreeMap::new();
    for t in out {
        *acc.entry((t.a, t.b, t.p, t.q)).or_insert_with(Rational::zero) += t.coeff;
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((a, b, p, q), coeff)| EnvelopeTerm { coeff, a, b, p, q })
        .collect())
}

/// Dominant term on sub-intervals of `[lo, hi]` in `mu`, with `Y = X^mu`.
fn region_pieces(j: usize, terms: &[EnvelopeTerm], lo: &Rational, hi: Option<&Rational>) -> Vec<EnvelopePiece> {
    let mut cuts: Vec<Rational> = Vec::new();
    for (i, s) in terms.iter().enumerate() {
        for t in &terms[i + 1..] {
            if s.b != t.b {
                // a_s + mu b_s = a_t + mu b_t
                let mu = (&t.a - &s.a) / (&s.b - &t.b);
                if mu > *lo && hi.is_none_or(|h| mu < *h) {
                    cuts.push(mu);
                }
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    let mut bounds = vec![lo.clone()];
    bounds.extend(cuts);
    let mut pieces: Vec<EnvelopePiece> = Vec::new();
    for (idx, start) in bounds.iter().enumerate() {
        let end = bounds.get(idx + 1).cloned().or_else(|| hi.cloned());
        let probe = match &end {
            Some(e) => (start + e) / rational::int(2),
            None => start + Rational::one(),
        };
        let Some(t) = dominant_at(terms, &probe) else { continue };
        let piece = EnvelopePiece {
            region: j,
            mu_lo: start.clone(),
            mu_hi: end,
            alpha1: -t.a.clone(),
            alpha2: -t.b.clone(),
            log1: t.p,
            log2: t.q,
        };
        match pieces.last_mut() {
            Some(last) if (&last.alpha1, &last.alpha2, last.log1, last.log2) == (&piece.alpha1, &piece.alpha2, piece.log1, piece.log2) => {
                last.mu_hi = piece.mu_hi;
            }
            _ => pieces.push(piece),
        }
    }
    // Report from large mu to small, matching the region order.
    pieces.reverse();
    pieces
}

/// The term group that dominates as `X -> 0` along `Y = X^mu`.
fn dominant_at<'a>(terms: &'a [EnvelopeTerm], mu: &Rational) -> Option<&'a EnvelopeTerm> {
    // Group by (a, b); within a group the effective coefficient of
    // (ln X)^L is sum c mu^q over p + q = L.
    let mut groups: BTreeMap<(Rational, Rational), Vec<&EnvelopeTerm>> = BTreeMap::new();
    for t in terms {
        groups.entry((t.a.clone(), t.b.clone())).or_default().push(t);
    }
    let mut best: Option<(Rational, u32, &EnvelopeTerm)> = None;
    for ((a, b), group) in &groups {
        let exponent = a + mu * b;
        let top = group.iter().map(|t| t.p + t.q).max().unwrap_or(0);
        let Some((level, rep)) = (0..=top).rev().find_map(|level| {
            let members: Vec<&&EnvelopeTerm> = group.iter().filter(|t| t.p + t.q == level).collect();
            let total: Rational = members.iter().map(|t| &t.coeff * rational::pow_u32(mu, t.q)).sum();
            if total.is_zero() {
                return None;
            }
            let rep = members
                .iter()
                .max_by(|x, y| {
                    (x.coeff.abs() * rational::pow_u32(mu, x.q)).cmp(&(y.coeff.abs() * rational::pow_u32(mu, y.q)))
                })
                .map(|t| **t)?;
            Some((level, rep))
        }) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((e, l, _)) => exponent < *e || (exponent == *e && level > *l),
        };
        if better {
            best = Some((exponent, level, rep));
        }
    }
    best.map(|(_, _, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::slices::eval_fstar;
    use crate::newton::build_polygon;
    use crate::rational::{int, ratio};
    use crate::terms::parse_terms;
    use std::vec::Vec;

    fn poly(s: &str) -> NewtonPolygon {
        build_polygon(&parse_terms(s).unwrap())
    }

    /// Oracle: `int_0^X int_0^Y max_i(monomial_i)^{-rho}` by adaptive
    /// Gauss-Kronrod in logarithmic coordinates, split at every kink.
    fn box_oracle(p: &NewtonPolygon, rho: f64, x: f64, y: f64, span: f64) -> f64 {
        use crate::oracle::quad::gauss_kronrod;
        let lx = x.ln();
        let ly = y.ln();
        let log_m = |l1: f64, l2: f64| {
            p.vertices()
                .iter()
                .map(|v| f64::from(v.v1) * l1 + f64::from(v.v2) * l2)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let slopes: Vec<f64> = p.edges().iter().map(|e| rational::to_f64(&e.m)).collect();
        let integrate = |f: &dyn Fn(f64) -> f64, cuts: &[f64], tol: f64| -> f64 {
            cuts.windows(2).map(|w| gauss_kronrod(f, w[0], w[1], 0.0, tol, 4000).value).sum()
        };
        let inner = |u: f64| {
            let l1 = lx - u;
            // kinks at l2 = m l1, i.e. v = ly - m l1
            let mut cuts: Vec<f64> = slopes.iter().map(|m| ly - m * l1).filter(|&v| v > 0.0 && v < span).collect();
            cuts.push(0.0);
            cuts.push(span);
            cuts.sort_by(f64::total_cmp);
            let g = |v: f64| {
                let l2 = ly - v;
                (-rho * log_m(l1, l2) + l1 + l2).exp()
            };
            integrate(&g, &cuts, 1e-13)
        };
        // x1 kinks where the threshold x1^m crosses Y
        let mut cuts: Vec<f64> = slopes.iter().map(|m| lx - ly / m).filter(|&u| u > 0.0 && u < span).collect();
        cuts.push(0.0);
        cuts.push(span);
        cuts.sort_by(f64::total_cmp);
        integrate(&inner, &cuts, 1e-11)
    }

    #[test]
    fn monomial_envelope() {
        // single vertex (a, b): X^{1 - a rho} Y^{1 - b rho} / ((1 - a rho)(1 - b rho))
        let p = poly("x1^2*x2^2");
        let rho = ratio(3, 10);
        let table = EnvelopeTable::new(&p, &rho).unwrap();
        assert_eq!(
            table.regions()[0],
            vec![EnvelopeTerm { coeff: ratio(25, 4), a: ratio(2, 5), b: ratio(2, 5), p: 0, q: 0 }]
        );
        let pieces = table.pieces();
        assert_eq!(pieces.len(), 1);
        assert_eq!((pieces[0].alpha1.clone(), pieces[0].alpha2.clone()), (ratio(-2, 5), ratio(-2, 5)));
        let e = theorem23_envelope(&p, &rho, [64.0, 8.0]).unwrap();
        let expect = 6.25 * (1.0f64 / 64.0).powf(0.4) * (1.0f64 / 8.0).powf(0.4);
        assert!((e.value - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn unit_frequencies_integrate_the_unit_square() {
        for (s, rho) in [("|x1|^2 + |x2|^2", ratio(1, 2)), ("x1^3 + x2^2", ratio(1, 3)), ("x1^4 + x1*x2 + x2^4", ratio(1, 2))] {
            let p = poly(s);
            let e = theorem23_envelope(&p, &rho, [1.0, 0.5]).unwrap();
            assert_eq!((e.x, e.y), (1.0, 1.0));
            let oracle = box_oracle(&p, rational::to_f64(&rho), 1.0, 1.0, 200.0);
            assert!((e.value - oracle).abs() < 1e-6 * oracle, "{s}: {} vs {oracle}", e.value);
            // true f* integrand is within n^rho of the surrogate
            let n = p.vertex_count() as f64;
            assert!(e.value >= oracle / n.powf(rational::to_f64(&rho)) * 0.999);
            let _ = eval_fstar;
        }
    }

    #[test]
    fn matches_box_oracle_in_every_region() {
        let cases = [
            ("|x1|^2 + |x2|^2", ratio(1, 2)),
            ("|x1|^2 + |x2|^2", ratio(4, 5)),
            ("x1^3 + x2^2", ratio(1, 3)),
            ("x1^3 + x2^2", ratio(-1, 2)),
            ("x1^4 + x1*x2 + x2^4", ratio(3, 4)),
            ("x1^4 + x1*x2 + x2^4", ratio(1, 4)),
            ("x1^6 + x1^2*x2 + x1*x2^3 + x2^5", ratio(1, 3)),
        ];
        for (s, rho) in cases {
            let p = poly(s);
            let table = EnvelopeTable::new(&p, &rho).unwrap();
            let mut seen = vec![false; p.vertex_count()];
            for &(l1, l2) in &[(2.0, 2.0), (16.0, 2.0), (2.0, 64.0), (512.0, 8.0), (8.0, 512.0), (300.0, 300.0), (1e4, 3.0)] {
                let (x, y) = (1.0 / l1, 1.0 / l2);
                let (region, value) = table.eval(x, y);
                seen[region] = true;
                let oracle = box_oracle(&p, rational::to_f64(&rho), x, y, 250.0);
                assert!((value - oracle).abs() < 1e-6 * oracle, "{s} rho={rho} at ({l1},{l2}): {value} vs {oracle}");
            }
            assert!(seen.iter().all(|&b| b), "{s}: not every region sampled");
        }
    }

    #[test]
    fn regions_agree_on_shared_boundaries() {
        // On Y = X^{m_k} the formulas of the two adjacent regions coincide.
        for (s, rho) in [("x1^4 + x1*x2 + x2^4", ratio(1, 3)), ("x1^6 + x1^2*x2 + x1*x2^3 + x2^5", ratio(1, 4))] {
            let p = poly(s);
            let table = EnvelopeTable::new(&p, &rho).unwrap();
            for (k, e) in p.edges().iter().enumerate() {
                for x in [0.3f64, 0.01, 1e-4] {
                    let y = x.powf(rational::to_f64(&e.m));
                    let val = |j: usize| table.regions()[j].iter().map(|t| t.eval(x, y)).sum::<f64>();
                    let (a, b) = (val(k), val(k + 1));
                    assert!((a - b).abs() < 1e-9 * a.abs().max(b.abs()), "{s} edge {k} at X={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn sum_of_powers_has_two_formulas() {
        // |x1|^a + |x2|^b, rho < 1/a and 1/b: each corner region is a single
        // formula and the two differ.
        let p = poly("|x1|^2 + |x2|^4");
        let table = EnvelopeTable::new(&p, &ratio(1, 5)).unwrap();
        assert_eq!(table.regions().len(), 2);
        assert_ne!(table.regions()[0], table.regions()[1]);
        let pieces = table.pieces();
        assert!(!pieces.is_empty());
        // coverage: mu from +inf down to 0 without gaps
        assert_eq!(pieces[0].mu_hi, None);
        assert_eq!(pieces.last().unwrap().mu_lo, int(0));
        for w in pieces.windows(2) {
            assert_eq!(w[0].mu_lo, *w[1].mu_hi.as_ref().unwrap());
        }
    }

    #[test]
    fn divergent_envelopes() {
        let p = poly("x1^2*x2^3");
        assert_eq!(EnvelopeTable::new(&p, &ratio(1, 3)), Err(AsymptoticsError::Divergent));
        assert_eq!(EnvelopeTable::new(&p, &ratio(1, 2)), Err(AsymptoticsError::Divergent));
        assert!(EnvelopeTable::new(&p, &ratio(-3, 2)).is_ok());
    }
}
