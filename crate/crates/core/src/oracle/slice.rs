//! The one-dimensional slice integral `int_0^{r0} f*(r, x2)^{-rho} dx2`.

use alloc::vec::Vec;

use super::quad::gauss_kronrod;
use super::OracleError;
use crate::newton::NewtonPolygon;
use crate::rational;

const SLICE_TOL: f64 = 1e-12;

/// `ln f*(r, x)` evaluated as a log-sum-exp over the vertices.
fn ln_fstar(vertices: &[(f64, f64)], ln_r: f64, ln_x: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &(v1, v2) in vertices {
        best = best.max(v1 * ln_r + v2 * ln_x);
    }
    let sum: f64 = vertices.iter().map(|&(v1, v2)| libm::exp(v1 * ln_r + v2 * ln_x - best)).sum();
    best + libm::log(sum)
}

/// Numerical value of `int_0^{r0} f*(r, x2)^{-rho} dx2` for `0 < r < r0`.
///
/// The range is cut at `x2 = r^{m_i}`. The first piece uses the substitution
/// `x2 = b w^{1/(1-s)}` with `s = rho v2` of the first vertex, which turns
/// the `x2^{-s}` endpoint behavior into a bounded integrand; the others are
/// integrated in `ln x2`.
pub fn slice_integral(p: &NewtonPolygon, rho: f64, r: f64, r0: f64) -> Result<f64, OracleError> {
    if !(0.0 < r && r < r0) {
        return Err(OracleError::PreconditionViolated("need 0 < r < r0"));
    }
    if rho == 0.0 {
        return Ok(r0);
    }
    let vertices: Vec<(f64, f64)> = p.vertices().iter().map(|v| (f64::from(v.v1), f64::from(v.v2))).collect();
    let s = rho * vertices[0].1;
    if s >= 1.0 {
        return Err(OracleError::Divergent);
    }
    let ln_r = libm::log(r);
    let integrand = |ln_x: f64| libm::exp(-rho * ln_fstar(&vertices, ln_r, ln_x));
    let mut cuts: Vec<f64> = p
        .slopes()
        .iter()
        .map(|m| libm::pow(r, rational::to_f64(m)))
        .filter(|&t| t < r0)
        .collect();
    cuts.push(r0);
    let b0 = cuts[0];
    let e = 1.0 / (1.0 - s);
    let first = gauss_kronrod(
        |w: f64| {
            let ln_x = libm::log(b0) + e * libm::log(w);
            integrand(ln_x) * b0 * e * libm::pow(w, s * e)
        },
        0.0,
        1.0,
        0.0,
        SLICE_TOL,
        2000,
    );
    let mut total = first.value;
    let mut ok = first.converged;
    for w in cuts.windows(2) {
        let piece = gauss_kronrod(
            |t: f64| integrand(t) * libm::exp(t),
            libm::log(w[0]),
            libm::log(w[1]),
            0.0,
            SLICE_TOL,
            2000,
        );
        total += piece.value;
        ok &= piece.converged;
    }
    if !ok {
        return Err(OracleError::ToleranceNotMet { estimate: total, error: f64::NAN });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::build_polygon;
    use crate::terms::parse_terms;

    fn polygon(s: &str) -> NewtonPolygon {
        build_polygon(&parse_terms(s).unwrap())
    }

    #[test]
    fn single_vertex_closed_form() {
        let p = polygon("x1^2*x2^3");
        for (rho, r) in [(0.25, 1e-3), (0.3, 0.01), (0.1, 2e-7)] {
            let got = slice_integral(&p, rho, r, 0.25).unwrap();
            let exact = libm::pow(r, -2.0 * rho) * libm::pow(0.25, 1.0 - 3.0 * rho) / (1.0 - 3.0 * rho);
            assert!((got - exact).abs() <= 1e-11 * exact, "{got} vs {exact}");
        }
    }

    #[test]
    fn zero_rho_and_divergence() {
        let p = polygon("|x1|^2 + |x2|^2");
        assert_eq!(slice_integral(&p, 0.0, 0.01, 0.25).unwrap(), 0.25);
        assert_eq!(slice_integral(&polygon("x1*x2^2"), 0.5, 0.01, 0.25), Err(OracleError::Divergent));
        assert!(slice_integral(&p, 0.5, 0.3, 0.25).is_err());
    }

    #[test]
    fn sum_of_squares_ratio_is_stable() {
        let p = polygon("|x1|^2 + |x2|^2");
        let ratios: Vec<f64> = (8..=16)
            .map(|k| {
                let r = libm::ldexp(1.0, -k);
                slice_integral(&p, 0.75, r, 0.25).unwrap() * libm::sqrt(r)
            })
            .collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "{ratios:?}");
    }

    #[test]
    fn two_vertex_closed_form() {
        // f* = r^2 + x^2 at rho = 1/2: int_0^{r0} (r^2 + x^2)^{-1/2} dx = asinh(r0 / r)
        let p = polygon("|x1|^2 + |x2|^2");
        for r in [1e-2, 1e-4, 1e-6] {
            let got = slice_integral(&p, 0.5, r, 0.25).unwrap();
            let exact = libm::asinh(0.25 / r);
            assert!((got - exact).abs() <= 1e-11 * exact, "{got} vs {exact}");
        }
    }
}
