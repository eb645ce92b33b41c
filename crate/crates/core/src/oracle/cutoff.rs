//! Compactly supported cutoffs `phi`.
//!
//! The smooth bump is `psi(|x|/R)` with `psi = 1` on `[0, 1/2]`, `psi = 0` on
//! `[1, inf)`, and `psi(t) = h(1-t) / (h(1-t) + h(t-1/2))` in between, where
//! `h(u) = exp(-1/u)`.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutoffKind {
    SmoothBump,
    /// The smooth bump times the indicator of the open `(+, +)` quadrant.
    QuadrantBump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    pub radius: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec { kind: CutoffKind::SmoothBump, radius: 0.25 }
    }
}

fn h(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / u)
    }
}

/// The radial profile.
pub fn psi(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let u = h(1.0 - t);
        let v = h(t - 0.5);
        u / (u + v)
    }
}

/// `psi'(t)`
pub fn psi_prime(t: f64) -> f64 {
    if t <= 0.5 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (1.0 - t, t - 0.5);
    let u = h(a);
    let v = h(b);
    let du = -u / (a * a);
    let dv = v / (b * b);
    let s = u + v;
    (du * v - u * dv) / (s * s)
}

impl CutoffSpec {
    pub fn new(kind: CutoffKind, radius: f64) -> Self {
        assert!(radius > 0.0, "cutoff radius must be positive");
        CutoffSpec { kind, radius }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        if self.kind == CutoffKind::QuadrantBump && !(x[0] > 0.0 && x[1] > 0.0) {
            return 0.0;
        }
        psi(libm::hypot(x[0], x[1]) / self.radius)
    }

    /// Whether the open quadrant `(s1, s2)` meets the support.
    pub fn covers_quadrant(&self, s1: i8, s2: i8) -> bool {
        match self.kind {
            CutoffKind::SmoothBump => true,
            CutoffKind::QuadrantBump => s1 > 0 && s2 > 0,
        }
    }

    /// Radius inside which `phi = 1` (on its quadrants).
    pub fn plateau(&self) -> f64 {
        0.5 * self.radius
    }

    /// `A = sup |x| |grad phi(x)| = sup_t t |psi'(t)|`, from the closed-form
    /// derivative on a fine grid of the transition band.
    pub fn gradient_constant(&self) -> f64 {
        let n = 20_000;
        (1..n)
            .map(|k| {
                let t = 0.5 + 0.5 * k as f64 / n as f64;
                t * libm::fabs(psi_prime(t))
            })
            .fold(0.0, f64::max)
    }

    /// `A = sup |phi|`.
    pub fn sup(&self) -> f64 {
        1.0
    }

    /// Estimate of `A_{a,b} = sup |x1|^a |x2|^b |d1^a d2^b phi|` for
    /// `a + b <= 4`, by central differences on a polar grid.
    pub fn derivative_constant(&self, a: u32, b: u32) -> f64 {
        assert!(a + b <= 4, "orders above 4 are not tabulated");
        let r = self.radius;
        let step = 1e-3 * r;
        let mut best: f64 = 0.0;
        let (nr, nt) = (200, 90);
        for i in 1..nr {
            let rad = r * (0.5 + 0.5 * i as f64 / nr as f64);
            for j in 0..=nt {
                let th = core::f64::consts::FRAC_PI_2 * (j as f64 + 0.5) / (nt as f64 + 1.0);
                let x = [rad * libm::cos(th), rad * libm::sin(th)];
                let d = self.partial(x, a, b, step);
                best = best.max(libm::fabs(d) * libm::pow(libm::fabs(x[0]), f64::from(a)) * libm::pow(libm::fabs(x[1]), f64::from(b)));
            }
        }
        best
    }

    fn partial(&self, x: [f64; 2], a: u32, b: u32, step: f64) -> f64 {
        if a > 0 {
            let plus = self.partial([x[0] + step, x[1]], a - 1, b, step);
            let minus = self.partial([x[0] - step, x[1]], a - 1, b, step);
            return (plus - minus) / (2.0 * step);
        }
        if b > 0 {
            let plus = self.partial([x[0], x[1] + step], a, b - 1, step);
            let minus = self.partial([x[0], x[1] - step], a, b - 1, step);
            return (plus - minus) / (2.0 * step);
        }
        psi(libm::hypot(x[0], x[1]) / self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_shape() {
        assert_eq!(psi(0.2), 1.0);
        assert_eq!(psi(0.5), 1.0);
        assert_eq!(psi(1.0), 0.0);
        assert!((psi(0.75) - 0.5).abs() < 1e-15);
        let mut last = 1.0;
        for k in 1..100 {
            let v = psi(0.5 + 0.005 * k as f64);
            assert!(v <= last && v >= 0.0);
            last = v;
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for k in 1..50 {
            let t = 0.5 + 0.01 * k as f64;
            let fd = (psi(t + 1e-6) - psi(t - 1e-6)) / 2e-6;
            assert!((psi_prime(t) - fd).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn constants_are_finite() {
        let c = CutoffSpec::default();
        let a = c.gradient_constant();
        assert!(a > 0.5 && a < 10.0, "{a}");
        for (i, j) in [(1, 0), (0, 1), (1, 1), (2, 0), (2, 2), (4, 0)] {
            let v = c.derivative_constant(i, j);
            assert!(v.is_finite() && v > 0.0, "{i},{j}: {v}");
        }
        let q = CutoffSpec::new(CutoffKind::QuadrantBump, 0.25);
        assert_eq!(q.eval([-0.01, 0.01]), 0.0);
        assert_eq!(q.eval([0.01, 0.01]), 1.0);
        assert!(!q.covers_quadrant(-1, 1));
    }
}
