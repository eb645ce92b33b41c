//! Sampled checks of the structural estimates: `|f|^{-rho}` against
//! `f*^{-rho}` on dyadic rectangles, `|f|` against `f*` pointwise, and the
//! lower envelope of `|F|` along an axis.

use alloc::vec::Vec;

use num_traits::Signed;

use super::fit::{band_max_fit, fit_frequency_decay, DecayFit};
use super::rect::{integrate_power_on_rect, DyadicRectangle, PowerBase};
use super::transform::{FrequencyPoint, OscillatoryIntegral};
use super::OracleError;
use crate::asymptotics::{eval_fstar, theorem22_prediction};
use crate::diagnosis::is_well_behaved;
use crate::newton::{build_polygon, newton_distance, NewtonPolygon};
use crate::rational::{self, Rational};
use crate::terms::TermSum;

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Trend of a per-scale statistic: slope of `ln stat` against
/// `scale * ln 2`, i.e. the exponent `g` in `stat ~ (2^{-scale})^{-g}`.
pub fn scale_trend(per_scale: &[(u32, f64)]) -> f64 {
    let xs: Vec<f64> = per_scale.iter().map(|&(s, _)| f64::from(s) * core::f64::consts::LN_2).collect();
    let ys: Vec<f64> = per_scale.iter().map(|&(_, v)| libm::log(v)).collect();
    slope(&xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparabilityOptions {
    pub tol: f64,
    /// Largest admissible `max/min` over the whole batch.
    pub band: f64,
    /// Largest admissible `|trend|` of the per-scale spread.
    pub trend_limit: f64,
}

impl Default for ComparabilityOptions {
    fn default() -> Self {
        ComparabilityOptions { tol: 1e-6, band: 1e3, trend_limit: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioSample {
    pub rect: DyadicRectangle,
    /// `int_R f*^{-rho} / int_R |f|^{-rho}`
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparabilityReport {
    pub ratios: Vec<RatioSample>,
    pub min: f64,
    pub max: f64,
    /// `max / min`
    pub spread: f64,
    /// `(s, max/min over rectangles with max(j, k) = s)`
    pub per_scale: Vec<(u32, f64)>,
    pub trend: f64,
    pub pass: bool,
}

impl ComparabilityReport {
    pub fn from_ratios(ratios: Vec<RatioSample>, opts: &ComparabilityOptions) -> Self {
        let min = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let max = ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let mut scales: Vec<u32> = ratios.iter().map(|r| r.rect.j.max(r.rect.k)).collect();
        scales.sort_unstable();
        scales.dedup();
        let per_scale: Vec<(u32, f64)> = scales
            .into_iter()
            .map(|s| {
                let at = ratios.iter().filter(|r| r.rect.j.max(r.rect.k) == s).map(|r| r.ratio);
                let (lo, hi) = at.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                (s, hi / lo)
            })
            .collect();
        let trend = scale_trend(&per_scale);
        let spread = max / min;
        let pass = min > 0.0 && spread <= opts.band && libm::fabs(trend) <= opts.trend_limit;
        ComparabilityReport { ratios, min, max, spread, per_scale, trend, pass }
    }
}

/// Preconditions of [`check_comparability`]: well-behaved, `0 < rho < 1/d`.
pub fn comparability_preconditions(f: &TermSum, rho: f64) -> Result<NewtonPolygon, OracleError> {
    let report = is_well_behaved(f);
    if !report.verdict {
        return Err(OracleError::PreconditionViolated("f is not well-behaved"));
    }
    let rho_q = rational::from_f64(rho).ok_or(OracleError::PreconditionViolated("rho must be finite"))?;
    if !rho_q.is_positive() || rho_q * report.d.0 >= rational::int(1) {
        return Err(OracleError::PreconditionViolated("need 0 < rho < 1/d(f)"));
    }
    Ok(build_polygon(f))
}

/// `int_R f*^{-rho} / int_R |f|^{-rho}` for one rectangle.
pub fn comparability_ratio(
    f: &TermSum,
    p: &NewtonPolygon,
    rho: f64,
    rect: &DyadicRectangle,
    tol: f64,
) -> Result<RatioSample, OracleError> {
    let star = integrate_power_on_rect(PowerBase::FStar(p), rho, rect, tol)?;
    let plain = integrate_power_on_rect(PowerBase::Terms(f), rho, rect, tol)?;
    Ok(RatioSample { rect: *rect, ratio: star.value / plain.value })
}

pub fn check_comparability(
    f: &TermSum,
    rho: f64,
    rects: &[DyadicRectangle],
    opts: &ComparabilityOptions,
) -> Result<ComparabilityReport, OracleError> {
    let p = comparability_preconditions(f, rho)?;
    let ratios = rects
        .iter()
        .map(|r| comparability_ratio(f, &p, rho, r, opts.tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComparabilityReport::from_ratios(ratios, opts))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub min: f64,
    pub max: f64,
    /// `sum |coeffs|`, the admissible maximum.
    pub bound: f64,
    /// `(k, min, max)` over samples with `2^{-k-1} <= |x| < 2^{-k}`.
    pub per_scale: Vec<(u32, f64, f64)>,
    /// [`scale_trend`] of the per-scale minima.
    pub trend: f64,
    pub pass: bool,
}

/// Relative slack on the `sum |coeffs|` bound for floating-point rounding.
pub const EQUIVALENCE_ROUNDING: f64 = 1e-12;

/// Dyadic scale `k` with `2^{-k-1} <= |x| < 2^{-k}`.
pub fn scale_of(x: [f64; 2]) -> u32 {
    let r = libm::hypot(x[0], x[1]);
    libm::floor(-libm::log2(r)).max(0.0) as u32
}

/// `|f| / f*` over the samples. Requires every edge polynomial to be free
/// of zeros off the axes; passes when the minimum is positive with no
/// downward trend across scales (`|trend| <= trend_limit`) and the maximum
/// is at most `sum |coeffs|`.
pub fn check_fstar_equivalence(
    f: &TermSum,
    samples: &[[f64; 2]],
    trend_limit: f64,
) -> Result<EquivalenceReport, OracleError> {
    let report = is_well_behaved(f);
    if report.edges.iter().any(|e| e.has_zeros()) {
        return Err(OracleError::PreconditionViolated("an edge polynomial has zeros off the axes"));
    }
    if samples.iter().any(|x| x[0] == 0.0 || x[1] == 0.0) {
        return Err(OracleError::PreconditionViolated("samples must avoid the axes"));
    }
    let p = build_polygon(f);
    let bound = rational::to_f64(&f.sum_abs_coeffs());
    let mut per_scale: Vec<(u32, f64, f64)> = Vec::new();
    for x in samples {
        let v = libm::fabs(f.eval(*x)) / eval_fstar(&p, *x);
        let k = scale_of(*x);
        match per_scale.iter_mut().find(|s| s.0 == k) {
            Some(s) => {
                s.1 = s.1.min(v);
                s.2 = s.2.max(v);
            }
            None => per_scale.push((k, v, v)),
        }
    }
    per_scale.sort_by_key(|s| s.0);
    let min = per_scale.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let max = per_scale.iter().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
    let minima: Vec<(u32, f64)> = per_scale.iter().map(|s| (s.0, s.1)).collect();
    let trend = scale_trend(&minima);
    let pass = min > 0.0 && libm::fabs(trend) <= trend_limit && max <= bound * (1.0 + EQUIVALENCE_ROUNDING);
    Ok(EquivalenceReport { min, max, bound, per_scale, trend, pass })
}

/// `lo * 2^{i / per_octave}` for `i = 0, 1, ...` up to `hi`.
pub fn dyadic_band_grid(lo: f64, hi: f64, per_octave: u32) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let l = lo * libm::exp2(f64::from(i) / f64::from(per_octave));
        if l > hi * (1.0 + 1e-12) {
            break;
        }
        out.push(l);
        i += 1;
    }
    out
}

/// `(lambda, |F|)` along axis 1 (`(lambda, 0)`) or 2 (`(0, lambda)`).
pub fn axis_samples(oi: &OscillatoryIntegral, axis: u8, grid: &[f64]) -> Result<Vec<(f64, f64)>, OracleError> {
    grid.iter()
        .map(|&l| {
            let at = if axis == 1 { FrequencyPoint::new(l, 0.0) } else { FrequencyPoint::new(0.0, l) };
            Ok((l, oi.eval(at)?.value.norm()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessOptions {
    pub band: usize,
    pub margin: f64,
}

impl Default for SharpnessOptions {
    fn default() -> Self {
        SharpnessOptions { band: 4, margin: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessReport {
    pub axis: u8,
    /// `epsilon_axis - 1`
    pub predicted: f64,
    pub fit: DecayFit,
    pub samples: Vec<(f64, f64)>,
    /// The band-max slope is at least `predicted - margin`: no sign of
    /// faster decay than predicted.
    pub pass: bool,
}

impl SharpnessReport {
    pub fn from_samples(axis: u8, predicted: f64, samples: Vec<(f64, f64)>, opts: &SharpnessOptions) -> Result<Self, OracleError> {
        let fit = band_max_fit(&samples, opts.band)?;
        let pass = fit.slope >= predicted - opts.margin;
        Ok(SharpnessReport { axis, predicted, fit, samples, pass })
    }
}

/// `epsilon_axis - 1` when the decay prediction applies and `epsilon_axis < 1`.
pub fn sharpness_prediction(f: &TermSum, rho: &Rational, axis: u8) -> Result<f64, OracleError> {
    if axis != 1 && axis != 2 {
        return Err(OracleError::PreconditionViolated("axis must be 1 or 2"));
    }
    let pred = theorem22_prediction(f, rho).map_err(|_| OracleError::PreconditionViolated("rho must be positive"))?;
    if !pred.applicable() {
        return Err(OracleError::Inapplicable(pred.reasons));
    }
    let pair = if axis == 1 { pred.pair1 } else { pred.pair2 }.expect("applicable predictions carry both pairs");
    if pair.epsilon >= rational::int(1) {
        return Err(OracleError::PreconditionViolated("epsilon must be below 1"));
    }
    Ok(rational::to_f64(&pair.bound_exponent()))
}

/// Band-maximum slope of `|F|` along `axis` against the predicted rate.
pub fn sharpness_probe(
    f: &TermSum,
    rho: &Rational,
    axis: u8,
    oi: &OscillatoryIntegral,
    grid: &[f64],
    opts: &SharpnessOptions,
) -> Result<SharpnessReport, OracleError> {
    let predicted = sharpness_prediction(f, rho, axis)?;
    let samples = axis_samples(oi, axis, grid)?;
    SharpnessReport::from_samples(axis, predicted, samples, opts)
}

/// Plain log-log slope of `|F|` along an axis.
pub fn axis_decay(oi: &OscillatoryIntegral, axis: u8, grid: &[f64]) -> Result<DecayFit, OracleError> {
    fit_frequency_decay(&axis_samples(oi, axis, grid)?)
}

/// `d(f)` as a float, for callers choosing `rho` grids.
pub fn newton_distance_f64(f: &TermSum) -> f64 {
    rational::to_f64(&newton_distance(&build_polygon(f)).0)
}
