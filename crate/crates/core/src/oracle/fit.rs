//! Log-log regression of decay and growth rates.

use alloc::vec::Vec;

use super::OracleError;

/// Margin by which the log model must beat the pure power model.
pub const LOG_MARGIN: f64 = 1.5;
pub const MIN_SAMPLES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub log_flag: bool,
    /// RMS residual of the chosen model, in natural-log units.
    pub residual: f64,
    pub sample_range: (f64, f64),
}

/// Least-squares line `y = c + s x`; returns `(c, s, rms residual)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let s = sxy / sxx;
    let c = my - s * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c - s * x) * (y - c - s * x)).sum();
    (c, s, libm::sqrt(ss / n))
}

fn check(samples: &[(f64, f64)]) -> Result<(), OracleError> {
    if samples.len() < MIN_SAMPLES {
        return Err(OracleError::TooFewSamples { got: samples.len(), need: MIN_SAMPLES });
    }
    if samples.iter().any(|&(x, v)| !(v > 0.0) || !(x > 0.0)) {
        return Err(OracleError::NonPositiveSample);
    }
    Ok(())
}

fn range(samples: &[(f64, f64)]) -> (f64, f64) {
    samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)))
}

/// Fits `value ~ C r^{-eps}` and `value ~ C r^{-eps} |ln r|` over samples
/// with `0 < r < 1`; the slope is the `eps` of the model with the smaller
/// residual, the log model needing to win by [`LOG_MARGIN`].
pub fn fit_power_log(samples: &[(f64, f64)]) -> Result<DecayFit, OracleError> {
    check(samples)?;
    if samples.iter().any(|&(r, _)| r >= 1.0) {
        return Err(OracleError::PreconditionViolated("sample abscissae must lie in (0, 1)"));
    }
    let xs: Vec<f64> = samples.iter().map(|&(r, _)| -libm::log(r)).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| libm::log(v)).collect();
    let (_, eps_a, res_a) = line_fit(&xs, &ys);
    let ys_b: Vec<f64> = ys.iter().zip(&xs).map(|(y, x)| y - libm::log(*x)).collect();
    let (_, eps_b, res_b) = line_fit(&xs, &ys_b);
    let log_flag = LOG_MARGIN * res_b < res_a;
    let (slope, residual) = if log_flag { (eps_b, res_b) } else { (eps_a, res_a) };
    Ok(DecayFit { slope, log_flag, residual, sample_range: range(samples) })
}

/// Slope of `ln |F|` against `ln lambda`.
pub fn fit_frequency_decay(samples: &[(f64, f64)]) -> Result<DecayFit, OracleError> {
    check(samples)?;
    let xs: Vec<f64> = samples.iter().map(|&(l, _)| libm::log(l)).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| libm::log(v)).collect();
    let (_, slope, residual) = line_fit(&xs, &ys);
    Ok(DecayFit { slope, log_flag: false, residual, sample_range: range(samples) })
}

/// Per-band maxima of consecutive groups of `band` samples (a trailing
/// partial band is dropped), each placed at the abscissa of its maximum.
pub fn band_maxima(samples: &[(f64, f64)], band: usize) -> Vec<(f64, f64)> {
    samples
        .chunks_exact(band.max(1))
        .map(|c| c.iter().copied().fold((0.0, f64::NEG_INFINITY), |b, s| if s.1 > b.1 { s } else { b }))
        .collect()
}

/// [`fit_frequency_decay`] on [`band_maxima`].
pub fn band_max_fit(samples: &[(f64, f64)], band: usize) -> Result<DecayFit, OracleError> {
    let mut fit = fit_frequency_decay(&band_maxima(samples, band))?;
    fit.sample_range = range(samples);
    Ok(fit)
}

/// Slopes of `ln v` against `ln x` between consecutive samples.
pub fn local_slopes(samples: &[(f64, f64)]) -> Vec<f64> {
    samples
        .windows(2)
        .map(|w| (libm::log(w[1].1) - libm::log(w[0].1)) / (libm::log(w[1].0) - libm::log(w[0].0)))
        .collect()
}

/// Dyadic abscissae `2^{-k}` for `k` in `range`.
pub fn dyadic_radii(range: core::ops::RangeInclusive<i32>) -> Vec<f64> {
    range.map(|k| libm::ldexp(1.0, -k)).collect()
}
