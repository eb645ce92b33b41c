//! Oracle checks of the symbolic predictions, one [`Check`] per suite,
//! `rho` and axis.

use std::time::Instant;

use newton_decay_core::oracle::checks::{
    comparability_preconditions, comparability_ratio, dyadic_band_grid, sharpness_prediction, EQUIVALENCE_ROUNDING,
};
use newton_decay_core::oracle::fit::dyadic_radii;
use newton_decay_core::oracle::{
    check_fstar_equivalence, fit_frequency_decay, fit_power_log, slice_integral, ComparabilityOptions,
    ComparabilityReport, CutoffKind, CutoffSpec, DyadicRectangle, FrequencyPoint, OracleError, OscillatoryIntegral,
    SharpnessOptions, SharpnessReport,
};
use newton_decay_core::rational::{self, Rational};
use newton_decay_core::{
    build_polygon, decay_pair, lemma21_sum, reflect_polygon, theorem22_prediction, theorem23_envelope,
    NewtonPolygon, QuadrantSign, TermSum,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::parallel::Pool;
use crate::report::{q, InputEcho, SCHEMA};

/// Fitted slice exponent tolerance.
pub const SLICE_SLOPE_TOL: f64 = 0.02;
/// Fitted frequency-decay slope tolerance.
pub const DECAY_SLOPE_TOL: f64 = 0.15;
/// Trend limit of the per-scale minima of `|f| / f*`.
pub const EQUIVALENCE_TREND: f64 = 0.05;
/// Largest `j`, `k` of the comparability rectangles.
pub const COMPARABILITY_SCALES: u32 = 12;
/// `r0` of the slice integral.
pub const SLICE_R0: f64 = 0.25;
/// Equivalence samples per dyadic shell, over shells `1..=20`.
const SHELL_SAMPLES: usize = 64;
const SHELLS: i32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Slice,
    Comparability,
    Equivalence,
    Oscillatory,
    Sharpness,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Slice, Suite::Comparability, Suite::Equivalence, Suite::Oscillatory, Suite::Sharpness],
            s => vec![s],
        }
    }

    pub fn needs_rho(self) -> bool {
        self != Suite::Equivalence
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Quadrature tolerance of the rectangle and transform oracles.
    pub tol: f64,
    /// Largest frequency sampled; the decay grids span `[lambda_max / 32, lambda_max]`.
    pub lambda_max: f64,
    /// Cutoff radius.
    pub radius: f64,
    pub seed: u64,
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: 1e-6, lambda_max: 512.0, radius: 0.25, seed: 0, timings: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub rho: Option<String>,
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    pub tolerance: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    #[serde(skip)]
    pub budget_exceeded: bool,
}

impl Check {
    fn new(name: String, rho: Option<&Rational>) -> Self {
        Check {
            name,
            rho: rho.map(q),
            status: Status::Skipped,
            measured: Value::Null,
            expected: Value::Null,
            tolerance: Value::Null,
            detail: None,
            runtime_ms: None,
            budget_exceeded: false,
        }
    }

    fn skipped(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.detail = Some(why.into());
        self
    }

    fn errored(mut self, e: &OracleError) -> Self {
        self.status = Status::Fail;
        self.budget_exceeded = matches!(e, OracleError::BudgetExceeded);
        self.detail = Some(e.to_string());
        self
    }

    fn judged(mut self, pass: bool) -> Self {
        self.status = if pass { Status::Pass } else { Status::Fail };
        self
    }
}

/// A CSV file to write beside the JSON report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub file: String,
    pub content: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub input: InputEcho,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub tol: f64,
    pub lambda_max: f64,
    pub radius: f64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const INAPPLICABLE: i32 = 3;
    pub const CHECK_FAILED: i32 = 4;
    pub const BUDGET: i32 = 5;
}

impl VerificationReport {
    /// 5 on an exhausted oracle budget, else 4 on a failure, else 3 when a
    /// check was skipped, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.budget_exceeded) {
            exit::BUDGET
        } else if self.checks.iter().any(|c| c.status == Status::Fail) {
            exit::CHECK_FAILED
        } else if self.checks.iter().any(|c| c.status == Status::Skipped) {
            exit::INAPPLICABLE
        } else {
            exit::OK
        }
    }

    /// One CSV row per check.
    pub fn csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "rho", "status", "measured", "expected", "tolerance", "detail"])?;
        for c in &self.checks {
            let status = serde_json::to_value(c.status).expect("status serializes");
            w.write_record([
                c.name.as_str(),
                c.rho.as_deref().unwrap_or(""),
                status.as_str().unwrap_or(""),
                &c.measured.to_string(),
                &c.expected.to_string(),
                &c.tolerance.to_string(),
                c.detail.as_deref().unwrap_or(""),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }
}

fn file_tag(rho: &Rational) -> String {
    q(rho).replace('/', "_").replace('-', "m")
}

fn quadrant_tag(s: QuadrantSign) -> &'static str {
    match (s.s1 > 0, s.s2 > 0) {
        (true, true) => "++",
        (false, true) => "-+",
        (false, false) => "--",
        (true, false) => "+-",
    }
}

fn csv_string<R: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: R) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

/// Frequency samples `(lambda1, lambda2, re, im, abs, predicted_envelope)`.
fn frequency_csv(points: &[(FrequencyPoint, num_complex::Complex64)], p: &NewtonPolygon, rho: &Rational) -> String {
    let rows = points.iter().map(|(l, v)| {
        let env = theorem23_envelope(p, rho, [l.lambda1, l.lambda2]).map(|e| e.value.to_string()).unwrap_or_default();
        vec![l.lambda1.to_string(), l.lambda2.to_string(), v.re.to_string(), v.im.to_string(), v.norm().to_string(), env]
    });
    csv_string(&["lambda1", "lambda2", "re", "im", "abs", "predicted_envelope"], rows)
}

struct Ctx<'a> {
    f: &'a TermSum,
    p: NewtonPolygon,
    opts: VerifyOptions,
    pool: &'a Pool,
    artifacts: Vec<Artifact>,
}

impl Ctx<'_> {
    fn cutoff(&self) -> CutoffSpec {
        CutoffSpec::new(CutoffKind::SmoothBump, self.opts.radius)
    }

    fn timed(&self, start: Instant, mut c: Check) -> Check {
        if self.opts.timings {
            c.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        c
    }

    fn slice(&mut self, rho: &Rational, axis: u8) -> Check {
        let start = Instant::now();
        let c = Check::new(format!("slice/axis{axis}"), Some(rho));
        let p = if axis == 1 { self.p.clone() } else { reflect_polygon(&self.p) };
        let pair = match lemma21_sum(&p, rho).and_then(|s| decay_pair(&s)) {
            Ok(pair) => pair,
            Err(e) => return self.timed(start, c.skipped(e.to_string())),
        };
        let rho_f = rational::to_f64(rho);
        let radii = dyadic_radii(6..=18);
        let values = self.pool.map(&radii, |&r| slice_integral(&p, rho_f, r, SLICE_R0));
        let samples = match radii.iter().zip(values).map(|(&r, v)| v.map(|v| (r, v))).collect::<Result<Vec<_>, _>>() {
            Ok(s) => s,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        self.artifacts.push(Artifact {
            file: format!("slice_rho{}_axis{axis}.csv", file_tag(rho)),
            content: csv_string(&["r", "value"], samples.iter().map(|(r, v)| vec![r.to_string(), v.to_string()])),
        });
        let fit = match fit_power_log(&samples) {
            Ok(fit) => fit,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        let eps = rational::to_f64(&pair.epsilon);
        let pass = (fit.slope - eps).abs() <= SLICE_SLOPE_TOL && fit.log_flag == (pair.d == 1);
        let mut c = c.judged(pass);
        c.measured = json!({ "slope": fit.slope, "log_flag": fit.log_flag, "residual": fit.residual });
        c.expected = json!({ "epsilon": q(&pair.epsilon), "d": pair.d });
        c.tolerance = json!({ "slope": SLICE_SLOPE_TOL });
        self.timed(start, c)
    }

    fn comparability(&mut self, rho: &Rational) -> Check {
        let start = Instant::now();
        let c = Check::new("comparability".into(), Some(rho));
        let rho_f = rational::to_f64(rho);
        let p = match comparability_preconditions(self.f, rho_f) {
            Ok(p) => p,
            Err(e) => return self.timed(start, c.skipped(e.to_string())),
        };
        let opts = ComparabilityOptions { tol: self.opts.tol, ..ComparabilityOptions::default() };
        let rects = DyadicRectangle::grid(1..=COMPARABILITY_SCALES);
        let f = self.f;
        let ratios = self.pool.map(&rects, |r| comparability_ratio(f, &p, rho_f, r, opts.tol));
        let ratios = match ratios.into_iter().collect::<Result<Vec<_>, _>>() {
            Ok(r) => r,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        let report = ComparabilityReport::from_ratios(ratios, &opts);
        self.artifacts.push(Artifact {
            file: format!("ratios_rho{}.csv", file_tag(rho)),
            content: csv_string(
                &["j", "k", "quadrant", "ratio"],
                report.ratios.iter().map(|s| {
                    vec![s.rect.j.to_string(), s.rect.k.to_string(), quadrant_tag(s.rect.quadrant).into(), s.ratio.to_string()]
                }),
            ),
        });
        let mut c = c.judged(report.pass);
        c.measured = json!({ "min": report.min, "max": report.max, "spread": report.spread, "trend": report.trend });
        c.expected = json!({ "spread_at_most": opts.band, "trend": 0.0 });
        c.tolerance = json!({ "trend": opts.trend_limit, "quadrature": opts.tol });
        self.timed(start, c)
    }

    fn equivalence(&mut self) -> Check {
        let start = Instant::now();
        let c = Check::new("equivalence".into(), None);
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let mut samples = Vec::with_capacity(SHELL_SAMPLES * SHELLS as usize);
        for k in 1..=SHELLS {
            while samples.len() < SHELL_SAMPLES * k as usize {
                let r = (0.5 + 0.5 * rng.gen::<f64>()) * 2f64.powi(-k);
                let t = std::f64::consts::TAU * rng.gen::<f64>();
                let x = [r * t.cos(), r * t.sin()];
                if x[0].abs() > 1e-6 * r && x[1].abs() > 1e-6 * r {
                    samples.push(x);
                }
            }
        }
        let report = match check_fstar_equivalence(self.f, &samples, EQUIVALENCE_TREND) {
            Ok(r) => r,
            Err(OracleError::PreconditionViolated(why)) => return self.timed(start, c.skipped(why)),
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        let mut c = c.judged(report.pass);
        c.measured = json!({ "min": report.min, "max": report.max, "trend": report.trend });
        c.expected = json!({ "min_above": 0.0, "max_at_most": report.bound, "trend": 0.0 });
        c.tolerance = json!({ "trend": EQUIVALENCE_TREND, "max_relative": EQUIVALENCE_ROUNDING });
        self.timed(start, c)
    }

    fn transform(&self, rho: &Rational) -> Result<OscillatoryIntegral, OracleError> {
        OscillatoryIntegral::new(self.f, rational::to_f64(rho), self.cutoff(), self.opts.tol)
    }

    fn axis_points(&self, oi: &OscillatoryIntegral, axis: u8, grid: &[f64]) -> Result<Vec<(FrequencyPoint, num_complex::Complex64)>, OracleError> {
        let points: Vec<FrequencyPoint> = grid
            .iter()
            .map(|&l| if axis == 1 { FrequencyPoint::new(l, 0.0) } else { FrequencyPoint::new(0.0, l) })
            .collect();
        let values = self.pool.map(&points, |&l| oi.eval(l).map(|v| (l, v.value)));
        values.into_iter().collect()
    }

    fn oscillatory(&mut self, rho: &Rational, oi: &mut Option<Result<OscillatoryIntegral, OracleError>>, axis: u8) -> Check {
        let start = Instant::now();
        let c = Check::new(format!("oscillatory/axis{axis}"), Some(rho));
        let pred = match theorem22_prediction(self.f, rho) {
            Ok(p) if p.applicable() => p,
            Ok(p) => return self.timed(start, c.skipped(format!("decay bound does not apply: {:?}", p.reasons))),
            Err(e) => return self.timed(start, c.skipped(e.to_string())),
        };
        let pair = if axis == 1 { pred.pair1 } else { pred.pair2 }.expect("applicable predictions carry both pairs");
        let oi = match oi.get_or_insert_with(|| self.transform(rho)) {
            Ok(oi) => &*oi,
            Err(e) => return self.timed(start, c.errored(e)),
        };
        let hi = self.opts.lambda_max;
        let grid: Vec<f64> = (0..6).map(|k| hi / f64::from(1u32 << (5 - k))).collect();
        let points = match self.axis_points(oi, axis, &grid) {
            Ok(v) => v,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        self.artifacts.push(Artifact {
            file: format!("transform_rho{}_axis{axis}.csv", file_tag(rho)),
            content: frequency_csv(&points, &self.p, rho),
        });
        let samples: Vec<(f64, f64)> = grid.iter().zip(&points).map(|(&l, (_, v))| (l, v.norm())).collect();
        let fit = match fit_frequency_decay(&samples) {
            Ok(fit) => fit,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        let predicted = rational::to_f64(&pair.bound_exponent());
        let mut c = c.judged((fit.slope - predicted).abs() <= DECAY_SLOPE_TOL);
        c.measured = json!({ "slope": fit.slope, "residual": fit.residual, "lambda_range": [grid[0], hi] });
        c.expected = json!({ "slope": q(&pair.bound_exponent()), "log_power": pair.d });
        c.tolerance = json!({ "slope": DECAY_SLOPE_TOL });
        self.timed(start, c)
    }

    fn sharpness(&mut self, rho: &Rational, oi: &mut Option<Result<OscillatoryIntegral, OracleError>>, axis: u8) -> Check {
        let start = Instant::now();
        let c = Check::new(format!("sharpness/axis{axis}"), Some(rho));
        let predicted = match sharpness_prediction(self.f, rho, axis) {
            Ok(p) => p,
            Err(e) => return self.timed(start, c.skipped(e.to_string())),
        };
        let oi = match oi.get_or_insert_with(|| self.transform(rho)) {
            Ok(oi) => &*oi,
            Err(e) => return self.timed(start, c.errored(e)),
        };
        let hi = self.opts.lambda_max;
        let grid = dyadic_band_grid(hi / 32.0, hi, 8);
        let points = match self.axis_points(oi, axis, &grid) {
            Ok(v) => v,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        self.artifacts.push(Artifact {
            file: format!("sharpness_rho{}_axis{axis}.csv", file_tag(rho)),
            content: frequency_csv(&points, &self.p, rho),
        });
        let samples: Vec<(f64, f64)> = grid.iter().zip(&points).map(|(&l, (_, v))| (l, v.norm())).collect();
        let opts = SharpnessOptions::default();
        let report = match SharpnessReport::from_samples(axis, predicted, samples, &opts) {
            Ok(r) => r,
            Err(e) => return self.timed(start, c.errored(&e)),
        };
        let mut c = c.judged(report.pass);
        c.measured = json!({ "band_max_slope": report.fit.slope, "residual": report.fit.residual });
        c.expected = json!({ "slope_at_least": predicted - opts.margin, "predicted": predicted });
        c.tolerance = json!({ "margin": opts.margin, "band": opts.band });
        self.timed(start, c)
    }
}

/// Runs `suites` for every `rho`; the equivalence suite ignores `rho`.
pub fn run(f: &TermSum, rhos: &[Rational], suites: &[Suite], opts: VerifyOptions, pool: &Pool) -> VerificationReport {
    let mut ctx = Ctx { f, p: build_polygon(f), opts, pool, artifacts: Vec::new() };
    let expanded: Vec<Suite> = {
        let mut v: Vec<Suite> = suites.iter().flat_map(|s| s.expand()).collect();
        v.dedup();
        v
    };
    let mut checks = Vec::new();
    for &suite in &expanded {
        if suite == Suite::Equivalence {
            checks.push(ctx.equivalence());
            continue;
        }
        for rho in rhos {
            match suite {
                Suite::Slice => {
                    checks.push(ctx.slice(rho, 1));
                    checks.push(ctx.slice(rho, 2));
                }
                Suite::Comparability => checks.push(ctx.comparability(rho)),
                Suite::Oscillatory | Suite::Sharpness => {
                    // built on first use, shared by both axes
                    let mut oi = None;
                    for axis in [1, 2] {
                        checks.push(if suite == Suite::Oscillatory {
                            ctx.oscillatory(rho, &mut oi, axis)
                        } else {
                            ctx.sharpness(rho, &mut oi, axis)
                        });
                    }
                }
                Suite::Equivalence | Suite::All => unreachable!("expanded above"),
            }
        }
    }
    VerificationReport {
        schema: SCHEMA,
        input: InputEcho::new(f),
        suites: expanded,
        seed: opts.seed,
        tol: opts.tol,
        lambda_max: opts.lambda_max,
        radius: opts.radius,
        checks,
        artifacts: ctx.artifacts,
    }
}
