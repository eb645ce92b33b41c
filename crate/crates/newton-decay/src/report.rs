//! JSON report types. Rationals are `"p/q"` strings; field order is fixed,
//! so equal inputs serialize to equal bytes.

use newton_decay_core::asymptotics::EnvelopeTable;
use newton_decay_core::diagnosis::EdgeReport;
use newton_decay_core::rational::{self, Rational};
use newton_decay_core::{
    build_polygon, decay_pair, is_well_behaved, lemma21_sum, newton_distance, theorem22_prediction, AsymptoticsError,
    NewtonPolygon, PowerLogSum, QuadrantSign, TermSum, WellBehavedReport,
};
use serde::Serialize;

use crate::input::{to_records, TermRecord};

pub const SCHEMA: &str = "newton-decay/1";

pub fn q(r: &Rational) -> String {
    rational::format(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub expression: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermRecord>>,
}

impl InputEcho {
    pub fn new(f: &TermSum) -> Self {
        InputEcho { expression: f.to_string(), terms: to_records(f) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeRecord {
    pub m: String,
    pub support: Vec<[u32; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonRecord {
    pub vertices: Vec<[u32; 2]>,
    pub edges: Vec<EdgeRecord>,
    pub d: String,
}

impl PolygonRecord {
    pub fn new(p: &NewtonPolygon) -> Self {
        PolygonRecord {
            vertices: p.vertices().iter().map(|v| [v.v1, v.v2]).collect(),
            edges: p
                .edges()
                .iter()
                .map(|e| EdgeRecord { m: q(&e.m), support: e.support.iter().map(|&(a, b)| [a, b]).collect() })
                .collect(),
            d: q(&newton_distance(p).0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRecord {
    pub quadrant: [i8; 2],
    /// Isolating interval `(lo, hi]` of the positive slice root.
    pub interval: [String; 2],
    pub order: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeZerosRecord {
    pub m: String,
    pub zeros: Vec<ZeroRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vanishing_quadrants: Vec<[i8; 2]>,
}

fn signs(q: QuadrantSign) -> [i8; 2] {
    [q.s1, q.s2]
}

impl EdgeZerosRecord {
    fn new(e: &EdgeReport) -> Self {
        EdgeZerosRecord {
            m: q(&e.edge.m),
            zeros: e
                .zeros
                .iter()
                .map(|z| ZeroRecord {
                    quadrant: signs(z.quadrant),
                    interval: [q(&z.t_root.lo), q(&z.t_root.hi)],
                    order: z.order,
                })
                .collect(),
            vanishing_quadrants: e.vanishing_quadrants.iter().copied().map(signs).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WellBehavedRecord {
    pub verdict: bool,
    pub d: String,
    pub max_order: u32,
    pub slope_minus_one_violation: bool,
    pub degenerate: bool,
    pub edges: Vec<EdgeZerosRecord>,
}

impl WellBehavedRecord {
    pub fn new(r: &WellBehavedReport) -> Self {
        WellBehavedRecord {
            verdict: r.verdict,
            d: q(&r.d.0),
            max_order: r.max_order,
            slope_minus_one_violation: r.slope_minus_one_violation,
            degenerate: r.degenerate,
            edges: r.edges.iter().map(EdgeZerosRecord::new).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerLogRecord {
    pub coeff: String,
    pub alpha: String,
    pub logpow: u32,
}

fn power_log(s: &PowerLogSum) -> Vec<PowerLogRecord> {
    s.terms().iter().map(|t| PowerLogRecord { coeff: q(&t.coeff), alpha: q(&t.alpha), logpow: t.logpow }).collect()
}

/// Slice decay along one axis, or why it is missing.
#[derive(Clone, Debug, Serialize)]
pub struct AxisRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_sum: Option<Vec<PowerLogRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl AxisRecord {
    fn new(p: &NewtonPolygon, rho: &Rational) -> Self {
        let empty = AxisRecord { epsilon: None, d: None, slice_sum: None, error: None };
        match lemma21_sum(p, rho).and_then(|s| decay_pair(&s).map(|pair| (s, pair))) {
            Ok((s, pair)) => AxisRecord {
                epsilon: Some(q(&pair.epsilon)),
                d: Some(pair.d),
                slice_sum: Some(power_log(&s)),
                ..empty
            },
            Err(e) => AxisRecord { error: Some(e.to_string()), ..empty },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinedRecord {
    pub axis: u8,
    pub epsilon: String,
    pub d: u32,
    /// `epsilon - 1` in `|F| <= C (2 + |lambda|)^{epsilon - 1} ln^d`.
    pub exponent: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopePieceRecord {
    pub region: usize,
    pub alpha1: String,
    pub alpha2: String,
    pub log1: u32,
    pub log2: u32,
    /// Range of `ln|lambda2| / ln|lambda1|`; `null` upper end is unbounded.
    pub mu_lo: String,
    pub mu_hi: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoRecord {
    pub rho: String,
    pub axis1: AxisRecord,
    pub axis2: AxisRecord,
    pub applicable: bool,
    pub reasons: Vec<String>,
    pub combined: Option<CombinedRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Vec<EnvelopePieceRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_error: Option<String>,
}

impl RhoRecord {
    pub fn new(f: &TermSum, p: &NewtonPolygon, rho: &Rational) -> Result<Self, AsymptoticsError> {
        let pred = theorem22_prediction(f, rho)?;
        let combined = if pred.applicable() {
            pred.combined().map(|(axis, pair)| CombinedRecord {
                axis,
                epsilon: q(&pair.epsilon),
                d: pair.d,
                exponent: q(&pair.bound_exponent()),
            })
        } else {
            None
        };
        let (envelope, envelope_error) = match EnvelopeTable::new(p, rho) {
            Ok(t) => (
                Some(
                    t.pieces()
                        .into_iter()
                        .map(|e| EnvelopePieceRecord {
                            region: e.region,
                            alpha1: q(&e.alpha1),
                            alpha2: q(&e.alpha2),
                            log1: e.log1,
                            log2: e.log2,
                            mu_lo: q(&e.mu_lo),
                            mu_hi: e.mu_hi.as_ref().map(q),
                        })
                        .collect(),
                ),
                None,
            ),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(RhoRecord {
            rho: q(rho),
            axis1: AxisRecord::new(p, rho),
            axis2: AxisRecord::new(&newton_decay_core::reflect_polygon(p), rho),
            applicable: pred.applicable(),
            reasons: pred.reasons.iter().map(|r| format!("{r:?}")).collect(),
            combined,
            envelope,
            envelope_error,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub input: InputEcho,
    pub polygon: PolygonRecord,
    pub d: String,
    pub well_behaved: WellBehavedRecord,
    pub rho: Vec<RhoRecord>,
}

impl AnalysisReport {
    /// Pure aggregation of the exact modules. `rho` values must be positive.
    pub fn new(f: &TermSum, rhos: &[Rational]) -> Result<Self, AsymptoticsError> {
        let p = build_polygon(f);
        let wb = is_well_behaved(f);
        let rho = rhos.iter().map(|r| RhoRecord::new(f, &p, r)).collect::<Result<Vec<_>, _>>()?;
        Ok(AnalysisReport {
            schema: SCHEMA,
            input: InputEcho::new(f),
            d: q(&wb.d.0),
            polygon: PolygonRecord::new(&p),
            well_behaved: WellBehavedRecord::new(&wb),
            rho,
        })
    }

    /// Some `rho` was requested and none of them gives an applicable bound.
    pub fn inapplicable_only(&self) -> bool {
        !self.rho.is_empty() && self.rho.iter().all(|r| !r.applicable)
    }

    /// One CSV row per `rho`.
    pub fn csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rho", "epsilon1", "d1", "epsilon2", "d2", "applicable", "combined_exponent", "combined_log"])?;
        for r in &self.rho {
            let opt = |s: &Option<String>| s.clone().unwrap_or_default();
            let optn = |n: Option<u32>| n.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                r.rho.clone(),
                opt(&r.axis1.epsilon),
                optn(r.axis1.d),
                opt(&r.axis2.epsilon),
                optn(r.axis2.d),
                r.applicable.to_string(),
                r.combined.as_ref().map(|c| c.exponent.clone()).unwrap_or_default(),
                r.combined.as_ref().map(|c| c.d.to_string()).unwrap_or_default(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }
}
