//! Reading `f` from an expression or a structured JSON file, and `rho`
//! values from the command line.

use std::path::Path;

use newton_decay_core::rational::{self, Rational};
use newton_decay_core::{parse_terms, MonomialTerm, TermSum};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot parse {text:?}: {source}")]
    Expression { text: String, source: newton_decay_core::ParseError },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed input file {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("record {index}: denominator must be nonzero")]
    ZeroDenominator { index: usize },
    #[error("invalid term sum: {0}")]
    Terms(#[from] newton_decay_core::TermsError),
    #[error("invalid rho {0:?}: expected p/q or a decimal")]
    Rho(String),
    #[error("give exactly one of --function and --input")]
    NoFunction,
}

/// One monomial `num/den * x1^a * x2^b`, with `|x1|`, `|x2|` when flagged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub num: i64,
    #[serde(default = "one")]
    pub den: i64,
    pub a: u32,
    pub b: u32,
    #[serde(default)]
    pub abs1: bool,
    #[serde(default)]
    pub abs2: bool,
}

fn one() -> i64 {
    1
}

/// Either a bare array of records or `{"terms": [...]}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum InputFile {
    Bare(Vec<TermRecord>),
    Wrapped { terms: Vec<TermRecord> },
}

pub fn from_records(records: &[TermRecord]) -> Result<TermSum, InputError> {
    let mut terms = Vec::with_capacity(records.len());
    for (index, r) in records.iter().enumerate() {
        if r.den == 0 {
            return Err(InputError::ZeroDenominator { index });
        }
        terms.push(MonomialTerm::with_abs(rational::ratio(r.num, r.den), r.a, r.b, r.abs1, r.abs2));
    }
    Ok(TermSum::new(terms)?)
}

/// Records of a term sum, or `None` when a coefficient overflows `i64`.
pub fn to_records(f: &TermSum) -> Option<Vec<TermRecord>> {
    f.terms()
        .iter()
        .map(|t| {
            Some(TermRecord {
                num: i64::try_from(t.coeff.numer()).ok()?,
                den: i64::try_from(t.coeff.denom()).ok()?,
                a: t.a,
                b: t.b,
                abs1: t.abs1,
                abs2: t.abs2,
            })
        })
        .collect()
}

pub fn parse_expression(text: &str) -> Result<TermSum, InputError> {
    parse_terms(text).map_err(|source| InputError::Expression { text: text.to_owned(), source })
}

pub fn read_input_file(path: &Path) -> Result<TermSum, InputError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: shown.clone(), source })?;
    let parsed: InputFile = serde_json::from_str(&text).map_err(|source| InputError::Json { path: shown, source })?;
    let records = match parsed {
        InputFile::Bare(r) | InputFile::Wrapped { terms: r } => r,
    };
    from_records(&records)
}

pub fn parse_rho(text: &str) -> Result<Rational, InputError> {
    rational::parse(text).ok_or_else(|| InputError::Rho(text.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip() {
        let f = parse_expression("|x1|^3 - 1/2*x1*x2 + x2^4").unwrap();
        assert_eq!(from_records(&to_records(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn file_forms() {
        let dir = tempfile::tempdir().unwrap();
        let bare = dir.path().join("bare.json");
        std::fs::write(&bare, r#"[{"num": 1, "a": 3, "b": 0}, {"num": 1, "den": 1, "a": 0, "b": 2}]"#).unwrap();
        let wrapped = dir.path().join("wrapped.json");
        std::fs::write(&wrapped, r#"{"terms": [{"num": 1, "a": 2, "b": 0, "abs1": true}, {"num": 1, "a": 0, "b": 2, "abs2": true}]}"#)
            .unwrap();
        assert_eq!(read_input_file(&bare).unwrap(), parse_expression("x1^3 + x2^2").unwrap());
        assert_eq!(read_input_file(&wrapped).unwrap(), parse_expression("|x1|^2 + |x2|^2").unwrap());
        std::fs::write(&bare, r#"[{"num": 1, "den": 0, "a": 1, "b": 0}]"#).unwrap();
        assert!(matches!(read_input_file(&bare), Err(InputError::ZeroDenominator { index: 0 })));
        std::fs::write(&bare, r#"[{"num": 2, "a": 0, "b": 0}]"#).unwrap();
        assert!(matches!(read_input_file(&bare), Err(InputError::Terms(_))));
    }

    #[test]
    fn rho_forms() {
        assert_eq!(parse_rho("3/4").unwrap(), rational::ratio(3, 4));
        assert_eq!(parse_rho("0.9").unwrap(), rational::ratio(9, 10));
        assert!(parse_rho("x").is_err());
    }
}
