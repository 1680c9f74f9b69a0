//! Scenario runner: builds operators, evaluates eigenpolynomials against the
//! asymptotic predictions and writes CSV tables plus a JSON manifest.

mod config;
mod experiments;
mod scenario;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;
use crate::scalar::{BigComplex, Scalar};

pub use config::{
    blob_hash, run_all, run_all_with, Config, Experiment, LoadedScenario, Metric, Report, ScenarioConfig, ScenarioSource, Threshold,
    ThresholdOutcome, BITS_ENV, DEFAULT_BITS,
};
pub use experiments::{
    run_c1_extraction, run_cauchy_transform, run_ratio_test, run_strong_asym, run_zero_map, ZeroMap,
};
pub use scenario::{build_masson_shapiro, jacobi4, legendre2, Scenario, ScenarioKind};

/// Column names of every result table.
pub const CSV_HEADER: [&str; 9] = [
    "scenario",
    "n",
    "z_re",
    "z_im",
    "measured_re",
    "measured_im",
    "predicted_re",
    "predicted_im",
    "rel_error",
];

/// A measured value, its prediction and `|measured/predicted - 1|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub measured: BigComplex,
    pub predicted: BigComplex,
    pub rel_error: f64,
}

/// One line of a result table. Rows whose numbers are not finite carry the
/// reason instead.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub n: usize,
    pub z: BigComplex,
    pub value: std::result::Result<Comparison, String>,
    pub aux: BTreeMap<String, String>,
}

/// `|m/p - 1|`, or `|m|` when `p = 0`.
pub fn rel_error(measured: &BigComplex, predicted: &BigComplex) -> f64 {
    if predicted.is_zero() {
        measured.abs_f64()
    } else {
        (measured.clone() / predicted - &BigComplex::one(predicted.ctx())).abs_f64()
    }
}

impl ResultRow {
    pub fn new(scenario: &str, n: usize, z: &BigComplex, measured: BigComplex, predicted: BigComplex) -> Self {
        let value = if !measured.is_finite() || !predicted.is_finite() {
            Err(format!("non-finite value: measured {measured}, predicted {predicted}"))
        } else {
            let e = rel_error(&measured, &predicted);
            if e.is_finite() {
                Ok(Comparison {
                    measured,
                    predicted,
                    rel_error: e,
                })
            } else {
                Err(format!("relative error overflows: measured {measured}, predicted {predicted}"))
            }
        };
        ResultRow {
            scenario: scenario.to_string(),
            n,
            z: z.clone(),
            value,
            aux: BTreeMap::new(),
        }
    }

    pub fn failed(scenario: &str, n: usize, z: &BigComplex, reason: String) -> Self {
        ResultRow {
            scenario: scenario.to_string(),
            n,
            z: z.clone(),
            value: Err(reason),
            aux: BTreeMap::new(),
        }
    }

    pub fn rel_error(&self) -> Option<f64> {
        self.value.as_ref().ok().map(|c| c.rel_error)
    }

    pub fn measured(&self) -> Option<&BigComplex> {
        self.value.as_ref().ok().map(|c| &c.measured)
    }

    fn record(&self) -> [String; 9] {
        let (zr, zi) = self.z.format_parts();
        match &self.value {
            Ok(c) => {
                let (mr, mi) = c.measured.format_parts();
                let (pr, pi) = c.predicted.format_parts();
                [
                    self.scenario.clone(),
                    self.n.to_string(),
                    zr,
                    zi,
                    mr,
                    mi,
                    pr,
                    pi,
                    format!("{:e}", c.rel_error),
                ]
            }
            Err(e) => [
                self.scenario.clone(),
                self.n.to_string(),
                zr,
                zi,
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ],
        }
    }
}

fn cmp_point(a: &BigComplex, b: &BigComplex) -> Ordering {
    a.re()
        .partial_cmp(b.re())
        .unwrap_or(Ordering::Equal)
        .then(a.im().partial_cmp(b.im()).unwrap_or(Ordering::Equal))
}

/// Order rows by scenario, then degree, then point.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.n.cmp(&b.n))
            .then_with(|| cmp_point(&a.z, &b.z))
    });
}

/// Write rows as CSV, full-precision decimals, in [`sort_rows`] order.
pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// The precision from the environment override, if set.
pub fn precision_override() -> Result<Option<u32>> {
    match std::env::var(BITS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&b| b >= 53)
            .map(Some)
            .ok_or_else(|| crate::error::Error::Config(format!("{BITS_ENV}={v:?} is not a precision of at least 53 bits"))),
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(64, re, im)
    }

    #[test]
    fn rel_error_definition() {
        assert_eq!(rel_error(&c(3.0, 0.0), &c(2.0, 0.0)), 0.5);
        assert_eq!(rel_error(&c(0.0, 2.0), &c(0.0, 0.0)), 2.0);
    }

    #[test]
    fn nonfinite_rows_become_error_records() {
        let inf = BigComplex::from_f64(64, f64::INFINITY, 0.0);
        let r = ResultRow::new("s", 1, &c(2.0, 0.0), inf, c(1.0, 0.0));
        assert!(r.value.is_err());
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("error: non-finite"));
    }

    #[test]
    fn csv_rows_are_sorted() {
        let rows = vec![
            ResultRow::new("b", 1, &c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)),
            ResultRow::new("a", 2, &c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)),
            ResultRow::new("a", 2, &c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)),
            ResultRow::new("a", 1, &c(5.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let keys: Vec<String> = text
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{}", f[0], f[1], f[2].parse::<f64>().unwrap())
            })
            .collect();
        assert_eq!(keys, ["a,1,5", "a,2,0", "a,2,1", "b,1,0"]);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    }
}
