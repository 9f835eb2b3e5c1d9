//! Report types shared by the suite drivers and the CLI, plus the CSV and
//! JSON emitters. Emission is byte-stable for a fixed seed: floats go
//! through the shortest round-trip formatter and wall-clock fields stay
//! zero unless timings were explicitly requested.

use serde::{Deserialize, Serialize};

/// One named predicate with its achieved residual. A positive residual
/// measures how far past the tolerance the check landed; checks that pass
/// keep the signed slack for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

impl Check {
    pub fn new(name: &str, pass: bool, residual: f64) -> Self {
        Check {
            name: name.to_string(),
            pass,
            residual,
        }
    }
}

/// Per-stage wall clock in milliseconds. All zero unless the run asked for
/// timings, which keeps reports reproducible byte for byte.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimes {
    pub normj_ms: u64,
    pub ehz_ms: u64,
    pub witness_ms: u64,
    pub search_ms: u64,
}

impl StageTimes {
    pub fn total_ms(&self) -> u64 {
        self.normj_ms + self.ehz_ms + self.witness_ms + self.search_ms
    }
}

/// Everything the bounds pipeline knows about one body. The capacity is
/// never collapsed to a single number; consumers get the bracket
/// [max(lower, ehz certificate), min(witness_shadow, cyl_lin)] and the
/// list of checks that certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub body_id: String,
    /// Half dimension: the body lives in R^{2n}.
    pub n: usize,
    pub normj: f64,
    /// 1/normj, the capacity lower bound.
    pub lower: f64,
    pub ehz: f64,
    pub ehz_method: String,
    /// Shadow of the Hahn-Banach witness map; certified <= 4/normj.
    pub witness_shadow: f64,
    /// Best shadow found by the chart search.
    pub cyl_lin: f64,
    /// Objective evaluations spent by the search.
    pub cyl_lin_budget: usize,
    /// 4/normj, the linearized capacity upper bound.
    pub upper: f64,
    pub chain_ok: bool,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub runtime: StageTimes,
}

impl BoundsReport {
    pub fn certified(&self) -> bool {
        self.chain_ok && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

pub const CSV_HEADER: &str =
    "body_id,n,normj,lower,ehz,ehz_method,witness_shadow,cyl_lin,upper,chain_ok,seed,runtime_ms";

/// Render reports in the requested format. CSV holds the flat per-body
/// columns; JSON mirrors [`BoundsReport`] field for field.
pub fn emit_report(reports: &[BoundsReport], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in reports {
                // Body ids never contain commas, so no quoting is needed.
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.body_id,
                    r.n,
                    r.normj,
                    r.lower,
                    r.ehz,
                    r.ehz_method,
                    r.witness_shadow,
                    r.cyl_lin,
                    r.upper,
                    r.chain_ok,
                    r.seed,
                    r.runtime.total_ms()
                ));
            }
            out
        }
        Format::Json => to_json(reports),
    }
}

pub fn all_certified(reports: &[BoundsReport]) -> bool {
    reports.iter().all(BoundsReport::certified)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}
