//! Weighted inequalities run as numerical experiments.
//!
//! Each experiment evaluates a left and a right side for every case of a
//! battery (functions × weights × levels), at the base resolution and at
//! each refinement of it, and reports the worst ratio per resolution. The
//! constants in the inequalities are existential, so the outcome is an
//! empirical constant plus a verdict on how it moves under refinement:
//!
//! * `BOUNDED-STABLE`: every ratio finite, sup ratio drifts by at most the
//!   configured tolerance (15% by default) between the first and last grid;
//! * `UNSTABLE`: finite ratios, larger drift;
//! * `FAIL`: an infinite ratio, or a refused precondition.

mod battery;
mod config;
mod experiments;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

pub use battery::standard_battery;
pub use config::{BatterySpec, ExperimentConfig, Refinement, SigmaRule, SCHEMA_VERSION};
pub use experiments::{threshold_weight_experiment, run_experiment, ThresholdWeightOptions, ThresholdWeightReport, Experiment};

use crate::error::{Error, Result};

/// `max{(θ + N1)/c, 2 N0 / (1 - (N0+1) c)} + 1e-6`: a damping exponent large
/// enough for the weak-type argument.
pub fn sufficient_sigma(theta: f64, n0: f64, n1: f64, c: f64) -> Result<f64> {
    if !(theta >= 0.0 && n0 >= 1.0 && n1 >= 0.0) {
        return Err(Error::param("θ, N0, N1", "need θ >= 0, N0 >= 1, N1 >= 0"));
    }
    if !(c > 0.0 && c < 1.0 / (n0 + 1.0)) {
        return Err(Error::param("c", format!("must lie in (0, 1/(N0+1)) = (0, {}), got {c}", 1.0 / (n0 + 1.0))));
    }
    Ok(((theta + n1) / c).max(2.0 * n0 / (1.0 - (n0 + 1.0) * c)) + 1e-6)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "BOUNDED-STABLE")]
    BoundedStable,
    #[serde(rename = "UNSTABLE")]
    Unstable,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BoundedStable => "BOUNDED-STABLE",
            Verdict::Unstable => "UNSTABLE",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub case_id: String,
    /// Cells per axis of the grid this case ran on.
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl CaseResult {
    /// `lhs/rhs`, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
    pub fn new(case_id: String, n: usize, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 {
            0.0
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        CaseResult {
            case_id,
            n,
            lhs,
            rhs,
            ratio,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub n: usize,
    pub sup_ratio: f64,
    pub worst_case: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub experiment: String,
    /// Resolved parameters (σ, θ, γ, constants), by name.
    pub parameters: BTreeMap<String, f64>,
    pub cases: Vec<CaseResult>,
    pub levels: Vec<LevelSummary>,
    /// `|last - first| / first` of the per-level sup ratios.
    pub drift: f64,
    /// `last / first - 1` of the per-level sup ratios.
    pub growth: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl RatioReport {
    /// A report for an experiment that refused to run.
    pub fn refused(experiment: &str, parameters: BTreeMap<String, f64>, note: String) -> Self {
        RatioReport {
            experiment: experiment.to_string(),
            parameters,
            cases: Vec::new(),
            levels: Vec::new(),
            drift: 0.0,
            growth: 0.0,
            verdict: Verdict::Fail,
            notes: vec![note],
        }
    }

    /// Assembles per-level case lists into a report and applies the verdict
    /// rules.
    pub fn assemble(
        experiment: &str,
        parameters: BTreeMap<String, f64>,
        per_level: Vec<(usize, Vec<CaseResult>)>,
        tolerance: f64,
        notes: Vec<String>,
    ) -> Self {
        let levels: Vec<LevelSummary> = per_level
            .iter()
            .map(|(n, cases)| {
                let mut sup = 0.0f64;
                let mut worst = None;
                for c in cases {
                    if c.ratio > sup || (c.ratio.is_nan() && !sup.is_nan()) {
                        sup = c.ratio;
                        worst = Some(c.case_id.clone());
                    }
                }
                LevelSummary {
                    n: *n,
                    sup_ratio: sup,
                    worst_case: worst,
                }
            })
            .collect();
        let first = levels.first().map_or(0.0, |l| l.sup_ratio);
        let last = levels.last().map_or(0.0, |l| l.sup_ratio);
        let (drift, growth) = if first == 0.0 && last == 0.0 {
            (0.0, 0.0)
        } else {
            ((last - first).abs() / first, last / first - 1.0)
        };
        let finite = levels.iter().all(|l| l.sup_ratio.is_finite());
        let verdict = if !finite {
            Verdict::Fail
        } else if drift <= tolerance {
            Verdict::BoundedStable
        } else {
            Verdict::Unstable
        };
        RatioReport {
            experiment: experiment.to_string(),
            parameters,
            cases: per_level.into_iter().flat_map(|(_, c)| c).collect(),
            levels,
            drift,
            growth,
            verdict,
            notes,
        }
    }

    pub fn sup_ratio(&self) -> f64 {
        self.levels.iter().map(|l| l.sup_ratio).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Flat CSV with columns `experiment,case_id,lhs,rhs,ratio,N,verdict`;
    /// floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("experiment,case_id,lhs,rhs,ratio,N,verdict\n");
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.experiment,
                c.case_id,
                fmt17(c.lhs),
                fmt17(c.rhs),
                fmt17(c.ratio),
                c.n,
                self.verdict.as_str()
            );
        }
        out
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
