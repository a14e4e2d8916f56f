//! The integral growth condition linking a Young function `η` to a growth
//! pair `(a, b)`:
//!
//! ```text
//! ∫_0^t a(s)/s · η'(t/s) ds <= C b(C t)   for every t > 0.
//! ```
//!
//! The left side is evaluated after the substitution `u = t/s`
//! (`ds = -t/u² du`, `a(s)/s = a(t/u) u/t`), which moves the singular-looking
//! endpoint `s -> 0` to infinity:
//!
//! ```text
//! I(t) = ∫_1^∞ a(t/u) η'(u) / u du.
//! ```
//!
//! The tail is integrated doubling by doubling in `u`, in the variable
//! `v = log u`. Divergence is detected heuristically; the power families have
//! closed forms that the tests use to calibrate it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::young::{log_ladder, GrowthFunction, GrowthPair, YoungFunction};

/// Relative increment below which one more doubling is considered converged.
const CONVERGED: f64 = 1e-9;
/// Past this `u`, sustained relative growth above [`GROWTH`] means divergence.
const DIVERGENCE_START: f64 = 1e8;
const GROWTH: f64 = 1e-3;
const GROWTH_RUN: usize = 3;
/// `2^MAX_DOUBLINGS` stays far below `f64::MAX`.
const MAX_DOUBLINGS: i32 = 900;

/// Value of `I(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiniValue {
    Finite(f64),
    Diverges,
}

impl DiniValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            DiniValue::Finite(v) => Some(v),
            DiniValue::Diverges => None,
        }
    }
}

fn tail_integral<G: Fn(f64) -> f64>(integrand: G) -> DiniValue {
    // integrand(v) is the integrand in v = ln u.
    let step = std::f64::consts::LN_2;
    let mut total = 0.0f64;
    let mut run = 0usize;
    for k in 0..MAX_DOUBLINGS {
        let a = f64::from(k) * step;
        let piece = quadrature::integrate(&integrand, a, a + step, 1e-12, 1e-300);
        if !piece.is_finite() {
            return DiniValue::Diverges;
        }
        total += piece;
        let rel = if total > 0.0 { piece / total } else { 0.0 };
        if k > 0 && rel < CONVERGED {
            return DiniValue::Finite(total);
        }
        if a.exp() > DIVERGENCE_START {
            run = if rel > GROWTH { run + 1 } else { 0 };
            if run >= GROWTH_RUN {
                return DiniValue::Diverges;
            }
        }
    }
    DiniValue::Diverges
}

/// `I(t) = ∫_1^∞ a(t/u) η'(u)/u du`.
pub fn dini_integral(a: &GrowthFunction, eta: &YoungFunction, t: f64) -> Result<DiniValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    if matches!(a, GrowthFunction::Zero) {
        return Ok(DiniValue::Finite(0.0));
    }
    // With u = e^v the measure du/u is dv.
    Ok(tail_integral(|v| {
        let u = v.exp();
        a.at(t / u) * eta.derivative_at(u)
    }))
}

/// `∫_1^∞ η'(u) u^{-p} du`, the form the condition takes for
/// `a = b = s^{p-1}` (then `I(t) = t^{p-1}` times this).
pub fn bp_reduction(eta: &YoungFunction, p: f64) -> Result<DiniValue> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must be in (1, ∞), got {p}")));
    }
    Ok(tail_integral(|v| {
        let u = v.exp();
        eta.derivative_at(u) * (-(p - 1.0) * v).exp()
    }))
}

/// Grid and bracket of the constant search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiniOptions {
    #[serde(default = "t_min")]
    pub t_min: f64,
    #[serde(default = "t_max")]
    pub t_max: f64,
    #[serde(default = "t_points")]
    pub t_points: usize,
    #[serde(default = "c_min")]
    pub c_min: f64,
    #[serde(default = "c_max")]
    pub c_max: f64,
    /// Bisection stops when `hi/lo - 1` is below this.
    #[serde(default = "c_rel_tol")]
    pub c_rel_tol: f64,
}

fn t_min() -> f64 {
    1e-4
}
fn t_max() -> f64 {
    1e4
}
fn t_points() -> usize {
    64
}
fn c_min() -> f64 {
    2f64.powi(-10)
}
fn c_max() -> f64 {
    2f64.powi(20)
}
fn c_rel_tol() -> f64 {
    1e-3
}

impl Default for DiniOptions {
    fn default() -> Self {
        DiniOptions {
            t_min: t_min(),
            t_max: t_max(),
            t_points: t_points(),
            c_min: c_min(),
            c_max: c_max(),
            c_rel_tol: c_rel_tol(),
        }
    }
}

impl DiniOptions {
    fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_points >= 2) {
            return Err(Error::param("t range", "need 0 < t_min < t_max and at least two points"));
        }
        if !(self.c_min > 0.0 && self.c_max > self.c_min) {
            return Err(Error::param("C range", "need 0 < c_min < c_max"));
        }
        if !(self.c_rel_tol > 0.0) {
            return Err(Error::param("c_rel_tol", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiniVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiniReport {
    pub t: Vec<f64>,
    /// `I(t)`, `None` where the integral diverges.
    pub integral: Vec<Option<f64>>,
    pub converged: Vec<bool>,
    /// Whether `I` is nondecreasing along the grid.
    pub monotone: bool,
    /// Smallest admissible `C` (to `c_rel_tol`), when one exists in range.
    pub constant: Option<f64>,
    pub verdict: DiniVerdict,
    pub c_min: f64,
    pub c_max: f64,
}

/// Searches for the smallest `C` in `[c_min, c_max]` with
/// `I(t) <= C b(C t)` on the log-spaced `t` grid. The predicate is monotone
/// in `C` because `b` is nondecreasing, so log-bisection applies.
pub fn dini_condition_check(pair: &GrowthPair, eta: &YoungFunction, opts: &DiniOptions) -> Result<DiniReport> {
    opts.validate()?;
    let t = log_ladder(opts.t_min, opts.t_max, opts.t_points);
    let values: Vec<DiniValue> = t
        .par_iter()
        .map(|&ti| dini_integral(&pair.a, eta, ti))
        .collect::<Result<_>>()?;
    let integral: Vec<Option<f64>> = values.iter().map(|v| v.finite()).collect();
    let converged: Vec<bool> = integral.iter().map(Option::is_some).collect();
    let monotone = integral
        .windows(2)
        .all(|w| matches!(w, [Some(x), Some(y)] if *y >= x * (1.0 - 1e-9)));
    let mut report = DiniReport {
        t: t.clone(),
        integral: integral.clone(),
        converged: converged.clone(),
        monotone,
        constant: None,
        verdict: DiniVerdict::Fail,
        c_min: opts.c_min,
        c_max: opts.c_max,
    };
    if converged.iter().any(|c| !c) {
        return Ok(report);
    }
    let vals: Vec<f64> = integral.into_iter().flatten().collect();
    let holds = |c: f64| t.iter().zip(&vals).all(|(&ti, &i)| i <= c * pair.b.at(c * ti));
    if !holds(opts.c_max) {
        return Ok(report);
    }
    let (mut lo, mut hi) = (opts.c_min, opts.c_max);
    if holds(lo) {
        hi = lo;
    } else {
        while hi / lo - 1.0 > opts.c_rel_tol {
            let mid = (lo * hi).sqrt();
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    report.constant = Some(hi);
    report.verdict = DiniVerdict::Pass;
    Ok(report)
}
