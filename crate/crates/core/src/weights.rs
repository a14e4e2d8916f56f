//! ρ-adapted Muckenhoupt constants.
//!
//! Weight constants are suprema over family cubes lying entirely inside the
//! grid: zero-extending a weight would make every cube touching the boundary
//! look degenerate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{box_extremes, BoundaryPolicy, Cube, CubeFamily, Domain, Extreme, FamilyCube, SampledFunction};
use crate::error::{Error, Result};
use crate::maximal::hl_maximal;
use crate::radius::CriticalRadius;

/// Weight families read from configs; the power family is `(1 + |x|)^δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Power {
        delta: f64,
    },
    /// Values from a raw value file on the same grid.
    Custom {
        path: String,
    },
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn build(&self, domain: Domain) -> Result<SampledFunction> {
        let w = match self {
            WeightSpec::Constant { value } => {
                if !(*value > 0.0 && value.is_finite()) {
                    return Err(Error::param("value", "weight must be positive"));
                }
                SampledFunction::constant(domain, *value)
            }
            WeightSpec::Power { delta } => {
                if !delta.is_finite() {
                    return Err(Error::param("delta", "must be finite"));
                }
                SampledFunction::from_fn(domain, |x| (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()).powf(*delta))?
            }
            WeightSpec::Custom { path } => crate::domain::FunctionSpec::Raw { path: path.clone() }.build(domain)?,
        };
        check_positive(&w)?;
        Ok(w)
    }
}

fn check_positive(w: &SampledFunction) -> Result<()> {
    if w.values().iter().all(|&v| v > 0.0 && v.is_finite()) {
        Ok(())
    } else {
        Err(Error::param("w", "weight must be positive and finite at every grid point"))
    }
}

/// Largest per-cube quotient at one scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleEntry {
    pub level: u32,
    pub half_side: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightReport {
    /// `1` for the `A_1` constant.
    pub p: f64,
    pub theta: f64,
    pub constant: f64,
    pub worst_cube: Option<Cube>,
    pub profile: Vec<ScaleEntry>,
}

fn inside(family: &CubeFamily) -> CubeFamily {
    (*family).with_policy(BoundaryPolicy::Inside)
}

/// Deterministic sup of `quotient` over the inside family.
fn sup_over_family<F>(family: &CubeFamily, p: f64, theta: f64, quotient: F) -> WeightReport
where
    F: Fn(&FamilyCube) -> f64 + Sync,
{
    let family = inside(family);
    let n = family.domain().len();
    let mut best = (f64::NEG_INFINITY, None);
    let mut profile = Vec::new();
    for k in family.levels() {
        let per: Vec<(f64, usize)> = (0..n)
            .into_par_iter()
            .filter_map(|c| family.member(c, k).map(|q| (quotient(&q), c)))
            .collect();
        if per.is_empty() {
            continue;
        }
        // First index wins ties, so the reduction is order independent.
        let (v, c) = per.iter().fold((f64::NEG_INFINITY, 0), |acc, &(v, c)| if v > acc.0 { (v, c) } else { acc });
        profile.push(ScaleEntry {
            level: k,
            half_side: family.half_side(k),
            constant: v,
        });
        if v > best.0 {
            best = (v, family.member(c, k).map(|q| q.cube));
        }
    }
    WeightReport {
        p,
        theta,
        constant: best.0.max(0.0),
        worst_cube: best.1,
        profile,
    }
}

fn mean(f: &SampledFunction, q: &FamilyCube) -> f64 {
    f.domain().cell_measure() * f.box_sum(&q.index_box) / q.cube.measure()
}

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::param("theta", format!("must be finite and >= 0, got {theta}")))
    }
}

/// `sup_Q (avg_Q w)^{1/p} (avg_Q w^{1-p'})^{1/p'} / (1 + r_Q/ρ(x_Q))^θ`.
pub fn ap_rho_constant(w: &SampledFunction, p: f64, theta: f64, rho: &CriticalRadius, family: &CubeFamily) -> Result<WeightReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must be in (1, ∞), got {p}")));
    }
    check_theta(theta)?;
    check_positive(w)?;
    if w.domain() != family.domain() {
        return Err(Error::Domain("weight and cube family live on different grids".into()));
    }
    let pp = p / (p - 1.0);
    let dual = w.map(|v| v.powf(1.0 - pp));
    Ok(sup_over_family(family, p, theta, |q| {
        let a = mean(w, q).powf(1.0 / p);
        let b = mean(&dual, q).powf(1.0 / pp);
        a * b / (1.0 + q.cube.radius() / rho.eval(q.cube.center())).powf(theta)
    }))
}

/// `sup_Q avg_Q w / ((1 + r_Q/ρ(x_Q))^θ inf_Q w)`.
pub fn a1_rho_constant(w: &SampledFunction, theta: f64, rho: &CriticalRadius, family: &CubeFamily) -> Result<WeightReport> {
    check_theta(theta)?;
    check_positive(w)?;
    if w.domain() != family.domain() {
        return Err(Error::Domain("weight and cube family live on different grids".into()));
    }
    let domain = *w.domain();
    let mins: Vec<Vec<f64>> = family
        .levels()
        .map(|k| {
            let m = 1i64 << k;
            let (lo, hi) = if m == 1 { (0, 0) } else { (-m / 2, m / 2 - 1) };
            box_extremes(&domain, w.values(), lo, hi, Extreme::Min)
        })
        .collect();
    let first = *family.levels().start();
    Ok(sup_over_family(family, 1.0, theta, |q| {
        let inf = mins[(q.level - first) as usize][q.center_index];
        mean(w, q) / ((1.0 + q.cube.radius() / rho.eval(q.cube.center())).powf(theta) * inf)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct A1PointwiseReport {
    /// `max_x M^{ρ,θ} w(x) / w(x)`.
    pub constant: f64,
    pub worst_point: usize,
}

/// Pointwise form of the `A_1` condition, over the same inside family.
pub fn a1_pointwise_check(w: &SampledFunction, theta: f64, rho: &CriticalRadius, family: &CubeFamily) -> Result<A1PointwiseReport> {
    check_theta(theta)?;
    check_positive(w)?;
    let m = hl_maximal(w, theta, rho, &inside(family))?;
    let (constant, worst_point) = m
        .values()
        .iter()
        .zip(w.values())
        .enumerate()
        .fold((0.0, 0), |acc, (i, (a, b))| if a / b > acc.0 { (a / b, i) } else { acc });
    Ok(A1PointwiseReport { constant, worst_point })
}

/// Operational meaning of "finite constant".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finiteness {
    /// Largest relative change under `N -> 2N` still counted as stable.
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    /// Growth factor under `L -> 2L` counted as divergence.
    #[serde(default = "default_growth")]
    pub divergence_growth: f64,
    /// Constants above this are treated as infinite outright.
    #[serde(default = "default_ceiling")]
    pub ceiling: f64,
}

fn default_refine_tol() -> f64 {
    0.2
}
fn default_growth() -> f64 {
    2.0
}
fn default_ceiling() -> f64 {
    1e6
}

impl Default for Finiteness {
    fn default() -> Self {
        Finiteness {
            refine_tol: default_refine_tol(),
            divergence_growth: default_growth(),
            ceiling: default_ceiling(),
        }
    }
}

/// A constant computed on a grid and on its refinement (and widening).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub base: f64,
    pub refined: f64,
    pub widened: f64,
    pub refine_change: f64,
    pub widen_growth: f64,
    pub finite: bool,
    pub diverging: bool,
}

/// Evaluates `constant` on `domain`, its `N -> 2N` refinement and its
/// `L -> 2L` widening, and classifies the result.
pub fn stability<F>(domain: &Domain, criteria: &Finiteness, constant: F) -> Result<StabilityReport>
where
    F: Fn(&Domain) -> Result<f64>,
{
    let base = constant(domain)?;
    let refined = constant(&domain.refined(2)?)?;
    let widened = constant(&domain.widened(2)?)?;
    let refine_change = (refined - base).abs() / base.abs().max(f64::MIN_POSITIVE);
    let widen_growth = widened / base.max(f64::MIN_POSITIVE);
    let bounded = base.is_finite() && refined.is_finite() && refined <= criteria.ceiling;
    Ok(StabilityReport {
        base,
        refined,
        widened,
        refine_change,
        widen_growth,
        finite: bounded && refine_change <= criteria.refine_tol,
        diverging: !bounded || widen_growth > criteria.divergence_growth,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpennessReport {
    /// Largest ladder ε (with the smallest θ' for it) whose constant is
    /// finite; `None` when nothing passes.
    pub found: Option<(f64, f64)>,
    pub constant: Option<f64>,
    /// Every `(ε, θ', base constant, finite)` tried, in scan order.
    pub trials: Vec<(f64, f64, f64, bool)>,
}

/// Scans ε from the top of the ladder down; for each ε, θ' ascending, and
/// stops at the first `A_{p-ε}^{ρ,θ'}` constant that is finite in the sense
/// of `criteria` (stable under `N -> 2N`). The weight is rebuilt from its
/// spec on the refined grid.
pub fn openness_probe(
    w: &WeightSpec,
    domain: &Domain,
    p: f64,
    rho: &CriticalRadius,
    eps_ladder: &[f64],
    theta_sweep: &[f64],
    criteria: &Finiteness,
) -> Result<OpennessReport> {
    if !(p > 1.0) {
        return Err(Error::param("p", "must exceed 1"));
    }
    let mut eps: Vec<f64> = eps_ladder.iter().copied().filter(|&e| e > 0.0 && e < p - 1.0).collect();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut thetas = theta_sweep.to_vec();
    thetas.sort_by(f64::total_cmp);
    let mut trials = Vec::new();
    let constant_at = |dom: &Domain, e: f64, t: f64| -> Result<f64> {
        let wf = w.build(*dom)?;
        Ok(ap_rho_constant(&wf, p - e, t, rho, &CubeFamily::new(*dom, BoundaryPolicy::Inside))?.constant)
    };
    for &e in &eps {
        for &t in &thetas {
            let base = constant_at(domain, e, t)?;
            let refined = constant_at(&domain.refined(2)?, e, t)?;
            let finite = refined <= criteria.ceiling && (refined - base).abs() <= criteria.refine_tol * base;
            trials.push((e, t, base, finite));
            if finite {
                return Ok(OpennessReport {
                    found: Some((e, t)),
                    constant: Some(base),
                    trials,
                });
            }
        }
    }
    Ok(OpennessReport {
        found: None,
        constant: None,
        trials,
    })
}
