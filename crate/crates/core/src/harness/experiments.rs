//! The experiments themselves. Each builds its battery on every grid of the
//! refinement ladder and returns per-case left and right sides.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dini::{dini_condition_check, DiniVerdict};
use crate::domain::{CubeFamily, Domain, DomainSpec, SampledFunction};
use crate::error::{Error, Result};
use crate::maximal::{hl_maximal, orlicz_maximal};
use crate::orlicz::luxemburg_norm_global;
use crate::quadrature;
use crate::radius::{critical_covering, overlap_profile, CriticalRadius, RhoSpec};
use crate::weights::{openness_probe, WeightSpec};
use crate::young::{GrowthPair, YoungFunction, YoungSpec};

use super::{sufficient_sigma, CaseResult, ExperimentConfig, RatioReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    WeakType,
    LevelSet,
    StrongType,
    ModularFs,
    NormFs,
    UnweightedModular,
    UnweightedNorm,
    TwoWeight,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::WeakType,
        Experiment::LevelSet,
        Experiment::StrongType,
        Experiment::ModularFs,
        Experiment::NormFs,
        Experiment::UnweightedModular,
        Experiment::UnweightedNorm,
        Experiment::TwoWeight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::WeakType => "weak_type",
            Experiment::LevelSet => "level_set",
            Experiment::StrongType => "strong_type",
            Experiment::ModularFs => "modular_fs",
            Experiment::NormFs => "norm_fs",
            Experiment::UnweightedModular => "unweighted_modular",
            Experiment::UnweightedNorm => "unweighted_norm",
            Experiment::TwoWeight => "two_weight",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// Threshold of `t0 > 1` in the level-set bound.
const T0: f64 = 1.0 + 1e-6;

struct Setup<'a> {
    cfg: &'a ExperimentConfig,
    rho: CriticalRadius,
    base: Domain,
    params: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl<'a> Setup<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let rho = cfg.rho.build()?;
        let base = cfg.domain.build()?;
        let mut params = BTreeMap::new();
        params.insert("theta".into(), cfg.theta);
        params.insert("C0".into(), rho.c0());
        params.insert("N0".into(), rho.n0());
        Ok(Setup {
            cfg,
            rho,
            base,
            params,
            notes: Vec::new(),
        })
    }

    /// σ from the config, or from the sufficiency rule with `N1` fitted on
    /// the base grid. Fixed once so every refinement uses the same σ.
    fn sigma(&mut self) -> Result<f64> {
        if let Some(s) = self.cfg.sigma {
            self.params.insert("sigma".into(), s);
            return Ok(s);
        }
        let rule = &self.cfg.sigma_rule;
        let n1 = match rule.n1 {
            Some(n1) => n1,
            None => {
                let cov = critical_covering(&self.rho, &self.base);
                let prof = overlap_profile(&cov, &rule.dilations)?;
                self.notes.push(format!("N1 fitted from overlap counts {:?}", prof.counts));
                prof.n1.max(0.0)
            }
        };
        let s = sufficient_sigma(self.cfg.theta, self.rho.n0(), n1, rule.c)?;
        self.params.insert("N1".into(), n1);
        self.params.insert("sigma".into(), s);
        Ok(s)
    }

    fn levels<F>(&self, cases: F) -> Result<Vec<(usize, Vec<CaseResult>)>>
    where
        F: Fn(&Domain) -> Result<Vec<CaseResult>>,
    {
        self.cfg
            .refinement
            .factors
            .iter()
            .map(|&k| {
                let dom = self.base.refined(k)?;
                Ok((dom.cells(), cases(&dom)?))
            })
            .collect()
    }

    fn finish(self, name: &str, per_level: Vec<(usize, Vec<CaseResult>)>) -> RatioReport {
        RatioReport::assemble(name, self.params, per_level, self.cfg.refinement.tolerance, self.notes)
    }

    fn battery(&self, dom: &Domain) -> Result<Vec<SampledFunction>> {
        self.cfg.battery().iter().map(|f| f.build(*dom)).collect()
    }

    fn weights(&self, dom: &Domain, specs: &[WeightSpec]) -> Result<Vec<SampledFunction>> {
        specs.iter().map(|w| w.build(*dom)).collect()
    }

    fn family(&self, dom: &Domain) -> CubeFamily {
        CubeFamily::new(*dom, self.cfg.policy)
    }

    fn young(&self, spec: &Option<YoungSpec>, name: &str) -> Result<YoungFunction> {
        spec.as_ref()
            .ok_or_else(|| Error::param("config", format!("`{name}` is required for this experiment")))?
            .build()
    }

    fn pair(&self) -> Result<GrowthPair> {
        let a = self.cfg.a.as_ref().ok_or_else(|| Error::param("config", "`a` is required"))?;
        let b = self.cfg.b.as_ref().ok_or_else(|| Error::param("config", "`b` is required"))?;
        GrowthPair::new(a.build()?, b.build()?)
    }
}

/// `Σ_x g(x) w(x) |cell|`.
fn weighted_sum(values: impl Iterator<Item = f64>, w: Option<&SampledFunction>, cell: f64) -> f64 {
    match w {
        Some(w) => values.zip(w.values()).map(|(v, wv)| v * wv).sum::<f64>() * cell,
        None => values.sum::<f64>() * cell,
    }
}

pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig) -> Result<RatioReport> {
    match exp {
        Experiment::WeakType => weak_type(cfg),
        Experiment::LevelSet => level_set(cfg),
        Experiment::StrongType => strong_type(cfg),
        Experiment::ModularFs => fefferman_stein(cfg, exp, true, false),
        Experiment::NormFs => fefferman_stein(cfg, exp, true, true),
        Experiment::UnweightedModular => fefferman_stein(cfg, exp, false, false),
        Experiment::UnweightedNorm => fefferman_stein(cfg, exp, false, true),
        Experiment::TwoWeight => two_weight(cfg),
    }
}

/// `w({M_Φ^{ρ,σ} f > λ})` against `∫ Φ(|f|/λ) M^{ρ,θ} w`.
fn weak_type(cfg: &ExperimentConfig) -> Result<RatioReport> {
    let mut s = Setup::new(cfg)?;
    let phi = match &cfg.phi {
        Some(y) => y.build()?,
        None => YoungFunction::plog(1.0, 1.0)?,
    };
    let cd = phi.doubling_bound();
    s.params.insert("doubling_constant".into(), cd);
    if !cd.is_finite() || cd > 1e12 {
        return Ok(RatioReport::refused("weak_type", s.params, "Φ is not doubling on the test ladder".into()));
    }
    let sigma = s.sigma()?;
    let per_level = s.levels(|dom| {
        let family = s.family(dom);
        let fs = s.battery(dom)?;
        let ws = s.weights(dom, &cfg.weights)?;
        let mws: Vec<SampledFunction> = ws.iter().map(|w| hl_maximal(w, cfg.theta, &s.rho, &family)).collect::<Result<_>>()?;
        let cell = dom.cell_measure();
        let per_f: Vec<Vec<CaseResult>> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mf = orlicz_maximal(f, &phi, sigma, &s.rho, &family)?;
                let mut out = Vec::new();
                for (j, (w, mw)) in ws.iter().zip(&mws).enumerate() {
                    for (k, &l) in cfg.lambdas.iter().enumerate() {
                        let lhs = weighted_sum(mf.values().iter().map(|&m| if m > l { 1.0 } else { 0.0 }), Some(w), cell);
                        let rhs = weighted_sum(f.values().iter().map(|v| phi.at(v.abs() / l)), Some(mw), cell);
                        out.push(CaseResult::new(format!("f{i}/w{j}/l{k}"), dom.cells(), lhs, rhs));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(per_f.into_iter().flatten().collect())
    })?;
    Ok(s.finish("weak_type", per_level))
}

/// `∫_{t0}^∞ W(s) φ'(s) ds` for the step function
/// `W(s) = Σ_{i : s_i > s} m_i`, integrated interval by interval between
/// consecutive breakpoints.
pub(crate) fn layer_integral(breaks: &mut Vec<(f64, f64)>, phi: &YoungFunction, t0: f64) -> f64 {
    breaks.retain(|&(s, m)| s > t0 && m > 0.0);
    breaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut tail: f64 = breaks.iter().map(|b| b.1).sum();
    let mut left = t0;
    let mut total = 0.0;
    let mut i = 0;
    while i < breaks.len() {
        let right = breaks[i].0;
        if right > left {
            total += tail * quadrature::integrate(&|s| phi.derivative_at(s), left, right, 1e-12, 0.0);
            left = right;
        }
        // Points with s_i = right leave the set {s_i > s} from here on.
        while i < breaks.len() && breaks[i].0 == right {
            tail -= breaks[i].1;
            i += 1;
        }
    }
    total
}

/// `w({M_φ^{ρ,σ} f > λ})` against
/// `∫_{t0}^∞ M^{ρ,θ} w({4 t0 |f| > λ s}) φ'(s) ds`.
fn level_set(cfg: &ExperimentConfig) -> Result<RatioReport> {
    let mut s = Setup::new(cfg)?;
    let phi = match (&cfg.eta, &cfg.phi) {
        (Some(y), _) | (None, Some(y)) => y.build()?,
        (None, None) => YoungFunction::plog(1.0, 1.0)?,
    };
    s.params.insert("t0".into(), T0);
    if !(phi.at(T0) > 0.0) {
        return Ok(RatioReport::refused("level_set", s.params, "φ vanishes at t0; normalize φ first".into()));
    }
    let sigma = s.sigma()?;
    let per_level = s.levels(|dom| {
        let family = s.family(dom);
        let fs = s.battery(dom)?;
        let ws = s.weights(dom, &cfg.weights)?;
        let mws: Vec<SampledFunction> = ws.iter().map(|w| hl_maximal(w, cfg.theta, &s.rho, &family)).collect::<Result<_>>()?;
        let cell = dom.cell_measure();
        let per_f: Vec<Vec<CaseResult>> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mf = orlicz_maximal(f, &phi, sigma, &s.rho, &family)?;
                let mut out = Vec::new();
                for (j, (w, mw)) in ws.iter().zip(&mws).enumerate() {
                    for (k, &l) in cfg.lambdas.iter().enumerate() {
                        let lhs = weighted_sum(mf.values().iter().map(|&m| if m > l { 1.0 } else { 0.0 }), Some(w), cell);
                        let mut breaks: Vec<(f64, f64)> = f
                            .values()
                            .iter()
                            .zip(mw.values())
                            .map(|(v, m)| (4.0 * T0 * v.abs() / l, m * cell))
                            .collect();
                        let rhs = layer_integral(&mut breaks, &phi, T0);
                        out.push(CaseResult::new(format!("f{i}/w{j}/l{k}"), dom.cells(), lhs, rhs));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(per_f.into_iter().flatten().collect())
    })?;
    Ok(s.finish("level_set", per_level))
}

/// `∫ Φ_{p,q}(M^{ρ,θ} f) w` against `∫ Φ_{p,q}(f) w` for `‖f‖_{Φ,w} = 1`,
/// with `θ = σ a` and `a = p - ε` taken from the openness probe.
fn strong_type(cfg: &ExperimentConfig) -> Result<RatioReport> {
    let mut s = Setup::new(cfg)?;
    let p = cfg.p.unwrap_or(2.0);
    let q = cfg.q.unwrap_or(1.0);
    let big_phi = YoungFunction::plog(p, q)?;
    if !(p > 1.0) {
        return Err(Error::param("p", "must exceed 1"));
    }
    s.params.insert("p".into(), p);
    s.params.insert("q".into(), q);
    let eps_ladder: Vec<f64> = [0.5, 0.25, 0.1, 0.05].iter().map(|e| e * (p - 1.0)).collect();
    let theta_sweep = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];
    // Per weight: (σ, θ = σ a).
    let mut exps = Vec::new();
    for (j, w) in cfg.weights.iter().enumerate() {
        let open = openness_probe(w, &s.base, p, &s.rho, &eps_ladder, &theta_sweep, &cfg.finiteness)?;
        let (eps, theta_w) = match (open.found, cfg.exponent, cfg.sigma) {
            (Some(found), _, _) => found,
            (None, Some(a), Some(sigma)) => (p - a, sigma),
            (None, _, _) => {
                return Ok(RatioReport::refused(
                    "strong_type",
                    s.params,
                    format!("weight w{j}: no finite A_(p-ε) constant found on the probe ladder"),
                ))
            }
        };
        let a = cfg.exponent.unwrap_or(p - eps);
        let sigma = cfg.sigma.unwrap_or(theta_w);
        if !(a > 1.0 && p / a >= 1.0) {
            return Err(Error::param("exponent", format!("need 1 < a <= p, got a = {a}")));
        }
        s.params.insert(format!("w{j}.epsilon"), eps);
        s.params.insert(format!("w{j}.a"), a);
        s.params.insert(format!("w{j}.sigma"), sigma);
        s.params.insert(format!("w{j}.theta"), sigma * a);
        exps.push(sigma * a);
    }
    let per_level = s.levels(|dom| {
        let family = s.family(dom);
        let fs = s.battery(dom)?;
        let ws = s.weights(dom, &cfg.weights)?;
        let cell = dom.cell_measure();
        let per_f: Vec<Vec<CaseResult>> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mut out = Vec::new();
                for (j, w) in ws.iter().enumerate() {
                    let norm = luxemburg_norm_global(f, Some(w), &big_phi)?;
                    let id = format!("f{i}/w{j}");
                    if norm == 0.0 {
                        out.push(CaseResult::new(id, dom.cells(), 0.0, 0.0));
                        continue;
                    }
                    let g = f.scale(1.0 / norm);
                    let mg = hl_maximal(&g, exps[j], &s.rho, &family)?;
                    let lhs = weighted_sum(mg.values().iter().map(|&v| big_phi.at(v)), Some(w), cell);
                    let rhs = weighted_sum(g.values().iter().map(|v| big_phi.at(v.abs())), Some(w), cell);
                    out.push(CaseResult::new(id, dom.cells(), lhs, rhs));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(per_f.into_iter().flatten().collect())
    })?;
    Ok(s.finish("strong_type", per_level))
}

/// Gate on the growth condition; returns `C'` or a refusal.
fn dini_gate(s: &mut Setup, pair: &GrowthPair, eta: &YoungFunction, name: &str) -> Result<std::result::Result<f64, RatioReport>> {
    let report = dini_condition_check(pair, eta, &s.cfg.dini)?;
    match (report.verdict, report.constant) {
        (DiniVerdict::Pass, Some(c)) => {
            s.params.insert("dini_constant".into(), c);
            Ok(Ok(c))
        }
        _ if s.cfg.override_dini => {
            s.notes.push("growth condition FAILS; running in override mode with C' = 1".into());
            s.params.insert("dini_constant".into(), 1.0);
            Ok(Ok(1.0))
        }
        _ => Ok(Err(RatioReport::refused(
            name,
            s.params.clone(),
            "growth condition fails for (a, b, η); the inequality cannot hold (set override_dini to probe anyway)".into(),
        ))),
    }
}

/// Fefferman–Stein type inequalities in modular or norm form, weighted
/// (right side carries `M^{ρ,θ} w`) or unweighted.
fn fefferman_stein(cfg: &ExperimentConfig, exp: Experiment, weighted: bool, norm: bool) -> Result<RatioReport> {
    let mut s = Setup::new(cfg)?;
    let name = exp.name();
    let eta = s.young(&cfg.eta, "eta")?;
    let pair = s.pair()?;
    let (phi, psi) = (pair.phi()?, pair.psi()?);
    let c = match dini_gate(&mut s, &pair, &eta, name)? {
        Ok(c) => c,
        Err(refused) => return Ok(refused),
    };
    let sigma = s.sigma()?;
    let unit = [WeightSpec::Constant { value: 1.0 }];
    let wspecs: &[WeightSpec] = if weighted { &cfg.weights } else { &unit };
    let per_level = s.levels(|dom| {
        let family = s.family(dom);
        let fs = s.battery(dom)?;
        let ws = s.weights(dom, wspecs)?;
        let mws: Vec<Option<SampledFunction>> = ws
            .iter()
            .map(|w| if weighted { hl_maximal(w, cfg.theta, &s.rho, &family).map(Some) } else { Ok(None) })
            .collect::<Result<_>>()?;
        let cell = dom.cell_measure();
        let per_f: Vec<Vec<CaseResult>> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mf = orlicz_maximal(f, &eta, sigma, &s.rho, &family)?;
                let mut out = Vec::new();
                for (j, (w, mw)) in ws.iter().zip(&mws).enumerate() {
                    let wopt = weighted.then_some(w);
                    let (lhs, rhs) = if norm {
                        (luxemburg_norm_global(&mf, wopt, &phi)?, luxemburg_norm_global(f, mw.as_ref(), &psi)?)
                    } else {
                        (
                            weighted_sum(mf.values().iter().map(|&v| phi.at(v)), wopt, cell),
                            weighted_sum(f.values().iter().map(|v| psi.at(c * v.abs())), mw.as_ref(), cell),
                        )
                    };
                    out.push(CaseResult::new(format!("f{i}/w{j}"), dom.cells(), lhs, rhs));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(per_f.into_iter().flatten().collect())
    })?;
    Ok(s.finish(name, per_level))
}

/// `∫ φ(M^{ρ,γ} f / M_{η̃}^{ρ,γ-σ} u) w` against `∫ ψ(|f|/u) M^{ρ,θ} w`.
fn two_weight(cfg: &ExperimentConfig) -> Result<RatioReport> {
    let mut s = Setup::new(cfg)?;
    let eta = s.young(&cfg.eta, "eta")?;
    let eta_dual = eta.complementary()?;
    let pair = s.pair()?;
    let (phi, psi) = (pair.phi()?, pair.psi()?);
    let sigma = s.sigma()?;
    let gamma = cfg.gamma.unwrap_or(sigma);
    if gamma < sigma {
        return Err(Error::param("gamma", format!("must be >= σ = {sigma}, got {gamma}")));
    }
    s.params.insert("gamma".into(), gamma);
    let per_level = s.levels(|dom| {
        let family = s.family(dom);
        let fs = s.battery(dom)?;
        let ws = s.weights(dom, &cfg.weights)?;
        let us = s.weights(dom, &cfg.u)?;
        let mws: Vec<SampledFunction> = ws.iter().map(|w| hl_maximal(w, cfg.theta, &s.rho, &family)).collect::<Result<_>>()?;
        let mus: Vec<SampledFunction> = us
            .iter()
            .map(|u| orlicz_maximal(u, &eta_dual, gamma - sigma, &s.rho, &family))
            .collect::<Result<_>>()?;
        let cell = dom.cell_measure();
        let per_f: Vec<Vec<CaseResult>> = fs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mf = hl_maximal(f, gamma, &s.rho, &family)?;
                let mut out = Vec::new();
                for (k, (u, mu)) in us.iter().zip(&mus).enumerate() {
                    let quotient = mf.values().iter().zip(mu.values()).map(|(&a, &b)| if b > 0.0 { a / b } else { 0.0 });
                    let q: Vec<f64> = quotient.map(|v| phi.at(v)).collect();
                    let fu: Vec<f64> = f.values().iter().zip(u.values()).map(|(v, uv)| psi.at(v.abs() / uv)).collect();
                    for (j, (w, mw)) in ws.iter().zip(&mws).enumerate() {
                        let lhs = weighted_sum(q.iter().copied(), Some(w), cell);
                        let rhs = weighted_sum(fu.iter().copied(), Some(mw), cell);
                        out.push(CaseResult::new(format!("f{i}/u{k}/w{j}"), dom.cells(), lhs, rhs));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        Ok(per_f.into_iter().flatten().collect())
    })?;
    Ok(s.finish("two_weight", per_level))
}

/// Inputs of the test-weight experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdWeightOptions {
    pub domain: DomainSpec,
    pub rho: RhoSpec,
    pub x0: Vec<f64>,
    #[serde(default = "one")]
    pub t: f64,
    pub sigma: f64,
    pub phi: YoungSpec,
    pub eta: YoungSpec,
    pub theta_ladder: Vec<f64>,
    #[serde(default = "tol")]
    pub refine_tol: f64,
}

fn one() -> f64 {
    1.0
}
fn tol() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdWeightRow {
    pub theta: f64,
    pub sup_base: f64,
    pub sup_refined: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdWeightReport {
    pub doubling_constant: f64,
    /// `(N0+1) ((log2 C_d) ⌈σ⌉ (N0+1) + 1)`: θ must exceed this.
    pub sufficient_theta: f64,
    pub rows: Vec<ThresholdWeightRow>,
    /// Smallest ladder θ whose sup over `B0` is stable under `N -> 2N`.
    pub stable_theta: Option<f64>,
    /// Whether the sup is stable at the first ladder θ above the threshold.
    pub stable_above_threshold: Option<bool>,
    pub vanishes_on_2b0: bool,
}

/// The test weight
/// `w(x) = φ(t D^{-n} η̃⁻¹(D^n)) / φ(t D^{-(n+σ(N0+1))} η̃⁻¹(D^n))` on
/// `D = |x - x0|/ρ(x0) >= 2`, zero inside `2 B0`; reports
/// `sup_{B0} M^{ρ,θ} w` along the θ ladder at `N` and `2N`.
pub fn threshold_weight_experiment(opts: &ThresholdWeightOptions) -> Result<ThresholdWeightReport> {
    let base = opts.domain.build()?;
    let rho = opts.rho.build()?;
    let phi = opts.phi.build()?;
    let eta_dual = opts.eta.build()?.complementary()?;
    let d = base.dim();
    if opts.x0.len() != d {
        return Err(Error::param("x0", "dimension mismatch"));
    }
    if !(opts.sigma >= 0.0 && opts.t > 0.0) || opts.theta_ladder.is_empty() {
        return Err(Error::param("sigma, t, theta_ladder", "need σ >= 0, t > 0 and a nonempty ladder"));
    }
    let n = d as f64;
    let n0 = rho.n0();
    let r0 = rho.eval(&opts.x0);
    let cd = phi.doubling_bound();
    let sufficient_theta = (n0 + 1.0) * (cd.log2() * opts.sigma.ceil() * (n0 + 1.0) + 1.0);
    let dist = |x: &[f64]| x.iter().zip(&opts.x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / r0;
    let weight = |dom: &Domain| {
        SampledFunction::from_fn(*dom, |x| {
            let dd = dist(x);
            if dd < 2.0 {
                return 0.0;
            }
            let e = eta_dual.inverse_unchecked(dd.powf(n));
            let num = phi.at(opts.t * dd.powf(-n) * e);
            let den = phi.at(opts.t * dd.powf(-(n + opts.sigma * (n0 + 1.0))) * e);
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
    };
    let sup_on_b0 = |dom: &Domain, theta: f64| -> Result<f64> {
        let w = weight(dom)?;
        let m = hl_maximal(&w, theta, &rho, &CubeFamily::new(*dom, crate::domain::BoundaryPolicy::ZeroExtend))?;
        Ok((0..dom.len())
            .filter(|&i| dist(&dom.point(i)[..d]) < 1.0)
            .map(|i| m.values()[i])
            .fold(0.0, f64::max))
    };
    let w0 = weight(&base)?;
    let vanishes_on_2b0 = (0..base.len()).all(|i| dist(&base.point(i)[..d]) >= 2.0 || w0.values()[i] == 0.0);
    let refined = base.refined(2)?;
    let mut ladder = opts.theta_ladder.clone();
    ladder.sort_by(f64::total_cmp);
    let rows: Vec<ThresholdWeightRow> = ladder
        .iter()
        .map(|&theta| {
            let a = sup_on_b0(&base, theta)?;
            let b = sup_on_b0(&refined, theta)?;
            Ok(ThresholdWeightRow {
                theta,
                sup_base: a,
                sup_refined: b,
                stable: a.is_finite() && b.is_finite() && (b - a).abs() <= opts.refine_tol * a,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ThresholdWeightReport {
        doubling_constant: cd,
        sufficient_theta,
        stable_theta: rows.iter().find(|r| r.stable).map(|r| r.theta),
        stable_above_threshold: rows.iter().find(|r| r.theta > sufficient_theta).map(|r| r.stable),
        rows,
        vanishes_on_2b0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FunctionSpec;

    fn small(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
        assert_eq!(Experiment::from_name("nope"), None);
    }

    #[test]
    fn layer_integral_matches_layer_cake() {
        let phi = YoungFunction::plog(1.0, 1.0).unwrap();
        let pts = [(0.5, 1.0), (2.0, 0.5), (3.5, 2.0), (3.5, 1.0), (10.0, 0.25)];
        let mut v = pts.to_vec();
        let got = layer_integral(&mut v, &phi, T0);
        let want: f64 = pts.iter().map(|&(s, m)| m * (phi.at(s) - phi.at(T0)).max(0.0)).sum();
        assert!((got - want).abs() < 1e-10 * want);
    }

    #[test]
    fn zero_function_gives_zero_ratios() {
        let mut cfg = small(r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"battery":{"random":0,
            "functions":[{"kind":"indicator","radius":1,"amplitude":0}]},
            "eta":{"family":"power","p":1},"a":{"family":"power","exponent":1},"b":{"family":"power","exponent":1}}"#);
        cfg.sigma = Some(1.0);
        for e in Experiment::ALL {
            let r = run_experiment(e, &cfg).unwrap();
            assert!(r.cases.iter().all(|c| c.lhs == 0.0 && c.ratio == 0.0), "{}", e.name());
            assert_eq!(r.sup_ratio(), 0.0);
        }
    }

    #[test]
    fn weak_type_large_lambda_is_zero_and_deterministic() {
        let cfg = small(r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"sigma":2,"battery":{"random":3},
            "lambdas":[1e6],"weights":[{"family":"power","delta":0.5}]}"#);
        let r = run_experiment(Experiment::WeakType, &cfg).unwrap();
        assert!(r.cases.iter().all(|c| c.lhs == 0.0));
        assert_eq!(r.to_json(), run_experiment(Experiment::WeakType, &cfg).unwrap().to_json());
    }

    #[test]
    fn dini_gate_refuses_and_overrides() {
        let json = r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"sigma":1,"battery":{"random":2},
            "eta":{"family":"power","p":2},"a":{"family":"power","exponent":1},"b":{"family":"power","exponent":1}}"#;
        let cfg = small(json);
        let r = run_experiment(Experiment::ModularFs, &cfg).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Fail);
        assert!(r.cases.is_empty());
        let cfg = cfg.with_override("override_dini=true").unwrap();
        let r = run_experiment(Experiment::ModularFs, &cfg).unwrap();
        assert!(!r.cases.is_empty());
    }

    #[test]
    fn strong_type_is_scale_invariant() {
        let base = small(r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"battery":{"random":0,
            "functions":[{"kind":"gaussian","width":0.5}]},"refinement":{"factors":[1]}}"#);
        let mut scaled = base.clone();
        scaled.battery.functions = vec![FunctionSpec::Gaussian {
            center: vec![],
            width: 0.5,
            cutoff: None,
            amplitude: 7.0,
        }];
        let a = run_experiment(Experiment::StrongType, &base).unwrap();
        let b = run_experiment(Experiment::StrongType, &scaled).unwrap();
        assert!((a.cases[0].ratio - b.cases[0].ratio).abs() < 1e-6 * a.cases[0].ratio);
    }

    #[test]
    fn two_weight_rejects_small_gamma() {
        let cfg = small(r#"{"schema_version":1,"domain":{"d":1,"L":4,"N":32},"sigma":2,"battery":{"random":1},
            "eta":{"family":"power","p":1},"a":{"family":"power","exponent":1},"b":{"family":"power","exponent":1}}"#);
        let mut bad = cfg.clone();
        bad.sigma = None;
        bad.gamma = Some(0.5);
        assert!(run_experiment(Experiment::TwoWeight, &bad).is_err());
        assert!(run_experiment(Experiment::TwoWeight, &cfg).is_ok());
    }

    #[test]
    fn threshold_weight_stability_and_support() {
        let opts = ThresholdWeightOptions {
            domain: DomainSpec { d: 1, l: 8.0, n: 512 },
            rho: RhoSpec {
                family: "constant".into(),
                c: 1.0,
                c0: None,
                n0: None,
                exponent: None,
            },
            x0: vec![0.0],
            t: 1.0,
            sigma: 1.0,
            phi: YoungSpec::Power { p: 2.0, scale: None },
            eta: YoungSpec::Power { p: 2.0, scale: None },
            theta_ladder: vec![12.0, 0.0],
            refine_tol: 0.2,
        };
        let r = threshold_weight_experiment(&opts).unwrap();
        assert!((r.doubling_constant - 4.0).abs() < 1e-9);
        assert!((r.sufficient_theta - 10.0).abs() < 1e-9);
        assert!(r.vanishes_on_2b0);
        assert_eq!(r.rows[0].theta, 0.0);
        assert_eq!(r.stable_above_threshold, Some(true));
    }
}
