//! Experiment configuration (JSON, versioned).

use serde::{Deserialize, Serialize};

use crate::dini::DiniOptions;
use crate::domain::{BoundaryPolicy, DomainSpec, FunctionSpec};
use crate::error::{Error, Result};
use crate::maximal::OperatorSpec;
use crate::radius::RhoSpec;
use crate::weights::{Finiteness, WeightSpec};
use crate::young::{GrowthSpec, YoungSpec};

use super::battery::standard_battery;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    #[serde(default = "default_rho")]
    pub rho: RhoSpec,
    #[serde(default = "default_policy")]
    pub policy: BoundaryPolicy,
    /// Young function inside the maximal operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<YoungSpec>,
    /// Outer Young function (weak and strong type).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<YoungSpec>,
    /// Growth pair; `φ = ∫a`, `ψ = ∫b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<GrowthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<GrowthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Damping exponent of the operator on the left; derived when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Damping exponent of `M^{ρ,θ} w` on the right.
    #[serde(default)]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Exponent `a` of the pointwise power bound (strong type).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Operator evaluated by the plain evaluation command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default)]
    pub battery: BatterySpec,
    #[serde(default = "default_weights")]
    pub weights: Vec<WeightSpec>,
    /// Auxiliary positive functions `u` (two-weight quotient).
    #[serde(default = "default_weights")]
    pub u: Vec<WeightSpec>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub sigma_rule: SigmaRule,
    #[serde(default)]
    pub dini: DiniOptions,
    #[serde(default)]
    pub finiteness: Finiteness,
    /// Run the Fefferman–Stein experiments even when the growth condition
    /// fails (necessity probe).
    #[serde(default)]
    pub override_dini: bool,
}

fn default_rho() -> RhoSpec {
    RhoSpec {
        family: "inverse_power".into(),
        c: 1.0,
        c0: None,
        n0: None,
        exponent: None,
    }
}

fn default_policy() -> BoundaryPolicy {
    BoundaryPolicy::ZeroExtend
}

fn default_weights() -> Vec<WeightSpec> {
    vec![WeightSpec::Constant { value: 1.0 }]
}

fn default_lambdas() -> Vec<f64> {
    vec![0.01, 0.05, 0.2, 0.5]
}

/// Explicit functions plus `random` seeded draws from the standard battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySpec {
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default = "default_random")]
    pub random: usize,
}

fn default_random() -> usize {
    10
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            functions: Vec::new(),
            random: default_random(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Refinement {
    /// Multipliers of `N`; the first is the base run.
    #[serde(default = "default_factors")]
    pub factors: Vec<usize>,
    /// Largest sup-ratio drift still counted as stable.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_factors() -> Vec<usize> {
    vec![1, 2]
}

fn default_tolerance() -> f64 {
    0.15
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            factors: default_factors(),
            tolerance: default_tolerance(),
        }
    }
}

/// How σ is derived when not given: `sufficient_sigma(θ, N0, N1, c)` with
/// `N1` fitted from the overlap of the critical covering unless fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaRule {
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<f64>,
    #[serde(default = "default_dilations")]
    pub dilations: Vec<f64>,
}

fn default_c() -> f64 {
    0.25
}

fn default_dilations() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

impl Default for SigmaRule {
    fn default() -> Self {
        SigmaRule {
            c: default_c(),
            n1: None,
            dilations: default_dilations(),
        }
    }
}

impl ExperimentConfig {
    /// Minimal valid config on the given grid; everything else defaulted.
    pub fn new(domain: DomainSpec) -> Self {
        serde_json::from_value(serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "domain": domain,
        }))
        .expect("defaults deserialize")
    }

    /// Parses and validates; errors carry the JSON line number.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::param(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let dom = self.domain.build()?;
        self.rho.build()?;
        for y in [&self.eta, &self.phi].into_iter().flatten() {
            y.build()?;
        }
        for g in [&self.a, &self.b].into_iter().flatten() {
            g.build()?;
        }
        if let (Some(s), Some(g)) = (self.sigma, self.gamma) {
            if g < s {
                return Err(Error::param("gamma", format!("must be >= sigma ({s}), got {g}")));
            }
        }
        if self.sigma.is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::param("sigma", "must be finite and >= 0"));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::param("theta", "must be finite and >= 0"));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param("lambdas", "need a nonempty list of positive levels"));
        }
        if self.refinement.factors.is_empty() || self.refinement.factors.contains(&0) {
            return Err(Error::param("refinement.factors", "need a nonempty list of positive multipliers"));
        }
        if self.weights.is_empty() || self.u.is_empty() {
            return Err(Error::param("weights", "need at least one weight"));
        }
        for f in &self.refinement.factors {
            dom.refined(*f)?;
        }
        if self.battery().is_empty() {
            return Err(Error::param("battery", "empty battery"));
        }
        Ok(())
    }

    /// Explicit functions first, then the seeded random draws.
    pub fn battery(&self) -> Vec<FunctionSpec> {
        let mut v = self.battery.functions.clone();
        v.extend(standard_battery(&self.domain, self.battery.random, self.seed));
        v
    }

    /// Applies a `key=value` override; `key` is a dotted path into the JSON
    /// form and `value` is parsed as JSON (falling back to a string).
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::param("override", format!("expected key=value, got `{assignment}`")))?;
        let value: serde_json::Value =
            serde_json::from_str(value).unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
        let mut root = serde_json::to_value(self).expect("configs serialize");
        let mut node = &mut root;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::param("override", format!("`{key}` does not name an object field")))?;
            if i + 1 == parts.len() {
                obj.insert((*part).to_string(), value.clone());
                break;
            }
            node = obj.entry((*part).to_string()).or_insert_with(|| serde_json::json!({}));
        }
        let cfg: ExperimentConfig = serde_json::from_value(root).map_err(|e| Error::param("override", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
