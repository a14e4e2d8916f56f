//! JSON specs for domains and builtin test functions.

use serde::{Deserialize, Serialize};

use super::{Domain, SampledFunction};
use crate::error::{Error, Result};

/// `{"d": 1, "L": 8.0, "N": 256}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        Domain::new(self.d, self.l, self.n)
    }
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> Self {
        DomainSpec {
            d: d.dim(),
            l: d.half_width(),
            n: d.cells(),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Builtin test functions. Centers default to the origin; omitted
/// coordinates are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `a exp(-|x - c|^2 / (2 width^2))`, cut to zero beyond `cutoff`
    /// (default four widths) so that the support stays compact.
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `a` on the closed cube `|x - c|_∞ <= radius`.
    Indicator {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `a max(|x - c|, h/2)^{-alpha}` for `|x - c| <= cutoff`, else 0.
    PowerSpike {
        #[serde(default)]
        center: Vec<f64>,
        alpha: f64,
        cutoff: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `a` on `{x_0 >= c_0, |x - c|_∞ <= width}`: one half of a cube, with a
    /// jump across the first axis.
    Step {
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Values read from a raw value file; its grid must match the domain.
    Raw { path: String },
}

fn center_of(center: &[f64], dim: usize) -> Result<[f64; 3]> {
    if center.len() > dim {
        return Err(Error::param("center", format!("has {} coordinates, domain has {dim}", center.len())));
    }
    let mut c = [0.0; 3];
    c[..center.len()].copy_from_slice(center);
    Ok(c)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {v}")))
    }
}

impl FunctionSpec {
    pub fn build(&self, domain: Domain) -> Result<SampledFunction> {
        let d = domain.dim();
        let dist = move |x: &[f64], c: &[f64; 3]| -> f64 {
            x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        };
        let sup = move |x: &[f64], c: &[f64; 3]| -> f64 {
            x.iter().zip(c).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        match self {
            FunctionSpec::Gaussian {
                center,
                width,
                cutoff,
                amplitude,
            } => {
                positive("width", *width)?;
                let cut = cutoff.unwrap_or(4.0 * width);
                positive("cutoff", cut)?;
                let c = center_of(center, d)?;
                let two_w2 = 2.0 * width * width;
                SampledFunction::from_fn(domain, |x| {
                    let r = dist(x, &c);
                    if r <= cut {
                        amplitude * (-r * r / two_w2).exp()
                    } else {
                        0.0
                    }
                })
            }
            FunctionSpec::Indicator {
                center,
                radius,
                amplitude,
            } => {
                positive("radius", *radius)?;
                let c = center_of(center, d)?;
                SampledFunction::from_fn(domain, |x| if sup(x, &c) <= *radius { *amplitude } else { 0.0 })
            }
            FunctionSpec::PowerSpike {
                center,
                alpha,
                cutoff,
                amplitude,
            } => {
                positive("cutoff", *cutoff)?;
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return Err(Error::param("alpha", "must be nonnegative"));
                }
                let c = center_of(center, d)?;
                let floor = 0.5 * domain.h();
                SampledFunction::from_fn(domain, |x| {
                    let r = dist(x, &c);
                    if r <= *cutoff {
                        amplitude * r.max(floor).powf(-alpha)
                    } else {
                        0.0
                    }
                })
            }
            FunctionSpec::Step {
                center,
                width,
                amplitude,
            } => {
                positive("width", *width)?;
                let c = center_of(center, d)?;
                SampledFunction::from_fn(domain, |x| {
                    if x[0] >= c[0] && sup(x, &c) <= *width {
                        *amplitude
                    } else {
                        0.0
                    }
                })
            }
            FunctionSpec::Raw { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::param("path", format!("cannot read `{path}`: {e}")))?;
                let f = super::parse_raw_values(&text)?;
                if *f.domain() != domain {
                    return Err(Error::Domain(format!("raw file `{path}` has a different grid")));
                }
                Ok(f)
            }
        }
    }
}
