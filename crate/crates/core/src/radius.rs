//! Critical radius functions, their variation constants, and the critical
//! covering.
//!
//! A critical radius `ρ > 0` comes with constants `C0, N0 >= 1` such that for
//! all `x, y`
//!
//! ```text
//! C0⁻¹ ρ(x) (1 + |x-y|/ρ(x))^{-N0}  <=  ρ(y)  <=  C0 ρ(x) (1 + |x-y|/ρ(x))^{N0/(N0+1)}.
//! ```
//!
//! Built-in families and their default constants:
//!
//! | family          | ρ(x)               | (C0, N0)                          |
//! |-----------------|--------------------|-----------------------------------|
//! | `constant`      | `c`                | `(1, 1)`                          |
//! | `inverse_power` | `c / (1 + |x|)`    | `(max(c, 2√c/√3, 2/√3), 1)`       |
//! | `custom`        | `c (1 + |x|)^{-k}` | must be declared                  |
//!
//! For `inverse_power` with `c = 1` the upper inequality at `y = 0`,
//! `|x| = 1` needs `C0 >= (4/3)^{1/2}`; `C0 = 1` is not enough.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Cube, Domain};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusFamily {
    Constant { c: f64 },
    InversePower { c: f64 },
    Custom { c: f64, exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalRadius {
    family: RadiusFamily,
    c0: f64,
    n0: f64,
}

/// `{"family": "constant" | "inverse_power" | "custom", "c": .., "C0": .., "N0": ..}`;
/// `custom` also takes `"exponent"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoSpec {
    pub family: String,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(rename = "C0", default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(rename = "N0", default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl RhoSpec {
    pub fn build(&self) -> Result<CriticalRadius> {
        let base = match self.family.as_str() {
            "constant" => {
                if self.exponent.is_some() {
                    return Err(Error::param("exponent", "only valid for the custom family"));
                }
                CriticalRadius::constant(self.c)?
            }
            "inverse_power" => {
                if self.exponent.is_some() {
                    return Err(Error::param("exponent", "only valid for the custom family"));
                }
                CriticalRadius::inverse_power(self.c)?
            }
            "custom" => {
                let k = self
                    .exponent
                    .ok_or_else(|| Error::param("exponent", "required for the custom family"))?;
                let (c0, n0) = self
                    .c0
                    .zip(self.n0)
                    .ok_or_else(|| Error::param("C0", "custom family needs declared C0 and N0"))?;
                return CriticalRadius::custom(self.c, k, c0, n0);
            }
            other => return Err(Error::param("family", format!("unknown critical radius family `{other}`"))),
        };
        base.with_constants(self.c0.unwrap_or(base.c0), self.n0.unwrap_or(base.n0))
    }
}

impl From<&CriticalRadius> for RhoSpec {
    fn from(r: &CriticalRadius) -> Self {
        let (family, c, exponent) = match r.family {
            RadiusFamily::Constant { c } => ("constant", c, None),
            RadiusFamily::InversePower { c } => ("inverse_power", c, None),
            RadiusFamily::Custom { c, exponent } => ("custom", c, Some(exponent)),
        };
        RhoSpec {
            family: family.into(),
            c,
            c0: Some(r.c0),
            n0: Some(r.n0),
            exponent,
        }
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::param("c", format!("must be positive, got {c}")))
    }
}

/// Outcome of checking the variation inequalities on a sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoValidation {
    pub ok: bool,
    /// Smallest factor by which a checked inequality holds (`>= 1` when it
    /// holds); the pair realizing it is `worst_pair`.
    pub slack: f64,
    pub worst_pair: Option<(usize, usize)>,
    /// `"lower"` or `"upper"`.
    pub worst_side: Option<&'static str>,
    pub pairs_checked: usize,
}

impl CriticalRadius {
    pub fn constant(c: f64) -> Result<Self> {
        check_c(c)?;
        Ok(CriticalRadius {
            family: RadiusFamily::Constant { c },
            c0: 1.0,
            n0: 1.0,
        })
    }

    /// `ρ(x) = c/(1 + |x|)` with its default constants.
    pub fn inverse_power(c: f64) -> Result<Self> {
        check_c(c)?;
        let c0 = c.max(2.0 * (c / 3.0).sqrt()).max(2.0 / 3f64.sqrt());
        Ok(CriticalRadius {
            family: RadiusFamily::InversePower { c },
            c0,
            n0: 1.0,
        })
    }

    /// `ρ(x) = c (1 + |x|)^{-exponent}` with declared constants.
    pub fn custom(c: f64, exponent: f64, c0: f64, n0: f64) -> Result<Self> {
        check_c(c)?;
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(Error::param("exponent", "must be nonnegative"));
        }
        CriticalRadius {
            family: RadiusFamily::Custom { c, exponent },
            c0: 1.0,
            n0: 1.0,
        }
        .with_constants(c0, n0)
    }

    /// Replaces the declared `(C0, N0)`.
    pub fn with_constants(mut self, c0: f64, n0: f64) -> Result<Self> {
        if !(c0 >= 1.0 && c0.is_finite()) {
            return Err(Error::param("C0", format!("must be >= 1, got {c0}")));
        }
        if !(n0 >= 1.0 && n0.is_finite()) {
            return Err(Error::param("N0", format!("must be >= 1, got {n0}")));
        }
        self.c0 = c0;
        self.n0 = n0;
        Ok(self)
    }

    pub fn family(&self) -> RadiusFamily {
        self.family
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let norm = || x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self.family {
            RadiusFamily::Constant { c } => c,
            RadiusFamily::InversePower { c } => c / (1.0 + norm()),
            RadiusFamily::Custom { c, exponent } => c * (1.0 + norm()).powf(-exponent),
        }
    }

    /// Multiplicative slacks `(lower, upper)` of the ordered pair `(x, y)`
    /// under constants `(c0, n0)`; each is `>= 1` iff that side holds.
    pub fn pair_slack(&self, x: &[f64], y: &[f64], c0: f64, n0: f64) -> (f64, f64) {
        let rx = self.eval(x);
        let ry = self.eval(y);
        let dist = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let t = 1.0 + dist / rx;
        let lower = ry / (rx * t.powf(-n0) / c0);
        let upper = c0 * rx * t.powf(n0 / (n0 + 1.0)) / ry;
        (lower, upper)
    }

    /// Checks both inequalities for every ordered pair of `points` with the
    /// declared constants.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<RhoValidation> {
        self.validate_with(points, self.c0, self.n0)
    }

    pub fn validate_with(&self, points: &[Vec<f64>], c0: f64, n0: f64) -> Result<RhoValidation> {
        if points.len() < 2 {
            return Err(Error::param("points", "need at least two points"));
        }
        let per_row: Vec<(f64, usize, &'static str)> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let mut best = (f64::INFINITY, usize::MAX, "lower");
                for (j, y) in points.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let (lo, up) = self.pair_slack(&points[i], y, c0, n0);
                    if lo < best.0 {
                        best = (lo, j, "lower");
                    }
                    if up < best.0 {
                        best = (up, j, "upper");
                    }
                }
                best
            })
            .collect();
        let mut slack = f64::INFINITY;
        let mut worst = None;
        for (i, &(s, j, side)) in per_row.iter().enumerate() {
            if s < slack {
                slack = s;
                worst = Some((i, j, side));
            }
        }
        let n = points.len();
        Ok(RhoValidation {
            ok: slack >= 1.0 - 1e-12,
            slack,
            worst_pair: worst.map(|(i, j, _)| (i, j)),
            worst_side: worst.map(|(_, _, s)| s),
            pairs_checked: n * (n - 1),
        })
    }

    /// Scans the lattice and returns the feasible `(C0, N0)` with the
    /// smallest `C0` (ties broken by smallest `N0`).
    pub fn search_constants(&self, points: &[Vec<f64>], c0s: &[f64], n0s: &[f64]) -> Result<Option<(f64, f64)>> {
        let mut c0s = c0s.to_vec();
        let mut n0s = n0s.to_vec();
        c0s.sort_by(f64::total_cmp);
        n0s.sort_by(f64::total_cmp);
        for &c0 in &c0s {
            for &n0 in &n0s {
                if c0 < 1.0 || n0 < 1.0 {
                    continue;
                }
                if self.validate_with(points, c0, n0)?.ok {
                    return Ok(Some((c0, n0)));
                }
            }
        }
        Ok(None)
    }

    /// `C_ρ = sqrt(n) (2^{N0+2} C0² + 1)`.
    pub fn enlargement_constant(&self, dim: usize) -> f64 {
        (dim as f64).sqrt() * (2f64.powf(self.n0 + 2.0) * self.c0 * self.c0 + 1.0)
    }

    /// The critical cube `Q(x, ρ(x))`.
    pub fn critical_cube(&self, x: &[f64]) -> Cube {
        Cube::with_radius(x, self.eval(x)).expect("ρ > 0")
    }

    /// `R_j = Q(x_j, C_ρ ρ(x_j))`: contains every subcritical cube meeting `Q_j`.
    pub fn enlarged_critical_cube(&self, x: &[f64]) -> Cube {
        Cube::with_radius(x, self.enlargement_constant(x.len()) * self.eval(x)).expect("ρ > 0")
    }
}

/// Centers `x_j` chosen greedily in scan order so that the critical cubes
/// `Q_j = Q(x_j, ρ(x_j))` cover every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCovering {
    pub domain: Domain,
    /// Flat grid indices of the centers, in selection order.
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapProfile {
    pub sigmas: Vec<f64>,
    /// Max over grid points of `#{j : x ∈ σ Q_j}`, per σ.
    pub counts: Vec<usize>,
    /// Least-squares slope of `log count` against `log σ`.
    pub n1: f64,
    /// `exp` of the fitted intercept.
    pub constant: f64,
}

impl CriticalCovering {
    pub fn cube(&self, j: usize) -> Cube {
        let p = self.domain.point(self.centers[j]);
        Cube::with_radius(&p[..self.domain.dim()], self.radii[j]).expect("ρ > 0")
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Per grid point, the number of cubes `σ Q_j` containing it.
    pub fn multiplicity(&self, sigma: f64) -> Vec<usize> {
        let mut counts = vec![0usize; self.domain.len()];
        for j in 0..self.len() {
            if let Some(b) = self.domain.cube_box(&self.cube(j).dilate(sigma)) {
                self.domain.for_each_in_box(&b, |i| counts[i] += 1);
            }
        }
        counts
    }

    pub fn covers_all(&self) -> bool {
        self.multiplicity(1.0).iter().all(|&c| c > 0)
    }
}

pub fn critical_covering(rho: &CriticalRadius, domain: &Domain) -> CriticalCovering {
    let d = domain.dim();
    let mut covered = vec![false; domain.len()];
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    for i in 0..domain.len() {
        if covered[i] {
            continue;
        }
        let p = domain.point(i);
        let r = rho.eval(&p[..d]);
        let q = Cube::with_radius(&p[..d], r).expect("ρ > 0");
        if let Some(b) = domain.cube_box(&q) {
            domain.for_each_in_box(&b, |k| covered[k] = true);
        }
        covered[i] = true;
        centers.push(i);
        radii.push(r);
    }
    CriticalCovering {
        domain: *domain,
        centers,
        radii,
    }
}

pub fn overlap_profile(cov: &CriticalCovering, sigmas: &[f64]) -> Result<OverlapProfile> {
    if sigmas.is_empty() || sigmas.iter().any(|&s| !(s >= 1.0 && s.is_finite())) {
        return Err(Error::param("sigmas", "need a nonempty list of σ >= 1"));
    }
    let counts: Vec<usize> = sigmas
        .iter()
        .map(|&s| cov.multiplicity(s).into_iter().max().unwrap_or(0))
        .collect();
    let xs: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let (n1, intercept) = least_squares(&xs, &ys);
    Ok(OverlapProfile {
        sigmas: sigmas.to_vec(),
        counts,
        n1,
        constant: intercept.exp(),
    })
}

/// Slope and intercept of the least-squares line; slope 0 for a single point.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Outcome of checking the radius comparison and containment for one cube
/// of the supercritical layer `S_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkReport {
    pub k: u32,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
    /// `ρ(x_Q)/ρ(x_j)`.
    pub rho_ratio: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub contained: bool,
}

impl SkReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.contained
    }
}

/// For `x ∈ Q_j ∩ Q` and `Q ∈ S_k` (`b^{k-1}ρ(x_Q) < r_Q <= b^k ρ(x_Q)`,
/// `b = 4^{N0}`), checks `C1⁻¹ b^{-N0 k} <= ρ(x_Q)/ρ(x_j) <= C1 b^{N0 k}`
/// with `C1 = 4^{N0} C0`, and `Q ⊆ C2 d^k Q_j` with `d = b^{N0+1}`,
/// `C2 = 4 sqrt(n) C1`.
pub fn sk_bounds_check(rho: &CriticalRadius, x_j: &[f64], x: &[f64], q: &Cube, k: u32) -> Result<SkReport> {
    let n = x_j.len();
    if q.dim() != n || x.len() != n {
        return Err(Error::param("Q", "dimension mismatch"));
    }
    if k == 0 {
        return Err(Error::param("k", "must be a positive integer"));
    }
    let (c0, n0) = (rho.c0(), rho.n0());
    let b = 4f64.powf(n0);
    let rq = q.radius();
    let rho_q = rho.eval(q.center());
    let kf = f64::from(k);
    if !(b.powf(kf - 1.0) * rho_q < rq && rq <= b.powf(kf) * rho_q * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!("cube of radius {rq} is not in S_{k} (ρ(x_Q) = {rho_q})")));
    }
    let qj = rho.critical_cube(x_j);
    if !q.contains_point(x) || !qj.contains_point(x) {
        return Err(Error::Precondition("x must lie in both Q and Q_j".into()));
    }
    let c1 = 4f64.powf(n0) * c0;
    let d = b.powf(n0 + 1.0);
    let c2 = 4.0 * (n as f64).sqrt() * c1;
    let rho_j = rho.eval(x_j);
    let ratio = rho_q / rho_j;
    let tol = 1.0 + 1e-12;
    Ok(SkReport {
        k,
        b,
        c1,
        c2,
        d,
        rho_ratio: ratio,
        lower_ok: ratio * tol >= b.powf(-n0 * kf) / c1,
        upper_ok: ratio <= c1 * b.powf(n0 * kf) * tol,
        contained: qj.dilate(c2 * d.powf(kf)).contains_cube(q, 1e-12),
    })
}
