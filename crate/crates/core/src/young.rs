//! Young functions and growth pairs.
//!
//! A [`YoungFunction`] is a convex nondecreasing gauge with value 0 at the
//! origin that grows to infinity. Every function is stored as a base shape
//! times a positive `scale`; normalization only changes the scale, so the
//! doubling behavior of the base shape is preserved.
//!
//! Built-in shapes:
//!
//! * `power(p)`: `t^p`, `p >= 1`
//! * `plog(p, q)`: `t^p (1 + log⁺ t)^q`, the `L^p log^q L` gauge
//! * `custom`: piecewise-linear interpolant through convex knots
//! * numeric Legendre duals of any of the above
//!
//! The dual of a linear function is the threshold gauge (zero up to the
//! slope, infinite beyond). It is a legitimate gauge for Luxemburg averages
//! (it produces the sup norm) but it is flagged as degenerate because it takes
//! the value `+inf` at finite arguments.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Scalar function `[0, inf) -> [0, inf)` shared between threads.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum YoungKind {
    Power { p: f64 },
    PLog { p: f64, q: f64 },
    /// Linear interpolation through `(t, value)` knots, starting at the origin
    /// and extended past the last knot with the last slope.
    Custom { knots: Vec<(f64, f64)> },
    /// `sup_s { s t - primal(s) }` evaluated numerically.
    Dual { primal: Box<YoungFunction> },
    /// Zero on `[0, c]`, `+inf` beyond.
    Threshold { c: f64 },
    /// `t -> ∫_0^t integrand(s) ds` by adaptive quadrature.
    Integral { integrand: ScalarFn },
}

impl fmt::Debug for YoungKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungKind::Power { p } => write!(f, "Power {{ p: {p} }}"),
            YoungKind::PLog { p, q } => write!(f, "PLog {{ p: {p}, q: {q} }}"),
            YoungKind::Custom { knots } => write!(f, "Custom {{ {} knots }}", knots.len()),
            YoungKind::Dual { primal } => write!(f, "Dual {{ {:?} }}", primal),
            YoungKind::Threshold { c } => write!(f, "Threshold {{ c: {c} }}"),
            YoungKind::Integral { .. } => write!(f, "Integral"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct YoungFunction {
    kind: YoungKind,
    scale: f64,
    doubling: OnceLock<f64>,
}

/// Serialized form used in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    Power {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Plog {
        p: f64,
        q: f64,
    },
    Custom {
        knots: Vec<[f64; 2]>,
    },
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        match self {
            YoungSpec::Power { p, scale } => {
                let f = YoungFunction::power(*p)?;
                match scale {
                    Some(s) => f.scaled(*s),
                    None => Ok(f),
                }
            }
            YoungSpec::Plog { p, q } => YoungFunction::plog(*p, *q),
            YoungSpec::Custom { knots } => {
                YoungFunction::custom(knots.iter().map(|k| (k[0], k[1])).collect())
            }
        }
    }
}

/// Geometric ladder of `n` points from `lo` to `hi` inclusive.
pub fn log_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

impl YoungFunction {
    fn from_kind(kind: YoungKind) -> Self {
        YoungFunction {
            kind,
            scale: 1.0,
            doubling: OnceLock::new(),
        }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("power family needs p >= 1, got {p}")));
        }
        Ok(Self::from_kind(YoungKind::Power { p }))
    }

    /// `t^p (1 + log⁺ t)^q`.
    pub fn plog(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("plog family needs p >= 1, got {p}")));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::param("q", format!("plog family needs q >= 0, got {q}")));
        }
        Ok(Self::from_kind(YoungKind::PLog { p, q }))
    }

    /// Piecewise-linear Young function through `(t, value)` knots.
    ///
    /// Knots must have strictly increasing positive abscissae, and the slopes
    /// (including the first one from the origin) must be nonnegative and
    /// nondecreasing.
    pub fn custom(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        knots.retain(|&(t, _)| t != 0.0);
        if knots.is_empty() {
            return Err(Error::param("knots", "at least one positive knot required"));
        }
        let mut prev: (f64, f64) = (0.0, 0.0);
        let mut prev_slope: f64 = 0.0;
        for &(t, v) in &knots {
            if !(t > prev.0) || !t.is_finite() || !v.is_finite() {
                return Err(Error::param("knots", "abscissae must be finite and strictly increasing"));
            }
            let slope = (v - prev.1) / (t - prev.0);
            if slope < prev_slope - 1e-12 * prev_slope.abs().max(1.0) {
                return Err(Error::param("knots", "slopes must be nondecreasing (convexity)"));
            }
            prev_slope = slope;
            prev = (t, v);
        }
        if prev_slope <= 0.0 {
            return Err(Error::param("knots", "last slope must be positive"));
        }
        Ok(Self::from_kind(YoungKind::Custom { knots }))
    }

    /// `t -> ∫_0^t integrand`, for growth pairs without a closed form.
    pub fn integral_of(integrand: ScalarFn) -> Self {
        Self::from_kind(YoungKind::Integral { integrand })
    }

    /// Threshold gauge: 0 on `[0, c]`, `+inf` beyond.
    pub fn threshold(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", "threshold must be positive"));
        }
        Ok(Self::from_kind(YoungKind::Threshold { c }))
    }

    /// Multiplies the function by `factor > 0`.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::param("scale", "must be positive and finite"));
        }
        self.scale *= factor;
        self.doubling = OnceLock::new();
        Ok(self)
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `true` when the function is the identity `t -> t`.
    pub fn is_identity(&self) -> bool {
        matches!(self.kind, YoungKind::Power { p } if p == 1.0) && self.scale == 1.0
    }

    /// Takes the value `+inf` at finite arguments.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            YoungKind::Threshold { .. } => true,
            YoungKind::Dual { primal } => matches!(primal.kind, YoungKind::Custom { .. }),
            _ => false,
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.at(1.0) - 1.0).abs() <= 1e-12
    }

    /// Checked evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Young function evaluated at {t}")));
        }
        Ok(self.at(t))
    }

    /// Unchecked evaluation for hot loops; `t` must be nonnegative.
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        self.scale * self.base(t)
    }

    #[inline]
    fn base(&self, t: f64) -> f64 {
        match &self.kind {
            YoungKind::Power { p } => {
                if *p == 1.0 {
                    t
                } else if *p == 2.0 {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            YoungKind::PLog { p, q } => {
                let core = if *p == 1.0 { t } else { t.powf(*p) };
                if t > 1.0 && *q != 0.0 {
                    core * (1.0 + t.ln()).powf(*q)
                } else {
                    core
                }
            }
            YoungKind::Custom { knots } => custom_eval(knots, t),
            YoungKind::Dual { primal } => legendre(primal, t).0,
            YoungKind::Threshold { c } => {
                if t <= *c {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            YoungKind::Integral { integrand } => {
                quadrature::integrate(&|s| integrand(s), 0.0, t, 1e-12, 1e-300)
            }
        }
    }

    /// Right derivative. `t = 0` is accepted when the one-sided derivative exists.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::Domain(format!("derivative at {t}")));
        }
        if t == 0.0 {
            return match &self.kind {
                YoungKind::Power { p } | YoungKind::PLog { p, .. } => {
                    Ok(if *p == 1.0 { self.scale } else { 0.0 })
                }
                YoungKind::Custom { .. } | YoungKind::Threshold { .. } => {
                    Ok(self.derivative_at(0.0))
                }
                YoungKind::Integral { integrand } => Ok(self.scale * integrand(0.0)),
                YoungKind::Dual { .. } => Err(Error::Domain(
                    "derivative of a numeric dual at 0 is not defined".into(),
                )),
            };
        }
        Ok(self.derivative_at(t))
    }

    /// Unchecked right derivative for `t > 0`.
    pub fn derivative_at(&self, t: f64) -> f64 {
        let base = match &self.kind {
            YoungKind::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    p * t.powf(p - 1.0)
                }
            }
            YoungKind::PLog { p, q } => {
                let tp1 = if *p == 1.0 { 1.0 } else { t.powf(p - 1.0) };
                if t < 1.0 || *q == 0.0 {
                    p * tp1
                } else {
                    let l = 1.0 + t.ln();
                    p * tp1 * l.powf(*q) + q * tp1 * l.powf(q - 1.0)
                }
            }
            YoungKind::Custom { knots } => custom_slope(knots, t),
            YoungKind::Dual { primal } => legendre(primal, t).1,
            YoungKind::Threshold { c } => {
                if t < *c {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            YoungKind::Integral { integrand } => integrand(t),
        };
        self.scale * base
    }

    /// Diagnostic `t f'(t) / f(t)`; bounded above and below iff `f'(t) ≈ f(t)/t`.
    pub fn growth_index(&self, t: f64) -> f64 {
        t * self.derivative_at(t) / self.at(t)
    }

    /// Generalized inverse found by bracketed bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("inverse at {y}")));
        }
        Ok(self.inverse_unchecked(y))
    }

    pub fn inverse_unchecked(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        if let YoungKind::Threshold { c } = self.kind {
            return c;
        }
        let tol = 4.0 * f64::EPSILON * y;
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.at(hi) < y {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            let v = self.at(mid);
            if (v - y).abs() <= tol && v.is_finite() {
                return mid;
            }
            if v < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Complementary function `t -> sup_s { s t - f(s) }`.
    ///
    /// Closed form for the power family; numeric Legendre transform otherwise.
    /// Duals of functions with linear growth at infinity are returned but
    /// flagged by [`YoungFunction::is_degenerate`].
    pub fn complementary(&self) -> Result<YoungFunction> {
        let c = self.scale;
        match &self.kind {
            YoungKind::Power { p } if *p == 1.0 => YoungFunction::threshold(c),
            YoungKind::Power { p } => {
                let pc = p / (p - 1.0);
                let coeff = (c * p).powf(-(pc - 1.0)) / pc;
                YoungFunction::power(pc)?.scaled(coeff)
            }
            YoungKind::Threshold { c: t } => YoungFunction::power(1.0)?.scaled(*t * c),
            YoungKind::Dual { primal } if c == 1.0 => Ok((**primal).clone()),
            _ => Ok(Self::from_kind(YoungKind::Dual {
                primal: Box::new(self.clone()),
            })),
        }
    }

    /// Returns `t -> f(t) / f(1)`.
    pub fn normalize(&self) -> Result<YoungFunction> {
        let v = self.at(1.0);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Degenerate(format!(
                "cannot normalize: f(1) = {v}"
            )));
        }
        self.clone().scaled(1.0 / v)
    }

    /// `sup f(2t) / f(t)` over the ladder (points with `f(t) = 0` skipped).
    pub fn doubling_constant(&self, ladder: &[f64]) -> f64 {
        ladder
            .iter()
            .filter_map(|&t| {
                let v = self.at(t);
                (v > 0.0).then(|| self.at(2.0 * t) / v)
            })
            .fold(0.0, f64::max)
    }

    /// Doubling constant on the default ladder `[1e-6, 1e8]`, cached.
    pub fn doubling_bound(&self) -> f64 {
        *self
            .doubling
            .get_or_init(|| self.doubling_constant(&log_ladder(1e-6, 1e8, 141)))
    }

    /// Checks the structural invariants on sampled ladders.
    pub fn validate(&self) -> Result<()> {
        if self.at(0.0) != 0.0 {
            return Err(Error::Degenerate("f(0) != 0".into()));
        }
        let ladder = log_ladder(1e-6, 1e8, 200);
        let mut prev = 0.0;
        for &t in &ladder {
            let v = self.at(t);
            if v < prev {
                return Err(Error::Degenerate(format!("not nondecreasing at t = {t}")));
            }
            prev = v;
        }
        if !(prev > 1e3 * self.at(1.0).max(f64::MIN_POSITIVE)) && prev.is_finite() {
            return Err(Error::Degenerate("does not grow to infinity".into()));
        }
        let pts = log_ladder(1e-3, 1e3, 40);
        for &s in &pts {
            for &t in &pts {
                let mid = self.at(0.5 * (s + t));
                let avg = 0.5 * (self.at(s) + self.at(t));
                if mid > avg + 1e-12 * avg.abs() {
                    return Err(Error::Degenerate(format!(
                        "midpoint convexity fails at ({s}, {t})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn custom_eval(knots: &[(f64, f64)], t: f64) -> f64 {
    let mut prev = (0.0, 0.0);
    for &(kt, kv) in knots {
        if t <= kt {
            return prev.1 + (kv - prev.1) * (t - prev.0) / (kt - prev.0);
        }
        prev = (kt, kv);
    }
    prev.1 + custom_tail_slope(knots) * (t - prev.0)
}

fn custom_slope(knots: &[(f64, f64)], t: f64) -> f64 {
    let mut prev = (0.0, 0.0);
    for &(kt, kv) in knots {
        if t < kt {
            return (kv - prev.1) / (kt - prev.0);
        }
        prev = (kt, kv);
    }
    custom_tail_slope(knots)
}

fn custom_tail_slope(knots: &[(f64, f64)]) -> f64 {
    let n = knots.len();
    let (t1, v1) = knots[n - 1];
    let (t0, v0) = if n >= 2 { knots[n - 2] } else { (0.0, 0.0) };
    (v1 - v0) / (t1 - t0)
}

/// Numeric Legendre transform: returns `(sup value, maximizer)`.
///
/// `s -> s t - f(s)` is concave, so after bracketing the maximizer by
/// geometric growth a golden-section search converges to it.
fn legendre(primal: &YoungFunction, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if let YoungKind::Custom { knots } = &primal.kind {
        if t > primal.scale * custom_tail_slope(knots) {
            return (f64::INFINITY, f64::INFINITY);
        }
    }
    let mut s = 1e-8;
    loop {
        let quotient = (primal.at(2.0 * s) - primal.at(s)) / s;
        if quotient > t {
            break;
        }
        s *= 2.0;
        if s > 1e150 {
            return (f64::INFINITY, f64::INFINITY);
        }
    }
    let g = |x: f64| x * t - primal.at(x);
    let (mut a, mut b) = (0.0, 2.0 * s);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while b - a > 1e-10 * b.max(1e-300) {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + GOLDEN * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - GOLDEN * (b - a);
            g1 = g(x1);
        }
    }
    let arg = 0.5 * (a + b);
    (g(arg).max(g1).max(g2).max(0.0), arg)
}

/// Positive continuous growth function `a` or `b` of a growth pair.
#[derive(Clone)]
pub enum GrowthFunction {
    /// `coeff * s^exponent`
    Power { coeff: f64, exponent: f64 },
    Zero,
    Custom(ScalarFn),
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Power { coeff, exponent } => {
                write!(f, "Power {{ coeff: {coeff}, exponent: {exponent} }}")
            }
            GrowthFunction::Zero => write!(f, "Zero"),
            GrowthFunction::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthSpec {
    Power {
        #[serde(default = "one")]
        coeff: f64,
        exponent: f64,
    },
    Zero,
}

fn one() -> f64 {
    1.0
}

impl GrowthSpec {
    pub fn build(&self) -> Result<GrowthFunction> {
        match *self {
            GrowthSpec::Power { coeff, exponent } => GrowthFunction::power(coeff, exponent),
            GrowthSpec::Zero => Ok(GrowthFunction::Zero),
        }
    }
}

impl GrowthFunction {
    pub fn power(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff > 0.0 && coeff.is_finite()) {
            return Err(Error::param("coeff", "must be positive"));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::param("exponent", "must be positive so that a(0) = 0"));
        }
        Ok(GrowthFunction::Power { coeff, exponent })
    }

    #[inline]
    pub fn at(&self, s: f64) -> f64 {
        match self {
            GrowthFunction::Power { coeff, exponent } => coeff * s.powf(*exponent),
            GrowthFunction::Zero => 0.0,
            GrowthFunction::Custom(f) => f(s),
        }
    }

    /// `∫_0^t` of the function: closed form for powers, quadrature otherwise.
    pub fn antiderivative(&self, t: f64) -> f64 {
        match self {
            GrowthFunction::Power { coeff, exponent } => {
                coeff * t.powf(exponent + 1.0) / (exponent + 1.0)
            }
            GrowthFunction::Zero => 0.0,
            GrowthFunction::Custom(f) => {
                quadrature::integrate(&|s| f(s), 0.0, t, 1e-12, 1e-300)
            }
        }
    }

    /// The Young function `t -> ∫_0^t self`.
    pub fn young(&self) -> Result<YoungFunction> {
        match self {
            GrowthFunction::Power { coeff, exponent } => {
                YoungFunction::power(exponent + 1.0)?.scaled(coeff / (exponent + 1.0))
            }
            GrowthFunction::Zero => Err(Error::Degenerate(
                "the zero growth function has no Young primitive".into(),
            )),
            GrowthFunction::Custom(f) => Ok(YoungFunction::integral_of(f.clone())),
        }
    }
}

/// The pair `(a, b)` with `φ = ∫a`, `ψ = ∫b`.
#[derive(Clone, Debug)]
pub struct GrowthPair {
    pub a: GrowthFunction,
    pub b: GrowthFunction,
}

impl GrowthPair {
    pub fn new(a: GrowthFunction, b: GrowthFunction) -> Result<Self> {
        let pair = GrowthPair { a, b };
        pair.validate()?;
        Ok(pair)
    }

    /// `a = b = s^(p-1)`.
    pub fn lebesgue(p: f64) -> Result<Self> {
        let g = GrowthFunction::power(1.0, p - 1.0)?;
        Self::new(g.clone(), g)
    }

    pub fn phi(&self) -> Result<YoungFunction> {
        self.a.young()
    }

    pub fn psi(&self) -> Result<YoungFunction> {
        self.b.young()
    }

    fn validate(&self) -> Result<()> {
        if self.a.at(0.0).abs() > 1e-12 || self.b.at(0.0).abs() > 1e-12 {
            return Err(Error::Precondition("growth pair needs a(0) = b(0) = 0".into()));
        }
        let ladder = log_ladder(1e-6, 1e8, 120);
        let mut prev = 0.0;
        for &s in &ladder {
            let v = self.b.at(s);
            if v < prev || v < 0.0 {
                return Err(Error::Precondition(format!("b decreases at s = {s}")));
            }
            prev = v;
        }
        if !(self.b.at(1e8) > self.b.at(1.0)) {
            return Err(Error::Precondition("b must grow to infinity".into()));
        }
        self.psi()?.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(3.0).unwrap(), 9.0);
        assert_eq!(YoungFunction::plog(1.0, 0.0).unwrap().eval(5.0).unwrap(), 5.0);
        let v = YoungFunction::plog(2.0, 1.0).unwrap().eval(E).unwrap();
        assert!((v - 2.0 * E * E).abs() < 1e-12);
        assert!(YoungFunction::power(2.0).unwrap().eval(-1.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.derivative(3.0).unwrap(), 6.0);
        assert_eq!(p2.derivative(0.0).unwrap(), 0.0);
        let p3 = YoungFunction::power(3.0).unwrap();
        assert!((p3.derivative(2.0).unwrap() - 12.0).abs() < 1e-12);
        let id = YoungFunction::plog(1.0, 0.0).unwrap();
        for t in [0.0, 0.3, 1.0, 17.0] {
            assert_eq!(id.derivative(t).unwrap(), 1.0);
        }
        // right derivative at the kink is p + q
        let pl = YoungFunction::plog(2.0, 1.0).unwrap();
        assert!((pl.derivative(1.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((pl.derivative(0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert!((p2.inverse(9.0).unwrap() - 3.0).abs() < 1e-9);
        let id = YoungFunction::plog(1.0, 0.0).unwrap();
        assert!((id.inverse(7.0).unwrap() - 7.0).abs() < 1e-9);
        let pl = YoungFunction::plog(2.0, 1.0).unwrap();
        let t = pl.inverse(2.0 * E * E).unwrap();
        assert!((t - E).abs() < 1e-9);
        assert!((pl.at(t) - 2.0 * E * E).abs() <= 1e-10 * 2.0 * E * E);
    }

    #[test]
    fn complementary_examples() {
        let half_sq = YoungFunction::power(2.0).unwrap().scaled(0.5).unwrap();
        let dual = half_sq.complementary().unwrap();
        assert!((dual.at(1.0) - 0.5).abs() < 1e-14);
        for p in [1.5, 2.0, 3.0, 4.5] {
            let f = YoungFunction::power(p).unwrap().scaled(1.0 / p).unwrap();
            let closed = f.complementary().unwrap();
            let numeric = YoungFunction::from_kind(YoungKind::Dual {
                primal: Box::new(f.clone()),
            });
            let pc = p / (p - 1.0);
            for t in log_ladder(1e-2, 1e2, 17) {
                let want = t.powf(pc) / pc;
                assert!((closed.at(t) - want).abs() <= 1e-12 * want.max(1e-300));
                assert!((numeric.at(t) - want).abs() <= 1e-8 * want, "p={p} t={t}");
            }
            assert_eq!(closed.at(0.0), 0.0);
            assert_eq!(numeric.at(0.0), 0.0);
        }
    }

    #[test]
    fn linear_dual_is_threshold() {
        let id = YoungFunction::power(1.0).unwrap();
        let dual = id.complementary().unwrap();
        assert!(dual.is_degenerate());
        assert_eq!(dual.at(0.5), 0.0);
        assert!(dual.at(1.5).is_infinite());
        let back = dual.complementary().unwrap();
        assert!(back.is_identity());
    }

    #[test]
    fn custom_dual_reports_degenerate_tail() {
        let f = YoungFunction::custom(vec![(1.0, 1.0), (2.0, 3.0), (4.0, 9.0)]).unwrap();
        let dual = f.complementary().unwrap();
        assert!(dual.is_degenerate());
        assert!(dual.at(10.0).is_infinite());
        assert!(dual.at(2.5).is_finite());
    }

    #[test]
    fn normalize_examples() {
        let p2 = YoungFunction::power(2.0).unwrap().normalize().unwrap();
        assert_eq!(p2.at(3.0), 9.0);
        let three = YoungFunction::power(2.0).unwrap().scaled(3.0).unwrap();
        let n = three.normalize().unwrap();
        assert!((n.at(5.0) - 25.0).abs() < 1e-12);
        let pl = YoungFunction::plog(2.0, 1.0).unwrap();
        assert!(pl.is_normalized());
        assert_eq!(pl.normalize().unwrap().at(E), pl.at(E));
        let flat = YoungFunction::custom(vec![(1.0, 0.0), (2.0, 1.0)]).unwrap();
        assert!(flat.normalize().is_err());
    }

    #[test]
    fn doubling_examples() {
        let ladder = log_ladder(1e-3, 1e8, 200);
        assert!((YoungFunction::power(2.0).unwrap().doubling_constant(&ladder) - 4.0).abs() < 1e-12);
        assert!((YoungFunction::plog(1.0, 0.0).unwrap().doubling_constant(&ladder) - 2.0).abs() < 1e-12);
        let pl = YoungFunction::plog(2.0, 1.0).unwrap();
        let c = pl.doubling_constant(&ladder);
        assert!((4.0..=8.0).contains(&c));
        let tail = pl.doubling_constant(&log_ladder(1e6, 1e8, 20));
        assert!(tail < c && tail > 4.0);
    }

    #[test]
    fn built_in_families_validate() {
        for f in [
            YoungFunction::power(1.0).unwrap(),
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::plog(1.0, 1.0).unwrap(),
            YoungFunction::plog(2.0, 3.0).unwrap(),
            YoungFunction::custom(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap(),
        ] {
            f.validate().unwrap();
        }
    }

    #[test]
    fn custom_rejects_concave_knots() {
        assert!(YoungFunction::custom(vec![(1.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(YoungFunction::custom(vec![(2.0, 1.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn psi_from_power_b_matches_quadrature() {
        for p in [1.5, 2.0, 3.0] {
            let closed = GrowthPair::lebesgue(p).unwrap().psi().unwrap();
            let quad = GrowthFunction::Custom(Arc::new(move |s: f64| s.powf(p - 1.0)))
                .young()
                .unwrap();
            for t in log_ladder(1e-3, 1e3, 13) {
                let want = t.powf(p) / p;
                assert!((closed.at(t) - want).abs() <= 1e-12 * want);
                assert!((quad.at(t) - want).abs() <= 1e-8 * want, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn growth_pair_rejects_decreasing_b() {
        let a = GrowthFunction::power(1.0, 1.0).unwrap();
        let b = GrowthFunction::Custom(Arc::new(|s: f64| s * (-s).exp()));
        assert!(GrowthPair::new(a, b).is_err());
    }

    #[test]
    fn growth_index_diagnostic() {
        let p3 = YoungFunction::power(3.0).unwrap();
        assert!((p3.growth_index(7.0) - 3.0).abs() < 1e-12);
        let pl = YoungFunction::plog(1.0, 1.0).unwrap();
        let g = pl.growth_index(100.0);
        assert!(g > 1.0 && g < 2.0);
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"family":"plog","p":2.0,"q":1.0}"#;
        let spec: YoungSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, YoungSpec::Plog { p: 2.0, q: 1.0 });
        assert!(serde_json::from_str::<YoungSpec>(r#"{"family":"plog","p":2,"q":1,"x":0}"#).is_err());
        let custom: YoungSpec =
            serde_json::from_str(r#"{"family":"custom","knots":[[1,1],[2,3]]}"#).unwrap();
        assert!(custom.build().is_ok());
    }
}
