//! Maximal operators over the discrete cube family, and pointwise checks
//! between them.
//!
//! Every operator here is a supremum over an explicit finite set of cubes
//! (or balls), so each result is a lower bound of its continuum counterpart.
//! Inequalities between two operators are only meaningful when both sides
//! use the same set; all checks below do.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{dyadic_children, Cube, CubeFamily, Domain, FamilyCube, SampledFunction, ShiftedDyadicGrids};
use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_of_values, luxemburg_on_box};
use crate::radius::{least_squares, CriticalRadius};
use crate::young::{YoungFunction, YoungSpec};

/// `(1 + r/ρ)^{-σ}`.
#[inline]
pub fn damping(radius: f64, rho: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else {
        (1.0 + radius / rho).powf(-sigma)
    }
}

fn same_grid(f: &SampledFunction, family: &CubeFamily) -> Result<()> {
    if f.domain() != family.domain() {
        return Err(Error::Domain("function and cube family live on different grids".into()));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::param("sigma", format!("must be finite and >= 0, got {sigma}")))
    }
}

fn rho_at_center(rho: &CriticalRadius, q: &FamilyCube) -> f64 {
    rho.eval(q.cube.center())
}

/// Plain average of `|f|` over a family cube (prefix-sum lookup).
#[inline]
fn mean_on(abs: &SampledFunction, q: &FamilyCube) -> f64 {
    abs.domain().cell_measure() * abs.box_sum(&q.index_box) / q.cube.measure()
}

/// `M^{ρ,σ} f(x) = max_{Q ∋ x} (1 + r_Q/ρ(x_Q))^{-σ} (1/|Q|) ∫_Q |f|`.
pub fn hl_maximal(f: &SampledFunction, sigma: f64, rho: &CriticalRadius, family: &CubeFamily) -> Result<SampledFunction> {
    same_grid(f, family)?;
    check_sigma(sigma)?;
    let abs = f.abs();
    let out = family.sweep(|q| Some(damping(q.cube.radius(), rho_at_center(rho, q), sigma) * mean_on(&abs, q)));
    Ok(SampledFunction::from_raw_unchecked(*f.domain(), out))
}

/// `M_η^{ρ,σ} f`, the same supremum with Luxemburg averages.
pub fn orlicz_maximal(
    f: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    rho: &CriticalRadius,
    family: &CubeFamily,
) -> Result<SampledFunction> {
    if eta.is_identity() {
        return hl_maximal(f, sigma, rho, family);
    }
    same_grid(f, family)?;
    check_sigma(sigma)?;
    let out = family.sweep(|q| {
        let mut scratch = Vec::new();
        let avg = luxemburg_on_box(f, &q.index_box, q.cube.measure(), eta, &mut scratch);
        Some(damping(q.cube.radius(), rho_at_center(rho, q), sigma) * avg)
    });
    Ok(SampledFunction::from_raw_unchecked(*f.domain(), out))
}

/// Grid offsets (in cells) within Euclidean distance `r` of the origin.
fn ball_offsets(domain: &Domain, r: f64) -> Vec<[i64; 3]> {
    let h = domain.h();
    let d = domain.dim();
    let m = (r / h).floor() as i64;
    let mut out = Vec::new();
    let range = |a: usize| if a < d { -m..=m } else { 0..=0 };
    for i in range(0) {
        for j in range(1) {
            for k in range(2) {
                let dist2 = ((i * i + j * j + k * k) as f64) * h * h;
                if dist2 <= r * r * (1.0 + 1e-12) {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

/// Volume of the Euclidean ball of radius `r` in dimension `d <= 3`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    match d {
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
    }
}

fn check_radii(domain: &Domain, radii: &[f64]) -> Result<()> {
    let max = 2.0 * (domain.dim() as f64).sqrt() * domain.half_width();
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r <= max * (1.0 + 1e-12))) {
        return Err(Error::param("radii", format!("need a nonempty ladder in (0, {max}]")));
    }
    Ok(())
}

struct BallLadder {
    radii: Vec<f64>,
    offsets: Vec<Vec<[i64; 3]>>,
    measures: Vec<f64>,
}

impl BallLadder {
    fn new(domain: &Domain, radii: &[f64]) -> Self {
        BallLadder {
            radii: radii.to_vec(),
            offsets: radii.iter().map(|&r| ball_offsets(domain, r)).collect(),
            measures: radii.iter().map(|&r| ball_offsets(domain, r).len() as f64 * domain.cell_measure()).collect(),
        }
    }

    fn value_at(&self, f: &SampledFunction, eta: &YoungFunction, sigma: f64, rho_x: f64, x: usize, scratch: &mut Vec<f64>) -> f64 {
        let domain = f.domain();
        let n = domain.cells() as i64;
        let d = domain.dim();
        let base = domain.multi_index(x);
        let mut best = 0.0f64;
        for (k, offs) in self.offsets.iter().enumerate() {
            scratch.clear();
            for o in offs {
                let mut idx = [0usize; 3];
                let mut inside = true;
                for a in 0..d {
                    let v = base[a] as i64 + o[a];
                    if !(0..n).contains(&v) {
                        inside = false;
                        break;
                    }
                    idx[a] = v as usize;
                }
                if inside {
                    let v = f.values()[domain.flat_index(idx)].abs();
                    if v != 0.0 {
                        scratch.push(v);
                    }
                }
            }
            let avg = luxemburg_of_values(scratch, domain.cell_measure() / self.measures[k], eta);
            best = best.max(damping(self.radii[k], rho_x, sigma) * avg);
        }
        best
    }
}

/// Centered maximal over balls `B(x, r)`, `r` in the ladder. A ball is the
/// set of lattice points within distance `r` of `x` (points beyond the grid
/// carry zero), and `|B|` is its point count times the cell measure, so
/// constants average to themselves exactly.
pub fn centered_ball_maximal(
    f: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    rho: &CriticalRadius,
    radii: &[f64],
) -> Result<SampledFunction> {
    check_sigma(sigma)?;
    let domain = *f.domain();
    check_radii(&domain, radii)?;
    let ladder = BallLadder::new(&domain, radii);
    let d = domain.dim();
    let out: Vec<f64> = (0..domain.len())
        .into_par_iter()
        .map_init(Vec::new, |scratch, x| {
            let p = domain.point(x);
            ladder.value_at(f, eta, sigma, rho.eval(&p[..d]), x, scratch)
        })
        .collect();
    Ok(SampledFunction::from_raw_unchecked(domain, out))
}

/// [`centered_ball_maximal`] at selected grid points only.
pub fn centered_ball_maximal_at(
    f: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    rho: &CriticalRadius,
    radii: &[f64],
    points: &[usize],
) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let domain = *f.domain();
    check_radii(&domain, radii)?;
    let ladder = BallLadder::new(&domain, radii);
    let d = domain.dim();
    points
        .par_iter()
        .map_init(Vec::new, |scratch, &x| {
            if x >= domain.len() {
                return Err(Error::param("points", "grid index out of range"));
            }
            let p = domain.point(x);
            Ok(ladder.value_at(f, eta, sigma, rho.eval(&p[..d]), x, scratch))
        })
        .collect()
}

/// `M_{η,R} f(x)`: supremum over family cubes `Q ⊆ R` containing `x`;
/// zero outside `R`.
pub fn localized_maximal(f: &SampledFunction, eta: &YoungFunction, region: &Cube, family: &CubeFamily) -> Result<SampledFunction> {
    same_grid(f, family)?;
    let out = family.sweep(|q| {
        if !region.contains_cube(&q.cube, 1e-12) {
            return None;
        }
        let mut scratch = Vec::new();
        Some(luxemburg_on_box(f, &q.index_box, q.cube.measure(), eta, &mut scratch))
    });
    Ok(restrict(f.domain(), out, region))
}

fn restrict(domain: &Domain, mut values: Vec<f64>, region: &Cube) -> SampledFunction {
    let d = domain.dim();
    for (i, v) in values.iter_mut().enumerate() {
        if !region.contains_point(&domain.point(i)[..d]) {
            *v = 0.0;
        }
    }
    SampledFunction::from_raw_unchecked(*domain, values)
}

/// `M^𝒟_{η,R} f(x)`: supremum over the dyadic descendants of `R` (down to
/// single cells) containing `x`; zero outside `R`.
pub fn dyadic_localized_maximal(f: &SampledFunction, eta: &YoungFunction, region: &Cube) -> Result<SampledFunction> {
    let domain = *f.domain();
    let h = domain.h();
    let mut out = vec![0.0f64; domain.len()];
    let mut level = vec![*region];
    let mut scratch = Vec::new();
    while !level.is_empty() {
        for q in &level {
            if let Some(b) = domain.cube_box(q) {
                let v = luxemburg_on_box(f, &b, q.measure(), eta, &mut scratch);
                domain.for_each_in_box(&b, |i| out[i] = out[i].max(v));
            }
        }
        level = level
            .iter()
            .filter(|q| q.side() > h * (1.0 + 1e-9) && domain.cube_box(q).is_some())
            .flat_map(dyadic_children)
            .collect();
    }
    Ok(SampledFunction::from_raw_unchecked(domain, out))
}

/// Outcome of comparing the localized maximal over a cube `Q` with the sum
/// over the shifted grids of dyadic maximals inside `8 sqrt(n) Q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalToDyadicReport {
    pub constant: f64,
    pub points: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` over points with `lhs > 0`.
    pub max_ratio: f64,
}

/// Checks `M_{η,Q} f(x) <= 3^n Σ_i sup { ‖f χ_Q‖_{η,P} : P ∈ 𝒟^{(i)}, x ∈ P ⊆ 8 sqrt(n) Q }`
/// at every grid point of `Q`. Dyadic cubes have side at least `h`, the
/// smallest family side, so the containing-cube argument transfers exactly
/// to the discrete setting.
pub fn local_to_dyadic_check(f: &SampledFunction, eta: &YoungFunction, q: &Cube, family: &CubeFamily) -> Result<LocalToDyadicReport> {
    same_grid(f, family)?;
    let domain = *f.domain();
    let d = domain.dim();
    let lhs = localized_maximal(f, eta, q, family)?;
    let fq = {
        let mut v = f.values().to_vec();
        for (i, x) in v.iter_mut().enumerate() {
            if !q.contains_point(&domain.point(i)[..d]) {
                *x = 0.0;
            }
        }
        SampledFunction::from_raw_unchecked(domain, v)
    };
    let big = q.dilate(8.0 * (d as f64).sqrt());
    let grids = ShiftedDyadicGrids::new(d)?;
    let h = domain.h();
    let kmin = (h.log2() - 1e-9).ceil() as i32;
    let kmax = (big.side().log2() + 1e-9).floor() as i32;
    let per_grid: Vec<Vec<f64>> = (0..grids.count())
        .into_par_iter()
        .map(|g| {
            let mut best = vec![0.0f64; domain.len()];
            let mut scratch = Vec::new();
            for k in kmin..=kmax {
                let side = 2f64.powi(k);
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let t = grids.shift(g);
                let mut ranges = [(0i64, 0i64); 3];
                for a in 0..d {
                    let off = sign * f64::from(t[a]) / 3.0;
                    let lo = (big.lower(a).max(-domain.half_width()) / side - off - 1e-9).ceil() as i64;
                    let hi = ((big.upper(a).min(domain.half_width()) / side - off + 1e-9).floor() as i64) - 1;
                    ranges[a] = (lo, hi);
                }
                for a in d..3 {
                    ranges[a] = (0, 0);
                }
                for m0 in ranges[0].0..=ranges[0].1 {
                    for m1 in ranges[1].0..=ranges[1].1 {
                        for m2 in ranges[2].0..=ranges[2].1 {
                            let m = [m0, m1, m2];
                            let mut c = [0.0; 3];
                            for a in 0..d {
                                let off = sign * f64::from(t[a]) / 3.0;
                                c[a] = side * (m[a] as f64 + off) + 0.5 * side;
                            }
                            let p = Cube::new(&c[..d], 0.5 * side).expect("positive side");
                            if !big.contains_cube(&p, 1e-12) {
                                continue;
                            }
                            if let Some(b) = domain.cube_box(&p) {
                                let v = luxemburg_on_box(&fq, &b, p.measure(), eta, &mut scratch);
                                domain.for_each_in_box(&b, |i| best[i] = best[i].max(v));
                            }
                        }
                    }
                }
            }
            best
        })
        .collect();
    let constant = 3f64.powi(d as i32);
    let mut violations = 0;
    let mut points = 0;
    let mut max_ratio = 0.0f64;
    for i in 0..domain.len() {
        if !q.contains_point(&domain.point(i)[..d]) {
            continue;
        }
        points += 1;
        let rhs = constant * per_grid.iter().map(|g| g[i]).sum::<f64>();
        let l = lhs.values()[i];
        if l > rhs * (1.0 + 1e-10) {
            violations += 1;
        }
        if l > 0.0 {
            max_ratio = max_ratio.max(l / rhs);
        }
    }
    Ok(LocalToDyadicReport {
        constant,
        points,
        violations,
        max_ratio,
    })
}

/// `(local, global)`: the supremum over subcritical and critical cubes with
/// no damping, and over supercritical cubes with factor `(ρ(x_Q)/r_Q)^σ`.
pub fn local_global_split(
    f: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    rho: &CriticalRadius,
    family: &CubeFamily,
) -> Result<(SampledFunction, SampledFunction)> {
    same_grid(f, family)?;
    check_sigma(sigma)?;
    let avg = |q: &FamilyCube| {
        let mut scratch = Vec::new();
        luxemburg_on_box(f, &q.index_box, q.cube.measure(), eta, &mut scratch)
    };
    let is_local = |q: &FamilyCube| q.cube.radius() <= rho_at_center(rho, q) * (1.0 + 1e-12);
    let local = family.sweep(|q| is_local(q).then(|| avg(q)));
    let global = family.sweep(|q| {
        (!is_local(q)).then(|| (rho_at_center(rho, q) / q.cube.radius()).powf(sigma) * avg(q))
    });
    Ok((
        SampledFunction::from_raw_unchecked(*f.domain(), local),
        SampledFunction::from_raw_unchecked(*f.domain(), global),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub points: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` (0 when every lhs vanishes).
    pub max_ratio: f64,
}

fn compare(lhs: &[f64], rhs: &[f64], rel_tol: f64) -> PointwiseReport {
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for (&l, &r) in lhs.iter().zip(rhs) {
        if l > r * (1.0 + rel_tol) + f64::MIN_POSITIVE {
            violations += 1;
        }
        if l > 0.0 {
            max_ratio = max_ratio.max(l / r);
        }
    }
    PointwiseReport {
        points: lhs.len(),
        violations,
        max_ratio,
    }
}

/// `Φ_{p,q}(M^{ρ,θ} f(x)) <= [M^{ρ,σ}(Φ_{p/a,q/a}(|f|))(x)]^a` with `θ = σa`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_power_bound_check(
    f: &SampledFunction,
    p: f64,
    q: f64,
    a: f64,
    theta: f64,
    sigma: f64,
    rho: &CriticalRadius,
    family: &CubeFamily,
) -> Result<PointwiseReport> {
    if !(a > 1.0) {
        return Err(Error::Precondition(format!("need a > 1, got {a}")));
    }
    if !(p / a >= 1.0) || !(q >= 0.0) {
        return Err(Error::Precondition(format!("need p/a >= 1 and q >= 0, got p = {p}, q = {q}, a = {a}")));
    }
    if (theta - sigma * a).abs() > 1e-12 * theta.abs().max(1.0) {
        return Err(Error::Precondition(format!("need θ = σa, got θ = {theta}, σa = {}", sigma * a)));
    }
    let outer = YoungFunction::plog(p, q)?;
    let inner = YoungFunction::plog(p / a, q / a)?;
    let lhs = hl_maximal(f, theta, rho, family)?.map(|v| outer.at(v));
    let composed = f.map(|v| inner.at(v.abs()));
    let rhs = hl_maximal(&composed, sigma, rho, family)?.map(|v| v.powf(a));
    Ok(compare(lhs.values(), rhs.values(), 1e-12))
}

/// `M^{ρ,γ}(f u) <= 2 M_η^{ρ,σ} f · M_{η̃}^{ρ,γ-σ} u` pointwise (same family).
pub fn pointwise_product_bound_check(
    f: &SampledFunction,
    u: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    gamma: f64,
    rho: &CriticalRadius,
    family: &CubeFamily,
) -> Result<PointwiseReport> {
    if gamma < sigma {
        return Err(Error::Precondition(format!("need γ >= σ, got γ = {gamma}, σ = {sigma}")));
    }
    let fu = f.zip_with(u, |a, b| a * b)?;
    let lhs = hl_maximal(&fu, gamma, rho, family)?;
    let mf = orlicz_maximal(f, eta, sigma, rho, family)?;
    let mu = orlicz_maximal(u, &eta.complementary()?, gamma - sigma, rho, family)?;
    let rhs: Vec<f64> = mf.values().iter().zip(mu.values()).map(|(a, b)| 2.0 * a * b).collect();
    Ok(compare(lhs.values(), &rhs, 1e-8))
}

/// Empirical constants of `C1 M_c^σ <= M^σ <= C2 M_c^{σ/(N0+1)}`
/// (uncentered family maximal between two centered ball maximals).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub c1: f64,
    pub c2: f64,
}

pub fn sandwich_constants(
    f: &SampledFunction,
    eta: &YoungFunction,
    sigma: f64,
    rho: &CriticalRadius,
    family: &CubeFamily,
    radii: &[f64],
) -> Result<SandwichReport> {
    let unc = orlicz_maximal(f, eta, sigma, rho, family)?;
    let cen = centered_ball_maximal(f, eta, sigma, rho, radii)?;
    let low = centered_ball_maximal(f, eta, sigma / (rho.n0() + 1.0), rho, radii)?;
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for i in 0..unc.values().len() {
        let u = unc.values()[i];
        if cen.values()[i] > 0.0 {
            c1 = c1.min(u / cen.values()[i]);
        }
        if u > 0.0 {
            c2 = c2.max(u / low.values()[i]);
        }
    }
    Ok(SandwichReport { c1, c2 })
}

/// Decay of centered maximals of the indicator of a critical ball
/// `B0 = B(x0, ρ(x0))`, sampled at points outside `2 B0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharBallReport {
    /// `|x - x0| / ρ(x0)` per point.
    pub distances: Vec<f64>,
    /// Centered maximal (`φ = t`, exponent σ) of `χ_{B0}`.
    pub centered: Vec<f64>,
    /// Centered `φ`-maximal (exponent σ) of `χ_{B0}`.
    pub centered_phi: Vec<f64>,
    /// Lower-bound shape `D^{-(n + σ(N0+1))}`.
    pub lower_shape: Vec<f64>,
    /// Upper-bound shape `D^{-σ/(N0+1)} / φ⁻¹(D^n)`.
    pub upper_shape: Vec<f64>,
    /// `min centered / lower_shape`; positive when the lower bound holds.
    pub lower_constant: f64,
    /// `max centered_phi / upper_shape`.
    pub upper_constant: f64,
    /// Log-log slopes (negated, so decay rates are positive).
    pub centered_decay: f64,
    pub centered_phi_decay: f64,
    pub lower_decay: f64,
    pub upper_decay: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn char_ball_bounds_check(
    domain: &Domain,
    x0: &[f64],
    sigma: f64,
    rho: &CriticalRadius,
    phi: &YoungFunction,
    points: &[usize],
    radii: &[f64],
) -> Result<CharBallReport> {
    let d = domain.dim();
    if x0.len() != d {
        return Err(Error::param("x0", "dimension mismatch"));
    }
    if points.len() < 2 {
        return Err(Error::param("points", "need at least two points"));
    }
    let r0 = rho.eval(x0);
    let dist = |i: usize| {
        let p = domain.point(i);
        p[..d].iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    for &i in points {
        if i >= domain.len() {
            return Err(Error::param("points", "grid index out of range"));
        }
        if dist(i) <= 2.0 * r0 {
            return Err(Error::Precondition(format!("point {i} lies in the closed ball 2B0")));
        }
    }
    let chi = SampledFunction::from_fn(*domain, |x| {
        let r = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if r <= r0 {
            1.0
        } else {
            0.0
        }
    })?;
    let identity = YoungFunction::power(1.0)?;
    let centered = centered_ball_maximal_at(&chi, &identity, sigma, rho, radii, points)?;
    let centered_phi = centered_ball_maximal_at(&chi, phi, sigma, rho, radii, points)?;
    let n = d as f64;
    let n0 = rho.n0();
    let distances: Vec<f64> = points.iter().map(|&i| dist(i) / r0).collect();
    let lower_shape: Vec<f64> = distances.iter().map(|&t| t.powf(-(n + sigma * (n0 + 1.0)))).collect();
    let upper_shape: Vec<f64> = distances
        .iter()
        .map(|&t| t.powf(-sigma / (n0 + 1.0)) / phi.inverse_unchecked(t.powf(n)))
        .collect();
    let lower_constant = centered.iter().zip(&lower_shape).map(|(m, s)| m / s).fold(f64::INFINITY, f64::min);
    let upper_constant = centered_phi.iter().zip(&upper_shape).map(|(m, s)| m / s).fold(0.0, f64::max);
    let logd: Vec<f64> = distances.iter().map(|t| t.ln()).collect();
    let decay = |v: &[f64]| -least_squares(&logd, &v.iter().map(|x| x.ln()).collect::<Vec<_>>()).0;
    Ok(CharBallReport {
        centered_decay: decay(&centered),
        centered_phi_decay: decay(&centered_phi),
        lower_decay: decay(&lower_shape),
        upper_decay: decay(&upper_shape),
        distances,
        centered,
        centered_phi,
        lower_shape,
        upper_shape,
        lower_constant,
        upper_constant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Hl,
    Orlicz,
    CenteredBall,
    Localized,
    DyadicLocalized,
    LocalPart,
    GlobalPart,
}

/// Cube given by center and half-side, as read from configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSpec {
    pub center: Vec<f64>,
    pub half_side: f64,
}

impl CubeSpec {
    pub fn build(&self) -> Result<Cube> {
        Cube::new(&self.center, self.half_side)
    }
}

/// Which operator to evaluate, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<YoungSpec>,
    /// Region `R` for the localized kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<CubeSpec>,
    /// Radius ladder for the centered kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

impl OperatorSpec {
    pub fn evaluate(&self, f: &SampledFunction, rho: &CriticalRadius, family: &CubeFamily) -> Result<SampledFunction> {
        let eta = || -> Result<YoungFunction> {
            self.eta
                .as_ref()
                .ok_or_else(|| Error::param("eta", "required for this operator kind"))?
                .build()
        };
        let region = || -> Result<Cube> {
            self.region
                .as_ref()
                .ok_or_else(|| Error::param("region", "required for localized operators"))?
                .build()
        };
        match self.kind {
            OperatorKind::Hl => hl_maximal(f, self.sigma, rho, family),
            OperatorKind::Orlicz => orlicz_maximal(f, &eta()?, self.sigma, rho, family),
            OperatorKind::CenteredBall => {
                let radii = self.radii.as_ref().ok_or_else(|| Error::param("radii", "required for centered_ball"))?;
                centered_ball_maximal(f, &eta()?, self.sigma, rho, radii)
            }
            OperatorKind::Localized => localized_maximal(f, &eta()?, &region()?, family),
            OperatorKind::DyadicLocalized => dyadic_localized_maximal(f, &eta()?, &region()?),
            OperatorKind::LocalPart => Ok(local_global_split(f, &eta()?, self.sigma, rho, family)?.0),
            OperatorKind::GlobalPart => Ok(local_global_split(f, &eta()?, self.sigma, rho, family)?.1),
        }
    }
}
