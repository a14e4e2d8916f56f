//! Luxemburg averages and norms, modulars, and the generalized Hölder
//! inequality.
//!
//! All Luxemburg values are found by geometric bisection on the
//! nonincreasing map `λ -> modular(f/λ)`: robust near `λ -> 0`, where the
//! modular's derivative is unbounded, and deterministic (fixed schedule).

use serde::Serialize;

use crate::domain::{Cube, IndexBox, SampledFunction};
use crate::error::{Error, Result};
use crate::young::{YoungFunction, YoungKind};

const REL_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;

/// `ϱ_{Φ,w}(f/λ)` together with the `λ` it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularValue {
    pub value: f64,
    pub lambda: f64,
}

/// Luxemburg average with a flag for cubes that contain no grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubeAverage {
    pub value: f64,
    pub below_resolution: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularNormReport {
    pub norm: f64,
    pub modular: f64,
    pub holds: bool,
}

/// Solves `weight · Σ η(v/λ) = 1` for the positive values `v`.
///
/// `weight` is the cell measure divided by the cube measure, so the left side
/// is the mean of `η(|f|/λ)` over the cube with zeros omitted.
pub fn luxemburg_of_values(values: &[f64], weight: f64, eta: &YoungFunction) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    if max == 0.0 {
        return 0.0;
    }
    match eta.kind() {
        YoungKind::Threshold { c } => return max / c,
        YoungKind::Power { p } if *p == 1.0 => {
            return eta.scale() * weight * values.iter().sum::<f64>();
        }
        _ => {}
    }
    let modular = |lambda: f64| weight * values.iter().map(|&v| eta.at(v / lambda)).sum::<f64>();
    let mean = weight * values.iter().sum::<f64>();
    let mut lo = mean.max(1e-14 * max);
    let mut hi = max;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut guard = 0;
    while modular(hi) > 1.0 && guard < 2100 {
        lo = hi;
        hi *= 2.0;
        guard += 1;
    }
    guard = 0;
    while modular(lo) < 1.0 && guard < 2100 {
        hi = lo;
        lo *= 0.5;
        guard += 1;
        if lo == 0.0 {
            return 0.0;
        }
    }
    for _ in 0..MAX_ITER {
        if hi / lo - 1.0 <= REL_TOL {
            break;
        }
        let mid = (lo * hi).sqrt();
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// `‖f‖_{η,Q}` over the grid points of an index box, with cube measure `measure`.
pub fn luxemburg_on_box(
    f: &SampledFunction,
    b: &IndexBox,
    measure: f64,
    eta: &YoungFunction,
    scratch: &mut Vec<f64>,
) -> f64 {
    f.gather_abs_nonzero(b, scratch);
    luxemburg_of_values(scratch, f.domain().cell_measure() / measure, eta)
}

/// Luxemburg average `‖f‖_{η,Q}`; 0 for cubes below grid resolution.
pub fn luxemburg_average(f: &SampledFunction, q: &Cube, eta: &YoungFunction) -> f64 {
    luxemburg_average_report(f, q, eta).value
}

pub fn luxemburg_average_report(f: &SampledFunction, q: &Cube, eta: &YoungFunction) -> CubeAverage {
    match f.domain().cube_box(q) {
        None => CubeAverage {
            value: 0.0,
            below_resolution: true,
        },
        Some(b) => CubeAverage {
            value: luxemburg_on_box(f, &b, q.measure(), eta, &mut Vec::new()),
            below_resolution: false,
        },
    }
}

fn check_weight(f: &SampledFunction, w: Option<&SampledFunction>) -> Result<()> {
    if let Some(w) = w {
        if w.domain() != f.domain() {
            return Err(Error::Domain("weight and function live on different grids".into()));
        }
        if !w.is_nonnegative() {
            return Err(Error::param("w", "weight must be nonnegative"));
        }
    }
    Ok(())
}

fn weighted_modular(f: &SampledFunction, w: Option<&SampledFunction>, phi: &YoungFunction, lambda: f64) -> f64 {
    let h = f.domain().cell_measure();
    let mut sum = 0.0;
    for (i, &v) in f.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let wi = w.map_or(1.0, |w| w.values()[i]);
        if wi == 0.0 {
            continue;
        }
        sum += phi.at(v.abs() / lambda) * wi;
    }
    h * sum
}

/// Riemann sum of `Φ(|f|/λ) w` over the domain (`w = 1` when absent).
pub fn modular(f: &SampledFunction, w: Option<&SampledFunction>, phi: &YoungFunction, lambda: f64) -> Result<ModularValue> {
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    check_weight(f, w)?;
    Ok(ModularValue {
        value: weighted_modular(f, w, phi, lambda),
        lambda,
    })
}

/// `‖f‖_{Φ,w} = inf { λ > 0 : ϱ_{Φ,w}(f/λ) <= 1 }`.
pub fn luxemburg_norm_global(f: &SampledFunction, w: Option<&SampledFunction>, phi: &YoungFunction) -> Result<f64> {
    check_weight(f, w)?;
    let max = f.max_abs();
    if max == 0.0 {
        return Ok(0.0);
    }
    let m = |l: f64| weighted_modular(f, w, phi, l);
    let (mut lo, mut hi);
    if m(max) > 1.0 {
        lo = max;
        hi = 2.0 * max;
        let mut guard = 0;
        while m(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Internal("modular does not decay".into()));
            }
        }
    } else {
        hi = max;
        lo = 0.5 * max;
        let mut guard = 0;
        while m(lo) <= 1.0 {
            hi = lo;
            lo *= 0.5;
            guard += 1;
            if guard > 2000 || lo == 0.0 {
                // The weight vanishes on the support of f.
                return Ok(0.0);
            }
        }
    }
    for _ in 0..MAX_ITER {
        if hi / lo - 1.0 <= REL_TOL {
            break;
        }
        let mid = (lo * hi).sqrt();
        if m(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// `inf_{t>0} { t + (t/|Q|) ∫_Q η(|f|/t) }`, comparable to the Luxemburg
/// average within a factor 2 for convex η.
pub fn inf_formula_average(f: &SampledFunction, q: &Cube, eta: &YoungFunction) -> f64 {
    let Some(b) = f.domain().cube_box(q) else {
        return 0.0;
    };
    let mut vals = Vec::new();
    f.gather_abs_nonzero(&b, &mut vals);
    if vals.is_empty() {
        return 0.0;
    }
    let weight = f.domain().cell_measure() / q.measure();
    let g = |t: f64| t + t * weight * vals.iter().map(|&v| eta.at(v / t)).sum::<f64>();
    let max = vals.iter().fold(0.0f64, |m, &v| m.max(v));
    // The minimizer t* satisfies t* <= g(t*) <= g(max).
    let mut a = (1e-12 * max).ln();
    let mut c = g(max).max(max).ln();
    let gl = |s: f64| g(s.exp());
    let r = 0.618_033_988_749_894_8;
    let mut x1 = c - r * (c - a);
    let mut x2 = a + r * (c - a);
    let (mut f1, mut f2) = (gl(x1), gl(x2));
    while c - a > 1e-9 {
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - r * (c - a);
            f1 = gl(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (c - a);
            f2 = gl(x2);
        }
    }
    f1.min(f2)
}

/// Generalized Hölder: `(1/|Q|) ∫_Q |fg| <= 2 ‖f‖_{Φ,Q} ‖g‖_{Φ̃,Q}`.
pub fn holder_check(f: &SampledFunction, g: &SampledFunction, q: &Cube, phi: &YoungFunction) -> Result<HolderReport> {
    let fg = f.zip_with(g, |a, b| (a * b).abs())?;
    let lhs = fg.integrate(q) / q.measure();
    let dual = phi.complementary()?;
    let rhs = 2.0 * luxemburg_average(f, q, phi) * luxemburg_average(g, q, &dual);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(HolderReport { lhs, rhs, ratio })
}

/// `‖f‖ <= 1 ⇒ ϱ(f) <= ‖f‖` and `‖f‖ > 1 ⇒ ‖f‖ <= ϱ(f)` (unweighted).
pub fn modular_norm_relation_check(f: &SampledFunction, phi: &YoungFunction) -> Result<ModularNormReport> {
    let norm = luxemburg_norm_global(f, None, phi)?;
    let modular = weighted_modular(f, None, phi, 1.0);
    let slack = 1e-9 * norm.max(1.0);
    let holds = if norm <= 1.0 {
        modular <= norm + slack
    } else {
        norm <= modular + slack
    };
    Ok(ModularNormReport { norm, modular, holds })
}
