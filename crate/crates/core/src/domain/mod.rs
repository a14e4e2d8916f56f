//! Uniform grids on truncated cubes, axis-parallel cubes, and sampled functions.
//!
//! Grid points are cell centers `x_i = -L + (i + 1/2) h` with `h = 2L/N` on
//! every axis. Flat indices are row-major with the last axis fastest.
//!
//! Cubes are half-open, `[c - s, c + s)` on every axis, and carry the
//! half-diagonal radius `r = sqrt(d) * s` used by every `(1 + r/ρ)` factor.
//! Integrals over a cube are Riemann sums over the grid points it contains,
//! with the sampled function extended by zero outside the domain, while the
//! cube measure is always the analytic `(2s)^d`.

mod dyadic;
mod family;
mod rawfile;
mod spec;

pub use dyadic::{
    cz_decomposition, dyadic_children, find_containing_dyadic, ShiftedDyadicGrids,
};
pub use family::{box_extremes, BoundaryPolicy, CubeFamily, Extreme, FamilyCube};
pub use rawfile::{parse_raw_values, write_raw_values};
pub use spec::{DomainSpec, FunctionSpec};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated computational domain `[-L, L)^d` with `N` cells per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct Domain {
    dim: usize,
    half_width: f64,
    cells: usize,
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(s: DomainSpec) -> Result<Self> {
        s.build()
    }
}

/// Half-open box of grid indices, `lo[a] <= i < hi[a]` on the first `dim` axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl IndexBox {
    pub fn count(&self, dim: usize) -> usize {
        (0..dim).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn contains_box(&self, other: &IndexBox, dim: usize) -> bool {
        (0..dim).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }
}

impl Domain {
    pub fn new(dim: usize, half_width: f64, cells: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::param("d", format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::param("L", "half-width must be positive and finite"));
        }
        if cells < 8 || !cells.is_power_of_two() {
            return Err(Error::param("N", format!("cells per axis must be a power of two >= 8, got {cells}")));
        }
        if cells.checked_pow(dim as u32).is_none_or(|n| n > 1 << 26) {
            return Err(Error::param("N", "grid too large"));
        }
        Ok(Domain {
            dim,
            half_width,
            cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cell size `h`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn cell_measure(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Total number of grid points `N^d`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same physical box with `factor` times as many cells per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Domain::new(self.dim, self.half_width, self.cells * factor)
    }

    /// Same resolution `h` on a box `factor` times wider.
    pub fn widened(&self, factor: usize) -> Result<Self> {
        Domain::new(self.dim, self.half_width * factor as f64, self.cells * factor)
    }

    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h()
    }

    #[inline]
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let n = self.cells;
        match self.dim {
            1 => [flat, 0, 0],
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    #[inline]
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let n = self.cells;
        match self.dim {
            1 => idx[0],
            2 => idx[0] * n + idx[1],
            _ => (idx[0] * n + idx[1]) * n + idx[2],
        }
    }

    /// Grid point coordinates; unused axes are zero.
    #[inline]
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let m = self.multi_index(flat);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coordinate(m[a]);
        }
        p
    }

    /// Flat index of the grid point nearest to `x`, if `x` lies in the domain.
    pub fn nearest_index(&self, x: &[f64]) -> Option<usize> {
        let mut idx = [0usize; 3];
        for a in 0..self.dim {
            let u = (x[a] + self.half_width) / self.h();
            if !(0.0..self.cells as f64).contains(&u) {
                return None;
            }
            idx[a] = u.floor() as usize;
        }
        Some(self.flat_index(idx))
    }

    /// Indices `j` (clipped to the grid) with `lo <= x_j < hi`.
    pub fn axis_range(&self, lo: f64, hi: f64) -> (usize, usize) {
        let h = self.h();
        let snap = |u: f64| {
            let r = u.round();
            if (u - r).abs() < 1e-9 {
                r
            } else {
                u
            }
        };
        let n = self.cells as f64;
        let a = snap((lo + self.half_width) / h - 0.5).ceil().clamp(0.0, n);
        let b = snap((hi + self.half_width) / h - 0.5).ceil().clamp(0.0, n);
        (a as usize, (b as usize).max(a as usize))
    }

    /// Grid points inside the cube, or `None` when it contains none.
    pub fn cube_box(&self, q: &Cube) -> Option<IndexBox> {
        let mut b = IndexBox {
            lo: [0; 3],
            hi: [1; 3],
        };
        for a in 0..self.dim {
            let (lo, hi) = self.axis_range(q.center[a] - q.half_side, q.center[a] + q.half_side);
            if lo >= hi {
                return None;
            }
            b.lo[a] = lo;
            b.hi[a] = hi;
        }
        Some(b)
    }

    /// Visits every flat index in the box, in row-major order.
    pub fn for_each_in_box(&self, b: &IndexBox, mut visit: impl FnMut(usize)) {
        let n = self.cells;
        match self.dim {
            1 => (b.lo[0]..b.hi[0]).for_each(visit),
            2 => {
                for i in b.lo[0]..b.hi[0] {
                    let row = i * n;
                    for j in b.lo[1]..b.hi[1] {
                        visit(row + j);
                    }
                }
            }
            _ => {
                for i in b.lo[0]..b.hi[0] {
                    for j in b.lo[1]..b.hi[1] {
                        let row = (i * n + j) * n;
                        for k in b.lo[2]..b.hi[2] {
                            visit(row + k);
                        }
                    }
                }
            }
        }
    }

    /// The whole domain as a cube.
    pub fn bounding_cube(&self) -> Cube {
        Cube::new(&vec![0.0; self.dim], self.half_width).expect("positive half-width")
    }

    pub fn norm(&self, x: &[f64; 3]) -> f64 {
        x[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Position of a cube relative to the critical radius at its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

/// Half-open axis-parallel cube `[c - s, c + s)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    center: [f64; 3],
    half_side: f64,
    dim: usize,
}

impl Cube {
    pub fn new(center: &[f64], half_side: f64) -> Result<Self> {
        if !(1..=3).contains(&center.len()) {
            return Err(Error::param("center", "dimension must be 1, 2 or 3"));
        }
        if !(half_side > 0.0 && half_side.is_finite()) {
            return Err(Error::param("half_side", format!("must be positive, got {half_side}")));
        }
        let mut c = [0.0; 3];
        c[..center.len()].copy_from_slice(center);
        Ok(Cube {
            center: c,
            half_side,
            dim: center.len(),
        })
    }

    /// Cube with the given half-diagonal radius `r = sqrt(d) s`.
    pub fn with_radius(center: &[f64], radius: f64) -> Result<Self> {
        Cube::new(center, radius / (center.len() as f64).sqrt())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    /// Side length `ℓ = 2s`.
    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    /// Half-diagonal `r = sqrt(d) ℓ / 2`.
    pub fn radius(&self) -> f64 {
        (self.dim as f64).sqrt() * self.half_side
    }

    pub fn measure(&self) -> f64 {
        self.side().powi(self.dim as i32)
    }

    /// Same center, radius multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> Cube {
        Cube {
            half_side: self.half_side * factor,
            ..*self
        }
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.center[axis] - self.half_side
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.center[axis] + self.half_side
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|a| self.lower(a) <= x[a] && x[a] < self.upper(a))
    }

    /// `other ⊆ self`, with relative slack `tol` on the faces.
    pub fn contains_cube(&self, other: &Cube, tol: f64) -> bool {
        let slack = tol * self.half_side.max(other.half_side);
        (0..self.dim).all(|a| {
            self.lower(a) <= other.lower(a) + slack && other.upper(a) <= self.upper(a) + slack
        })
    }

    pub fn intersects(&self, other: &Cube) -> bool {
        (0..self.dim).all(|a| self.lower(a) < other.upper(a) && other.lower(a) < self.upper(a))
    }

    pub fn criticality(&self, rho_at_center: f64) -> Criticality {
        let r = self.radius();
        if (r - rho_at_center).abs() <= 1e-12 * rho_at_center {
            Criticality::Critical
        } else if r < rho_at_center {
            Criticality::Subcritical
        } else {
            Criticality::Supercritical
        }
    }
}

/// Values on the grid of a [`Domain`], zero-extended outside it.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    domain: Domain,
    values: Vec<f64>,
    prefix: OnceLock<Vec<f64>>,
}

impl SampledFunction {
    pub fn from_values(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::param(
                "values",
                format!("expected {} values, got {}", domain.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite value at index {i}")));
        }
        Ok(SampledFunction {
            domain,
            values,
            prefix: OnceLock::new(),
        })
    }

    pub fn from_fn(domain: Domain, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = domain.dim();
        let values = (0..domain.len())
            .map(|i| f(&domain.point(i)[..d]))
            .collect();
        Self::from_values(domain, values)
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self::from_values(domain, vec![c; domain.len()]).expect("finite constant")
    }

    pub fn zeros(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub(crate) fn from_raw_unchecked(domain: Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        SampledFunction {
            domain,
            values,
            prefix: OnceLock::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Support stays at distance at least `L/4` from the boundary.
    pub fn is_compactly_supported_inside(&self) -> bool {
        let limit = 0.75 * self.domain.half_width();
        let d = self.domain.dim();
        self.values.iter().enumerate().all(|(i, &v)| {
            v == 0.0 || self.domain.point(i)[..d].iter().all(|x| x.abs() <= limit)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction::from_raw_unchecked(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> SampledFunction {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> SampledFunction {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Result<SampledFunction> {
        if self.domain != other.domain {
            return Err(Error::Domain("sampled functions live on different grids".into()));
        }
        Ok(SampledFunction::from_raw_unchecked(
            self.domain,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    /// `h^d Σ values` over the whole grid.
    pub fn integral(&self) -> f64 {
        self.domain.cell_measure() * self.values.iter().sum::<f64>()
    }

    /// Sum of the values over the grid points of the box (prefix-sum lookup).
    pub fn box_sum(&self, b: &IndexBox) -> f64 {
        let table = self.prefix.get_or_init(|| build_prefix(&self.domain, &self.values));
        prefix_lookup(&self.domain, table, b)
    }

    /// Riemann sum of the values over the grid points of `q`.
    pub fn integrate(&self, q: &Cube) -> f64 {
        match self.domain.cube_box(q) {
            Some(b) => self.domain.cell_measure() * self.box_sum(&b),
            None => 0.0,
        }
    }

    /// `(1/|Q|) ∫_Q |f|` with the analytic measure.
    pub fn mean_abs(&self, q: &Cube) -> f64 {
        let abs = self.abs();
        abs.integrate(q) / q.measure()
    }

    /// Absolute values at the nonzero grid points of the box.
    pub fn gather_abs_nonzero(&self, b: &IndexBox, out: &mut Vec<f64>) {
        out.clear();
        self.domain.for_each_in_box(b, |i| {
            let v = self.values[i].abs();
            if v != 0.0 {
                out.push(v);
            }
        });
    }
}

fn build_prefix(domain: &Domain, values: &[f64]) -> Vec<f64> {
    let n = domain.cells();
    let m = n + 1;
    match domain.dim() {
        1 => {
            let mut t = vec![0.0; m];
            for i in 0..n {
                t[i + 1] = t[i] + values[i];
            }
            t
        }
        2 => {
            let mut t = vec![0.0; m * m];
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += values[i * n + j];
                    t[(i + 1) * m + j + 1] = t[i * m + j + 1] + row;
                }
            }
            t
        }
        _ => {
            let mut t = vec![0.0; m * m * m];
            let at = |i: usize, j: usize, k: usize| (i * m + j) * m + k;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = values[(i * n + j) * n + k];
                        t[at(i + 1, j + 1, k + 1)] = v + t[at(i, j + 1, k + 1)]
                            + t[at(i + 1, j, k + 1)]
                            + t[at(i + 1, j + 1, k)]
                            - t[at(i, j, k + 1)]
                            - t[at(i, j + 1, k)]
                            - t[at(i + 1, j, k)]
                            + t[at(i, j, k)];
                    }
                }
            }
            t
        }
    }
}

fn prefix_lookup(domain: &Domain, t: &[f64], b: &IndexBox) -> f64 {
    let m = domain.cells() + 1;
    let (lo, hi) = (b.lo, b.hi);
    match domain.dim() {
        1 => t[hi[0]] - t[lo[0]],
        2 => {
            let at = |i: usize, j: usize| t[i * m + j];
            at(hi[0], hi[1]) - at(lo[0], hi[1]) - at(hi[0], lo[1]) + at(lo[0], lo[1])
        }
        _ => {
            let at = |i: usize, j: usize, k: usize| t[(i * m + j) * m + k];
            at(hi[0], hi[1], hi[2]) - at(lo[0], hi[1], hi[2]) - at(hi[0], lo[1], hi[2])
                - at(hi[0], hi[1], lo[2])
                + at(lo[0], lo[1], hi[2])
                + at(lo[0], hi[1], lo[2])
                + at(hi[0], lo[1], lo[2])
                - at(lo[0], lo[1], lo[2])
        }
    }
}
