//! Dyadic children, the 3^d shifted dyadic grids, and the Calderón–Zygmund
//! stopping-time selection.
//!
//! Grid `t ∈ {0,1,2}^d` at level `k` (side `2^k`, `k ∈ ℤ`) consists of the
//! cubes `2^k ([0,1)^d + m + (-1)^k t/3)`, `m ∈ ℤ^d`. The alternating sign
//! makes consecutive levels nest: `2^{k+1}(m' - (-1)^k t/3)` is a level-`k`
//! boundary because `2m' - (-1)^k t ∈ ℤ`. Grid 0 (`t = 0`) is the standard
//! dyadic grid. Every cube `Q` sits inside a cube of one of the grids with at
//! most three times its side.

use super::{Cube, SampledFunction};
use crate::error::{Error, Result};
use crate::orlicz::luxemburg_average;
use crate::young::YoungFunction;

/// The `2^d` congruent halves-per-axis of `q`, in lexicographic order.
pub fn dyadic_children(q: &Cube) -> Vec<Cube> {
    let d = q.dim();
    let s = 0.5 * q.half_side();
    (0..1usize << d)
        .map(|mask| {
            let mut c = [0.0; 3];
            for a in 0..d {
                let sign = if mask >> (d - 1 - a) & 1 == 1 { 1.0 } else { -1.0 };
                c[a] = q.center()[a] + sign * s;
            }
            Cube::new(&c[..d], s).expect("positive half-side")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftedDyadicGrids {
    dim: usize,
}

impl ShiftedDyadicGrids {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::param("d", "dimension must be 1, 2 or 3"));
        }
        Ok(ShiftedDyadicGrids { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grids, `3^d`.
    pub fn count(&self) -> usize {
        3usize.pow(self.dim as u32)
    }

    /// Shift digits of grid `i` (base-3 expansion, first axis most significant).
    pub fn shift(&self, grid: usize) -> [u8; 3] {
        let mut t = [0u8; 3];
        let mut g = grid;
        for a in (0..self.dim).rev() {
            t[a] = (g % 3) as u8;
            g /= 3;
        }
        t
    }

    /// The cube of grid `grid` at level `k` (side `2^k`) containing `x`.
    pub fn cube_containing(&self, grid: usize, k: i32, x: &[f64]) -> Cube {
        let side = 2f64.powi(k);
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let t = self.shift(grid);
        let mut c = [0.0; 3];
        for a in 0..self.dim {
            let off = sign * f64::from(t[a]) / 3.0;
            let m = (x[a] / side - off).floor();
            c[a] = side * (m + off) + 0.5 * side;
        }
        Cube::new(&c[..self.dim], 0.5 * side).expect("positive side")
    }
}

/// A cube `Q0 ⊇ Q` from one of the shifted grids with `ℓ(Q0) <= 3ℓ(Q)`.
///
/// Levels are scanned upward from the smallest `2^k >= ℓ(Q)`, and grids in
/// index order, so a standard dyadic cube is returned unchanged by grid 0.
pub fn find_containing_dyadic(grids: &ShiftedDyadicGrids, q: &Cube) -> Result<(usize, Cube)> {
    if q.dim() != grids.dim() {
        return Err(Error::param("Q", "dimension does not match the grids"));
    }
    let l = q.side();
    let mut k = (l.log2() - 1e-12).ceil() as i32;
    while 2f64.powi(k) <= 3.0 * l * (1.0 + 1e-12) {
        for i in 0..grids.count() {
            let cand = grids.cube_containing(i, k, q.center());
            if cand.contains_cube(q, 1e-12) {
                return Ok((i, cand));
            }
        }
        k += 1;
    }
    Err(Error::Internal(format!("no shifted dyadic cube contains {q:?}")))
}

fn is_single_cell(q: &Cube, h: f64) -> bool {
    q.side() <= h * (1.0 + 1e-9)
}

/// Maximal dyadic descendants `Q` of `r` with `‖f‖_{η,Q} > λ`.
///
/// Requires `‖f‖_{η,R} <= λ`. Descendants are explored depth first in
/// child order and the recursion stops at single-cell cubes.
pub fn cz_decomposition(f: &SampledFunction, r: &Cube, lambda: f64, eta: &YoungFunction) -> Result<Vec<Cube>> {
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", "must be positive"));
    }
    let top = luxemburg_average(f, r, eta);
    if top > lambda {
        return Err(Error::Precondition(format!(
            "average over the top cube is {top}, above λ = {lambda}"
        )));
    }
    let h = f.domain().h();
    let mut selected = Vec::new();
    let mut stack = vec![*r];
    while let Some(q) = stack.pop() {
        if is_single_cell(&q, h) {
            continue;
        }
        // Push in reverse so children are visited in order.
        for child in dyadic_children(&q).into_iter().rev() {
            if f.domain().cube_box(&child).is_none() {
                continue;
            }
            if luxemburg_average(f, &child, eta) > lambda {
                selected.push(child);
            } else {
                stack.push(child);
            }
        }
    }
    Ok(selected)
}
