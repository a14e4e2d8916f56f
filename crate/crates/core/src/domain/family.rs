//! The finite cube family over which every discrete supremum is taken.
//!
//! Members are indexed by a grid-point center `i` and a level `k`: the cube
//! has half-side `(h/2) 2^k`, i.e. `m = 2^k` cells per side, and contains the
//! grid indices `[i - m/2, i + m/2)` per axis (`[i, i + 1)` when `m = 1`).
//! Suprema "over cubes containing x" are computed level by level: evaluate
//! one value per center, then scatter it to the points of its box with a
//! separable sliding-window maximum.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::{Cube, Domain, IndexBox};
use crate::error::{Error, Result};

/// What to do with family cubes that stick out of the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// Keep them; the function is extended by zero outside the grid.
    ZeroExtend,
    /// Drop them; only cubes fully inside the domain are admissible.
    Inside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeFamily {
    domain: Domain,
    min_level: u32,
    max_level: u32,
    policy: BoundaryPolicy,
}

/// One member of a [`CubeFamily`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyCube {
    pub center_index: usize,
    pub level: u32,
    pub cube: Cube,
    /// Grid points inside the cube (clipped to the domain).
    pub index_box: IndexBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Max,
    Min,
}

impl CubeFamily {
    /// Full dyadic ladder from `h/2` up to the first half-side `>= sqrt(d) L`.
    pub fn new(domain: Domain, policy: BoundaryPolicy) -> Self {
        let target = (domain.dim() as f64).sqrt() * domain.half_width();
        let mut max_level = 0;
        while 0.5 * domain.h() * f64::from(1u32 << max_level) < target * (1.0 - 1e-12) {
            max_level += 1;
        }
        CubeFamily {
            domain,
            min_level: 0,
            max_level,
            policy,
        }
    }

    /// Restricts the ladder to levels `min_level..=max_level`.
    pub fn with_levels(mut self, min_level: u32, max_level: u32) -> Result<Self> {
        if min_level > max_level || max_level > self.max_level {
            return Err(Error::param(
                "levels",
                format!("need {min_level} <= {max_level} <= {}", self.max_level),
            ));
        }
        self.min_level = min_level;
        self.max_level = max_level;
        Ok(self)
    }

    pub fn with_policy(mut self, policy: BoundaryPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.min_level..=self.max_level
    }

    pub fn half_side(&self, level: u32) -> f64 {
        0.5 * self.domain.h() * f64::from(1u32 << level)
    }

    /// Member with the given center and level, or `None` if excluded by the
    /// boundary policy.
    pub fn member(&self, center_index: usize, level: u32) -> Option<FamilyCube> {
        let d = self.domain.dim();
        let n = self.domain.cells() as i64;
        let m = 1i64 << level;
        let idx = self.domain.multi_index(center_index);
        let mut b = IndexBox {
            lo: [0; 3],
            hi: [1; 3],
        };
        for a in 0..d {
            let i = idx[a] as i64;
            let (lo, hi) = if m == 1 { (i, i + 1) } else { (i - m / 2, i + m / 2) };
            if self.policy == BoundaryPolicy::Inside && (lo < 0 || hi > n) {
                return None;
            }
            b.lo[a] = lo.clamp(0, n) as usize;
            b.hi[a] = hi.clamp(0, n) as usize;
        }
        let p = self.domain.point(center_index);
        let cube = Cube::new(&p[..d], self.half_side(level)).expect("positive half-side");
        Some(FamilyCube {
            center_index,
            level,
            cube,
            index_box: b,
        })
    }

    /// Every member in enumeration order (level-major, then center).
    pub fn members(&self) -> impl Iterator<Item = FamilyCube> + '_ {
        self.levels()
            .flat_map(move |k| (0..self.domain.len()).filter_map(move |c| self.member(c, k)))
    }

    /// `out[x] = max over members Q ∋ x of value(Q)`; members mapped to
    /// `None` are skipped, points without any admissible member get 0.
    pub fn sweep<F>(&self, value: F) -> Vec<f64>
    where
        F: Fn(&FamilyCube) -> Option<f64> + Sync,
    {
        let n = self.domain.len();
        let mut out = vec![f64::NEG_INFINITY; n];
        for k in self.levels() {
            let per_center: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|c| {
                    self.member(c, k)
                        .and_then(|q| value(&q))
                        .unwrap_or(f64::NEG_INFINITY)
                })
                .collect();
            let m = 1i64 << k;
            let (lo, hi) = if m == 1 { (0, 0) } else { (1 - m / 2, m / 2) };
            let spread = box_extremes(&self.domain, &per_center, lo, hi, Extreme::Max);
            for (o, s) in out.iter_mut().zip(spread) {
                if s > *o {
                    *o = s;
                }
            }
        }
        for o in &mut out {
            if *o == f64::NEG_INFINITY {
                *o = 0.0;
            }
        }
        out
    }
}

/// For every grid point `x`, the max (or min) of `values` over the grid
/// points `y` with `x_a + lo <= y_a <= x_a + hi` on every axis, clipped to
/// the grid. Separable: one monotone-deque pass per axis.
pub fn box_extremes(domain: &Domain, values: &[f64], lo: i64, hi: i64, kind: Extreme) -> Vec<f64> {
    debug_assert!(lo <= hi);
    let n = domain.cells();
    let d = domain.dim();
    let mut cur = values.to_vec();
    let mut line = vec![0.0; n];
    let mut res = vec![0.0; n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let outer = domain.len() / n;
        for o in 0..outer {
            // Decompose `o` into the index of the line start.
            let base = (o / stride) * stride * n + (o % stride);
            for j in 0..n {
                line[j] = cur[base + j * stride];
            }
            sliding(&line, lo, hi, kind, &mut res);
            for j in 0..n {
                cur[base + j * stride] = res[j];
            }
        }
    }
    cur
}

fn sliding(line: &[f64], lo: i64, hi: i64, kind: Extreme, out: &mut [f64]) {
    let n = line.len() as i64;
    let better = |a: f64, b: f64| match kind {
        Extreme::Max => a >= b,
        Extreme::Min => a <= b,
    };
    let empty = match kind {
        Extreme::Max => f64::NEG_INFINITY,
        Extreme::Min => f64::INFINITY,
    };
    let mut dq: VecDeque<i64> = VecDeque::new();
    let mut next = 0i64;
    for x in 0..n {
        let right = (x + hi).min(n - 1);
        while next <= right {
            let v = line[next as usize];
            while let Some(&b) = dq.back() {
                if better(v, line[b as usize]) {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(next);
            next += 1;
        }
        let left = x + lo;
        while let Some(&f) = dq.front() {
            if f < left {
                dq.pop_front();
            } else {
                break;
            }
        }
        out[x as usize] = match dq.front() {
            Some(&f) if f <= right => line[f as usize],
            _ => empty,
        };
    }
}
