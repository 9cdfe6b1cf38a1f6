//! Periodic position lattice and its Fourier-dual momentum lattice.
//!
//! Per axis, `x_j = -L + jΔx` with `Δx = 2L/G`, and `k_n = (n - c)Δk` with
//! `c = ⌊G/2⌋` and `Δk = πħ/L`, so `ΔxΔkG = 2πħ`. Multi-index arrays are
//! flattened row-major with axis 0 slowest.
//!
//! Transforms carry explicit measures:
//!
//! ```text
//! ψ̂(k) = Σ_x Δx^N e^{-ik·x/ħ} ψ(x)
//! ψ(x) = (2πħ)^{-N} Σ_k Δk^N e^{ik·x/ħ} ψ̂(k)
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct PhaseSpaceGrid {
    dim: usize,
    points: usize,
    half_width: f64,
    hbar: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// e^{2πi c j / G}
    pre: Arc<Vec<C64>>,
    /// e^{iπ(n - c)}
    post: Arc<Vec<C64>>,
}

impl fmt::Debug for PhaseSpaceGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseSpaceGrid")
            .field("dim", &self.dim)
            .field("points_per_axis", &self.points)
            .field("box_half_width", &self.half_width)
            .field("hbar", &self.hbar)
            .finish()
    }
}

impl PartialEq for PhaseSpaceGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.half_width == other.half_width
            && self.hbar == other.hbar
    }
}

impl PhaseSpaceGrid {
    pub fn new(dim: usize, points_per_axis: usize, box_half_width: f64, hbar: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        if points_per_axis < 2 {
            return Err(Error::config("grid.points_per_axis", "must be at least 2"));
        }
        if !(box_half_width.is_finite() && box_half_width > 0.0) {
            return Err(Error::config("grid.box_half_width", "must be positive and finite"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::config("hbar", "must be positive and finite"));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::config("grid.points_per_axis", "G^N overflows"))?;
        if total > 1 << 26 {
            return Err(Error::SizeGuard {
                what: "grid",
                size: total,
                limit: 1 << 26,
            });
        }
        let g = points_per_axis;
        let c = g / 2;
        let mut planner = FftPlanner::new();
        let pre = (0..g)
            .map(|j| C64::from_polar(1.0, 2.0 * PI * ((c * j) % g) as f64 / g as f64))
            .collect();
        let post = (0..g)
            .map(|n| if (n as i64 - c as i64).rem_euclid(2) == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
            .collect();
        Ok(Self {
            dim,
            points: g,
            half_width: box_half_width,
            hbar,
            fwd: planner.plan_fft_forward(g),
            inv: planner.plan_fft_inverse(g),
            pre: Arc::new(pre),
            post: Arc::new(post),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn box_half_width(&self) -> f64 {
        self.half_width
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn dk(&self) -> f64 {
        PI * self.hbar / self.half_width
    }

    /// Index offset of k = 0 on each momentum axis.
    pub fn k_center(&self) -> usize {
        self.points / 2
    }

    /// G^N.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Δx^N.
    pub fn x_measure(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Δk^N.
    pub fn k_measure(&self) -> f64 {
        self.dk().powi(self.dim as i32)
    }

    /// (2πħ)^{-N} Δk^N.
    pub fn k_weight(&self) -> f64 {
        (self.dk() / (2.0 * PI * self.hbar)).powi(self.dim as i32)
    }

    pub fn x_axis(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.points).map(|j| -self.half_width + j as f64 * dx).collect()
    }

    pub fn k_axis(&self) -> Vec<f64> {
        let dk = self.dk();
        let c = self.k_center() as f64;
        (0..self.points).map(|n| (n as f64 - c) * dk).collect()
    }

    /// Splits a flat index into per-axis indices.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn x_coord_into(&self, flat: usize, out: &mut [f64]) {
        let mut f = flat;
        let dx = self.dx();
        for a in (0..self.dim).rev() {
            out[a] = -self.half_width + (f % self.points) as f64 * dx;
            f /= self.points;
        }
    }

    pub fn k_coord_into(&self, flat: usize, out: &mut [f64]) {
        let mut f = flat;
        let dk = self.dk();
        let c = self.k_center() as f64;
        for a in (0..self.dim).rev() {
            out[a] = ((f % self.points) as f64 - c) * dk;
            f /= self.points;
        }
    }

    pub fn x_coord(&self, flat: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.x_coord_into(flat, &mut v);
        v
    }

    pub fn k_coord(&self, flat: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.k_coord_into(flat, &mut v);
        v
    }

    /// Flat index of the periodic difference `b - a` of two position nodes.
    pub fn offset_index(&self, a: usize, b: usize) -> usize {
        let g = self.points;
        let (mut fa, mut fb) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.dim {
            let d = (fb % g + g - fa % g) % g;
            out += d * scale;
            scale *= g;
            fa /= g;
            fb /= g;
        }
        out
    }

    /// Flat index of node `a` translated by periodic offset `d`.
    pub fn shift_index(&self, a: usize, d: usize) -> usize {
        let g = self.points;
        let (mut fa, mut fd) = (a, d);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.dim {
            out += ((fa % g + fd % g) % g) * scale;
            scale *= g;
            fa /= g;
            fd /= g;
        }
        out
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// Applies `f(line)` to every 1-D line along every axis.
    fn for_each_line(&self, data: &mut [C64], mut f: impl FnMut(&mut [C64])) {
        let g = self.points;
        let n = data.len();
        let mut line = vec![C64::default(); g];
        for axis in 0..self.dim {
            let stride = g.pow((self.dim - 1 - axis) as u32);
            let block = stride * g;
            for base in (0..n).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[start + i * stride];
                    }
                    f(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[start + i * stride] = *v;
                    }
                }
            }
        }
    }

    /// In place: ψ(x) → ψ̂(k).
    pub fn forward_in_place(&self, data: &mut [C64]) {
        let dx = self.dx();
        let mut scratch = vec![C64::default(); self.fwd.get_inplace_scratch_len()];
        let (pre, post) = (self.pre.clone(), self.post.clone());
        self.for_each_line(data, |line| {
            for (v, p) in line.iter_mut().zip(pre.iter()) {
                *v *= p;
            }
            self.fwd.process_with_scratch(line, &mut scratch);
            for (v, p) in line.iter_mut().zip(post.iter()) {
                *v *= p * dx;
            }
        });
    }

    /// In place: ψ̂(k) → ψ(x).
    pub fn inverse_in_place(&self, data: &mut [C64]) {
        let w = self.dk() / (2.0 * PI * self.hbar);
        let mut scratch = vec![C64::default(); self.inv.get_inplace_scratch_len()];
        let (pre, post) = (self.pre.clone(), self.post.clone());
        self.for_each_line(data, |line| {
            for (v, p) in line.iter_mut().zip(post.iter()) {
                *v *= p;
            }
            self.inv.process_with_scratch(line, &mut scratch);
            for (v, p) in line.iter_mut().zip(pre.iter()) {
                *v *= p.conj() * w;
            }
        });
    }

    pub fn forward(&self, data: &[C64]) -> Vec<C64> {
        let mut v = data.to_vec();
        self.forward_in_place(&mut v);
        v
    }

    pub fn inverse(&self, data: &[C64]) -> Vec<C64> {
        let mut v = data.to_vec();
        self.inverse_in_place(&mut v);
        v
    }

    /// In place: `g(k)` → `Σ_k g(k) e^{ik·d/ħ}` on the periodic offsets
    /// `d = jΔx`, j per axis in `0..G`. No measure is applied.
    pub fn k_to_offset_in_place(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        scratch.resize(self.inv.get_inplace_scratch_len(), C64::default());
        let pre = self.pre.clone();
        self.for_each_line(data, |line| {
            self.inv.process_with_scratch(line, scratch);
            for (v, p) in line.iter_mut().zip(pre.iter()) {
                *v *= p.conj();
            }
        });
    }

    /// In place: `a(d)` on periodic offsets → `Σ_d a(d) e^{ik·d/ħ}` on the
    /// momentum lattice. No measure is applied.
    pub fn offset_to_k_in_place(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        scratch.resize(self.inv.get_inplace_scratch_len(), C64::default());
        let pre = self.pre.clone();
        self.for_each_line(data, |line| {
            for (v, p) in line.iter_mut().zip(pre.iter()) {
                *v *= p.conj();
            }
            self.inv.process_with_scratch(line, scratch);
        });
    }
}
