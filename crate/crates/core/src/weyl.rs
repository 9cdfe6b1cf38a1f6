//! Generalized Weyl transform of index α.
//!
//! For a kernel `A`, the α-symbol is
//!
//! ```text
//! h_α(k, x) = ∫dy e^{ik·y/ħ} ⟨x - (½+α)y | A | x + (½-α)y⟩
//! ```
//!
//! At α = -½ this is the standard (x-left, k-right) symbol σ, which the
//! lattice gives exactly. Other indices follow from
//! `h_α = exp(iħ(½+α) Σ_j ∂_{k_j}∂_{x_j}) σ`, evaluated with high-order
//! finite differences ([`WeylScheme::LocalTaylor`]). A purely spectral
//! route that interpolates the kernel off-lattice is kept as
//! [`WeylScheme::Fourier`] for small grids.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::PhaseSpaceGrid;
use crate::kernel::OperatorKernel;
use crate::params::ThetaMatrix;
use crate::potential::{evaluate_potential_shifted, Potential};
use crate::star::potential_operator_kernel;

/// Dense symbols hold `(G^N)²` entries; this caps G^N.
pub const DENSE_SYMBOL_LIMIT: usize = 1024;
/// The interpolating route is O(G^{4N}); this caps G^N for it.
pub const FOURIER_ROUTE_LIMIT: usize = 64;

const STENCIL: usize = 9;
const MAX_TERMS: usize = 32;
const TERM_TOL: f64 = 1e-14;
const ROUNDOFF_FLOOR: f64 = 1e-10;
const MAX_SUBSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaIndex(f64);

impl AlphaIndex {
    pub fn new(value: f64) -> Result<Self> {
        if !(-0.5..=0.5).contains(&value) {
            return Err(Error::Domain(format!("alpha = {value} is outside [-1/2, 1/2]")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeylScheme {
    #[default]
    LocalTaylor,
    Fourier,
}

/// `h(k, x)` on the full lattice, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceSymbol {
    grid: PhaseSpaceGrid,
    alpha: f64,
    values: Vec<C64>,
}

impl PhaseSpaceSymbol {
    pub fn from_fn(grid: &PhaseSpaceGrid, alpha: f64, f: impl Fn(&[f64], &[f64]) -> C64 + Sync + Send) -> Result<Self> {
        let n = grid.len();
        guard_dense(n)?;
        let rows = exec::map_range(n, |ix| {
            let x = grid.x_coord(ix);
            let mut k = vec![0.0; grid.dim()];
            (0..n)
                .map(|ik| {
                    grid.k_coord_into(ik, &mut k);
                    f(&k, &x)
                })
                .collect::<Vec<_>>()
        });
        Ok(Self {
            grid: grid.clone(),
            alpha,
            values: rows.concat(),
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn get(&self, ik: usize, ix: usize) -> C64 {
        self.values[ix * self.grid.len() + ik]
    }

    /// Values indexed `[ix * G^N + ik]`.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

fn guard_dense(n: usize) -> Result<()> {
    if n > DENSE_SYMBOL_LIMIT {
        return Err(Error::SizeGuard {
            what: "dense phase-space symbol",
            size: n * n,
            limit: DENSE_SYMBOL_LIMIT * DENSE_SYMBOL_LIMIT,
        });
    }
    Ok(())
}

/// The α = -½ symbol `σ(x, k) = Σ_d Δx^N e^{ik·d/ħ} A(x, x + d)`.
pub fn standard_symbol(kernel: &OperatorKernel) -> Result<PhaseSpaceSymbol> {
    let grid = kernel.grid();
    let n = grid.len();
    guard_dense(n)?;
    let w = grid.x_measure();
    let rows = exec::map_range(n, |ix| {
        let mut a: Vec<C64> = (0..n).map(|d| kernel.get(ix, grid.shift_index(ix, d)) * w).collect();
        let mut scratch = Vec::new();
        grid.offset_to_k_in_place(&mut a, &mut scratch);
        a
    });
    Ok(PhaseSpaceSymbol {
        grid: grid.clone(),
        alpha: -0.5,
        values: rows.concat(),
    })
}

/// The α-symbol of `kernel` with the default scheme.
pub fn symbol_of_operator(kernel: &OperatorKernel, alpha: AlphaIndex) -> Result<PhaseSpaceSymbol> {
    symbol_of_operator_with(kernel, alpha, WeylScheme::default())
}

pub fn symbol_of_operator_with(kernel: &OperatorKernel, alpha: AlphaIndex, scheme: WeylScheme) -> Result<PhaseSpaceSymbol> {
    match scheme {
        WeylScheme::LocalTaylor => {
            let sigma = standard_symbol(kernel)?;
            Ok(reorder(&sigma, alpha))
        }
        WeylScheme::Fourier => fourier_symbol(kernel, alpha),
    }
}

/// `exp(c D) σ` with `c = iħ(½+α)`, `D = Σ_j ∂_{k_j}∂_{x_j}`, split into
/// `exp((c/s) D)^s` with s doubled until every series converges.
fn reorder(sigma: &PhaseSpaceSymbol, alpha: AlphaIndex) -> PhaseSpaceSymbol {
    let grid = &sigma.grid;
    let c = C64::new(0.0, grid.hbar() * (0.5 + alpha.value()));
    let mut out = sigma.values.clone();
    if c.im != 0.0 {
        let scale = sigma.max_abs();
        let ops = FiniteDiff::new(grid);
        let mut steps = 1usize;
        out = loop {
            let sub = c / steps as f64;
            let mut cur = Some(sigma.values.clone());
            for _ in 0..steps {
                cur = cur.and_then(|v| taylor_step(&ops, &v, sub, scale));
            }
            match cur {
                Some(v) => break v,
                None if steps >= MAX_SUBSTEPS => {
                    let mut v = sigma.values.clone();
                    for _ in 0..steps {
                        v = taylor_step_truncated(&ops, &v, sub, scale);
                    }
                    break v;
                }
                None => steps *= 2,
            }
        };
    }
    PhaseSpaceSymbol {
        grid: grid.clone(),
        alpha: alpha.value(),
        values: out,
    }
}

/// `Σ_n (cD)^n f / n!` until the terms fall below tolerance. `None` when a
/// term grows while still above the round-off floor.
fn taylor_step(ops: &FiniteDiff, f: &[C64], c: C64, scale: f64) -> Option<Vec<C64>> {
    let mut out = f.to_vec();
    let mut term = f.to_vec();
    let mut prev = f64::INFINITY;
    for n in 1..=MAX_TERMS {
        let mut next = ops.mixed(&term);
        let k = c / n as f64;
        next.iter_mut().for_each(|v| *v *= k);
        let size = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if size > prev {
            return (prev <= ROUNDOFF_FLOOR * scale).then_some(out);
        }
        out.iter_mut().zip(&next).for_each(|(o, t)| *o += t);
        if size <= TERM_TOL * scale {
            return Some(out);
        }
        prev = size;
        term = next;
    }
    None
}

/// The same series, stopped at the first growing term.
fn taylor_step_truncated(ops: &FiniteDiff, f: &[C64], c: C64, scale: f64) -> Vec<C64> {
    let mut out = f.to_vec();
    let mut term = f.to_vec();
    let mut prev = f64::INFINITY;
    for n in 1..=MAX_TERMS {
        let mut next = ops.mixed(&term);
        let k = c / n as f64;
        next.iter_mut().for_each(|v| *v *= k);
        let size = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if size > prev {
            break;
        }
        out.iter_mut().zip(&next).for_each(|(o, t)| *o += t);
        if size <= TERM_TOL * scale {
            break;
        }
        prev = size;
        term = next;
    }
    out
}

/// Fornberg weights for the first derivative at `x0` on `nodes`.
pub(crate) fn fornberg_first(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// One-sided near the edges, centered inside; applied as `Σ w (f - f_i)`
/// so constants differentiate to exactly zero.
struct FiniteDiff {
    dim: usize,
    g: usize,
    n: usize,
    dx: f64,
    dk: f64,
    /// Per node `i`: stencil start and weights on unit spacing.
    stencils: Vec<(usize, Vec<f64>)>,
}

impl FiniteDiff {
    fn new(grid: &PhaseSpaceGrid) -> Self {
        let g = grid.points_per_axis();
        let width = STENCIL.min(g);
        let stencils = (0..g)
            .map(|i| {
                let start = i.saturating_sub(width / 2).min(g - width);
                let nodes: Vec<f64> = (start..start + width).map(|p| p as f64).collect();
                (start, fornberg_first(i as f64, &nodes))
            })
            .collect();
        Self {
            dim: grid.dim(),
            g,
            n: grid.len(),
            dx: grid.dx(),
            dk: grid.dk(),
            stencils,
        }
    }

    /// Derivative along one axis of a flat array with the given stride.
    fn along(&self, f: &[C64], stride: usize, h: f64) -> Vec<C64> {
        let g = self.g;
        let block = stride * g;
        let total = f.len();
        let mut out = vec![C64::default(); total];
        exec::for_each_chunk(&mut out, block, |b, chunk| {
            let base = b * block;
            for off in 0..stride {
                for i in 0..g {
                    let fi = f[base + off + i * stride];
                    let (start, w) = &self.stencils[i];
                    let mut acc = C64::default();
                    for (m, wm) in w.iter().enumerate() {
                        acc += (f[base + off + (start + m) * stride] - fi) * wm;
                    }
                    chunk[off + i * stride] = acc / h;
                }
            }
        });
        debug_assert_eq!(total, self.n * self.n);
        out
    }

    /// `Σ_j ∂_{k_j} ∂_{x_j} f` on the x-major layout `[x_1..x_N, k_1..k_N]`.
    fn mixed(&self, f: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let g = self.g;
        let mut acc = vec![C64::default(); f.len()];
        for j in 0..d {
            let sx = g.pow((2 * d - 1 - j) as u32);
            let sk = g.pow((d - 1 - j) as u32);
            let dxf = self.along(f, sx, self.dx);
            let dkdx = self.along(&dxf, sk, self.dk);
            acc.iter_mut().zip(dkdx).for_each(|(a, v)| *a += v);
        }
        acc
    }
}

/// Band-limited cardinal function on one axis; the Nyquist mode is split
/// symmetrically for even G.
fn cardinal(grid: &PhaseSpaceGrid, d: f64) -> f64 {
    let g = grid.points_per_axis();
    let t = grid.dk() * d / grid.hbar();
    let half = g / 2;
    let mut s = 1.0;
    let top = if g.is_multiple_of(2) { half - 1 } else { half };
    for n in 1..=top {
        s += 2.0 * (n as f64 * t).cos();
    }
    if g.is_multiple_of(2) {
        s += (half as f64 * t).cos();
    }
    s / g as f64
}

fn cardinal_vec(grid: &PhaseSpaceGrid, point: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut x = vec![0.0; grid.dim()];
    (0..n)
        .map(|p| {
            grid.x_coord_into(p, &mut x);
            point.iter().zip(&x).map(|(u, xp)| cardinal(grid, u - xp)).product()
        })
        .collect()
}

/// Symmetric offsets `j ∈ [-G/2, G/2]` per axis with trapezoid end weights
/// for even G.
fn symmetric_offsets(grid: &PhaseSpaceGrid) -> Vec<(Vec<f64>, f64)> {
    let g = grid.points_per_axis() as i64;
    let axis: Vec<(i64, f64)> = if g % 2 == 0 {
        (-g / 2..=g / 2).map(|j| (j, if j.abs() == g / 2 { 0.5 } else { 1.0 })).collect()
    } else {
        (-(g - 1) / 2..=(g - 1) / 2).map(|j| (j, 1.0)).collect()
    };
    let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for _ in 0..grid.dim() {
        out = out
            .into_iter()
            .flat_map(|(v, w)| {
                axis.iter().map(move |&(j, wj)| {
                    let mut v2 = v.clone();
                    v2.push(j as f64 * grid.dx());
                    (v2, w * wj)
                })
            })
            .collect();
    }
    out
}

fn guard_fourier(n: usize) -> Result<()> {
    if n > FOURIER_ROUTE_LIMIT {
        return Err(Error::SizeGuard {
            what: "interpolating Weyl route",
            size: n,
            limit: FOURIER_ROUTE_LIMIT,
        });
    }
    Ok(())
}

/// `u^T A v` for interpolation vectors.
fn bilinear(kernel: &OperatorKernel, u: &[f64], v: &[f64]) -> C64 {
    let n = kernel.size();
    let mut acc = C64::default();
    for p in 0..n {
        if u[p] == 0.0 {
            continue;
        }
        let row = kernel.row(p);
        let s: C64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        acc += s * u[p];
    }
    acc
}

fn fourier_symbol(kernel: &OperatorKernel, alpha: AlphaIndex) -> Result<PhaseSpaceSymbol> {
    let grid = kernel.grid();
    let n = grid.len();
    guard_fourier(n)?;
    let d = grid.dim();
    let (a, b) = (0.5 + alpha.value(), 0.5 - alpha.value());
    let offsets = symmetric_offsets(grid);
    let wx = grid.x_measure();
    let h = grid.hbar();
    let rows = exec::map_range(n, |ix| {
        let x = grid.x_coord(ix);
        let interp: Vec<C64> = offsets
            .iter()
            .map(|(y, w)| {
                let bra: Vec<f64> = (0..d).map(|j| x[j] - a * y[j]).collect();
                let ket: Vec<f64> = (0..d).map(|j| x[j] + b * y[j]).collect();
                bilinear(kernel, &cardinal_vec(grid, &bra), &cardinal_vec(grid, &ket)) * (w * wx)
            })
            .collect();
        let mut k = vec![0.0; d];
        (0..n)
            .map(|ik| {
                grid.k_coord_into(ik, &mut k);
                offsets
                    .iter()
                    .zip(&interp)
                    .map(|((y, _), v)| {
                        let ph: f64 = k.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / h;
                        v * C64::from_polar(1.0, ph)
                    })
                    .sum::<C64>()
            })
            .collect::<Vec<_>>()
    });
    Ok(PhaseSpaceSymbol {
        grid: grid.clone(),
        alpha: alpha.value(),
        values: rows.concat(),
    })
}

/// `Δ_α(K - k, X - x) = (2πħ)^{-N} ∫dτ e^{-iτ·k/ħ} |x - (½+α)τ⟩⟨x + (½-α)τ|`
/// as a lattice kernel, with off-lattice states band-limited.
pub fn delta_alpha_matrix_element(alpha: AlphaIndex, k: &[f64], x: &[f64], grid: &PhaseSpaceGrid) -> Result<OperatorKernel> {
    let n = grid.len();
    guard_fourier(n)?;
    let d = grid.dim();
    if k.len() != d || x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: k.len().min(x.len()),
        });
    }
    let (a, b) = (0.5 + alpha.value(), 0.5 - alpha.value());
    let h = grid.hbar();
    let pre = grid.x_measure() / (2.0 * PI * h).powi(d as i32) / grid.x_measure().powi(2);
    let mut e = vec![C64::default(); n * n];
    for (tau, w) in symmetric_offsets(grid) {
        let bra: Vec<f64> = (0..d).map(|j| x[j] - a * tau[j]).collect();
        let ket: Vec<f64> = (0..d).map(|j| x[j] + b * tau[j]).collect();
        let su = cardinal_vec(grid, &bra);
        let sv = cardinal_vec(grid, &ket);
        let ph: f64 = -tau.iter().zip(k).map(|(t, kk)| t * kk).sum::<f64>() / h;
        let c = C64::from_polar(w * pre, ph);
        for u in 0..n {
            if su[u] == 0.0 {
                continue;
            }
            for v in 0..n {
                e[u * n + v] += c * su[u] * sv[v];
            }
        }
    }
    OperatorKernel::new(grid.clone(), e)
}

/// `(2πħ)^N tr[A Δ_{-α}]` at one phase-space point.
pub fn trace_form_symbol(kernel: &OperatorKernel, alpha: AlphaIndex, k: &[f64], x: &[f64]) -> Result<C64> {
    let grid = kernel.grid();
    let delta = delta_alpha_matrix_element(AlphaIndex(-alpha.value()), k, x, grid)?;
    let n = grid.len();
    let mut tr = C64::default();
    for u in 0..n {
        for v in 0..n {
            tr += kernel.get(u, v) * delta.get(v, u);
        }
    }
    Ok(tr * grid.x_measure().powi(2) * (2.0 * PI * grid.hbar()).powi(grid.dim() as i32))
}

/// Kernel of `K·K`: `(2πħ)^{-N} Σ_k Δk^N |k|² e^{ik·(y - y')/ħ}`.
pub fn kinetic_operator_kernel(grid: &PhaseSpaceGrid, scale: f64) -> OperatorKernel {
    let n = grid.len();
    let w = grid.k_weight();
    let mut k = vec![0.0; grid.dim()];
    let mut t: Vec<C64> = (0..n)
        .map(|ik| {
            grid.k_coord_into(ik, &mut k);
            C64::new(scale * k.iter().map(|v| v * v).sum::<f64>(), 0.0)
        })
        .collect();
    let mut scratch = Vec::new();
    grid.k_to_offset_in_place(&mut t, &mut scratch);
    OperatorKernel::from_rows(grid, |iy| (0..n).map(|iyp| t[grid.offset_index(iyp, iy)] * w).collect())
}

/// Kernel of `(X^j K^j + K^j X^j)/2` for one axis `j`.
pub fn symmetrized_xk_kernel(grid: &PhaseSpaceGrid, axis: usize) -> OperatorKernel {
    let n = grid.len();
    let w = grid.k_weight();
    let mut k = vec![0.0; grid.dim()];
    let mut t: Vec<C64> = (0..n)
        .map(|ik| {
            grid.k_coord_into(ik, &mut k);
            C64::new(k[axis], 0.0)
        })
        .collect();
    let mut scratch = Vec::new();
    grid.k_to_offset_in_place(&mut t, &mut scratch);
    OperatorKernel::from_rows(grid, |iy| {
        let xy = grid.x_coord(iy)[axis];
        (0..n)
            .map(|iyp| {
                let xyp = grid.x_coord(iyp)[axis];
                t[grid.offset_index(iyp, iy)] * w * (0.5 * (xy + xyp))
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WashoutReport {
    pub alphas: Vec<f64>,
    /// Per α: max |h_α(k,x) - V(x + θk)|.
    pub deviation_from_shifted: Vec<f64>,
    /// max over pairs of max |h_α - h_α'|.
    pub max_pairwise: f64,
    /// max |V(x + θk)| over the lattice.
    pub scale: f64,
}

impl WashoutReport {
    pub fn relative_pairwise(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_pairwise
        } else {
            self.max_pairwise / self.scale
        }
    }
}

/// Pairwise spread of the α-symbols of a kernel.
pub fn alpha_spread(kernel: &OperatorKernel, alphas: &[AlphaIndex]) -> Result<(Vec<PhaseSpaceSymbol>, f64)> {
    let syms = alphas
        .iter()
        .map(|&a| symbol_of_operator(kernel, a))
        .collect::<Result<Vec<_>>>()?;
    let mut spread = 0.0f64;
    for i in 0..syms.len() {
        for j in i + 1..syms.len() {
            spread = spread.max(syms[i].max_abs_diff(&syms[j])?);
        }
    }
    Ok((syms, spread))
}

/// Builds the operator `V(X + θK)` on `grid` and compares its α-symbols.
pub fn verify_alpha_washout(v: &Potential, theta: &ThetaMatrix, alphas: &[AlphaIndex], grid: &PhaseSpaceGrid) -> Result<WashoutReport> {
    if alphas.len() < 2 {
        return Err(Error::InvalidArgument("washout needs at least two alpha values".into()));
    }
    let kernel = potential_operator_kernel(v, theta, grid)?;
    let (syms, spread) = alpha_spread(&kernel, alphas)?;
    let exact = PhaseSpaceSymbol::from_fn(grid, 0.0, |k, x| C64::new(evaluate_potential_shifted(v, theta, x, k), 0.0))?;
    let deviation_from_shifted = syms.iter().map(|s| s.max_abs_diff(&exact)).collect::<Result<Vec<_>>>()?;
    Ok(WashoutReport {
        alphas: alphas.iter().map(|a| a.value()).collect(),
        deviation_from_shifted,
        max_pairwise: spread,
        scale: exact.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphas(v: &[f64]) -> Vec<AlphaIndex> {
        v.iter().map(|&a| AlphaIndex::new(a).unwrap()).collect()
    }

    #[test]
    fn alpha_range() {
        assert!(AlphaIndex::new(0.51).is_err());
        assert!(AlphaIndex::new(-0.5).is_ok());
    }

    #[test]
    fn fornberg_exact_on_polynomials() {
        let nodes: Vec<f64> = (0..9).map(|i| i as f64).collect();
        for x0 in [0.0, 3.0, 4.0, 8.0] {
            let w = fornberg_first(x0, &nodes);
            for p in 0..=8 {
                let d: f64 = w.iter().zip(&nodes).map(|(w, x)| w * x.powi(p)).sum();
                let want = if p == 0 { 0.0 } else { p as f64 * x0.powi(p - 1) };
                assert!((d - want).abs() < 1e-7 * (1.0 + want.abs()), "p={p} x0={x0}");
            }
        }
    }

    #[test]
    fn identity_symbol_is_one() {
        let g = PhaseSpaceGrid::new(2, 8, 3.0, 1.0).unwrap();
        let id = OperatorKernel::identity(&g);
        for a in alphas(&[-0.5, -0.2, 0.0, 0.5]) {
            let s = symbol_of_operator(&id, a).unwrap();
            assert!(s.values().iter().all(|v| (v - 1.0).norm() < 1e-13));
        }
    }

    #[test]
    fn kinetic_symbol_is_alpha_invariant() {
        let g = PhaseSpaceGrid::new(2, 8, 3.0, 1.0).unwrap();
        let kin = kinetic_operator_kernel(&g, 1.0);
        let s0 = symbol_of_operator(&kin, AlphaIndex::new(0.0).unwrap()).unwrap();
        let s1 = symbol_of_operator(&kin, AlphaIndex::new(0.4).unwrap()).unwrap();
        assert_eq!(s0, PhaseSpaceSymbol { alpha: 0.0, ..s1.clone() });
        for ix in 0..g.len() {
            for ik in 0..g.len() {
                let k = g.k_coord(ik);
                assert!((s0.get(ik, ix).re - (k[0] * k[0] + k[1] * k[1])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quartic_washout_small_grid() {
        let g = PhaseSpaceGrid::new(2, 10, 3.0, 1.0).unwrap();
        let r = verify_alpha_washout(&Potential::quartic(1.0), &ThetaMatrix::planar(0.1), &alphas(&[-0.4, 0.0, 0.4]), &g).unwrap();
        assert!(r.relative_pairwise() < 1e-9, "{r:?}");
    }

    #[test]
    fn control_operator_detects_ordering() {
        let g = PhaseSpaceGrid::new(1, 16, 3.0, 1.0).unwrap();
        let k = symmetrized_xk_kernel(&g, 0);
        let (_, spread) = alpha_spread(&k, &alphas(&[-0.4, 0.0, 0.4])).unwrap();
        assert!(spread > 0.5, "{spread}");
    }

    #[test]
    fn trace_form_matches_fourier_route() {
        let g = PhaseSpaceGrid::new(1, 8, 2.0, 1.0).unwrap();
        let kern = potential_operator_kernel(&Potential::gaussian_well(1.0, 0.8), &ThetaMatrix::zero(1), &g).unwrap();
        let a = AlphaIndex::new(0.3).unwrap();
        let s = symbol_of_operator_with(&kern, a, WeylScheme::Fourier).unwrap();
        for (ik, ix) in [(0, 0), (3, 5), (7, 2), (4, 4)] {
            let t = trace_form_symbol(&kern, a, &g.k_coord(ik), &g.x_coord(ix)).unwrap();
            assert!((t - s.get(ik, ix)).norm() < 1e-10);
        }
    }
}
