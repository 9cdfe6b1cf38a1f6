//! α-parameterized short-time propagators and their composition.
//!
//! One slice of duration ε has kernel
//!
//! ```text
//! K(x'; x) = (2πħ)^{-N} Σ_k Δk^N exp{(i/ħ)[k·(x' - x) - εk·k/2M - εV(x̄ + θk)]}
//! x̄ = (½+α)x' + (½-α)x
//! ```
//!
//! The momentum sum runs over the dual lattice with the Nyquist node split
//! evenly between ±k_max, which keeps the integrand symmetric under k → -k.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::ComplexField;
use crate::grid::PhaseSpaceGrid;
use crate::kernel::{OperatorKernel, PropagatorKernel};
use crate::params::{PhysicsParams, ThetaMatrix};
use crate::potential::{evaluate_potential_shifted, Potential};
use crate::weyl::AlphaIndex;

/// Upper bound on midpoint-table entries for the fast path.
pub const MIDPOINT_TABLE_LIMIT: usize = 1 << 23;
const MAX_DENOMINATOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicingConfig {
    pub slices_m: usize,
    pub total_time: f64,
    pub alpha: AlphaIndex,
    pub params: PhysicsParams,
}

impl SlicingConfig {
    pub fn new(slices_m: usize, total_time: f64, alpha: f64, params: PhysicsParams) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::config("time.total", "must be positive"));
        }
        Ok(Self {
            slices_m,
            total_time,
            alpha: AlphaIndex::new(alpha)?,
            params,
        })
    }

    /// T/(m+1).
    pub fn epsilon(&self) -> f64 {
        self.total_time / (self.slices_m + 1) as f64
    }

    pub fn with_m(self, m: usize) -> Self {
        Self { slices_m: m, ..self }
    }

    pub fn with_alpha(self, alpha: AlphaIndex) -> Self {
        Self { alpha, ..self }
    }

    /// ε Δk_max² / (2Mħ): phase advance of the fastest kinetic mode.
    pub fn kinetic_phase(&self, grid: &PhaseSpaceGrid) -> f64 {
        let kmax = grid.dk() * grid.k_center() as f64;
        self.epsilon() * grid.dim() as f64 * kmax * kmax / (2.0 * self.params.mass * self.params.hbar)
    }
}

fn check(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<()> {
    theta.check_dim(grid.dim())?;
    v.check_dim(grid.dim())?;
    if cfg.params.dim != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: cfg.params.dim,
        });
    }
    if (cfg.params.hbar - grid.hbar()).abs() > 0.0 {
        return Err(Error::config("hbar", "grid and parameters disagree on hbar"));
    }
    Ok(())
}

/// Momentum variants contributing to lattice node `ik`, with weights.
/// Nyquist components on even grids appear once with each sign.
fn k_variants(grid: &PhaseSpaceGrid, ik: usize) -> Vec<(Vec<f64>, f64)> {
    let g = grid.points_per_axis();
    let mut idx = vec![0; grid.dim()];
    grid.unflatten(ik, &mut idx);
    let base = grid.k_coord(ik);
    let mut out = vec![(base, 1.0)];
    for (a, &i) in idx.iter().enumerate() {
        if g.is_multiple_of(2) && i == 0 {
            out = out
                .into_iter()
                .flat_map(|(k, w)| {
                    let mut flipped = k.clone();
                    flipped[a] = -flipped[a];
                    [(k, 0.5 * w), (flipped, 0.5 * w)]
                })
                .collect();
        }
    }
    out
}

/// Σ over sign variants of `w · exp{-(iε/ħ)[k·k/2M + V(s + θk)]}`.
fn integrand(
    grid: &PhaseSpaceGrid,
    variants: &[(Vec<f64>, f64)],
    s: &[f64],
    eps: f64,
    mass: f64,
    v: &Potential,
    theta: &ThetaMatrix,
) -> C64 {
    let h = grid.hbar();
    variants
        .iter()
        .map(|(k, w)| {
            let kk: f64 = k.iter().map(|x| x * x).sum();
            let pot = if v.is_zero() { 0.0 } else { evaluate_potential_shifted(v, theta, s, k) };
            C64::from_polar(*w, -eps / h * (kk / (2.0 * mass) + pot))
        })
        .sum()
}

/// Smallest q ≤ 8 with (½+α)q integral.
fn midpoint_fraction(alpha: f64) -> Option<(usize, usize)> {
    let a = 0.5 + alpha;
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = a * q as f64;
        let r = p.round();
        ((p - r).abs() < 1e-12).then_some((r as usize, q))
    })
}

/// Short-time propagator, using the midpoint-table path when available.
pub fn short_time_propagator(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<PropagatorKernel> {
    check(cfg, v, theta, grid)?;
    let kernel = if v.is_zero() {
        free_slice(cfg, grid)
    } else {
        match midpoint_fraction(cfg.alpha.value()) {
            Some((p, q)) if table_size(grid, q) <= MIDPOINT_TABLE_LIMIT => tabulated_slice(cfg, v, theta, grid, p, q),
            _ => naive_slice(cfg, v, theta, grid),
        }
    };
    Ok(PropagatorKernel {
        kernel,
        total_time: cfg.epsilon(),
        config: Some(*cfg),
    })
}

/// The same kernel from a direct triple loop over (x', x, k).
pub fn short_time_propagator_naive(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<PropagatorKernel> {
    check(cfg, v, theta, grid)?;
    Ok(PropagatorKernel {
        kernel: naive_slice(cfg, v, theta, grid),
        total_time: cfg.epsilon(),
        config: Some(*cfg),
    })
}

fn table_size(grid: &PhaseSpaceGrid, q: usize) -> usize {
    let r = q * (grid.points_per_axis() - 1) + 1;
    r.saturating_pow(grid.dim() as u32).saturating_mul(grid.len())
}

fn naive_slice(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> OperatorKernel {
    let n = grid.len();
    let d = grid.dim();
    let eps = cfg.epsilon();
    let (a, b) = (0.5 + cfg.alpha.value(), 0.5 - cfg.alpha.value());
    let h = grid.hbar();
    let w = grid.k_weight();
    let variants: Vec<_> = (0..n).map(|ik| k_variants(grid, ik)).collect();
    OperatorKernel::from_rows(grid, |ixp| {
        let xp = grid.x_coord(ixp);
        let mut x = vec![0.0; d];
        let mut s = vec![0.0; d];
        let mut k = vec![0.0; d];
        (0..n)
            .map(|ix| {
                grid.x_coord_into(ix, &mut x);
                for j in 0..d {
                    s[j] = a * xp[j] + b * x[j];
                }
                let mut acc = C64::default();
                for (ik, var) in variants.iter().enumerate() {
                    grid.k_coord_into(ik, &mut k);
                    let ph: f64 = (0..d).map(|j| k[j] * (xp[j] - x[j])).sum::<f64>() / h;
                    acc += C64::from_polar(1.0, ph) * integrand(grid, var, &s, eps, cfg.params.mass, v, theta);
                }
                acc * w
            })
            .collect()
    })
}

/// V = 0: the kernel depends on x' - x only.
fn free_slice(cfg: &SlicingConfig, grid: &PhaseSpaceGrid) -> OperatorKernel {
    let n = grid.len();
    let eps = cfg.epsilon();
    let zero = vec![0.0; grid.dim()];
    let mut t: Vec<C64> = (0..n)
        .map(|ik| integrand(grid, &k_variants(grid, ik), &zero, eps, cfg.params.mass, &Potential::Zero, &ThetaMatrix::zero(grid.dim())))
        .collect();
    let mut scratch = Vec::new();
    grid.k_to_offset_in_place(&mut t, &mut scratch);
    let w = grid.k_weight();
    OperatorKernel::from_rows(grid, |ixp| (0..n).map(|ix| t[grid.offset_index(ix, ixp)] * w).collect())
}

/// With (½+α) = p/q every midpoint lies on a lattice refined q-fold, so one
/// transform per refined node covers all pairs sharing that midpoint.
fn tabulated_slice(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid, p: usize, q: usize) -> OperatorKernel {
    let n = grid.len();
    let d = grid.dim();
    let g = grid.points_per_axis();
    let r = q * (g - 1) + 1;
    let refined = r.pow(d as u32);
    let eps = cfg.epsilon();
    let variants: Vec<_> = (0..n).map(|ik| k_variants(grid, ik)).collect();
    let step = grid.dx() / q as f64;
    let lo = -grid.box_half_width();
    let mut table = vec![C64::default(); refined * n];
    exec::for_each_chunk(&mut table, n, |si, row| {
        let mut s = vec![0.0; d];
        let mut f = si;
        for a in (0..d).rev() {
            s[a] = lo + (f % r) as f64 * step;
            f /= r;
        }
        for (ik, var) in variants.iter().enumerate() {
            row[ik] = integrand(grid, var, &s, eps, cfg.params.mass, v, theta);
        }
        let mut scratch = Vec::new();
        grid.k_to_offset_in_place(row, &mut scratch);
    });
    let w = grid.k_weight();
    OperatorKernel::from_rows(grid, |ixp| {
        let mut jp = vec![0; d];
        let mut j = vec![0; d];
        grid.unflatten(ixp, &mut jp);
        (0..n)
            .map(|ix| {
                grid.unflatten(ix, &mut j);
                let si = (0..d).fold(0, |acc, a| acc * r + (q - p) * j[a] + p * jp[a]);
                table[si * n + grid.offset_index(ix, ixp)] * w
            })
            .collect()
    })
}

/// `Ka ∘ Kb`: integrates the shared point with measure Δx^N; times add.
pub fn compose(ka: &PropagatorKernel, kb: &PropagatorKernel) -> Result<PropagatorKernel> {
    let kernel = ka.kernel.compose(&kb.kernel)?;
    let config = match (ka.config, kb.config) {
        (Some(a), Some(b)) if a.alpha == b.alpha && a.params == b.params => Some(SlicingConfig {
            slices_m: a.slices_m + b.slices_m + 1,
            total_time: ka.total_time + kb.total_time,
            ..a
        }),
        _ => None,
    };
    Ok(PropagatorKernel {
        kernel,
        total_time: ka.total_time + kb.total_time,
        config,
    })
}

/// The (m+1)-fold composition of one short-time propagator.
pub fn full_kernel(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<PropagatorKernel> {
    let slice = short_time_propagator(cfg, v, theta, grid)?;
    let mut e = cfg.slices_m + 1;
    let mut base = slice;
    let mut acc: Option<PropagatorKernel> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => compose(&a, &base)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = compose(&base, &base)?;
        }
    }
    let mut k = acc.expect("at least one slice");
    k.total_time = cfg.total_time;
    k.config = Some(*cfg);
    Ok(k)
}

/// `K_full ψ` computed as m+1 successive short-time applications.
pub fn propagate(cfg: &SlicingConfig, v: &Potential, theta: &ThetaMatrix, psi: &ComplexField) -> Result<ComplexField> {
    let slice = short_time_propagator(cfg, v, theta, psi.grid())?;
    let mut out = psi.clone();
    for _ in 0..=cfg.slices_m {
        out = slice.apply(&out)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub alpha_pair: (f64, f64),
    /// ‖(K_α - K_α')ψ‖ / ‖K_0 ψ‖
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// (m, D(m)) with D the max spread over pairs.
    pub spreads: Vec<(usize, f64)>,
    /// Least-squares slope of log D against log(m+1); NaN if some D is 0.
    pub slope: f64,
    /// RMS residual of that fit.
    pub residual: f64,
}

impl SweepReport {
    pub fn spread_at(&self, m: usize) -> Option<f64> {
        self.spreads.iter().find(|(mm, _)| *mm == m).map(|(_, d)| *d)
    }
}

/// Least-squares line through `(x, y)`; returns (slope, rms residual).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Probe-action α-spread over a list of slice counts.
pub fn alpha_sweep(
    template: &SlicingConfig,
    alphas: &[AlphaIndex],
    m_values: &[usize],
    v: &Potential,
    theta: &ThetaMatrix,
    grid: &PhaseSpaceGrid,
    probe: &ComplexField,
) -> Result<SweepReport> {
    if alphas.len() < 2 {
        return Err(Error::InvalidArgument("alpha sweep needs at least two alpha values".into()));
    }
    if m_values.len() < 3 {
        return Err(Error::InvalidArgument("alpha sweep needs at least three m values".into()));
    }
    if probe.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if probe.norm() == 0.0 {
        return Err(Error::DegenerateProbe);
    }
    let zero = AlphaIndex::new(0.0)?;
    let mut set: Vec<AlphaIndex> = alphas.to_vec();
    if !set.contains(&zero) {
        set.push(zero);
    }
    let jobs: Vec<(usize, AlphaIndex)> = m_values.iter().flat_map(|&m| set.iter().map(move |&a| (m, a))).collect();
    let results = exec::map_range(jobs.len(), |i| {
        let (m, a) = jobs[i];
        propagate(&template.with_m(m).with_alpha(a), v, theta, probe)
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let lookup = |m: usize, a: AlphaIndex| {
        let i = jobs.iter().position(|&(mm, aa)| mm == m && aa == a).expect("job present");
        &results[i]
    };
    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for &m in m_values {
        let reference = lookup(m, zero).norm();
        if reference == 0.0 {
            return Err(Error::DegenerateProbe);
        }
        let mut dmax = 0.0f64;
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let s = lookup(m, alphas[i]).distance(lookup(m, alphas[j]))? / reference;
                dmax = dmax.max(s);
                rows.push(SweepRow {
                    m,
                    alpha_pair: (alphas[i].value(), alphas[j].value()),
                    spread: s,
                });
            }
        }
        spreads.push((m, dmax));
    }
    let (slope, residual) = if spreads.iter().all(|(_, d)| *d > 0.0) {
        let xs: Vec<f64> = spreads.iter().map(|(m, _)| ((m + 1) as f64).ln()).collect();
        let ys: Vec<f64> = spreads.iter().map(|(_, d)| d.ln()).collect();
        fit_line(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SweepReport {
        rows,
        spreads,
        slope,
        residual,
    })
}

/// ‖Kψ‖/‖ψ‖ for each m.
pub fn unitarity_table(template: &SlicingConfig, m_values: &[usize], v: &Potential, theta: &ThetaMatrix, probe: &ComplexField) -> Result<Vec<(usize, f64)>> {
    let n0 = probe.norm();
    if n0 == 0.0 {
        return Err(Error::DegenerateProbe);
    }
    let out = exec::map_range(m_values.len(), |i| {
        let m = m_values[i];
        propagate(&template.with_m(m), v, theta, probe).map(|p| (m, p.norm() / n0))
    });
    out.into_iter().collect()
}
