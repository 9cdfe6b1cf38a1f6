//! The Grönewold-Moyal product `V ⋆ ψ` as the pseudodifferential operator
//! with symbol `V(x + θk)`:
//!
//! ```text
//! (V⋆ψ)(x) = (2πħ)^{-N} Σ_k Δk^N e^{ik·x/ħ} V(x + θk) ψ̂(k)
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::ComplexField;
use crate::grid::PhaseSpaceGrid;
use crate::kernel::OperatorKernel;
use crate::params::ThetaMatrix;
use crate::potential::{evaluate_potential_shifted, Potential};

fn check(v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<()> {
    theta.check_dim(grid.dim())?;
    v.check_dim(grid.dim())
}

/// `V ⋆ ψ`. Exact pointwise product at θ = 0; polynomial potentials take a
/// monomial fast path, everything else the direct mixed-domain sum.
pub fn star_apply(v: &Potential, theta: &ThetaMatrix, psi: &ComplexField) -> Result<ComplexField> {
    let grid = psi.grid();
    check(v, theta, grid)?;
    if theta.is_zero() {
        let mut out = psi.clone();
        let mut x = vec![0.0; grid.dim()];
        for (i, val) in out.values_mut().iter_mut().enumerate() {
            grid.x_coord_into(i, &mut x);
            *val *= v.eval(&x);
        }
        return Ok(out);
    }
    match v.shifted_poly(theta) {
        Some(p) => Ok(star_apply_poly(&p, psi)),
        None => star_apply_direct(v, theta, psi),
    }
}

/// Monomial expansion `V(x + θk) = Σ c x^β k^γ`, summed as
/// `Σ c x^β F⁻¹[k^γ ψ̂]`.
fn star_apply_poly(p: &crate::poly::Poly, psi: &ComplexField) -> ComplexField {
    let grid = psi.grid();
    let d = grid.dim();
    let mut by_gamma: BTreeMap<Vec<u32>, Vec<(Vec<u32>, f64)>> = BTreeMap::new();
    for (e, c) in p.terms() {
        by_gamma
            .entry(e[d..].to_vec())
            .or_default()
            .push((e[..d].to_vec(), c));
    }
    let psi_hat = psi.momentum_values();
    let n = grid.len();
    let groups: Vec<_> = by_gamma.into_iter().collect();
    let parts = exec::map_range(groups.len(), |gi| {
        let (gamma, xs) = &groups[gi];
        let mut kbuf = vec![0.0; d];
        let mut xbuf = vec![0.0; d];
        let mut h: Vec<C64> = (0..n)
            .map(|i| {
                grid.k_coord_into(i, &mut kbuf);
                let m: f64 = gamma.iter().zip(&kbuf).map(|(&g, &k)| k.powi(g as i32)).product();
                psi_hat[i] * m
            })
            .collect();
        grid.inverse_in_place(&mut h);
        for (i, val) in h.iter_mut().enumerate() {
            grid.x_coord_into(i, &mut xbuf);
            let poly_x: f64 = xs
                .iter()
                .map(|(beta, c)| c * beta.iter().zip(&xbuf).map(|(&b, &x)| x.powi(b as i32)).product::<f64>())
                .sum();
            *val *= poly_x;
        }
        h
    });
    let mut out = vec![C64::default(); n];
    for part in parts {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    ComplexField::new(grid.clone(), out).expect("length preserved")
}

/// Per-axis table `e^{i k_n x_j / ħ}` indexed `[j * G + n]`.
pub(crate) fn phase_table(grid: &PhaseSpaceGrid) -> Vec<C64> {
    let xs = grid.x_axis();
    let ks = grid.k_axis();
    let h = grid.hbar();
    xs.iter()
        .flat_map(|&x| ks.iter().map(move |&k| C64::from_polar(1.0, k * x / h)))
        .collect()
}

/// The mixed-domain sum evaluated point by point, O(G^{2N}).
pub fn star_apply_direct(v: &Potential, theta: &ThetaMatrix, psi: &ComplexField) -> Result<ComplexField> {
    let grid = psi.grid();
    check(v, theta, grid)?;
    let d = grid.dim();
    let g = grid.points_per_axis();
    let n = grid.len();
    let psi_hat = psi.momentum_values();
    let table = phase_table(grid);
    let w = grid.k_weight();
    let out = exec::map_range(n, |ix| {
        let mut xi = vec![0; d];
        let mut ki = vec![0; d];
        let mut x = vec![0.0; d];
        let mut k = vec![0.0; d];
        grid.unflatten(ix, &mut xi);
        grid.x_coord_into(ix, &mut x);
        let mut acc = C64::default();
        for ik in 0..n {
            grid.unflatten(ik, &mut ki);
            grid.k_coord_into(ik, &mut k);
            let mut ph = C64::new(1.0, 0.0);
            for a in 0..d {
                ph *= table[xi[a] * g + ki[a]];
            }
            acc += ph * evaluate_potential_shifted(v, theta, &x, &k) * psi_hat[ik];
        }
        acc * w
    });
    ComplexField::new(grid.clone(), out)
}

/// `⟨y|V_θ|y'⟩ = (2πħ)^{-N} Σ_k Δk^N V(y + θk) e^{ik·(y - y')/ħ}`.
pub fn potential_operator_kernel(v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid) -> Result<OperatorKernel> {
    check(v, theta, grid)?;
    let n = grid.len();
    let d = grid.dim();
    if theta.is_zero() {
        let mut k = OperatorKernel::zeros(grid);
        let inv = 1.0 / grid.x_measure();
        let mut x = vec![0.0; d];
        for i in 0..n {
            grid.x_coord_into(i, &mut x);
            k.entries_mut()[i * n + i] = C64::new(v.eval(&x) * inv, 0.0);
        }
        return Ok(k);
    }
    let w = grid.k_weight();
    Ok(OperatorKernel::from_rows(grid, |iy| {
        let mut y = vec![0.0; d];
        let mut k = vec![0.0; d];
        let mut scratch = Vec::new();
        grid.x_coord_into(iy, &mut y);
        let mut t: Vec<C64> = (0..n)
            .map(|ik| {
                grid.k_coord_into(ik, &mut k);
                C64::new(evaluate_potential_shifted(v, theta, &y, &k), 0.0)
            })
            .collect();
        grid.k_to_offset_in_place(&mut t, &mut scratch);
        (0..n).map(|iyp| t[grid.offset_index(iyp, iy)] * w).collect()
    }))
}

/// `φ ⋆ ψ` for two fields, with `φ(x + θq)` obtained by spectral shift.
pub fn star_product_fields(phi: &ComplexField, psi: &ComplexField, theta: &ThetaMatrix) -> Result<ComplexField> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = psi.grid();
    theta.check_dim(grid.dim())?;
    if theta.is_zero() {
        let vals = phi.values().iter().zip(psi.values()).map(|(a, b)| a * b).collect();
        return ComplexField::new(grid.clone(), vals);
    }
    let d = grid.dim();
    let n = grid.len();
    let h = grid.hbar();
    let phi_hat = phi.momentum_values();
    let psi_hat = psi.momentum_values();
    let w = grid.k_weight();
    let active: Vec<usize> = (0..n).filter(|&i| psi_hat[i] != C64::default()).collect();
    let contributions = exec::map_range(active.len(), |ai| {
        let iq = active[ai];
        let q = grid.k_coord(iq);
        let s = theta.shift(&vec![0.0; d], &q);
        let mut k = vec![0.0; d];
        let mut x = vec![0.0; d];
        let mut shifted: Vec<C64> = (0..n)
            .map(|ik| {
                grid.k_coord_into(ik, &mut k);
                let ph: f64 = k.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>() / h;
                phi_hat[ik] * C64::from_polar(1.0, ph)
            })
            .collect();
        grid.inverse_in_place(&mut shifted);
        let c = psi_hat[iq] * w;
        for (ix, val) in shifted.iter_mut().enumerate() {
            grid.x_coord_into(ix, &mut x);
            let ph: f64 = q.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / h;
            *val *= c * C64::from_polar(1.0, ph);
        }
        shifted
    });
    let mut out = vec![C64::default(); n];
    for part in contributions {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    ComplexField::new(grid.clone(), out)
}

/// `|Σ(φ⋆ψ) - Σφψ| Δx^N`.
pub fn star_integral_identity_check(phi: &ComplexField, psi: &ComplexField, theta: &ThetaMatrix) -> Result<f64> {
    let star = star_product_fields(phi, psi, theta)?;
    let a: C64 = star.values().iter().sum();
    let b: C64 = phi.values().iter().zip(psi.values()).map(|(x, y)| x * y).sum();
    Ok((a - b).norm() * phi.grid().x_measure())
}
