//! Reference evolutions independent of time slicing.

use std::f64::consts::PI;
use std::time::Instant;

use faer::complex_native::c64;
use faer::{ComplexField as _, Mat, Side};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::ComplexField;
use crate::grid::PhaseSpaceGrid;
use crate::kernel::{matmul, OperatorKernel, PropagatorKernel};
use crate::params::{PhysicsParams, ThetaMatrix};
use crate::potential::Potential;
use crate::slicer::{self, SlicingConfig};
use crate::star::{potential_operator_kernel, star_apply};

/// Dense Hamiltonians are limited to G^N ≤ 4096.
pub const DENSE_LIMIT: usize = 4096;
const HERMITIAN_TOL: f64 = 1e-9;
const TAYLOR_TOL: f64 = 1e-16;
const TAYLOR_MAX_TERMS: usize = 60;

fn guard(grid: &PhaseSpaceGrid) -> Result<()> {
    if grid.len() > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            what: "dense Hamiltonian",
            size: grid.len(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// Kernel of `K·K/2M`.
pub fn kinetic_kernel(grid: &PhaseSpaceGrid, params: &PhysicsParams) -> OperatorKernel {
    crate::weyl::kinetic_operator_kernel(grid, 0.5 / params.mass)
}

/// Kernel of `H_θ = K·K/2M + V(X + θK)`.
pub fn build_hamiltonian_matrix(v: &Potential, theta: &ThetaMatrix, grid: &PhaseSpaceGrid, params: &PhysicsParams) -> Result<OperatorKernel> {
    guard(grid)?;
    if params.dim != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: params.dim,
        });
    }
    kinetic_kernel(grid, params).add(&potential_operator_kernel(v, theta, grid)?)
}

/// Eigendecomposition of a Hermitian kernel viewed as an operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    grid: PhaseSpaceGrid,
    eigenvalues: Vec<f64>,
    vectors: Mat<c64>,
}

impl SpectralDecomposition {
    pub fn new(h: &OperatorKernel) -> Result<Self> {
        let grid = h.grid().clone();
        guard(&grid)?;
        let dev = h.hermiticity_deviation();
        if dev > HERMITIAN_TOL * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        let n = grid.len();
        let w = grid.x_measure();
        let a = Mat::<c64>::from_fn(n, n, |i, j| {
            let v = (h.get(i, j) + h.get(j, i).conj()) * (0.5 * w);
            c64::new(v.re, v.im)
        });
        let evd = a.selfadjoint_eigendecomposition(Side::Lower);
        let s = evd.s().column_vector();
        let eigenvalues = (0..n).map(|i| s.read(i).re).collect();
        Ok(Self {
            grid,
            eigenvalues,
            vectors: evd.u().to_owned(),
        })
    }

    /// Ascending eigenvalues of the operator.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn phases(&self, time: f64) -> Vec<c64> {
        let h = self.grid.hbar();
        self.eigenvalues
            .iter()
            .map(|&l| {
                let z = C64::from_polar(1.0, -l * time / h);
                c64::new(z.re, z.im)
            })
            .collect()
    }

    /// `e^{-iHT/ħ}` as a kernel.
    pub fn propagator(&self, time: f64) -> PropagatorKernel {
        let n = self.grid.len();
        let ph = self.phases(time);
        let scaled = Mat::<c64>::from_fn(n, n, |i, j| self.vectors.read(i, j) * ph[j]);
        let u = matmul(&scaled, &self.vectors.adjoint().to_owned());
        let inv = 1.0 / self.grid.x_measure();
        let mut kernel = OperatorKernel::from_faer(&self.grid, &u);
        kernel.entries_mut().iter_mut().for_each(|v| *v *= inv);
        PropagatorKernel {
            kernel,
            total_time: time,
            config: None,
        }
    }

    /// `e^{-iHT/ħ} ψ` without forming the propagator.
    pub fn evolve(&self, psi: &ComplexField, time: f64) -> Result<ComplexField> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.len();
        let ph = self.phases(time);
        let u = &self.vectors;
        let vals = psi.values();
        let coeffs: Vec<c64> = exec::map_range(n, |j| {
            let mut acc = c64::new(0.0, 0.0);
            for i in 0..n {
                acc += u.read(i, j).faer_conj() * c64::new(vals[i].re, vals[i].im);
            }
            acc * ph[j]
        });
        let out = exec::map_range(n, |i| {
            let mut acc = c64::new(0.0, 0.0);
            for (j, c) in coeffs.iter().enumerate() {
                acc += u.read(i, j) * *c;
            }
            C64::new(acc.re, acc.im)
        });
        ComplexField::new(self.grid.clone(), out)
    }
}

/// `e^{-iHT/ħ}` for a Hermitian kernel.
pub fn spectral_propagator(h: &OperatorKernel, time: f64) -> Result<PropagatorKernel> {
    Ok(SpectralDecomposition::new(h)?.propagator(time))
}

/// `max |U†U - I|` in operator form.
pub fn unitarity_deviation(k: &PropagatorKernel) -> f64 {
    let grid = k.grid();
    let n = grid.len();
    let w = grid.x_measure();
    let u = k.kernel.to_faer();
    let prod = matmul(&u.adjoint().to_owned(), &u);
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = prod.read(i, j) * (w * w);
            let target = if i == j { 1.0 } else { 0.0 };
            m = m.max(((v.re - target).powi(2) + v.im.powi(2)).sqrt());
        }
    }
    m
}

fn kinetic_phase(grid: &PhaseSpaceGrid, params: &PhysicsParams, dt: f64) -> Vec<C64> {
    let mut k = vec![0.0; grid.dim()];
    (0..grid.len())
        .map(|ik| {
            grid.k_coord_into(ik, &mut k);
            let kk: f64 = k.iter().map(|v| v * v).sum();
            C64::from_polar(1.0, -dt * kk / (2.0 * params.mass * params.hbar))
        })
        .collect()
}

/// `exp(-iδt V⋆/ħ) ψ` by Taylor series in repeated star products.
fn potential_step(v: &Potential, theta: &ThetaMatrix, psi: &ComplexField, dt: f64, hbar: f64) -> Result<ComplexField> {
    if theta.is_zero() {
        let grid = psi.grid();
        let mut out = psi.clone();
        let mut x = vec![0.0; grid.dim()];
        for (i, val) in out.values_mut().iter_mut().enumerate() {
            grid.x_coord_into(i, &mut x);
            *val *= C64::from_polar(1.0, -dt * v.eval(&x) / hbar);
        }
        return Ok(out);
    }
    let c = C64::new(0.0, -dt / hbar);
    let scale = psi.norm();
    let mut out = psi.clone();
    let mut term = psi.clone();
    for n in 1..=TAYLOR_MAX_TERMS {
        term = star_apply(v, theta, &term)?.scale(c / n as f64);
        out = out.add(&term)?;
        if term.norm() < TAYLOR_TOL * scale {
            break;
        }
    }
    Ok(out)
}

/// Strang splitting: half kinetic, full potential, half kinetic per step.
pub fn split_step_evolve(psi: &ComplexField, v: &Potential, theta: &ThetaMatrix, params: &PhysicsParams, time: f64, steps: usize) -> Result<ComplexField> {
    if steps == 0 {
        return Err(Error::InvalidArgument("split-step needs at least one step".into()));
    }
    let grid = psi.grid();
    theta.check_dim(grid.dim())?;
    v.check_dim(grid.dim())?;
    let dt = time / steps as f64;
    let half = kinetic_phase(grid, params, 0.5 * dt);
    let kick = |f: ComplexField| -> ComplexField {
        let mut hat = f.momentum_values();
        hat.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
        grid.inverse_in_place(&mut hat);
        ComplexField::new(grid.clone(), hat).expect("length preserved")
    };
    let mut cur = psi.clone();
    for _ in 0..steps {
        cur = kick(cur);
        if !v.is_zero() {
            cur = potential_step(v, theta, &cur, dt, params.hbar)?;
        }
        cur = kick(cur);
    }
    Ok(cur)
}

/// `(M/(2πiħε))^{N/2} exp(iM|Δ|²/(2ħε))`.
pub fn free_kernel_value(params: &PhysicsParams, eps: f64, delta: &[f64]) -> C64 {
    let n = delta.len() as f64;
    let pre = C64::new(0.0, -params.mass / (2.0 * PI * params.hbar * eps)).powf(n / 2.0);
    let d2: f64 = delta.iter().map(|v| v * v).sum();
    pre * C64::from_polar(1.0, params.mass * d2 / (2.0 * params.hbar * eps))
}

/// Closed-form free evolution of `exp(-|x|²/(2w²))` over time `t`,
/// scaled by the same constant that normalizes the initial packet on the lattice.
pub fn free_gaussian_evolution(grid: &PhaseSpaceGrid, params: &PhysicsParams, width: f64, time: f64) -> ComplexField {
    let z = vec![0.0; grid.dim()];
    let initial = ComplexField::gaussian(grid, &z, width, &z).expect("valid packet");
    let amp = initial.values()[0].norm() / (-grid.x_coord(0).iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp();
    let s = C64::new(width * width, params.hbar * time / params.mass);
    let pre = (s / (width * width)).powf(-(grid.dim() as f64) / 2.0) * amp;
    ComplexField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        pre * (-r2 / (2.0 * s)).exp()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub m: usize,
    pub l2_error: f64,
    pub seconds: f64,
}

/// Relative L2 error of the sliced evolution against the spectral reference.
pub fn oracle_compare(
    template: &SlicingConfig,
    m_values: &[usize],
    v: &Potential,
    theta: &ThetaMatrix,
    grid: &PhaseSpaceGrid,
    probe: &ComplexField,
) -> Result<Vec<OracleRow>> {
    let h = build_hamiltonian_matrix(v, theta, grid, &template.params)?;
    let reference = SpectralDecomposition::new(&h)?.evolve(probe, template.total_time)?;
    let rn = reference.norm();
    if rn == 0.0 {
        return Err(Error::DegenerateProbe);
    }
    m_values
        .iter()
        .map(|&m| {
            let t0 = Instant::now();
            let out = slicer::propagate(&template.with_m(m), v, theta, probe)?;
            Ok(OracleRow {
                m,
                l2_error: out.distance(&reference)? / rn,
                seconds: t0.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_spectrum_is_lattice() {
        let g = PhaseSpaceGrid::new(1, 16, 4.0, 1.0).unwrap();
        let p = PhysicsParams::unit(1);
        let h = build_hamiltonian_matrix(&Potential::Zero, &ThetaMatrix::zero(1), &g, &p).unwrap();
        let spec = SpectralDecomposition::new(&h).unwrap();
        let mut want: Vec<f64> = g.k_axis().iter().map(|k| k * k / 2.0).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in spec.eigenvalues().iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let g = PhaseSpaceGrid::new(1, 12, 4.0, 1.0).unwrap();
        let p = PhysicsParams::unit(1);
        let h = build_hamiltonian_matrix(&Potential::harmonic(1.0, 1.0), &ThetaMatrix::zero(1), &g, &p).unwrap();
        let u = spectral_propagator(&h, 0.0).unwrap();
        assert!(u.kernel.max_abs_diff(&OperatorKernel::identity(&g)).unwrap() * g.x_measure() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = PhaseSpaceGrid::new(1, 4, 1.0, 1.0).unwrap();
        let mut k = OperatorKernel::zeros(&g);
        k.entries_mut()[1] = C64::new(1.0, 0.0);
        assert!(matches!(spectral_propagator(&k, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn fresnel_prefactor_one_dim() {
        let p = PhysicsParams::unit(1);
        let v = free_kernel_value(&p, 0.5, &[0.0]);
        let want = (1.0 / (2.0 * PI * 0.5)).sqrt() * C64::from_polar(1.0, -PI / 4.0);
        assert!((v - want).norm() < 1e-14);
    }
}
