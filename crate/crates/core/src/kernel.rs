//! Dense complex kernels over pairs of lattice points.

use faer::complex_native::c64;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::ComplexField;
use crate::grid::PhaseSpaceGrid;
use crate::slicer::SlicingConfig;

/// Kernel matrix `A(y_out, y_in)`, row-major. Acting on a field integrates
/// over `y_in` with measure Δx^N.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    grid: PhaseSpaceGrid,
    entries: Vec<C64>,
}

impl OperatorKernel {
    pub fn new(grid: PhaseSpaceGrid, entries: Vec<C64>) -> Result<Self> {
        let n = grid.len();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(Self { grid, entries })
    }

    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            entries: vec![C64::default(); n * n],
        }
    }

    /// δ_{y,y'}/Δx^N, the kernel of the identity operator.
    pub fn identity(grid: &PhaseSpaceGrid) -> Self {
        let mut k = Self::zeros(grid);
        let n = grid.len();
        let v = C64::new(1.0 / grid.x_measure(), 0.0);
        for i in 0..n {
            k.entries[i * n + i] = v;
        }
        k
    }

    pub(crate) fn from_rows(grid: &PhaseSpaceGrid, row: impl Fn(usize) -> Vec<C64> + Sync + Send) -> Self {
        let n = grid.len();
        let rows = exec::map_range(n, row);
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            debug_assert_eq!(r.len(), n);
            entries.extend(r);
        }
        Self {
            grid: grid.clone(),
            entries,
        }
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    /// Number of rows (G^N).
    pub fn size(&self) -> usize {
        self.grid.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    #[inline]
    pub fn get(&self, out: usize, inp: usize) -> C64 {
        self.entries[out * self.size() + inp]
    }

    pub fn row(&self, out: usize) -> &[C64] {
        let n = self.size();
        &self.entries[out * n..(out + 1) * n]
    }

    /// `Σ_{y'} A(y, y') ψ(y') Δx^N`.
    pub fn apply(&self, psi: &ComplexField) -> Result<ComplexField> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let w = self.grid.x_measure();
        let v = psi.values();
        let out = exec::map_range(self.size(), |i| {
            self.row(i).iter().zip(v).map(|(a, b)| a * b).sum::<C64>() * w
        });
        ComplexField::new(self.grid.clone(), out)
    }

    /// max |A - A†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.size();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in i..n {
                m = m.max((self.entries[i * n + j] - self.entries[j * n + i].conj()).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid.clone(),
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let mut e = vec![C64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.entries[i * n + j];
            }
        }
        Self {
            grid: self.grid.clone(),
            entries: e,
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.entries.iter_mut().for_each(|v| *v = v.conj());
        t
    }

    /// Kernel of the operator product: `Σ_z A(y,z) B(z,y') Δx^N`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let n = self.size();
        let w = self.grid.x_measure();
        let prod = matmul(&to_faer(&self.entries, n), &to_faer(&other.entries, n));
        let entries = from_faer(&prod).into_iter().map(|v| v * w).collect();
        Ok(Self {
            grid: self.grid.clone(),
            entries,
        })
    }

    pub(crate) fn to_faer(&self) -> Mat<c64> {
        to_faer(&self.entries, self.size())
    }

    pub(crate) fn from_faer(grid: &PhaseSpaceGrid, m: &Mat<c64>) -> Self {
        Self {
            grid: grid.clone(),
            entries: from_faer(m),
        }
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

pub(crate) fn to_faer(e: &[C64], n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| {
        let v = e[i * n + j];
        c64::new(v.re, v.im)
    })
}

pub(crate) fn from_faer(m: &Mat<c64>) -> Vec<C64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            let v = m.read(i, j);
            out.push(C64::new(v.re, v.im));
        }
    }
    out
}

pub(crate) fn matmul(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let mut out = Mat::<c64>::zeros(a.nrows(), b.ncols());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        a.as_ref(),
        b.as_ref(),
        None,
        c64::new(1.0, 0.0),
        exec::dense_parallelism(),
    );
    out
}

/// A time-evolution kernel `K(x_out; x_in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorKernel {
    pub kernel: OperatorKernel,
    pub total_time: f64,
    /// Present when the kernel came from time slicing.
    pub config: Option<SlicingConfig>,
}

impl PropagatorKernel {
    pub fn grid(&self) -> &PhaseSpaceGrid {
        self.kernel.grid()
    }

    pub fn apply(&self, psi: &ComplexField) -> Result<ComplexField> {
        self.kernel.apply(psi)
    }

    /// Identity kernel over zero elapsed time.
    pub fn identity(grid: &PhaseSpaceGrid) -> Self {
        Self {
            kernel: OperatorKernel::identity(grid),
            total_time: 0.0,
            config: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(grid: &PhaseSpaceGrid, seed: f64) -> OperatorKernel {
        let n = grid.len();
        let e = (0..n * n)
            .map(|i| C64::new((i as f64 * seed).sin(), (i as f64 * seed * 0.7).cos()))
            .collect();
        OperatorKernel::new(grid.clone(), e).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let g = PhaseSpaceGrid::new(2, 4, 1.5, 1.0).unwrap();
        let a = sample(&g, 0.3);
        let id = OperatorKernel::identity(&g);
        assert!(a.compose(&id).unwrap().max_abs_diff(&a).unwrap() < 1e-13);
        assert!(id.compose(&a).unwrap().max_abs_diff(&a).unwrap() < 1e-13);
    }

    #[test]
    fn compose_matches_apply() {
        let g = PhaseSpaceGrid::new(1, 9, 2.0, 1.0).unwrap();
        let a = sample(&g, 0.3);
        let b = sample(&g, 1.7);
        let psi = ComplexField::default_probe(&g);
        let lhs = a.compose(&b).unwrap().apply(&psi).unwrap();
        let rhs = a.apply(&b.apply(&psi).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }
}
