use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::PhaseSpaceGrid;

/// A complex wave function sampled on the position lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: PhaseSpaceGrid,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: PhaseSpaceGrid, values: Vec<C64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        Self {
            values: vec![C64::default(); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &PhaseSpaceGrid, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.x_coord_into(i, &mut x);
                f(&x)
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// exp(-|x - center|²/(2w²) + i p·x/ħ), normalized to unit L2 norm.
    pub fn gaussian(grid: &PhaseSpaceGrid, center: &[f64], width: f64, momentum: &[f64]) -> Result<Self> {
        let d = grid.dim();
        if center.len() != d || momentum.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if center.len() != d { center.len() } else { momentum.len() },
            });
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::config("probe.width", "must be positive"));
        }
        let hbar = grid.hbar();
        let f = Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut ph = 0.0;
            for j in 0..d {
                r2 += (x[j] - center[j]).powi(2);
                ph += momentum[j] * x[j];
            }
            C64::from_polar((-r2 / (2.0 * width * width)).exp(), ph / hbar)
        });
        f.normalized()
    }

    /// The default probe: centered, zero-momentum, width L/6.
    pub fn default_probe(grid: &PhaseSpaceGrid) -> Self {
        let z = vec![0.0; grid.dim()];
        Self::gaussian(grid, &z, grid.box_half_width() / 6.0, &z).expect("default probe is valid")
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// sqrt(Σ|ψ|² Δx^N).
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(C64::norm_sqr).sum::<f64>() * self.grid.x_measure()).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateProbe);
        }
        self.values.iter_mut().for_each(|v| *v /= n);
        Ok(self)
    }

    /// Σ conj(φ) ψ Δx^N.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.x_measure())
    }

    /// ‖self - other‖ with the lattice measure.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok((self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * self.grid.x_measure())
        .sqrt())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scale(mut self, s: C64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= s);
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn momentum_values(&self) -> Vec<C64> {
        self.grid.forward(&self.values)
    }

    pub(crate) fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}
