use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub hbar: f64,
    pub mass: f64,
    pub dim: usize,
}

impl PhysicsParams {
    pub fn new(hbar: f64, mass: f64, dim: usize) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::config("hbar", "must be a positive finite number"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("mass", "must be a positive finite number"));
        }
        if dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        Ok(Self { hbar, mass, dim })
    }

    /// ħ = M = 1 in `dim` dimensions.
    pub fn unit(dim: usize) -> Self {
        Self::new(1.0, 1.0, dim).expect("dim must be positive")
    }
}

/// Real antisymmetric noncommutativity matrix θ^{lj}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl ThetaMatrix {
    /// Rejects anything that is not exactly antisymmetric.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::config("theta", "matrix must be non-empty"));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (l, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::config(
                    format!("theta[{l}]"),
                    format!("expected {dim} entries, found {}", row.len()),
                ));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::config(format!("theta[{l}]"), "entries must be finite"));
                }
            }
            entries.extend_from_slice(row);
        }
        for l in 0..dim {
            for j in 0..dim {
                if entries[l * dim + j] != -entries[j * dim + l] {
                    return Err(Error::config(
                        format!("theta[{l}][{j}]"),
                        "matrix must be antisymmetric",
                    ));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// The N = 2 matrix with θ^{12} = `theta`.
    pub fn planar(theta: f64) -> Self {
        Self {
            dim: 2,
            entries: vec![0.0, theta, -theta, 0.0],
        }
    }

    /// θ^{l,l+1} = `theta` on the superdiagonal, zero elsewhere above it.
    pub fn superdiagonal(dim: usize, theta: f64) -> Self {
        let mut t = Self::zero(dim);
        for l in 0..dim.saturating_sub(1) {
            t.entries[l * dim + l + 1] = theta;
            t.entries[(l + 1) * dim + l] = -theta;
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, l: usize, j: usize) -> f64 {
        self.entries[l * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// −θᵀ, which equals θ for every valid matrix.
    pub fn negated_transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for l in 0..d {
            for j in 0..d {
                entries[l * d + j] = -self.entries[j * d + l];
            }
        }
        Self { dim: d, entries }
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| -v).collect(),
        }
    }

    /// Writes `x + θk` into `out`.
    #[inline]
    pub fn shift_into(&self, x: &[f64], k: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for j in 0..d {
            let row = &self.entries[j * d..(j + 1) * d];
            let mut s = x[j];
            for l in 0..d {
                s += row[l] * k[l];
            }
            out[j] = s;
        }
    }

    pub fn shift(&self, x: &[f64], k: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.shift_into(x, k, &mut out);
        out
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for ThetaMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        ThetaMatrix::new(rows).map_err(serde::de::Error::custom)
    }
}
