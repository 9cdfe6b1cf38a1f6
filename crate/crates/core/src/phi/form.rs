//! The exponent Φ(J, Z, ε, m) of the Gaussian-integrated sliced kernel.
//!
//! With sources `J_a^i` (coupled to the α-midpoints) and `Z_a^i` (coupled to
//! the slice momenta), a = 0..m, the momentum and intermediate-position
//! integrals leave
//!
//! ```text
//! Φ = (iε/ħ) [ (M/2) A - (M/8) Σ_{c,d=1..m} μ_c^i D⁻¹_{cd} μ_d^i ]
//! ```
//!
//! with `A` quadratic and `μ` linear in the sources.

use num_traits::{One, Zero};

use super::dmatrix::d_inverse_entry;
use super::rational::{q, qi, GQ, Q};
use crate::error::{Error, Result};

/// Physical inputs of the exact engine, all rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSlicing {
    pub slices_m: usize,
    pub total_time: Q,
    pub alpha: Q,
    pub mass: Q,
    pub hbar: Q,
    pub dim: usize,
}

impl ExactSlicing {
    pub fn new(slices_m: usize, total_time: Q, alpha: Q, mass: Q, hbar: Q, dim: usize) -> Result<Self> {
        if slices_m < 1 {
            return Err(Error::Domain("exact slicing needs m >= 1".into()));
        }
        if total_time <= Q::zero() || mass <= Q::zero() || hbar <= Q::zero() {
            return Err(Error::Domain("T, M and hbar must be positive".into()));
        }
        if alpha < q(-1, 2) || alpha > q(1, 2) {
            return Err(Error::Domain(format!("alpha = {alpha} is outside [-1/2, 1/2]")));
        }
        if dim == 0 {
            return Err(Error::Domain("dim must be at least 1".into()));
        }
        Ok(Self {
            slices_m,
            total_time,
            alpha,
            mass,
            hbar,
            dim,
        })
    }

    /// ħ = M = T = 1.
    pub fn unit(m: usize, alpha: Q, dim: usize) -> Result<Self> {
        Self::new(m, Q::one(), alpha, Q::one(), Q::one(), dim)
    }

    pub fn with_alpha(&self, alpha: Q) -> Result<Self> {
        Self::new(self.slices_m, self.total_time.clone(), alpha, self.mass.clone(), self.hbar.clone(), self.dim)
    }

    /// T/(m+1).
    pub fn epsilon(&self) -> Q {
        &self.total_time / qi(self.slices_m as i64 + 1)
    }
}

/// Rational antisymmetric θ.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaQ {
    dim: usize,
    entries: Vec<Q>,
}

impl ThetaQ {
    pub fn new(rows: Vec<Vec<Q>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in &rows {
            if r.len() != dim {
                return Err(Error::config("theta", "matrix must be square"));
            }
            entries.extend(r.iter().cloned());
        }
        for l in 0..dim {
            for j in 0..dim {
                if entries[l * dim + j] != -entries[j * dim + l].clone() {
                    return Err(Error::config(format!("theta[{l}][{j}]"), "matrix must be antisymmetric"));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Q::zero(); dim * dim],
        }
    }

    /// N = 2 with θ^{12} = `t`.
    pub fn planar(t: Q) -> Self {
        Self {
            dim: 2,
            entries: vec![Q::zero(), t.clone(), -t, Q::zero()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, l: usize, j: usize) -> &Q {
        &self.entries[l * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    J,
    Z,
}

/// Index map for the 2(m+1)N source components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceMap {
    pub slices_m: usize,
    pub dim: usize,
}

impl SourceMap {
    pub fn len(&self) -> usize {
        2 * (self.slices_m + 1) * self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of `kind_a^i`, a = 0..m, i = 0..N-1.
    pub fn index(&self, kind: SourceKind, a: usize, i: usize) -> usize {
        debug_assert!(a <= self.slices_m && i < self.dim);
        let k = match kind {
            SourceKind::J => 0,
            SourceKind::Z => 1,
        };
        (k * (self.slices_m + 1) + a) * self.dim + i
    }

    pub fn decode(&self, idx: usize) -> (SourceKind, usize, usize) {
        let i = idx % self.dim;
        let rest = idx / self.dim;
        let a = rest % (self.slices_m + 1);
        let kind = if rest / (self.slices_m + 1) == 0 { SourceKind::J } else { SourceKind::Z };
        (kind, a, i)
    }

    pub fn check(&self, a: usize, i: usize) -> Result<()> {
        if a > self.slices_m || i >= self.dim {
            return Err(Error::IndexOutOfRange(format!(
                "source ({a}, {i}) outside slices 0..={} and components 0..{}",
                self.slices_m, self.dim
            )));
        }
        Ok(())
    }
}

/// `c + l·s + ½ sᵀHs` over the rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub constant: Q,
    pub linear: Vec<Q>,
    pub hessian: Vec<Vec<Q>>,
}

impl Quadratic {
    pub fn zero(n: usize) -> Self {
        Self {
            constant: Q::zero(),
            linear: vec![Q::zero(); n],
            hessian: vec![vec![Q::zero(); n]; n],
        }
    }
}

/// An affine form `c + l·s` with sparse coefficients.
#[derive(Debug, Clone, Default)]
pub(crate) struct Affine {
    pub constant: Q,
    pub terms: Vec<(usize, Q)>,
}

/// Φ as `constant + Σ linear_s s + ½ Σ hessian_{st} s t` with Gaussian
/// rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiForm {
    pub constant_part: GQ,
    pub linear_coeffs: Vec<GQ>,
    /// Second derivatives ∂²Φ/∂s∂t, symmetric.
    pub bilinear_coeffs: Vec<Vec<GQ>>,
    pub x_f: Vec<Q>,
    pub x_in: Vec<Q>,
    pub cfg: ExactSlicing,
    pub map: SourceMap,
}

impl PhiForm {
    pub fn value(&self, sources: &[GQ]) -> Result<GQ> {
        if sources.len() != self.map.len() {
            return Err(Error::DimensionMismatch {
                expected: self.map.len(),
                found: sources.len(),
            });
        }
        let mut v = self.constant_part.clone();
        for (c, s) in self.linear_coeffs.iter().zip(sources) {
            v += &(c * s);
        }
        let half = q(1, 2);
        for (row, s) in self.bilinear_coeffs.iter().zip(sources) {
            for (h, t) in row.iter().zip(sources) {
                v += &(&(h * s) * t).scale(&half);
            }
        }
        Ok(v)
    }
}

/// `(½+α)δ_{c,a+1} + (½-α)δ_{c,a}`: weight of x_c in the α-midpoint of slice a.
pub(crate) fn midpoint_weight(alpha: &Q, a: usize, c: usize) -> Q {
    if c == a + 1 {
        q(1, 2) + alpha
    } else if c == a {
        q(1, 2) - alpha
    } else {
        Q::zero()
    }
}

pub(crate) fn check_boundary(cfg: &ExactSlicing, x_f: &[Q], x_in: &[Q]) -> Result<()> {
    for v in [x_f, x_in] {
        if v.len() != cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// The quadratic `A` of the exponent after momentum integration.
pub(crate) fn a_form(cfg: &ExactSlicing, x_f: &[Q], x_in: &[Q]) -> Quadratic {
    let map = SourceMap {
        slices_m: cfg.slices_m,
        dim: cfg.dim,
    };
    let m = cfg.slices_m;
    let eps = cfg.epsilon();
    let two = qi(2);
    let half = q(1, 2);
    let mut a = Quadratic::zero(map.len());
    let norm2: Q = x_f.iter().chain(x_in).map(|v| v * v).sum();
    a.constant = norm2 / (&eps * &eps);
    for i in 0..cfg.dim {
        a.linear[map.index(SourceKind::J, m, i)] += &two / &cfg.mass * (&half + &cfg.alpha) * &x_f[i];
        a.linear[map.index(SourceKind::J, 0, i)] += &two / &cfg.mass * (&half - &cfg.alpha) * &x_in[i];
        a.linear[map.index(SourceKind::Z, m, i)] += &two / &eps * &x_f[i];
        a.linear[map.index(SourceKind::Z, 0, i)] -= &two / &eps * &x_in[i];
        for s in 0..=m {
            let z = map.index(SourceKind::Z, s, i);
            a.hessian[z][z] += &two;
        }
    }
    a
}

/// `μ_c^i`, c = 1..m, as affine forms; index `[c-1][i]`.
pub(crate) fn mu_forms(cfg: &ExactSlicing, x_f: &[Q], x_in: &[Q]) -> Vec<Vec<Affine>> {
    let map = SourceMap {
        slices_m: cfg.slices_m,
        dim: cfg.dim,
    };
    let m = cfg.slices_m;
    let eps = cfg.epsilon();
    let two = qi(2);
    let jw = &two * &eps / &cfg.mass;
    (1..=m)
        .map(|c| {
            (0..cfg.dim)
                .map(|i| {
                    let mut constant = Q::zero();
                    if c == 1 {
                        constant -= &two / &eps * &x_in[i];
                    }
                    if c == m {
                        constant -= &two / &eps * &x_f[i];
                    }
                    let terms = vec![
                        (map.index(SourceKind::Z, c - 1, i), two.clone()),
                        (map.index(SourceKind::Z, c, i), -two.clone()),
                        (map.index(SourceKind::J, c - 1, i), &jw * midpoint_weight(&cfg.alpha, c - 1, c)),
                        (map.index(SourceKind::J, c, i), &jw * midpoint_weight(&cfg.alpha, c, c)),
                    ];
                    Affine { constant, terms }
                })
                .collect()
        })
        .collect()
}

/// Builds Φ for the given slicing and boundary data.
pub fn build_phi(cfg: &ExactSlicing, x_f: &[Q], x_in: &[Q]) -> Result<PhiForm> {
    check_boundary(cfg, x_f, x_in)?;
    let map = SourceMap {
        slices_m: cfg.slices_m,
        dim: cfg.dim,
    };
    let n = map.len();
    let m = cfg.slices_m;
    let a = a_form(cfg, x_f, x_in);
    let mu = mu_forms(cfg, x_f, x_in);
    let dinv: Vec<Vec<Q>> = (1..=m)
        .map(|c| (1..=m).map(|d| d_inverse_entry(m, c, d).expect("in range")).collect())
        .collect();

    // R = (M/2) A - (M/8) Σ μ D⁻¹ μ
    let mut r = Quadratic::zero(n);
    let half_m = &cfg.mass / qi(2);
    let eighth_m = &cfg.mass / qi(8);
    r.constant = &half_m * &a.constant;
    for s in 0..n {
        r.linear[s] = &half_m * &a.linear[s];
        for t in 0..n {
            if !a.hessian[s][t].is_zero() {
                r.hessian[s][t] = &half_m * &a.hessian[s][t];
            }
        }
    }
    for i in 0..cfg.dim {
        for c in 0..m {
            for d in 0..m {
                let w = &eighth_m * &dinv[c][d];
                let (mc, md) = (&mu[c][i], &mu[d][i]);
                r.constant -= &w * &mc.constant * &md.constant;
                for (s, cs) in &md.terms {
                    r.linear[*s] -= &w * &mc.constant * cs;
                }
                for (s, cs) in &mc.terms {
                    r.linear[*s] -= &w * &md.constant * cs;
                }
                for (s, cs) in &mc.terms {
                    for (t, ct) in &md.terms {
                        let v = &w * cs * ct;
                        r.hessian[*s][*t] -= &v;
                        r.hessian[*t][*s] -= &v;
                    }
                }
            }
        }
    }
    let pre = GQ::imag(cfg.epsilon() / &cfg.hbar);
    let lift = |v: &Q| if v.is_zero() { GQ::zero() } else { pre.scale(v) };
    Ok(PhiForm {
        constant_part: lift(&r.constant),
        linear_coeffs: r.linear.iter().map(lift).collect(),
        bilinear_coeffs: r.hessian.iter().map(|row| row.iter().map(lift).collect()).collect(),
        x_f: x_f.to_vec(),
        x_in: x_in.to_vec(),
        cfg: cfg.clone(),
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_map_round_trip() {
        let map = SourceMap { slices_m: 3, dim: 2 };
        for idx in 0..map.len() {
            let (k, a, i) = map.decode(idx);
            assert_eq!(map.index(k, a, i), idx);
        }
    }

    #[test]
    fn free_exponent_at_zero_sources() {
        let cfg = ExactSlicing::new(3, q(3, 2), q(1, 4), q(2, 1), q(1, 3), 2).unwrap();
        let xf = vec![q(1, 2), q(-1, 3)];
        let xi = vec![q(1, 5), qi(1)];
        let phi = build_phi(&cfg, &xf, &xi).unwrap();
        let d2: Q = xf.iter().zip(&xi).map(|(a, b)| (a - b) * (a - b)).sum();
        let want = GQ::imag(&cfg.mass * d2 / (qi(2) * &cfg.hbar * &cfg.total_time));
        assert_eq!(phi.constant_part, want);
    }

    #[test]
    fn hessian_is_symmetric() {
        let cfg = ExactSlicing::unit(4, q(1, 3), 2).unwrap();
        let phi = build_phi(&cfg, &[qi(1), qi(0)], &[qi(0), qi(2)]).unwrap();
        let n = phi.map.len();
        for s in 0..n {
            for t in 0..n {
                assert_eq!(phi.bilinear_coeffs[s][t], phi.bilinear_coeffs[t][s]);
            }
        }
    }

    #[test]
    fn theta_validation() {
        assert!(ThetaQ::new(vec![vec![qi(0), q(1, 10)], vec![q(1, 10), qi(0)]]).is_err());
        assert!(ThetaQ::new(vec![vec![qi(0), q(1, 10)], vec![q(-1, 10), qi(0)]]).is_ok());
    }
}
