//! The operators `L_a^i = (ħ/(iε))(∂/∂J_a^i + θ^{il} ∂/∂Z_a^l)` acting on Φ.

use num_traits::Zero;

use super::dmatrix::d_inverse_entry;
use super::form::{a_form, check_boundary, mu_forms, ExactSlicing, PhiForm, SourceKind, SourceMap, ThetaQ};
use super::rational::{qi, GQ, Q};
use crate::error::{Error, Result};

fn check_theta(phi: &PhiForm, theta: &ThetaQ) -> Result<()> {
    if theta.dim() != phi.cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: phi.cfg.dim,
            found: theta.dim(),
        });
    }
    Ok(())
}

/// `ħ/(iε) = -iħ/ε`.
pub fn l_prefactor(cfg: &ExactSlicing) -> GQ {
    GQ::imag(-(&cfg.hbar / cfg.epsilon()))
}

/// Coefficients `c_s` with `L_a^i = Σ_s c_s ∂/∂s`.
pub fn l_operator(phi: &PhiForm, theta: &ThetaQ, a: usize, i: usize) -> Result<Vec<(usize, GQ)>> {
    check_theta(phi, theta)?;
    phi.map.check(a, i)?;
    let pre = l_prefactor(&phi.cfg);
    let mut out = vec![(phi.map.index(SourceKind::J, a, i), pre.clone())];
    for l in 0..phi.cfg.dim {
        let t = theta.get(i, l);
        if !t.is_zero() {
            out.push((phi.map.index(SourceKind::Z, a, l), pre.scale(t)));
        }
    }
    Ok(out)
}

/// Connected part of `L_{a_1}^{i_1} ⋯ L_{a_r}^{i_r} Φ` at J = Z = 0.
///
/// Φ is bilinear, so every product of three or more factors is zero.
pub fn apply_l(phi: &PhiForm, theta: &ThetaQ, indices: &[(usize, usize)]) -> Result<GQ> {
    match indices {
        [] => Err(Error::InvalidArgument("apply_l needs at least one index".into())),
        [(a, i)] => {
            let op = l_operator(phi, theta, *a, *i)?;
            Ok(op.iter().map(|(s, c)| c * &phi.linear_coeffs[*s]).sum())
        }
        [(a, i), (b, j)] => {
            let oa = l_operator(phi, theta, *a, *i)?;
            let ob = l_operator(phi, theta, *b, *j)?;
            let mut v = GQ::zero();
            for (s, cs) in &oa {
                for (t, ct) in &ob {
                    v += &(&(cs * ct) * &phi.bilinear_coeffs[*s][*t]);
                }
            }
            Ok(v)
        }
        rest => {
            for (a, i) in rest {
                l_operator(phi, theta, *a, *i)?;
            }
            Ok(GQ::zero())
        }
    }
}

/// `e^{-Φ} L_{a_1}^{i_1} ⋯ L_{a_r}^{i_r} e^{Φ}` at J = Z = 0, summed over all
/// partitions of the factors into singletons and pairs.
pub fn apply_l_exp(phi: &PhiForm, theta: &ThetaQ, indices: &[(usize, usize)]) -> Result<GQ> {
    let first: Vec<GQ> = indices
        .iter()
        .map(|&ix| apply_l(phi, theta, &[ix]))
        .collect::<Result<_>>()?;
    let r = indices.len();
    let mut second = vec![vec![GQ::zero(); r]; r];
    for p in 0..r {
        for q in p + 1..r {
            second[p][q] = apply_l(phi, theta, &[indices[p], indices[q]])?;
        }
    }
    fn rec(open: &mut Vec<usize>, first: &[GQ], second: &[Vec<GQ>]) -> GQ {
        let Some(head) = open.pop() else {
            return GQ::one();
        };
        let mut total = &first[head] * &rec(open, first, second);
        for k in 0..open.len() {
            let partner = open.remove(k);
            let (lo, hi) = (head.min(partner), head.max(partner));
            total += &(&second[lo][hi] * &rec(open, first, second));
            open.insert(k, partner);
        }
        open.push(head);
        total
    }
    let mut open: Vec<usize> = (0..r).collect();
    Ok(rec(&mut open, &first, &second))
}

/// `L_a^i Φ` at J = Z = 0 from direct sums over `D⁻¹`, without going
/// through [`build_phi`](super::build_phi).
pub fn first_derivative_direct(
    cfg: &ExactSlicing,
    theta: &ThetaQ,
    x_f: &[Q],
    x_in: &[Q],
    a: usize,
    i: usize,
) -> Result<Q> {
    check_boundary(cfg, x_f, x_in)?;
    let map = SourceMap {
        slices_m: cfg.slices_m,
        dim: cfg.dim,
    };
    map.check(a, i)?;
    if theta.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            found: theta.dim(),
        });
    }
    let m = cfg.slices_m;
    let af = a_form(cfg, x_f, x_in);
    let mu = mu_forms(cfg, x_f, x_in);
    let half_m = &cfg.mass / qi(2);
    let quarter_m = &cfg.mass / qi(4);
    // ∂R/∂s = (M/2) ∂A/∂s - (M/4) Σ_{c,d} μ_c D⁻¹_{cd} ∂μ_d/∂s
    let d_r = |s: usize, comp: usize| -> Q {
        let mut v = &half_m * &af.linear[s];
        for c in 0..m {
            for d in 0..m {
                let dmu: Q = mu[d][comp]
                    .terms
                    .iter()
                    .filter(|(t, _)| *t == s)
                    .map(|(_, w)| w.clone())
                    .sum();
                if dmu.is_zero() || mu[c][comp].constant.is_zero() {
                    continue;
                }
                let dinv = d_inverse_entry(m, c + 1, d + 1).expect("in range");
                v -= &quarter_m * &mu[c][comp].constant * dinv * dmu;
            }
        }
        v
    };
    let mut total = d_r(map.index(SourceKind::J, a, i), i);
    for l in 0..cfg.dim {
        let t = theta.get(i, l);
        if !t.is_zero() {
            total += t * d_r(map.index(SourceKind::Z, a, l), l);
        }
    }
    Ok(total)
}

/// The four pieces of `L_a^i L_b^j Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeParts {
    pub jj: GQ,
    pub zz: GQ,
    pub jz: GQ,
    pub zj: GQ,
}

impl SecondDerivativeParts {
    pub fn cross(&self) -> GQ {
        &self.jz + &self.zj
    }

    pub fn total(&self) -> GQ {
        &(&self.jj + &self.zz) + &self.cross()
    }
}

pub fn second_derivative_report(
    phi: &PhiForm,
    theta: &ThetaQ,
    a: usize,
    b: usize,
    i: usize,
    j: usize,
) -> Result<SecondDerivativeParts> {
    check_theta(phi, theta)?;
    phi.map.check(a, i)?;
    phi.map.check(b, j)?;
    let n = phi.cfg.dim;
    let pre = l_prefactor(&phi.cfg);
    let c = &pre * &pre;
    let h = |ka, sa, ia, kb, sb, ib| -> &GQ { &phi.bilinear_coeffs[phi.map.index(ka, sa, ia)][phi.map.index(kb, sb, ib)] };
    let jj = &c * h(SourceKind::J, a, i, SourceKind::J, b, j);
    let mut zz = GQ::zero();
    let mut jz = GQ::zero();
    let mut zj = GQ::zero();
    for k in 0..n {
        let tik = theta.get(i, k);
        if !tik.is_zero() {
            for l in 0..n {
                let tjl = theta.get(j, l);
                if !tjl.is_zero() {
                    zz += &h(SourceKind::Z, a, k, SourceKind::Z, b, l).scale(&(tik * tjl));
                }
            }
            zj += &h(SourceKind::Z, a, k, SourceKind::J, b, j).scale(tik);
        }
        let tjk = theta.get(j, k);
        if !tjk.is_zero() {
            jz += &h(SourceKind::J, a, i, SourceKind::Z, b, k).scale(tjk);
        }
    }
    Ok(SecondDerivativeParts {
        jj,
        zz: &c * &zz,
        jz: &c * &jz,
        zj: &c * &zj,
    })
}
