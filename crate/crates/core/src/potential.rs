use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicsParams, ThetaMatrix};
use crate::poly::Poly;

/// Largest total degree accepted for `Polynomial` potentials.
pub const MAX_POLY_DEGREE: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub powers: Vec<u32>,
    pub coeff: f64,
}

/// An entire real potential V(u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// c·u
    Linear { c: Vec<f64> },
    /// ½ M ω² u·u
    Harmonic { omega: f64, mass: f64 },
    /// λ (u·u)²
    Quartic { lambda: f64 },
    /// Σ coeff · Π u_j^{powers_j}
    Polynomial { terms: Vec<PolyTerm> },
    /// -depth · exp(-u·u / (2 width²))
    GaussianWell { depth: f64, width: f64 },
}

impl Potential {
    pub fn harmonic(omega: f64, mass: f64) -> Self {
        Potential::Harmonic { omega, mass }
    }

    pub fn quartic(lambda: f64) -> Self {
        Potential::Quartic { lambda }
    }

    pub fn linear(c: Vec<f64>) -> Self {
        Potential::Linear { c }
    }

    pub fn polynomial(terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        let p = Potential::Polynomial {
            terms: terms
                .into_iter()
                .map(|(powers, coeff)| PolyTerm { powers, coeff })
                .collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian_well(depth: f64, width: f64) -> Self {
        Potential::GaussianWell { depth, width }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::Zero => "zero",
            Potential::Linear { .. } => "linear",
            Potential::Harmonic { .. } => "harmonic",
            Potential::Quartic { .. } => "quartic",
            Potential::Polynomial { .. } => "polynomial",
            Potential::GaussianWell { .. } => "gaussian_well",
        }
    }

    /// Coordinate dimension fixed by the coefficients, if any.
    pub fn intrinsic_dim(&self) -> Option<usize> {
        match self {
            Potential::Linear { c } => Some(c.len()),
            Potential::Polynomial { terms } => terms.first().map(|t| t.powers.len()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("potential.coefficients.{key}"), "must be finite"))
            }
        };
        match self {
            Potential::Zero => Ok(()),
            Potential::Linear { c } => {
                if c.is_empty() {
                    return Err(Error::config("potential.coefficients.c", "must be non-empty"));
                }
                c.iter().try_for_each(|&v| finite("c", v))
            }
            Potential::Harmonic { omega, mass } => {
                finite("omega", *omega)?;
                if mass.is_nan() || *mass <= 0.0 {
                    return Err(Error::config("mass", "must be positive"));
                }
                Ok(())
            }
            Potential::Quartic { lambda } => finite("lambda", *lambda),
            Potential::Polynomial { terms } => {
                let d = terms.first().map_or(0, |t| t.powers.len());
                for (i, t) in terms.iter().enumerate() {
                    let key = format!("potential.coefficients.terms[{i}]");
                    if t.powers.len() != d || d == 0 {
                        return Err(Error::config(key, "powers length must equal dim"));
                    }
                    if t.powers.iter().sum::<u32>() > MAX_POLY_DEGREE {
                        return Err(Error::config(
                            key,
                            format!("total degree exceeds {MAX_POLY_DEGREE}"),
                        ));
                    }
                    if !t.coeff.is_finite() {
                        return Err(Error::config(key, "coeff must be finite"));
                    }
                }
                Ok(())
            }
            Potential::GaussianWell { depth, width } => {
                finite("depth", *depth)?;
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::config("potential.coefficients.width", "must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.intrinsic_dim() {
            Some(d) if d != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: d,
            }),
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Linear { c } => c.iter().all(|&v| v == 0.0),
            Potential::Harmonic { omega, .. } => *omega == 0.0,
            Potential::Quartic { lambda } => *lambda == 0.0,
            Potential::Polynomial { terms } => terms.iter().all(|t| t.coeff == 0.0),
            Potential::GaussianWell { depth, .. } => *depth == 0.0,
        }
    }

    /// True when V(-u) = V(u) identically.
    pub fn is_even(&self) -> bool {
        match self {
            Potential::Linear { .. } => self.is_zero(),
            Potential::Polynomial { terms } => terms
                .iter()
                .all(|t| t.coeff == 0.0 || t.powers.iter().sum::<u32>() % 2 == 0),
            _ => true,
        }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        let r2 = || u.iter().map(|v| v * v).sum::<f64>();
        match self {
            Potential::Zero => 0.0,
            Potential::Linear { c } => c.iter().zip(u).map(|(a, b)| a * b).sum(),
            Potential::Harmonic { omega, mass } => 0.5 * mass * omega * omega * r2(),
            Potential::Quartic { lambda } => {
                let s = r2();
                lambda * s * s
            }
            Potential::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.coeff
                        * t.powers
                            .iter()
                            .zip(u)
                            .map(|(&p, &x)| x.powi(p as i32))
                            .product::<f64>()
                })
                .sum(),
            Potential::GaussianWell { depth, width } => -depth * (-r2() / (2.0 * width * width)).exp(),
        }
    }

    /// V(u) as a polynomial in `dim` variables, or `None` for non-polynomial forms.
    pub fn as_poly(&self, dim: usize) -> Option<Poly> {
        let r2 = || (0..dim).fold(Poly::zero(dim), |acc, j| acc.add(&Poly::var(dim, j).pow(2)));
        match self {
            Potential::Zero => Some(Poly::zero(dim)),
            Potential::Linear { c } => Some(
                c.iter()
                    .enumerate()
                    .fold(Poly::zero(dim), |acc, (j, &cj)| acc.add(&Poly::var(dim, j).scale(cj))),
            ),
            Potential::Harmonic { omega, mass } => Some(r2().scale(0.5 * mass * omega * omega)),
            Potential::Quartic { lambda } => Some(r2().pow(2).scale(*lambda)),
            Potential::Polynomial { terms } => Some(Poly::from_terms(
                dim,
                terms.iter().map(|t| (t.powers.clone(), t.coeff)),
            )),
            Potential::GaussianWell { .. } => None,
        }
    }

    /// V(x + θk) as a polynomial in the 2N variables (x_1..x_N, k_1..k_N).
    pub fn shifted_poly(&self, theta: &ThetaMatrix) -> Option<Poly> {
        let d = theta.dim();
        let v = self.as_poly(d)?;
        let subs: Vec<Poly> = (0..d)
            .map(|j| {
                (0..d).fold(Poly::var(2 * d, j), |acc, l| {
                    acc.add(&Poly::var(2 * d, d + l).scale(theta.get(j, l)))
                })
            })
            .collect();
        Some(v.compose(&subs))
    }
}

/// V(x + θk), evaluated at the real shifted argument.
pub fn evaluate_potential_shifted(v: &Potential, theta: &ThetaMatrix, x: &[f64], k: &[f64]) -> f64 {
    let mut u = [0.0; 8];
    if theta.dim() <= 8 {
        let u = &mut u[..theta.dim()];
        theta.shift_into(x, k, u);
        v.eval(u)
    } else {
        v.eval(&theta.shift(x, k))
    }
}

/// The classical phase-space function k·k/(2M) + V(x + θk).
#[derive(Debug, Clone)]
pub struct HamiltonianSymbol {
    potential: Potential,
    theta: ThetaMatrix,
    mass: f64,
}

impl HamiltonianSymbol {
    pub fn eval(&self, k: &[f64], x: &[f64]) -> f64 {
        let kk: f64 = k.iter().map(|v| v * v).sum();
        kk / (2.0 * self.mass) + evaluate_potential_shifted(&self.potential, &self.theta, x, k)
    }
}

pub fn realize_hamiltonian_symbol(
    v: &Potential,
    theta: &ThetaMatrix,
    p: &PhysicsParams,
) -> Result<HamiltonianSymbol> {
    theta.check_dim(p.dim)?;
    v.check_dim(p.dim)?;
    v.validate()?;
    if p.dim < 2 && !theta.is_zero() {
        return Err(Error::config("theta", "nonzero theta needs dim >= 2"));
    }
    Ok(HamiltonianSymbol {
        potential: v.clone(),
        theta: theta.clone(),
        mass: p.mass,
    })
}
