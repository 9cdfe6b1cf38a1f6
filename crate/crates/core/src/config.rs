//! JSON run configuration.
//!
//! ```json
//! {
//!   "dim": 2, "hbar": 1.0, "mass": 1.0,
//!   "theta": [[0.0, 0.1], [-0.1, 0.0]],
//!   "grid": {"points_per_axis": 32, "box_half_width": 6.0},
//!   "potential": {"form": "harmonic", "coefficients": {"omega": 1.0}},
//!   "time": {"total": 1.0, "slices": 16, "alpha": 0.0},
//!   "probe": {"center": [0.5, -0.3], "width": 1.0, "momentum": [0.0, 0.0]}
//! }
//! ```
//!
//! `time` and `probe` are optional. Errors name the offending key.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::PhaseSpaceGrid;
use crate::params::{PhysicsParams, ThetaMatrix};
use crate::potential::{PolyTerm, Potential};
use crate::slicer::SlicingConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub box_half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSpec {
    pub total: f64,
    pub slices: usize,
    pub alpha: f64,
}

impl Default for TimeSpec {
    fn default() -> Self {
        Self {
            total: 1.0,
            slices: 16,
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub center: Vec<f64>,
    pub width: f64,
    pub momentum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicsParams,
    pub theta: ThetaMatrix,
    pub grid: GridSpec,
    pub potential: Potential,
    pub time: TimeSpec,
    pub probe: Option<ProbeSpec>,
}

fn field<'a>(obj: &'a Map<String, Value>, prefix: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::config(join(prefix, key), "missing required key"))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn as_f64(v: &Value, key: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::config(key, "expected a number"))?;
    if !x.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(x)
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::config(key, "expected a non-negative integer"))
}

fn as_object<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::config(key, "expected an object"))
}

fn as_vec(v: &Value, key: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::config(key, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{key}[{i}]")))
        .collect()
}

fn parse_theta(v: &Value, dim: usize) -> Result<ThetaMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::config("theta", "expected an N x N array"))?;
    if rows.len() != dim {
        return Err(Error::config("theta", format!("expected {dim} rows, found {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(l, r)| {
            let row = as_vec(r, &format!("theta[{l}]"))?;
            if row.len() != dim {
                return Err(Error::config(format!("theta[{l}]"), format!("expected {dim} entries")));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    ThetaMatrix::new(rows)
}

fn parse_potential(v: &Value, mass: f64, dim: usize) -> Result<Potential> {
    let obj = as_object(v, "potential")?;
    let form = field(obj, "potential", "form")?
        .as_str()
        .ok_or_else(|| Error::config("potential.form", "expected a string"))?;
    let empty = Map::new();
    let coeffs = match obj.get("coefficients") {
        Some(c) => as_object(c, "potential.coefficients")?,
        None => &empty,
    };
    let p = "potential.coefficients";
    let num = |key: &str| -> Result<f64> { as_f64(field(coeffs, p, key)?, &join(p, key)) };
    let pot = match form {
        "zero" | "free" => Potential::Zero,
        "linear" => Potential::Linear {
            c: as_vec(field(coeffs, p, "c")?, &join(p, "c"))?,
        },
        "harmonic" => Potential::Harmonic {
            omega: num("omega")?,
            mass,
        },
        "quartic" => Potential::Quartic {
            lambda: num("lambda")?,
        },
        "gaussian_well" => Potential::GaussianWell {
            depth: num("depth")?,
            width: num("width")?,
        },
        "polynomial" => {
            let key = join(p, "terms");
            let arr = field(coeffs, p, "terms")?
                .as_array()
                .ok_or_else(|| Error::config(&key, "expected an array"))?;
            let terms = arr
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let tk = format!("{key}[{i}]");
                    let o = as_object(t, &tk)?;
                    let powers = field(o, &tk, "powers")?
                        .as_array()
                        .ok_or_else(|| Error::config(format!("{tk}.powers"), "expected an array"))?
                        .iter()
                        .map(|x| as_usize(x, &format!("{tk}.powers")).map(|u| u as u32))
                        .collect::<Result<Vec<_>>>()?;
                    let coeff = as_f64(field(o, &tk, "coeff")?, &format!("{tk}.coeff"))?;
                    Ok(PolyTerm { powers, coeff })
                })
                .collect::<Result<Vec<_>>>()?;
            Potential::Polynomial { terms }
        }
        other => {
            return Err(Error::config(
                "potential.form",
                format!("unknown form `{other}` (zero, linear, harmonic, quartic, polynomial, gaussian_well)"),
            ))
        }
    };
    pot.validate()?;
    if let Some(d) = pot.intrinsic_dim() {
        if d != dim {
            return Err(Error::config(p, format!("coefficients have dimension {d}, config has dim {dim}")));
        }
    }
    Ok(pot)
}

impl RunConfig {
    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = as_object(v, "<root>")?;
        let dim = as_usize(field(obj, "", "dim")?, "dim")?;
        if dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        let hbar = as_f64(field(obj, "", "hbar")?, "hbar")?;
        let mass = as_f64(field(obj, "", "mass")?, "mass")?;
        if hbar.is_nan() || hbar <= 0.0 {
            return Err(Error::config("hbar", "must be positive"));
        }
        if mass.is_nan() || mass <= 0.0 {
            return Err(Error::config("mass", "must be positive"));
        }
        let params = PhysicsParams::new(hbar, mass, dim)?;
        let theta = parse_theta(field(obj, "", "theta")?, dim)?;

        let g = as_object(field(obj, "", "grid")?, "grid")?;
        let points_per_axis = as_usize(field(g, "grid", "points_per_axis")?, "grid.points_per_axis")?;
        if points_per_axis < 2 {
            return Err(Error::config("grid.points_per_axis", "must be at least 2"));
        }
        let box_half_width = as_f64(field(g, "grid", "box_half_width")?, "grid.box_half_width")?;
        if box_half_width.is_nan() || box_half_width <= 0.0 {
            return Err(Error::config("grid.box_half_width", "must be positive"));
        }

        let potential = parse_potential(field(obj, "", "potential")?, mass, dim)?;

        let mut time = TimeSpec::default();
        if let Some(t) = obj.get("time") {
            let t = as_object(t, "time")?;
            if let Some(x) = t.get("total") {
                time.total = as_f64(x, "time.total")?;
                if time.total.is_nan() || time.total <= 0.0 {
                    return Err(Error::config("time.total", "must be positive"));
                }
            }
            if let Some(x) = t.get("slices") {
                time.slices = as_usize(x, "time.slices")?;
            }
            if let Some(x) = t.get("alpha") {
                time.alpha = as_f64(x, "time.alpha")?;
                if time.alpha.abs() > 0.5 {
                    return Err(Error::config("time.alpha", "must lie in [-1/2, 1/2]"));
                }
            }
        }

        let probe = match obj.get("probe") {
            None => None,
            Some(p) => {
                let p = as_object(p, "probe")?;
                let center = as_vec(field(p, "probe", "center")?, "probe.center")?;
                if center.len() != dim {
                    return Err(Error::config("probe.center", format!("expected {dim} entries")));
                }
                let width = as_f64(field(p, "probe", "width")?, "probe.width")?;
                if width.is_nan() || width <= 0.0 {
                    return Err(Error::config("probe.width", "must be positive"));
                }
                let momentum = match p.get("momentum") {
                    Some(m) => as_vec(m, "probe.momentum")?,
                    None => vec![0.0; dim],
                };
                if momentum.len() != dim {
                    return Err(Error::config("probe.momentum", format!("expected {dim} entries")));
                }
                Some(ProbeSpec {
                    center,
                    width,
                    momentum,
                })
            }
        };

        Ok(Self {
            params,
            theta,
            grid: GridSpec {
                points_per_axis,
                box_half_width,
            },
            potential,
            time,
            probe,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::config("<root>", format!("malformed JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn build_grid(&self) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::new(self.dim(), self.grid.points_per_axis, self.grid.box_half_width, self.params.hbar)
    }

    pub fn slicing(&self) -> Result<SlicingConfig> {
        SlicingConfig::new(self.time.slices, self.time.total, self.time.alpha, self.params)
    }

    /// The configured probe, or the default packet when none is given.
    pub fn build_probe(&self, grid: &PhaseSpaceGrid) -> Result<ComplexField> {
        match &self.probe {
            Some(p) => ComplexField::gaussian(grid, &p.center, p.width, &p.momentum),
            None => Ok(ComplexField::default_probe(grid)),
        }
    }
}

/// Sets `path` (dot separated) in a JSON object, creating intermediate objects.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (n, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::config(parts[..n].join("."), "expected an object"))?;
        if n + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "dim": 2, "hbar": 1.0, "mass": 2.0,
            "theta": [[0.0, 0.1], [-0.1, 0.0]],
            "grid": {"points_per_axis": 16, "box_half_width": 4.0},
            "potential": {"form": "harmonic", "coefficients": {"omega": 1.5}}
        })
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn parses_and_injects_mass() {
        let c = RunConfig::from_value(&base()).unwrap();
        assert_eq!(c.potential, Potential::Harmonic { omega: 1.5, mass: 2.0 });
        assert_eq!(c.time, TimeSpec::default());
        assert!(c.probe.is_none());
        assert_eq!(c.build_grid().unwrap().len(), 256);
    }

    #[test]
    fn errors_name_keys() {
        let mut v = base();
        v.as_object_mut().unwrap().remove("theta");
        assert_eq!(key_of(RunConfig::from_value(&v).unwrap_err()), "theta");

        let mut v = base();
        v["theta"] = json!([[0.0, 0.1], [0.1, 0.0]]);
        assert!(key_of(RunConfig::from_value(&v).unwrap_err()).starts_with("theta"));

        let mut v = base();
        v["grid"]["points_per_axis"] = json!("many");
        assert_eq!(key_of(RunConfig::from_value(&v).unwrap_err()), "grid.points_per_axis");

        let mut v = base();
        v["potential"] = json!({"form": "quartic", "coefficients": {}});
        assert_eq!(key_of(RunConfig::from_value(&v).unwrap_err()), "potential.coefficients.lambda");

        let mut v = base();
        v["probe"] = json!({"center": [0.0], "width": 1.0});
        assert_eq!(key_of(RunConfig::from_value(&v).unwrap_err()), "probe.center");
    }

    #[test]
    fn overrides() {
        let mut v = base();
        set_path(&mut v, "time.alpha", json!(0.25)).unwrap();
        set_path(&mut v, "grid.points_per_axis", json!(8)).unwrap();
        let c = RunConfig::from_value(&v).unwrap();
        assert_eq!(c.time.alpha, 0.25);
        assert_eq!(c.grid.points_per_axis, 8);
    }
}
