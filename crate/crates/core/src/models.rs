//! Built-in vector fields: linear and cubic oscillators, Volterra–Lotka, and
//! the free asymmetric top.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{parse_scalar, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};
use crate::schemes::VectorField;

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: BTreeMap<String, Scalar>,
    pub field: VectorField,
    pub default_x0: Vec<Scalar>,
    /// Rough period of the orbit through `default_x0`, used to size horizons.
    pub period_hint: f64,
}

impl ModelSpec {
    pub fn dimension(&self) -> usize {
        self.field.dimension()
    }

    pub fn state_names(&self) -> &[String] {
        self.field.names()
    }

    pub fn default_x0_f64(&self) -> Vec<f64> {
        self.default_x0.iter().map(crate::algebra::scalar_to_f64).collect()
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            name: self.name.to_string(),
            description: self.description.to_string(),
            dimension: self.dimension(),
            state: self.state_names().to_vec(),
            equations: self
                .state_names()
                .iter()
                .zip(self.field.components())
                .map(|(v, c)| format!("d{v}/dt = {c}"))
                .collect(),
            parameters: self
                .parameters
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            default_x0: self.default_x0.iter().map(|v| v.to_string()).collect(),
        }
    }
}

/// Serializable view for listings.
#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub description: String,
    pub dimension: usize,
    pub state: Vec<String>,
    pub equations: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub default_x0: Vec<String>,
}

pub const MODEL_NAMES: [&str; 4] = ["linear", "cubic", "vl", "top"];

fn int(v: i64) -> Scalar {
    Scalar::from_integer(v.into())
}

fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(n.into(), d.into())
}

fn field(names: &[&str], comps: &[Polynomial]) -> VectorField {
    VectorField::new(comps[0].ring(), comps.to_vec()).unwrap_or_else(|e| panic!("built-in field over {names:?}: {e}"))
}

fn defaults(name: &str) -> Option<BTreeMap<String, Scalar>> {
    let list: Vec<(&str, Scalar)> = match name {
        "linear" | "cubic" => vec![],
        "vl" => vec![("a", int(2)), ("b", int(2))],
        "top" => vec![("eps", ratio(1, 10)), ("A", int(8)), ("B", int(7)), ("C", int(2))],
        _ => return None,
    };
    Some(list.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Model with parameters overridden by `overrides` (exact rationals).
pub fn instantiate(name: &str, overrides: &[(String, Scalar)]) -> Result<ModelSpec> {
    let mut params = defaults(name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
    for (k, v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = v.clone(),
            None => {
                return Err(Error::UnknownParameter {
                    model: name.to_string(),
                    param: k.clone(),
                })
            }
        }
    }
    let p = |k: &str| params[k].clone();
    let spec = match name {
        "linear" => {
            let r = Ring::new(["x", "y"]);
            let (x, y) = (Polynomial::var(&r, "x")?, Polynomial::var(&r, "y")?);
            ModelSpec {
                name: "linear",
                description: "linear oscillator",
                parameters: params.clone(),
                field: field(&["x", "y"], &[y.clone(), -&x]),
                default_x0: vec![int(0), int(1)],
                period_hint: std::f64::consts::TAU,
            }
        }
        "cubic" => {
            let r = Ring::new(["x", "y"]);
            let (x, y) = (Polynomial::var(&r, "x")?, Polynomial::var(&r, "y")?);
            ModelSpec {
                name: "cubic",
                description: "cubic (elliptic) oscillator",
                parameters: params.clone(),
                field: field(&["x", "y"], &[y.clone(), -&x.pow(3)]),
                default_x0: vec![int(0), int(1)],
                period_hint: 7.4163,
            }
        }
        "vl" => {
            let r = Ring::new(["x", "y"]);
            let (x, y) = (Polynomial::var(&r, "x")?, Polynomial::var(&r, "y")?);
            let a = Polynomial::constant(&r, p("a"));
            let b = Polynomial::constant(&r, p("b"));
            ModelSpec {
                name: "vl",
                description: "Volterra-Lotka system dx/dt = -x(y - a), dy/dt = (x - b)y",
                parameters: params.clone(),
                field: field(&["x", "y"], &[-&(&x * &(&y - &a)), &(&x - &b) * &y]),
                default_x0: vec![int(1), int(2)],
                period_hint: 3.24,
            }
        }
        "top" => {
            let (a, b, c) = (p("A"), p("B"), p("C"));
            if a.is_zero() || b.is_zero() || c.is_zero() {
                return Err(Error::Invalid("moments of inertia must be nonzero".into()));
            }
            let r = Ring::new(["p", "q", "r"]);
            let (pv, qv, rv) = (
                Polynomial::var(&r, "p")?,
                Polynomial::var(&r, "q")?,
                Polynomial::var(&r, "r")?,
            );
            let k1 = (&c - &b) / &a;
            let k2 = (&a - &c) / &b;
            let k3 = (&b - &a) / &c;
            ModelSpec {
                name: "top",
                description: "free asymmetric top (Euler equations), spun near the middle axis",
                parameters: params.clone(),
                field: field(
                    &["p", "q", "r"],
                    &[(&qv * &rv).scale(&k1), (&pv * &rv).scale(&k2), (&pv * &qv).scale(&k3)],
                ),
                default_x0: vec![int(0), int(1), p("eps")],
                period_hint: 20.0,
            }
        }
        _ => unreachable!(),
    };
    Ok(spec)
}

/// Parse `key=value` overrides, values as exact decimal or fraction literals.
pub fn parse_overrides<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Vec<(String, Scalar)>> {
    items
        .into_iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            Ok((k.trim().to_string(), parse_scalar(v)?))
        })
        .collect()
}

/// The four built-ins with default parameters.
pub fn catalog() -> Vec<ModelSpec> {
    MODEL_NAMES
        .iter()
        .map(|n| instantiate(n, &[]).expect("built-in model"))
        .collect()
}
