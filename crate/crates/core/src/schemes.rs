//! Difference schemes `g(x, x̂, dt) = 0` for polynomial vector fields.
//!
//! A scheme lives over the ring `[v_1, v_0 for each state v] + [dt]`, where
//! `v_0` is the current state and `v_1` the advanced one.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Polynomial, Ring, Scalar};
use crate::error::{Error, Result};

/// Name of the step variable in scheme rings.
pub const DT: &str = "dt";

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    ring: Arc<Ring>,
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(ring: &Arc<Ring>, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: ring.nvars(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.ring() != ring {
                return Err(Error::RingMismatch(format!("component `{c}` is not in the state ring")));
            }
        }
        Ok(VectorField {
            ring: ring.clone(),
            components,
        })
    }

    /// Parse components like `["y", "-x^3"]` over state names.
    pub fn parse(names: &[&str], components: &[&str]) -> Result<Self> {
        let ring = Ring::new(names.iter().copied());
        let comps = components
            .iter()
            .map(|c| Polynomial::parse(&ring, c))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&ring, comps)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn names(&self) -> &[String] {
        self.ring.names()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(|c| c.total_degree()).max().unwrap_or(0)
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.evaluate_f64(x)).collect()
    }

    pub fn eval_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    /// Components evaluated at the given polynomial images of the state.
    fn compose(&self, images: &[Polynomial], target: &Arc<Ring>) -> Result<Vec<Polynomial>> {
        self.components.iter().map(|c| compose_one(c, images, target)).collect()
    }
}

fn compose_one(p: &Polynomial, images: &[Polynomial], target: &Arc<Ring>) -> Result<Polynomial> {
    let map: HashMap<String, Polynomial> = p.ring().names().iter().cloned().zip(images.iter().cloned()).collect();
    p.substitute(&map, target)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Midpoint,
    ExplicitEuler,
    Kahan,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Midpoint => "midpoint",
            SchemeKind::ExplicitEuler => "explicit-euler",
            SchemeKind::Kahan => "kahan",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(SchemeKind::Midpoint),
            "euler" | "explicit-euler" => Ok(SchemeKind::ExplicitEuler),
            "kahan" => Ok(SchemeKind::Kahan),
            _ => Err(Error::Invalid(format!("unknown scheme `{s}`"))),
        }
    }
}

pub fn current_name(v: &str) -> String {
    format!("{v}_0")
}

pub fn advanced_name(v: &str) -> String {
    format!("{v}_1")
}

#[derive(Clone, Debug)]
pub struct SchemeSystem {
    pub kind: SchemeKind,
    pub field: VectorField,
    pub ring: Arc<Ring>,
    pub residuals: Vec<Polynomial>,
}

impl SchemeSystem {
    pub fn current_vars(&self) -> Vec<String> {
        self.field.names().iter().map(|v| current_name(v)).collect()
    }

    pub fn advanced_vars(&self) -> Vec<String> {
        self.field.names().iter().map(|v| advanced_name(v)).collect()
    }

    /// Largest total degree of any residual in the advanced variables.
    pub fn degree_in_advanced(&self) -> u32 {
        let idx: Vec<usize> = self
            .advanced_vars()
            .iter()
            .map(|v| self.ring.index_of(v).unwrap())
            .collect();
        self.residuals.iter().map(|r| r.degree_in_set(&idx)).max().unwrap_or(0)
    }

    pub fn is_linear_in_advanced(&self) -> bool {
        self.degree_in_advanced() <= 1
    }
}

fn scheme_ring(field: &VectorField) -> Arc<Ring> {
    let mut vars = Vec::with_capacity(2 * field.dimension() + 1);
    for v in field.names() {
        vars.push(advanced_name(v));
        vars.push(current_name(v));
    }
    vars.push(DT.to_string());
    Ring::new(vars)
}

struct Parts {
    ring: Arc<Ring>,
    x: Vec<Polynomial>,
    xh: Vec<Polynomial>,
    dt: Polynomial,
}

fn parts(field: &VectorField) -> Parts {
    let ring = scheme_ring(field);
    let x = field
        .names()
        .iter()
        .map(|v| Polynomial::var(&ring, &current_name(v)).unwrap())
        .collect();
    let xh = field
        .names()
        .iter()
        .map(|v| Polynomial::var(&ring, &advanced_name(v)).unwrap())
        .collect();
    let dt = Polynomial::var(&ring, DT).unwrap();
    Parts { ring, x, xh, dt }
}

fn finish(kind: SchemeKind, field: &VectorField, ring: Arc<Ring>, raw: Vec<Polynomial>) -> SchemeSystem {
    SchemeSystem {
        kind,
        field: field.clone(),
        ring,
        residuals: raw.into_iter().map(|r| r.primitive().0).collect(),
    }
}

/// `x̂ - x - dt*f((x + x̂)/2)`.
pub fn midpoint_scheme(field: &VectorField) -> SchemeSystem {
    let p = parts(field);
    let half = Scalar::new(1.into(), 2.into());
    let mid: Vec<Polynomial> = p.x.iter().zip(&p.xh).map(|(a, b)| (a + b).scale(&half)).collect();
    let f = field.compose(&mid, &p.ring).unwrap();
    let raw = (0..field.dimension())
        .map(|i| &(&p.xh[i] - &p.x[i]) - &(&p.dt * &f[i]))
        .collect();
    finish(SchemeKind::Midpoint, field, p.ring, raw)
}

/// `x̂ - x - dt*f(x)`.
pub fn explicit_euler_scheme(field: &VectorField) -> SchemeSystem {
    let p = parts(field);
    let f = field.compose(&p.x, &p.ring).unwrap();
    let raw = (0..field.dimension())
        .map(|i| &(&p.xh[i] - &p.x[i]) - &(&p.dt * &f[i]))
        .collect();
    finish(SchemeKind::ExplicitEuler, field, p.ring, raw)
}

/// Homogeneous part of `p` of total degree `d`.
fn homogeneous(p: &Polynomial, d: u32) -> Polynomial {
    Polynomial::from_terms(
        p.ring(),
        p.terms()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

fn require_quadratic(field: &VectorField) -> Result<()> {
    for (i, c) in field.components().iter().enumerate() {
        if c.total_degree() > 2 {
            return Err(Error::NotQuadratic {
                component: i,
                degree: c.total_degree(),
            });
        }
    }
    Ok(())
}

/// `x̂ - x - dt*(Q̄(x, x̂) + B(x + x̂)/2 + c)` with `Q̄` the polarized
/// quadratic part of `f`.
pub fn kahan_scheme(field: &VectorField) -> Result<SchemeSystem> {
    require_quadratic(field)?;
    let p = parts(field);
    let half = Scalar::new(1.into(), 2.into());
    let sum: Vec<Polynomial> = p.x.iter().zip(&p.xh).map(|(a, b)| a + b).collect();
    let mut raw = Vec::with_capacity(field.dimension());
    for (i, comp) in field.components().iter().enumerate() {
        let q = homogeneous(comp, 2);
        let c = homogeneous(comp, 0).constant_value().unwrap_or_else(Scalar::zero);
        let q_sum = compose_one(&q, &sum, &p.ring)?;
        let q_x = compose_one(&q, &p.x, &p.ring)?;
        let q_xh = compose_one(&q, &p.xh, &p.ring)?;
        let polar = (&(&q_sum - &q_x) - &q_xh).scale(&half);
        let linear = compose_one(&homogeneous(comp, 1), &sum, &p.ring)?.scale(&half);
        let rhs = &(&polar + &linear) + &Polynomial::constant(&p.ring, c);
        raw.push(&(&p.xh[i] - &p.x[i]) - &(&p.dt * &rhs));
    }
    Ok(finish(SchemeKind::Kahan, field, p.ring, raw))
}

pub fn build_scheme(kind: SchemeKind, field: &VectorField) -> Result<SchemeSystem> {
    match kind {
        SchemeKind::Midpoint => Ok(midpoint_scheme(field)),
        SchemeKind::ExplicitEuler => Ok(explicit_euler_scheme(field)),
        SchemeKind::Kahan => kahan_scheme(field),
    }
}

/// Step map `x̂ = N(x, dt) / D(x, dt)` over the scheme ring.
#[derive(Clone, Debug)]
pub struct RationalMap {
    pub ring: Arc<Ring>,
    pub numerators: Vec<Polynomial>,
    pub denominator: Polynomial,
}

impl RationalMap {
    pub fn apply_f64(&self, x: &[f64], dt: f64) -> Option<Vec<f64>> {
        let pt = self.point_f64(x, dt);
        let d = self.denominator.evaluate_f64(&pt).ok()?;
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        self.numerators
            .iter()
            .map(|n| n.evaluate_f64(&pt).ok().map(|v| v / d))
            .collect()
    }

    pub fn apply_exact(&self, x: &[Scalar], dt: &Scalar) -> Option<Vec<Scalar>> {
        let pt = self.point_exact(x, dt);
        let d = self.denominator.evaluate(&pt).ok()?;
        if d.is_zero() {
            return None;
        }
        self.numerators
            .iter()
            .map(|n| n.evaluate(&pt).ok().map(|v| v / &d))
            .collect()
    }

    fn point_f64(&self, x: &[f64], dt: f64) -> Vec<f64> {
        let mut pt = vec![0.0; self.ring.nvars()];
        for (i, &v) in x.iter().enumerate() {
            pt[2 * i + 1] = v;
        }
        pt[self.ring.nvars() - 1] = dt;
        pt
    }

    fn point_exact(&self, x: &[Scalar], dt: &Scalar) -> Vec<Scalar> {
        let mut pt = vec![Scalar::zero(); self.ring.nvars()];
        for (i, v) in x.iter().enumerate() {
            pt[2 * i + 1] = v.clone();
        }
        pt[self.ring.nvars() - 1] = dt.clone();
        pt
    }
}

/// Split an affine-in-`vars` polynomial into its coefficients and remainder.
pub(crate) fn affine_split(p: &Polynomial, vars: &[usize]) -> (Vec<Polynomial>, Polynomial) {
    let ring = p.ring();
    let mut coeffs = vec![Polynomial::zero(ring); vars.len()];
    let mut rest = Polynomial::zero(ring);
    for (m, c) in p.terms() {
        let hit = vars.iter().position(|&v| m.exponents()[v] > 0);
        match hit {
            Some(j) => {
                let mut e = m.exponents().to_vec();
                e[vars[j]] -= 1;
                let t = Polynomial::from_terms(ring, [(crate::algebra::Monomial::from_exponents(e), c.clone())]);
                coeffs[j] = &coeffs[j] + &t;
            }
            None => rest = &rest + &Polynomial::from_terms(ring, [(m.clone(), c.clone())]),
        }
    }
    (coeffs, rest)
}

/// Determinant by cofactor expansion (matrices here are at most 3x3).
pub(crate) fn determinant(m: &[Vec<Polynomial>], ring: &Arc<Ring>) -> Polynomial {
    let n = m.len();
    match n {
        0 => Polynomial::one(ring),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(ring);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][j] * &determinant(&minor, ring);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Solve the Kahan residuals for `x̂` by Cramer's rule. The denominator is
/// normalized to take the value 1 at `dt = 0`.
pub fn kahan_rational_map(field: &VectorField) -> Result<RationalMap> {
    let scheme = kahan_scheme(field)?;
    let ring = scheme.ring.clone();
    let adv: Vec<usize> = scheme
        .advanced_vars()
        .iter()
        .map(|v| ring.index_of(v).unwrap())
        .collect();
    let mut a = Vec::with_capacity(adv.len());
    let mut b = Vec::with_capacity(adv.len());
    for r in &scheme.residuals {
        let (coeffs, rest) = affine_split(r, &adv);
        a.push(coeffs);
        b.push(-&rest);
    }
    let det = determinant(&a, &ring);
    let numerators: Vec<Polynomial> = (0..adv.len())
        .map(|j| {
            let mj: Vec<Vec<Polynomial>> = a
                .iter()
                .zip(&b)
                .map(|(row, bi)| {
                    let mut row = row.clone();
                    row[j] = bi.clone();
                    row
                })
                .collect();
            determinant(&mj, &ring)
        })
        .collect();
    let dt_zero: HashMap<String, Scalar> = [(DT.to_string(), Scalar::zero())].into_iter().collect();
    let at_zero = det
        .substitute_values(&dt_zero, &ring)?
        .constant_value()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::Invalid("Kahan system is singular at dt = 0".into()))?;
    let s = at_zero.recip();
    Ok(RationalMap {
        ring,
        numerators: numerators.iter().map(|n| n.scale(&s)).collect(),
        denominator: det.scale(&s),
    })
}

/// Residuals with the scheme's dt replaced by `T/n` and denominators cleared.
pub(crate) fn with_period(scheme: &SchemeSystem, n: usize, period_name: &str) -> Result<(Arc<Ring>, Vec<Polynomial>)> {
    let mut names: Vec<String> = scheme
        .ring
        .names()
        .iter()
        .filter(|v| v.as_str() != DT)
        .cloned()
        .collect();
    names.push(period_name.to_string());
    let ring = Ring::new(names);
    let t = Polynomial::var(&ring, period_name)?;
    let map: HashMap<String, Polynomial> = [(DT.to_string(), t.scale(&Scalar::new(One::one(), (n as i64).into())))]
        .into_iter()
        .collect();
    let out = scheme
        .residuals
        .iter()
        .map(|r| r.substitute(&map, &ring).map(|p| p.primitive().0))
        .collect::<Result<Vec<_>>>()?;
    Ok((ring, out))
}
