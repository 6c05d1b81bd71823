//! Periodicity systems and their reduction to a period polynomial in `T`.
//!
//! A cyclic problem chains `n` copies of the scheme residuals through points
//! `x_0, ..., x_{n-1}` with `x_n = x_0`, using `dt = T/n`. The boundary
//! variant chains `x_start -> x_1 -> ... -> x_{n-1} -> x_end` instead.
//! Point coordinates are named `v_k` for each state variable `v`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{scalar_from_f64, scalar_to_f64, MonomialOrder, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};
use crate::groebner::{self, linear, GroebnerConfig, GroebnerStats, PolySystem};
use crate::models::ModelSpec;
use crate::schemes::{self, build_scheme, SchemeKind, SchemeSystem, DT};
use crate::univar::{deflate, isolate_positive_roots, Eliminant, PeriodCertificate, UPoly};

/// Name of the period variable.
pub const PERIOD: &str = "T";

pub fn point_name(v: &str, k: usize) -> String {
    format!("{v}_{k}")
}

#[derive(Clone, Debug)]
pub struct PeriodicityProblem {
    pub scheme: SchemeSystem,
    /// Number of steps.
    pub n: usize,
    pub initial: Vec<Scalar>,
    /// Final state for the boundary variant; `None` for the cyclic one.
    pub terminal: Option<Vec<Scalar>>,
    /// `[v_k for v in state for k in 1..n] + [T]`.
    pub ring: Arc<Ring>,
    /// Scheme residuals (integer coefficients in the point and `T`
    /// variables) with the fixed endpoints substituted as given.
    pub equations: Vec<Polynomial>,
}

impl PeriodicityProblem {
    pub fn dimension(&self) -> usize {
        self.scheme.field.dimension()
    }

    pub fn is_boundary(&self) -> bool {
        self.terminal.is_some()
    }

    /// Free interior points `x_1..x_{n-1}`, flattened point-major as
    /// `[x_1 state..., x_2 state..., ...]`.
    pub fn unknowns(&self) -> Vec<String> {
        let names = self.scheme.field.names();
        (1..self.n)
            .flat_map(|k| names.iter().map(move |v| point_name(v, k)))
            .collect()
    }

    /// Ring index of each entry of [`Self::unknowns`], then of `T`.
    pub fn variable_layout(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.unknowns().iter().map(|u| self.ring.index_of(u).unwrap()).collect();
        out.push(self.ring.index_of(PERIOD).unwrap());
        out
    }

    pub fn initial_f64(&self) -> Vec<f64> {
        self.initial.iter().map(scalar_to_f64).collect()
    }

    pub fn end_f64(&self) -> Vec<f64> {
        self.terminal
            .as_ref()
            .unwrap_or(&self.initial)
            .iter()
            .map(scalar_to_f64)
            .collect()
    }

    /// Ring point from interior points (point-major) and `T`.
    pub fn ring_point(&self, interior: &[Vec<f64>], t: f64) -> Vec<f64> {
        let layout = self.variable_layout();
        let mut pt = vec![0.0; self.ring.nvars()];
        let flat: Vec<f64> = interior.iter().flatten().copied().collect();
        for (slot, v) in layout.iter().zip(flat.iter().chain(std::iter::once(&t))) {
            pt[*slot] = *v;
        }
        pt
    }

    /// Max-norm of all equations at the given interior points and period.
    pub fn residual_norm(&self, interior: &[Vec<f64>], t: f64) -> Result<f64> {
        let pt = self.ring_point(interior, t);
        let mut m: f64 = 0.0;
        for e in &self.equations {
            m = m.max(e.evaluate_f64(&pt)?.abs());
        }
        Ok(m)
    }
}

fn problem_ring(field_names: &[String], n: usize) -> Arc<Ring> {
    let mut vars = Vec::with_capacity(field_names.len() * (n - 1) + 1);
    for v in field_names {
        for k in 1..n {
            vars.push(point_name(v, k));
        }
    }
    vars.push(PERIOD.to_string());
    Ring::new(vars)
}

fn build(scheme: &SchemeSystem, n: usize, start: &[Scalar], end: Option<&[Scalar]>) -> Result<PeriodicityProblem> {
    if n < 2 {
        return Err(Error::Invalid(format!("need at least 2 points, got n = {n}")));
    }
    let d = scheme.field.dimension();
    for s in std::iter::once(start).chain(end) {
        if s.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.len(),
            });
        }
    }
    let (step_ring, step) = schemes::with_period(scheme, n, PERIOD)?;
    let ring = problem_ring(scheme.field.names(), n);
    let names = scheme.field.names();
    let point = |k: usize, j: usize| -> Result<Polynomial> {
        if k == 0 || (k == n && end.is_none()) {
            Ok(Polynomial::constant(&ring, start[j].clone()))
        } else if k == n {
            Ok(Polynomial::constant(&ring, end.unwrap()[j].clone()))
        } else {
            Polynomial::var(&ring, &point_name(&names[j], k))
        }
    };
    let mut equations = Vec::with_capacity(n * d);
    for k in 0..n {
        let mut map: HashMap<String, Polynomial> = HashMap::new();
        for (j, v) in names.iter().enumerate() {
            map.insert(schemes::current_name(v), point(k, j)?);
            map.insert(schemes::advanced_name(v), point(k + 1, j)?);
        }
        map.insert(PERIOD.to_string(), Polynomial::var(&ring, PERIOD)?);
        for r in &step {
            debug_assert_eq!(r.ring(), &step_ring);
            equations.push(r.substitute(&map, &ring)?);
        }
    }
    Ok(PeriodicityProblem {
        scheme: scheme.clone(),
        n,
        initial: start.to_vec(),
        terminal: end.map(|e| e.to_vec()),
        ring,
        equations,
    })
}

/// `n` residual copies around a closed orbit through `x0`.
pub fn build_cyclic_system(scheme: &SchemeSystem, n: usize, x0: &[Scalar]) -> Result<PeriodicityProblem> {
    build(scheme, n, x0, None)
}

/// `n` residual copies from `x_start` to `x_end`.
pub fn build_boundary_system(
    scheme: &SchemeSystem,
    n: usize,
    x_start: &[Scalar],
    x_end: &[Scalar],
) -> Result<PeriodicityProblem> {
    build(scheme, n, x_start, Some(x_end))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Auto,
    Groebner,
    Linear,
    MapComposition,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Groebner => "groebner",
            Strategy::Linear => "linear",
            Strategy::MapComposition => "map-composition",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "groebner" => Ok(Strategy::Groebner),
            "linear" => Ok(Strategy::Linear),
            "map-composition" | "map" => Ok(Strategy::MapComposition),
            _ => Err(Error::Invalid(format!("unknown strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    RootsFound,
    CertifiedEmpty,
    BudgetExhausted,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::RootsFound => "roots-found",
            SearchStatus::CertifiedEmpty => "certified-empty",
            SearchStatus::BudgetExhausted => "budget-exhausted",
        }
    }

    /// Process exit code: 0 found, 1 empty, 3 budget.
    pub fn exit_code(self) -> i32 {
        match self {
            SearchStatus::RootsFound => 0,
            SearchStatus::CertifiedEmpty => 1,
            SearchStatus::BudgetExhausted => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EliminationConfig {
    pub groebner: GroebnerConfig,
    /// Cap on the degree in `T` of composed maps.
    pub max_composition_degree: usize,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig {
            groebner: GroebnerConfig::default(),
            max_composition_degree: 4096,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodSearchResult {
    /// `None` only when the budget ran out.
    pub eliminant: Option<Eliminant>,
    pub certificates: Vec<PeriodCertificate>,
    pub status: SearchStatus,
    pub strategy: Strategy,
    pub stats: Option<GroebnerStats>,
    pub diagnostics: Option<String>,
    pub elapsed: std::time::Duration,
}

impl PeriodSearchResult {
    /// Smallest positive certified period.
    pub fn fundamental(&self) -> Option<&PeriodCertificate> {
        self.certificates.first()
    }

    /// Deflated eliminant times `T^deflation`.
    pub fn raw_eliminant(&self) -> Option<UPoly> {
        self.eliminant.as_ref().map(|e| e.poly.mul(&UPoly::x_pow(e.deflation)))
    }
}

fn finish_search(
    poly: UPoly,
    strategy: Strategy,
    stats: Option<GroebnerStats>,
    started: Instant,
) -> Result<PeriodSearchResult> {
    if poly.is_zero() {
        return Err(Error::Invalid(
            "elimination ideal is zero: the system is consistent for every period".into(),
        ));
    }
    let e = deflate(&poly);
    let certificates = isolate_positive_roots(&e);
    let status = if certificates.is_empty() {
        SearchStatus::CertifiedEmpty
    } else {
        SearchStatus::RootsFound
    };
    Ok(PeriodSearchResult {
        eliminant: Some(e),
        certificates,
        status,
        strategy,
        stats,
        diagnostics: None,
        elapsed: started.elapsed(),
    })
}

/// Univariate polynomial of the ring variable `var` as a [`UPoly`].
fn univariate(p: &Polynomial, var: usize) -> Result<UPoly> {
    UPoly::from_polynomial(p, var)
}

fn gcd_all(polys: impl IntoIterator<Item = UPoly>) -> UPoly {
    let mut g = UPoly::zero();
    for p in polys {
        g = if g.is_zero() { p.normalized() } else { g.gcd(&p) };
        if g.is_constant() && !g.is_zero() {
            return UPoly::one();
        }
    }
    g
}

fn by_groebner(problem: &PeriodicityProblem, config: &EliminationConfig) -> Result<(UPoly, GroebnerStats)> {
    let system = PolySystem::new(&problem.ring, problem.equations.clone(), MonomialOrder::DegRevLex)?;
    let (elim, stats) = groebner::univariate_eliminant(&system, PERIOD, &config.groebner)?;
    let t = problem.ring.require(PERIOD)?;
    Ok((univariate(&elim, t)?, stats))
}

fn by_linear(problem: &PeriodicityProblem) -> Result<UPoly> {
    let unknowns = problem.unknowns();
    let refs: Vec<&str> = unknowns.iter().map(String::as_str).collect();
    let gens: Vec<Polynomial> = problem.equations.iter().filter(|e| !e.is_zero()).cloned().collect();
    if gens.is_empty() {
        return Ok(UPoly::zero());
    }
    let le = linear::linear_eliminate(&gens, &refs, PERIOD)?;
    if !le.eliminant.is_zero() {
        for p in &le.pivots {
            let g = le.eliminant.gcd(p);
            if !g.is_constant() && !isolate_positive_roots(&deflate(&g)).is_empty() {
                return Err(Error::StrategyNotApplicable(
                    "a non-constant pivot shares a positive root with the eliminant".into(),
                ));
            }
        }
    }
    Ok(le.eliminant)
}

/// Rational curve `T -> (num_1/den, ..., num_d/den)`.
#[derive(Clone, Debug)]
struct RationalCurve {
    num: Vec<UPoly>,
    den: UPoly,
}

impl RationalCurve {
    fn constant(x: &[Scalar]) -> RationalCurve {
        let mut l = BigInt::one();
        for v in x {
            l = l.lcm(v.denom());
        }
        let num = x
            .iter()
            .map(|v| UPoly::new(vec![v.numer() * (&l / v.denom())]))
            .collect();
        RationalCurve {
            num,
            den: UPoly::new(vec![l]),
        }
    }

    fn degree(&self) -> usize {
        self.num
            .iter()
            .map(UPoly::degree)
            .max()
            .unwrap_or(0)
            .max(self.den.degree())
    }

    /// Divide out common polynomial factors and integer content.
    fn simplify(&mut self) {
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_constant() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_constant() {
            for n in self.num.iter_mut() {
                *n = n.exact_div(&g).expect("gcd divides");
            }
            self.den = self.den.exact_div(&g).expect("gcd divides");
        }
        let mut c = self.den.content();
        for n in &self.num {
            c = c.gcd(&n.content());
        }
        if self.den.lc() < &BigInt::zero() {
            c = -c;
        }
        if !c.is_zero() && !c.is_one() {
            let div = |p: &UPoly| UPoly::new(p.coeffs().iter().map(|x| x / &c).collect());
            self.num = self.num.iter().map(div).collect();
            self.den = div(&self.den);
        }
    }
}

/// Map polynomials with `dt = T/n` substituted, as integer terms over
/// `(x exponents, T exponent)`.
struct ComposableMap {
    polys: Vec<Vec<(Vec<u32>, u32, BigInt)>>,
    x_degree: u32,
}

impl ComposableMap {
    fn new(map: &schemes::RationalMap, n: usize, dim: usize) -> ComposableMap {
        let dt = map.ring.index_of(DT).unwrap();
        let n = Scalar::from_integer(n.into());
        let mut raw: Vec<Vec<(Vec<u32>, u32, Scalar)>> = Vec::new();
        for p in map.numerators.iter().chain(std::iter::once(&map.denominator)) {
            raw.push(
                p.terms()
                    .map(|(m, c)| {
                        let e = m.exponents();
                        let xs: Vec<u32> = (0..dim).map(|i| e[2 * i + 1]).collect();
                        let k = e[dt];
                        (xs, k, c / num_traits::pow(n.clone(), k as usize))
                    })
                    .collect(),
            );
        }
        let mut l = BigInt::one();
        for p in &raw {
            for (_, _, c) in p {
                l = l.lcm(c.denom());
            }
        }
        let x_degree = raw
            .iter()
            .flatten()
            .map(|(xs, _, _)| xs.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        let polys = raw
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|(xs, k, c)| (xs, k, (c * Scalar::from_integer(l.clone())).to_integer()))
                    .collect()
            })
            .collect();
        ComposableMap { polys, x_degree }
    }

    fn apply(&self, c: &RationalCurve) -> RationalCurve {
        let dd = self.x_degree as usize;
        let pow_cache = |base: &UPoly| {
            let mut v = vec![UPoly::one()];
            for _ in 0..dd {
                let next = v.last().unwrap().mul(base);
                v.push(next);
            }
            v
        };
        let num_pows: Vec<Vec<UPoly>> = c.num.iter().map(pow_cache).collect();
        let den_pows = pow_cache(&c.den);
        // each x-monomial, homogenized with the denominator, is built once
        let mut products: HashMap<&[u32], UPoly> = HashMap::new();
        for (xs, _, _) in self.polys.iter().flatten() {
            products.entry(xs.as_slice()).or_insert_with(|| {
                let mut t = den_pows[dd - xs.iter().sum::<u32>() as usize].clone();
                for (i, &e) in xs.iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&num_pows[i][e as usize]);
                    }
                }
                t
            });
        }
        let eval = |terms: &Vec<(Vec<u32>, u32, BigInt)>| {
            let mut acc = UPoly::zero();
            for (xs, k, coef) in terms {
                let t = products[xs.as_slice()].scale(coef).shift(*k as usize);
                acc = acc.add(&t);
            }
            acc
        };
        let d = c.num.len();
        let mut out = RationalCurve {
            num: (0..d).map(|i| eval(&self.polys[i])).collect(),
            den: eval(&self.polys[d]),
        };
        out.simplify();
        out
    }
}

fn by_map_composition(problem: &PeriodicityProblem, config: &EliminationConfig) -> Result<UPoly> {
    if problem.scheme.kind != SchemeKind::Kahan {
        return Err(Error::StrategyNotApplicable(
            "map composition needs the Kahan scheme".into(),
        ));
    }
    let map = schemes::kahan_rational_map(&problem.scheme.field)?;
    let dim = problem.dimension();
    let cm = ComposableMap::new(&map, problem.n, dim);
    let mut curve = RationalCurve::constant(&problem.initial);
    for step in 0..problem.n {
        curve = cm.apply(&curve);
        if curve.degree() > config.max_composition_degree {
            return Err(Error::BudgetExhausted {
                reductions: step as u64 + 1,
                pairs_left: problem.n - step - 1,
            });
        }
    }
    let target = problem.terminal.as_ref().unwrap_or(&problem.initial);
    let conditions = target.iter().zip(&curve.num).map(|(x, num)| {
        // denom(x)*num - numer(x)*den
        num.scale(x.denom()).sub(&curve.den.scale(x.numer()))
    });
    Ok(gcd_all(conditions))
}

/// Eliminate every interior point, leaving a polynomial in `T`, and isolate
/// its positive roots.
pub fn eliminate_to_period(
    problem: &PeriodicityProblem,
    strategy: Strategy,
    config: &EliminationConfig,
) -> Result<PeriodSearchResult> {
    let started = Instant::now();
    let budget = |e: Error, strategy: Strategy| match e {
        Error::BudgetExhausted { reductions, pairs_left } => Ok(PeriodSearchResult {
            eliminant: None,
            certificates: Vec::new(),
            status: SearchStatus::BudgetExhausted,
            strategy,
            stats: None,
            diagnostics: Some(format!(
                "budget exhausted after {reductions} steps with {pairs_left} pending"
            )),
            elapsed: started.elapsed(),
        }),
        other => Err(other),
    };
    match strategy {
        Strategy::Linear => finish_search(by_linear(problem)?, strategy, None, started),
        Strategy::Groebner => match by_groebner(problem, config) {
            Ok((p, stats)) => finish_search(p, strategy, Some(stats), started),
            Err(e) => budget(e, strategy),
        },
        Strategy::MapComposition => match by_map_composition(problem, config) {
            Ok(p) => finish_search(p, strategy, None, started),
            Err(e) => budget(e, strategy),
        },
        Strategy::Auto => {
            match by_linear(problem) {
                Ok(p) => return finish_search(p, Strategy::Linear, None, started),
                Err(Error::StrategyNotApplicable(_)) => {}
                Err(e) => return Err(e),
            }
            if problem.scheme.kind == SchemeKind::Kahan {
                match by_map_composition(problem, config) {
                    Ok(p) => return finish_search(p, Strategy::MapComposition, None, started),
                    Err(Error::BudgetExhausted { .. }) | Err(Error::StrategyNotApplicable(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            match by_groebner(problem, config) {
                Ok((p, stats)) => finish_search(p, Strategy::Groebner, Some(stats), started),
                Err(e) => budget(e, Strategy::Groebner),
            }
        }
    }
}

/// One row of a period scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n: usize,
    pub result: std::result::Result<PeriodSearchResult, Error>,
}

/// Cyclic searches for each `n`, run in parallel and returned in order.
pub fn period_scan(
    model: &ModelSpec,
    kind: SchemeKind,
    ns: impl IntoIterator<Item = usize>,
    x0: &[Scalar],
    strategy: Strategy,
    config: &EliminationConfig,
) -> Result<Vec<ScanRow>> {
    let scheme = build_scheme(kind, &model.field)?;
    let ns: Vec<usize> = ns.into_iter().collect();
    Ok(ns
        .par_iter()
        .map(|&n| ScanRow {
            n,
            result: build_cyclic_system(&scheme, n, x0).and_then(|p| eliminate_to_period(&p, strategy, config)),
        })
        .collect())
}

/// Every real solution of one scheme step from `x` at step `dt`.
///
/// Advanced variables entering with a constant coefficient are solved for
/// and substituted; if one variable is left, the real roots of the remaining
/// univariate equations are isolated exactly (after converting the float
/// inputs to exact dyadic rationals). Returns `None` when more than one
/// variable is left.
pub fn step_branches(scheme: &SchemeSystem, x: &[f64], dt: f64) -> Result<Option<Vec<Vec<f64>>>> {
    let adv = scheme.advanced_vars();
    let ring = Ring::new(adv.iter().cloned());
    let mut values: HashMap<String, Polynomial> = HashMap::new();
    for (v, &xv) in scheme.current_vars().iter().zip(x) {
        let s = scalar_from_f64(xv).ok_or_else(|| Error::Invalid("non-finite state".into()))?;
        values.insert(v.clone(), Polynomial::constant(&ring, s));
    }
    let dts = scalar_from_f64(dt).ok_or_else(|| Error::Invalid("non-finite step".into()))?;
    values.insert(DT.to_string(), Polynomial::constant(&ring, dts));
    let eqs = scheme
        .residuals
        .iter()
        .map(|r| r.substitute(&values, &ring))
        .collect::<Result<Vec<_>>>()?;
    let red = linear::substitute_unit_linear(&eqs, &adv)?;
    let nonzero: Vec<&Polynomial> = red.generators.iter().filter(|r| !r.is_zero()).collect();
    let candidates: Vec<Vec<f64>> = match red.remaining.len() {
        0 => {
            if nonzero.iter().any(|r| r.is_constant()) {
                return Ok(Some(Vec::new()));
            }
            vec![vec![0.0; adv.len()]]
        }
        1 => {
            if nonzero.is_empty() {
                return Ok(None);
            }
            let var = ring.require(&red.remaining[0])?;
            let g = gcd_all(nonzero.iter().map(|p| univariate(p, var)).collect::<Result<Vec<_>>>()?);
            real_roots(&g)
                .into_iter()
                .map(|r| {
                    let mut pt = vec![0.0; adv.len()];
                    pt[var] = r;
                    pt
                })
                .collect()
        }
        _ => return Ok(None),
    };
    let mut out = Vec::with_capacity(candidates.len());
    for mut pt in candidates {
        red.back_substitute(&mut pt)?;
        out.push(pt);
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Some(out))
}

/// Real roots of an integer polynomial, isolated exactly and refined.
fn real_roots(p: &UPoly) -> Vec<f64> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let e = deflate(p);
    let mut out: Vec<f64> = Vec::new();
    if e.deflation > 0 {
        out.push(0.0);
    }
    for c in isolate_positive_roots(&deflate(&e.poly)) {
        out.push(c.value);
    }
    for c in isolate_positive_roots(&deflate(&e.poly.reflect())) {
        out.push(-c.value);
    }
    out
}

/// Every real orbit of the problem at period `t`, obtained by following all
/// real step branches from the initial point. Sorted by closure residual.
pub fn enumerate_orbits(problem: &PeriodicityProblem, t: f64) -> Result<Vec<(Vec<Vec<f64>>, f64)>> {
    let dt = t / problem.n as f64;
    let mut chains: Vec<Vec<Vec<f64>>> = vec![vec![problem.initial_f64()]];
    for _ in 1..problem.n {
        let mut next = Vec::new();
        for chain in chains {
            let last = chain.last().unwrap();
            let Some(branches) = step_branches(&problem.scheme, last, dt)? else {
                return Err(Error::StrategyNotApplicable(
                    "step is not reducible to one variable".into(),
                ));
            };
            for b in branches {
                let mut c = chain.clone();
                c.push(b);
                next.push(c);
            }
        }
        chains = next;
    }
    let mut out = Vec::with_capacity(chains.len());
    for chain in chains {
        let interior: Vec<Vec<f64>> = chain[1..].to_vec();
        let r = problem.residual_norm(&interior, t)?;
        out.push((chain, r));
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::instantiate;

    fn assert_same_roots(a: &PeriodSearchResult, b: &PeriodSearchResult) {
        let va: Vec<f64> = a.certificates.iter().map(|c| c.value).collect();
        let vb: Vec<f64> = b.certificates.iter().map(|c| c.value).collect();
        assert_eq!(va.len(), vb.len());
        for (x, y) in va.iter().zip(&vb) {
            assert!((x - y).abs() < 1e-11 * x.max(1.0), "{va:?} vs {vb:?}");
        }
    }

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_integer(x.into())).collect()
    }

    #[test]
    fn cyclic_counts() {
        let m = instantiate("linear", &[]).unwrap();
        let s = build_scheme(SchemeKind::Midpoint, &m.field).unwrap();
        let p = build_cyclic_system(&s, 3, &ints(&[0, 1])).unwrap();
        assert_eq!(p.equations.len(), 6);
        assert_eq!(p.ring.names(), ["x_1", "x_2", "y_1", "y_2", "T"]);
        assert!(p.equations.iter().all(|e| e.is_integral()));
    }

    #[test]
    fn linear_midpoint_small_n() {
        let m = instantiate("linear", &[]).unwrap();
        let s = build_scheme(SchemeKind::Midpoint, &m.field).unwrap();
        for n in 3..=6 {
            let p = build_cyclic_system(&s, n, &ints(&[0, 1])).unwrap();
            let r = eliminate_to_period(&p, Strategy::Linear, &EliminationConfig::default()).unwrap();
            let expect = 2.0 * n as f64 * (std::f64::consts::PI / n as f64).tan();
            assert!((r.certificates[0].value - expect).abs() < 1e-9, "n={n}");
            let g = eliminate_to_period(&p, Strategy::Groebner, &EliminationConfig::default()).unwrap();
            assert_same_roots(&g, &r);
        }
    }

    #[test]
    fn strategies_reject_wrong_inputs() {
        let m = instantiate("cubic", &[]).unwrap();
        let s = build_scheme(SchemeKind::Midpoint, &m.field).unwrap();
        let p = build_cyclic_system(&s, 3, &ints(&[0, 1])).unwrap();
        let cfg = EliminationConfig::default();
        assert!(matches!(
            eliminate_to_period(&p, Strategy::Linear, &cfg),
            Err(Error::StrategyNotApplicable(_))
        ));
        assert!(matches!(
            eliminate_to_period(&p, Strategy::MapComposition, &cfg),
            Err(Error::StrategyNotApplicable(_))
        ));
    }

    #[test]
    fn map_composition_matches_linear_on_cayley() {
        let m = instantiate("linear", &[]).unwrap();
        let s = build_scheme(SchemeKind::Kahan, &m.field).unwrap();
        let p = build_cyclic_system(&s, 5, &ints(&[0, 1])).unwrap();
        let cfg = EliminationConfig::default();
        let a = eliminate_to_period(&p, Strategy::MapComposition, &cfg).unwrap();
        let b = eliminate_to_period(&p, Strategy::Groebner, &cfg).unwrap();
        assert_eq!(a.eliminant, b.eliminant);
        let c = eliminate_to_period(&p, Strategy::Linear, &cfg).unwrap();
        assert_same_roots(&a, &c);
    }

    #[test]
    fn zero_ideal_is_reported() {
        let m = instantiate("vl", &[]).unwrap();
        let s = build_scheme(SchemeKind::Kahan, &m.field).unwrap();
        let fixed = ints(&[2, 2]);
        let p = build_boundary_system(&s, 2, &fixed, &fixed).unwrap();
        assert!(eliminate_to_period(&p, Strategy::Groebner, &EliminationConfig::default()).is_err());
    }
}
