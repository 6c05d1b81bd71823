//! Python bindings for `scheme_periods`.
//!
//! Rational inputs (`x0`, parameters) accept ints, floats, strings such as
//! `"1/10"` and `fractions.Fraction`; each is read through its `str()`.

use std::collections::HashMap;

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use scheme_periods::algebra::{parse_scalar, scalar_to_f64, MonomialOrder, Polynomial, Ring, Scalar};
use scheme_periods::groebner::{self, GroebnerConfig, PolySystem, DEFAULT_MAX_REDUCTIONS};
use scheme_periods::models::{catalog, instantiate, ModelSpec};
use scheme_periods::numeric::{self, OracleConfig, ShootConfig};
use scheme_periods::periodicity::{
    build_boundary_system, build_cyclic_system, eliminate_to_period, EliminationConfig, PeriodicityProblem, Strategy,
};
use scheme_periods::schemes::{build_scheme, SchemeKind};
use scheme_periods::univar::PeriodCertificate;
use scheme_periods::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::StepFailure(_) | Error::OrbitFailure { .. } | Error::NoReturn { .. } | Error::BudgetExhausted { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scalar(v: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    parse_scalar(&v.str()?.to_cow()?).map_err(to_py)
}

fn fraction<'py>(py: Python<'py>, s: &Scalar) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((s.numer().clone(), s.denom().clone()))
}

type Params<'py> = Option<HashMap<String, Bound<'py, PyAny>>>;
type State<'py> = Option<Vec<Bound<'py, PyAny>>>;

struct Resolved {
    spec: ModelSpec,
    kind: SchemeKind,
    x0: Vec<Scalar>,
}

fn resolve(name: &str, scheme: Option<&str>, x0: State<'_>, params: Params<'_>) -> PyResult<Resolved> {
    let mut overrides = Vec::new();
    for (k, v) in params.unwrap_or_default() {
        overrides.push((k, scalar(&v)?));
    }
    overrides.sort_by(|a, b| a.0.cmp(&b.0));
    let spec = instantiate(name, &overrides).map_err(to_py)?;
    let kind = match scheme {
        Some(s) => s.parse().map_err(to_py)?,
        None if matches!(name, "vl" | "top") => SchemeKind::Kahan,
        None => SchemeKind::Midpoint,
    };
    let x0 = match x0 {
        Some(v) => v.iter().map(scalar).collect::<PyResult<Vec<_>>>()?,
        None => spec.default_x0.clone(),
    };
    if x0.len() != spec.dimension() {
        return Err(PyValueError::new_err(format!(
            "x0 needs {} components",
            spec.dimension()
        )));
    }
    Ok(Resolved { spec, kind, x0 })
}

fn problem(r: &Resolved, n: usize, boundary: bool, x_end: State<'_>) -> PyResult<PeriodicityProblem> {
    let scheme = build_scheme(r.kind, &r.spec.field).map_err(to_py)?;
    if !boundary {
        return build_cyclic_system(&scheme, n, &r.x0).map_err(to_py);
    }
    if !n.is_multiple_of(2) || n < 4 {
        return Err(PyValueError::new_err("boundary problems need an even n >= 4"));
    }
    let end = match x_end {
        Some(v) => v.iter().map(scalar).collect::<PyResult<Vec<_>>>()?,
        None => {
            let mut e = r.x0.clone();
            if e.len() > 1 {
                e[1] = -e[1].clone();
            }
            e
        }
    };
    build_boundary_system(&scheme, n / 2, &r.x0, &end).map_err(to_py)
}

fn elimination(max_reductions: Option<u64>) -> EliminationConfig {
    let mut cfg = EliminationConfig::default();
    cfg.groebner.max_reductions = max_reductions.unwrap_or(DEFAULT_MAX_REDUCTIONS);
    cfg
}

/// A built-in vector field with its parameters.
#[pyclass(frozen, skip_from_py_object, get_all, module = "scheme_periods_py")]
#[derive(Clone)]
pub struct Model {
    name: String,
    description: String,
    dimension: usize,
    state: Vec<String>,
    equations: Vec<String>,
    parameters: HashMap<String, String>,
    default_x0: Vec<String>,
}

#[pymethods]
impl Model {
    fn __repr__(&self) -> String {
        format!("Model({}, {})", self.name, self.equations.join("; "))
    }
}

impl From<&ModelSpec> for Model {
    fn from(spec: &ModelSpec) -> Self {
        let s = spec.summary();
        Model {
            name: s.name,
            description: s.description,
            dimension: s.dimension,
            state: s.state,
            equations: s.equations,
            parameters: s.parameters.into_iter().collect(),
            default_x0: s.default_x0,
        }
    }
}

/// Isolating interval `[lo, hi]` of one positive root of the eliminant.
#[pyclass(frozen, skip_from_py_object, module = "scheme_periods_py")]
#[derive(Clone)]
pub struct Certificate {
    inner: PeriodCertificate,
}

#[pymethods]
impl Certificate {
    #[getter]
    fn lo<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.lo)
    }

    #[getter]
    fn hi<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.hi)
    }

    #[getter]
    fn value(&self) -> f64 {
        self.inner.value
    }

    #[getter]
    fn multiplicity(&self) -> usize {
        self.inner.multiplicity
    }

    #[getter]
    fn sturm_count(&self) -> usize {
        self.inner.sturm_count
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(value={}, lo={}, hi={})",
            self.inner.value, self.inner.lo, self.inner.hi
        )
    }
}

/// Outcome of an exact period search.
#[pyclass(frozen, skip_from_py_object, get_all, module = "scheme_periods_py")]
pub struct PeriodSearch {
    status: String,
    strategy: String,
    /// Deflated eliminant, ascending integer coefficients.
    eliminant: Option<Vec<BigInt>>,
    deflation: usize,
    certificates: Vec<Certificate>,
    boundary: bool,
    diagnostics: Option<String>,
    seconds: f64,
    exit_code: i32,
}

#[pymethods]
impl PeriodSearch {
    /// Certified roots `T` of the problem as posed.
    #[getter]
    fn periods(&self) -> Vec<f64> {
        self.certificates.iter().map(|c| c.inner.value).collect()
    }

    /// Same as `periods`, doubled for half-period boundary problems.
    #[getter]
    fn full_periods(&self) -> Vec<f64> {
        let k = if self.boundary { 2.0 } else { 1.0 };
        self.certificates.iter().map(|c| k * c.inner.value).collect()
    }

    fn __repr__(&self) -> String {
        format!("PeriodSearch({}, periods={:?})", self.status, self.periods())
    }
}

/// Discrete orbit `x_0, ..., x_n`.
#[pyclass(frozen, skip_from_py_object, get_all, module = "scheme_periods_py")]
#[derive(Clone)]
pub struct Orbit {
    points: Vec<Vec<f64>>,
    dt: f64,
    scheme: String,
    source: String,
    closure_residual: f64,
    gap: f64,
}

#[pymethods]
impl Orbit {
    fn __len__(&self) -> usize {
        self.points.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Orbit(steps={}, dt={}, closure_residual={:.3e})",
            self.points.len().saturating_sub(1),
            self.dt,
            self.closure_residual
        )
    }
}

impl From<&numeric::Orbit> for Orbit {
    fn from(o: &numeric::Orbit) -> Self {
        let source = match o.source {
            numeric::OrbitSource::AlgebraicCertificate => "algebraic-certificate",
            numeric::OrbitSource::Shooting => "shooting",
            numeric::OrbitSource::FreeRun => "free-run",
        };
        Orbit {
            points: o.all_points(),
            dt: o.dt,
            scheme: o.scheme.as_str().to_string(),
            source: source.to_string(),
            closure_residual: o.closure_residual,
            gap: o.gap(),
        }
    }
}

#[pyclass(frozen, skip_from_py_object, get_all, module = "scheme_periods_py")]
#[derive(Clone)]
pub struct ShootingOutcome {
    period: f64,
    converged: bool,
    classification: String,
    residual: f64,
    iterations: usize,
    orbit: Orbit,
}

#[pymethods]
impl ShootingOutcome {
    fn __repr__(&self) -> String {
        format!(
            "ShootingOutcome(period={}, {}, residual={:.3e})",
            self.period, self.classification, self.residual
        )
    }
}

#[pyclass(frozen, skip_from_py_object, get_all, module = "scheme_periods_py")]
pub struct ShootReport {
    certified: Vec<f64>,
    oracle_period: Option<f64>,
    outcomes: Vec<ShootingOutcome>,
    /// Distinct converged periods, doubled for boundary problems.
    distinct: Vec<f64>,
}

/// All built-in models with default parameters.
#[pyfunction]
fn models() -> Vec<Model> {
    catalog().iter().map(Model::from).collect()
}

#[pyfunction]
#[pyo3(signature = (name, params=None))]
fn model(name: &str, params: Params<'_>) -> PyResult<Model> {
    Ok(Model::from(&resolve(name, None, None, params)?.spec))
}

/// Exact search for periods of `n`-step orbits through `x0`.
#[pyfunction]
#[pyo3(signature = (model, n, scheme=None, x0=None, params=None, boundary=false, x_end=None, strategy="auto", max_reductions=None))]
#[allow(clippy::too_many_arguments)]
fn find_periods(
    py: Python<'_>,
    model: &str,
    n: usize,
    scheme: Option<&str>,
    x0: State<'_>,
    params: Params<'_>,
    boundary: bool,
    x_end: State<'_>,
    strategy: &str,
    max_reductions: Option<u64>,
) -> PyResult<PeriodSearch> {
    let r = resolve(model, scheme, x0, params)?;
    let p = problem(&r, n, boundary, x_end)?;
    let strategy: Strategy = strategy.parse().map_err(to_py)?;
    let cfg = elimination(max_reductions);
    let res = py.detach(|| eliminate_to_period(&p, strategy, &cfg)).map_err(to_py)?;
    Ok(PeriodSearch {
        status: res.status.as_str().to_string(),
        strategy: res.strategy.as_str().to_string(),
        eliminant: res.eliminant.as_ref().map(|e| e.poly.coeffs().to_vec()),
        deflation: res.eliminant.as_ref().map_or(0, |e| e.deflation),
        certificates: res
            .certificates
            .iter()
            .map(|c| Certificate { inner: c.clone() })
            .collect(),
        boundary,
        diagnostics: res.diagnostics.clone(),
        seconds: res.elapsed.as_secs_f64(),
        exit_code: res.status.exit_code(),
    })
}

/// Iterate the scheme `steps` times from `x0` with step `dt`.
#[pyfunction]
#[pyo3(signature = (model, dt, steps, scheme=None, x0=None, params=None))]
fn run_orbit(
    py: Python<'_>,
    model: &str,
    dt: f64,
    steps: usize,
    scheme: Option<&str>,
    x0: State<'_>,
    params: Params<'_>,
) -> PyResult<Orbit> {
    let r = resolve(model, scheme, x0, params)?;
    let s = build_scheme(r.kind, &r.spec.field).map_err(to_py)?;
    let x0: Vec<f64> = r.x0.iter().map(scalar_to_f64).collect();
    let o = py.detach(|| numeric::run_orbit(&s, &x0, dt, steps)).map_err(to_py)?;
    Ok(Orbit::from(&o))
}

/// Gauss-Newton shooting seeded by the certified periods and a reference trajectory.
#[pyfunction]
#[pyo3(signature = (model, n, scheme=None, x0=None, params=None, boundary=false, x_end=None, strategy="auto", h=1e-3))]
#[allow(clippy::too_many_arguments)]
fn shoot(
    py: Python<'_>,
    model: &str,
    n: usize,
    scheme: Option<&str>,
    x0: State<'_>,
    params: Params<'_>,
    boundary: bool,
    x_end: State<'_>,
    strategy: &str,
    h: f64,
) -> PyResult<ShootReport> {
    let r = resolve(model, scheme, x0, params)?;
    let p = problem(&r, n, boundary, x_end)?;
    let strategy: Strategy = strategy.parse().map_err(to_py)?;
    let cfg = elimination(None);
    let field = &r.spec.field;
    let (certified, oracle, outcomes) = py
        .detach(|| -> scheme_periods::Result<_> {
            let search = eliminate_to_period(&p, strategy, &cfg)?;
            let certified: Vec<f64> = search.certificates.iter().map(|c| c.value).collect();
            let oracle = numeric::poincare_period(
                field,
                &p.initial_f64(),
                &OracleConfig {
                    h,
                    ..OracleConfig::default()
                },
            )
            .ok();
            let shoot_cfg = ShootConfig::default();
            let outcomes = match oracle {
                Some(t) => numeric::shoot_seeded(&p, &certified, if boundary { t / 2.0 } else { t }, h, &shoot_cfg)?,
                None => numeric::shoot_from_periods(&p, &certified, &shoot_cfg),
            };
            Ok((certified, oracle, outcomes))
        })
        .map_err(to_py)?;
    let scale = if boundary { 2.0 } else { 1.0 };
    let distinct = numeric::distinct_solutions(&outcomes, 1e-6)
        .iter()
        .map(|o| scale * o.period)
        .collect();
    let outcomes = outcomes
        .iter()
        .map(|o| ShootingOutcome {
            period: o.period,
            converged: o.converged,
            classification: o.classification.as_str().to_string(),
            residual: *o.residual_history.last().unwrap_or(&f64::INFINITY),
            iterations: o.residual_history.len().saturating_sub(1),
            orbit: Orbit::from(&o.orbit),
        })
        .collect();
    Ok(ShootReport {
        certified,
        oracle_period: oracle,
        outcomes,
        distinct,
    })
}

/// Period of the exact flow through `x0`, from a fine Runge-Kutta run.
#[pyfunction]
#[pyo3(signature = (model, x0=None, params=None, h=1e-3, horizon=1000.0))]
fn oracle_period(
    py: Python<'_>,
    model: &str,
    x0: State<'_>,
    params: Params<'_>,
    h: f64,
    horizon: f64,
) -> PyResult<f64> {
    let r = resolve(model, None, x0, params)?;
    let x0: Vec<f64> = r.x0.iter().map(scalar_to_f64).collect();
    let cfg = OracleConfig {
        h,
        horizon,
        ..OracleConfig::default()
    };
    py.detach(|| numeric::poincare_period(&r.spec.field, &x0, &cfg))
        .map_err(to_py)
}

fn order(name: &str, split: usize) -> PyResult<MonomialOrder> {
    match name {
        "lex" => Ok(MonomialOrder::Lex),
        "grevlex" | "degrevlex" => Ok(MonomialOrder::DegRevLex),
        "block" => Ok(MonomialOrder::Block { split }),
        _ => Err(PyValueError::new_err(format!("unknown monomial order `{name}`"))),
    }
}

fn system(generators: &[String], variables: &[String], order: MonomialOrder) -> PyResult<PolySystem> {
    let ring = Ring::new(variables.iter().cloned());
    let gens = generators
        .iter()
        .map(|g| Polynomial::parse(&ring, g))
        .collect::<scheme_periods::Result<Vec<_>>>()
        .map_err(to_py)?;
    PolySystem::new(&ring, gens, order).map_err(to_py)
}

/// Reduced Groebner basis, as strings.
#[pyfunction]
#[pyo3(signature = (generators, variables, order="grevlex", split=1, max_reductions=DEFAULT_MAX_REDUCTIONS))]
fn groebner_basis(
    py: Python<'_>,
    generators: Vec<String>,
    variables: Vec<String>,
    order: &str,
    split: usize,
    max_reductions: u64,
) -> PyResult<Vec<String>> {
    let sys = system(&generators, &variables, self::order(order, split)?)?;
    let cfg = GroebnerConfig {
        max_reductions,
        ..GroebnerConfig::default()
    };
    let gb = py.detach(|| groebner::buchberger(&sys, &cfg)).map_err(to_py)?;
    Ok(gb.basis.iter().map(|p| p.to_string()).collect())
}

/// Generators of the ideal intersected with the polynomials in `keep`.
#[pyfunction]
#[pyo3(signature = (generators, variables, keep, max_reductions=DEFAULT_MAX_REDUCTIONS))]
fn eliminate(
    py: Python<'_>,
    generators: Vec<String>,
    variables: Vec<String>,
    keep: Vec<String>,
    max_reductions: u64,
) -> PyResult<Vec<String>> {
    let sys = system(&generators, &variables, MonomialOrder::DegRevLex)?;
    let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
    let cfg = GroebnerConfig {
        max_reductions,
        ..GroebnerConfig::default()
    };
    let gens = py
        .detach(|| groebner::elimination_ideal(&sys, &keep, &cfg))
        .map_err(to_py)?;
    Ok(gens.iter().map(|p| p.to_string()).collect())
}

#[pymodule]
pub fn scheme_periods_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<PeriodSearch>()?;
    m.add_class::<Orbit>()?;
    m.add_class::<ShootingOutcome>()?;
    m.add_class::<ShootReport>()?;
    m.add_function(wrap_pyfunction!(models, m)?)?;
    m.add_function(wrap_pyfunction!(model, m)?)?;
    m.add_function(wrap_pyfunction!(find_periods, m)?)?;
    m.add_function(wrap_pyfunction!(run_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_period, m)?)?;
    m.add_function(wrap_pyfunction!(groebner_basis, m)?)?;
    m.add_function(wrap_pyfunction!(eliminate, m)?)?;
    Ok(())
}
