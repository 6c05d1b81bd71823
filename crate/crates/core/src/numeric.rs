//! Floating-point layer: implicit stepping, orbits, least-squares shooting
//! and a Runge–Kutta reference integrator.
//!
//! Residuals are always the cleared-denominator polynomials of the scheme or
//! the periodicity problem, compiled to `f64`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{scalar_from_f64, scalar_to_f64, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::periodicity::PeriodicityProblem;
use crate::schemes::{kahan_rational_map, SchemeKind, SchemeSystem, VectorField, DT};

/// A polynomial compiled for fast `f64` evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let factors = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                (scalar_to_f64(c), factors)
            })
            .collect();
        FloatPoly { terms }
    }

    fn term(c: f64, factors: &[(usize, u32)], x: &[f64]) -> f64 {
        factors.iter().fold(c, |acc, &(i, e)| acc * x[i].powi(e as i32))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, f)| Self::term(*c, f, x)).sum()
    }

    /// Value and the sum of absolute term values (a round-off scale).
    pub fn eval_with_scale(&self, x: &[f64]) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(v, s), (c, f)| {
            let t = Self::term(*c, f, x);
            (v + t, s + t.abs())
        })
    }
}

/// Compiled residuals with their sparse Jacobian with respect to a chosen
/// list of ring variables.
#[derive(Clone, Debug)]
struct CompiledSystem {
    residuals: Vec<FloatPoly>,
    /// For each residual: `(column, derivative)` over the unknowns.
    jacobian: Vec<Vec<(usize, FloatPoly)>>,
    columns: usize,
}

impl CompiledSystem {
    fn new(polys: &[Polynomial], unknowns: &[usize]) -> Self {
        let residuals = polys.iter().map(FloatPoly::new).collect();
        let jacobian = polys
            .iter()
            .map(|p| {
                unknowns
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| p.involves(v))
                    .map(|(col, &v)| (col, FloatPoly::new(&p.derivative_index(v))))
                    .collect()
            })
            .collect();
        CompiledSystem {
            residuals,
            jacobian,
            columns: unknowns.len(),
        }
    }

    fn values(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.residuals.len(), self.residuals.iter().map(|r| r.eval(x)))
    }

    fn max_scaled(&self, x: &[f64]) -> (f64, f64) {
        self.residuals.iter().fold((0.0f64, 0.0f64), |(m, s), r| {
            let (v, sc) = r.eval_with_scale(x);
            (m.max(v.abs()), s.max(sc))
        })
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.residuals.len(), self.columns);
        for (row, entries) in self.jacobian.iter().enumerate() {
            for (col, d) in entries {
                j[(row, *col)] = d.eval(x);
            }
        }
        j
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Settings for [`Stepper`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Residual max-norm target, relative to the round-off scale of the
    /// residual terms (never below an absolute `tolerance`).
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tolerance: 1e-13,
            max_iterations: 50,
            max_halvings: 8,
        }
    }
}

/// One-step solver for a scheme: solves the residuals for the advanced
/// state by damped Newton seeded at the current state.
#[derive(Clone, Debug)]
pub struct Stepper {
    kind: SchemeKind,
    dim: usize,
    current: Vec<usize>,
    advanced: Vec<usize>,
    dt: usize,
    nvars: usize,
    system: CompiledSystem,
    linear: bool,
    pub config: NewtonConfig,
}

impl Stepper {
    pub fn new(scheme: &SchemeSystem) -> Self {
        let ring = &scheme.ring;
        let idx = |names: Vec<String>| -> Vec<usize> { names.iter().map(|n| ring.index_of(n).unwrap()).collect() };
        let current = idx(scheme.current_vars());
        let advanced = idx(scheme.advanced_vars());
        Stepper {
            kind: scheme.kind,
            dim: scheme.field.dimension(),
            dt: ring.index_of(DT).unwrap(),
            nvars: ring.nvars(),
            system: CompiledSystem::new(&scheme.residuals, &advanced),
            linear: scheme.is_linear_in_advanced(),
            current,
            advanced,
            config: NewtonConfig::default(),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    fn point(&self, x: &[f64], xh: &[f64], dt: f64) -> Vec<f64> {
        let mut pt = vec![0.0; self.nvars];
        for i in 0..self.dim {
            pt[self.current[i]] = x[i];
            pt[self.advanced[i]] = xh[i];
        }
        pt[self.dt] = dt;
        pt
    }

    /// Max-norm of the scheme residuals at `(x, x̂, dt)`.
    pub fn residual(&self, x: &[f64], xh: &[f64], dt: f64) -> f64 {
        self.system.max_scaled(&self.point(x, xh, dt)).0
    }

    fn newton_direction(&self, pt: &[f64]) -> Option<DVector<f64>> {
        let j = self.system.jacobian(pt);
        let r = self.system.values(pt);
        j.lu().solve(&(-r))
    }

    /// Advance one step from `x`.
    pub fn step(&self, x: &[f64], dt: f64) -> Result<Vec<f64>> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::StepFailure(format!("step size must be positive, got {dt}")));
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let singular = || Error::StepFailure(format!("singular step matrix at dt = {dt}"));
        let mut y = x.to_vec();
        if self.linear {
            // affine in x̂: one solve, one refinement
            for _ in 0..2 {
                let d = self.newton_direction(&self.point(x, &y, dt)).ok_or_else(singular)?;
                for (yi, di) in y.iter_mut().zip(d.iter()) {
                    *yi += di;
                }
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(singular());
            }
            return Ok(y);
        }
        let cfg = &self.config;
        let (mut norm, mut scale) = self.system.max_scaled(&self.point(x, &y, dt));
        for _ in 0..cfg.max_iterations {
            if norm <= cfg.tolerance * scale.max(1.0) {
                return Ok(y);
            }
            let d = self.newton_direction(&self.point(x, &y, dt)).ok_or_else(singular)?;
            let mut lambda = 1.0;
            let mut trial = y.clone();
            let mut trial_eval = (f64::INFINITY, 0.0);
            for _ in 0..=cfg.max_halvings {
                trial = y.iter().zip(d.iter()).map(|(a, b)| a + lambda * b).collect();
                trial_eval = self.system.max_scaled(&self.point(x, &trial, dt));
                if trial_eval.0 < norm {
                    break;
                }
                lambda *= 0.5;
            }
            let step = max_norm(&d.iter().map(|v| v * lambda).collect::<Vec<_>>());
            y = trial;
            (norm, scale) = trial_eval;
            if step <= 4.0 * f64::EPSILON * max_norm(&y).max(1.0) && norm <= 1e3 * cfg.tolerance * scale.max(1.0) {
                return Ok(y);
            }
        }
        if norm <= cfg.tolerance * scale.max(1.0) {
            return Ok(y);
        }
        Err(Error::StepFailure(format!(
            "Newton did not converge in {} iterations at dt = {dt} (residual {norm:.3e}); step too large?",
            cfg.max_iterations
        )))
    }
}

/// One step of `scheme` from `x`.
pub fn newton_step(scheme: &SchemeSystem, x: &[f64], dt: f64) -> Result<Vec<f64>> {
    Stepper::new(scheme).step(x, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitSource {
    AlgebraicCertificate,
    Shooting,
    FreeRun,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Orbit {
    /// `x_0, ..., x_{n-1}`.
    pub points: Vec<Vec<f64>>,
    /// State after the last step (`x_n`).
    pub last: Vec<f64>,
    pub dt: f64,
    pub scheme: SchemeKind,
    /// Max-norm of all step residuals, the last one taken towards `x_0`.
    pub closure_residual: f64,
    pub source: OrbitSource,
}

impl Orbit {
    pub fn steps(&self) -> usize {
        self.points.len()
    }

    /// Every point including the final state.
    pub fn all_points(&self) -> Vec<Vec<f64>> {
        let mut v = self.points.clone();
        v.push(self.last.clone());
        v
    }

    /// `max |x_n - x_0|`.
    pub fn gap(&self) -> f64 {
        self.last
            .iter()
            .zip(&self.points[0])
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `steps` applications of the stepper from `x0`.
pub fn run_orbit_with(stepper: &Stepper, x0: &[f64], dt: f64, steps: usize) -> Result<Orbit> {
    if steps == 0 {
        return Err(Error::Invalid("an orbit needs at least one step".into()));
    }
    let mut points = Vec::with_capacity(steps);
    let mut x = x0.to_vec();
    for k in 0..steps {
        let next = stepper.step(&x, dt).map_err(|e| Error::OrbitFailure {
            index: k,
            reason: e.to_string(),
        })?;
        points.push(std::mem::replace(&mut x, next));
    }
    let mut closure: f64 = 0.0;
    for k in 0..steps {
        let next = if k + 1 < steps { &points[k + 1] } else { &points[0] };
        closure = closure.max(stepper.residual(&points[k], next, dt));
    }
    Ok(Orbit {
        points,
        last: x,
        dt,
        scheme: stepper.kind(),
        closure_residual: closure,
        source: OrbitSource::FreeRun,
    })
}

pub fn run_orbit(scheme: &SchemeSystem, x0: &[f64], dt: f64, steps: usize) -> Result<Orbit> {
    run_orbit_with(&Stepper::new(scheme), x0, dt, steps)
}

/// Closure residual of the `steps`-step orbit from `x0` for every `dt` in
/// `dts`; failed orbits give `None`. Runs in parallel, ordered as `dts`.
pub fn closure_scan(scheme: &SchemeSystem, x0: &[f64], steps: usize, dts: &[f64]) -> Vec<Option<f64>> {
    let stepper = Stepper::new(scheme);
    dts.par_iter()
        .map(|&dt| run_orbit_with(&stepper, x0, dt, steps).ok().map(|o| o.closure_residual))
        .collect()
}

/// Index of the smallest value of `values` if it is strictly inside.
pub fn interior_minimum(values: &[Option<f64>]) -> Option<usize> {
    let (i, _) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    (i > 0 && i + 1 < values.len()).then_some(i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Periodic,
    SmallResidualPseudo,
    Diverged,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Periodic => "periodic",
            Classification::SmallResidualPseudo => "small-residual-pseudo",
            Classification::Diverged => "diverged",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShootConfig {
    pub max_iterations: usize,
    /// Final residual below which the orbit counts as periodic.
    pub converged: f64,
    /// Band a stagnating residual must stay in to count as a pseudo-solution.
    pub pseudo_low: f64,
    pub pseudo_high: f64,
    pub stagnation_window: usize,
    pub divergence_window: usize,
    /// Relative decrease below which an iteration counts as stagnant.
    pub stagnation_ratio: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            max_iterations: 200,
            converged: 1e-10,
            pseudo_low: 1e-6,
            pseudo_high: 1e-2,
            stagnation_window: 5,
            divergence_window: 10,
            stagnation_ratio: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShootingOutcome {
    pub orbit: Orbit,
    /// `T = n * dt`.
    pub period: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    pub classification: Classification,
}

fn classify(history: &[f64], cfg: &ShootConfig) -> Classification {
    let last = *history.last().unwrap_or(&f64::INFINITY);
    if last < cfg.converged {
        return Classification::Periodic;
    }
    let w = cfg.stagnation_window;
    if history.len() >= w
        && history[history.len() - w..]
            .iter()
            .all(|&r| (cfg.pseudo_low..=cfg.pseudo_high).contains(&r))
    {
        return Classification::SmallResidualPseudo;
    }
    Classification::Diverged
}

fn solve_damped(j: &DMatrix<f64>, f: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    if lambda == 0.0 {
        let svd = j.clone().svd(true, true);
        let tol = 1e-14 * svd.singular_values.max();
        return svd.solve(&(-f), tol).ok();
    }
    let jt = j.transpose();
    let mut a = &jt * j;
    for i in 0..a.nrows() {
        a[(i, i)] += lambda * a[(i, i)].max(1e-12);
    }
    let rhs = -(&jt * f);
    a.cholesky().map(|c| c.solve(&rhs))
}

/// Least-squares Gauss–Newton on all equations of `problem` over the
/// interior points and `T`, with Levenberg–Marquardt damping whenever the
/// plain step fails to reduce the residual.
pub fn gauss_newton_shoot(
    problem: &PeriodicityProblem,
    seed: &[Vec<f64>],
    period: f64,
    cfg: &ShootConfig,
) -> Result<ShootingOutcome> {
    let d = problem.dimension();
    let n = problem.n;
    if seed.len() != n - 1 || seed.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: (n - 1) * d,
            got: seed.iter().map(Vec::len).sum(),
        });
    }
    let layout = problem.variable_layout();
    let system = CompiledSystem::new(&problem.equations, &layout);
    let nvars = problem.ring.nvars();
    let to_ring = |z: &[f64]| {
        let mut pt = vec![0.0; nvars];
        for (slot, v) in layout.iter().zip(z) {
            pt[*slot] = *v;
        }
        pt
    };
    let mut z: Vec<f64> = seed.iter().flatten().copied().chain([period]).collect();
    let mut f = system.values(&to_ring(&z));
    let mut history = vec![f.amax()];
    let mut lambda = 0.0;
    let mut rising = 0;
    for _ in 0..cfg.max_iterations {
        let current = *history.last().unwrap();
        if current < cfg.converged || !current.is_finite() {
            break;
        }
        let j = system.jacobian(&to_ring(&z));
        let norm2 = f.norm();
        let mut accepted = false;
        for _ in 0..16 {
            if let Some(delta) = solve_damped(&j, &f, lambda) {
                let trial: Vec<f64> = z.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
                let ft = system.values(&to_ring(&trial));
                if *trial.last().unwrap() > 0.0 && ft.norm() < norm2 {
                    z = trial;
                    f = ft;
                    accepted = true;
                    lambda = if lambda < 1e-10 { 0.0 } else { lambda / 10.0 };
                    break;
                }
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
        }
        let r = f.amax();
        rising = if r > current { rising + 1 } else { 0 };
        history.push(r);
        if !accepted || rising >= cfg.divergence_window {
            break;
        }
        let w = cfg.stagnation_window;
        if history.len() > w {
            let old = history[history.len() - 1 - w];
            if r > old * (1.0 - cfg.stagnation_ratio) {
                break;
            }
        }
    }
    let mut classification = classify(&history, cfg);
    if rising >= cfg.divergence_window {
        classification = Classification::Diverged;
    }
    let t = *z.last().unwrap();
    let dt = t / n as f64;
    let mut points = vec![problem.initial_f64()];
    points.extend(z[..z.len() - 1].chunks(d).map(<[f64]>::to_vec));
    let orbit = Orbit {
        points,
        last: problem.end_f64(),
        dt,
        scheme: problem.scheme.kind,
        closure_residual: *history.last().unwrap(),
        source: OrbitSource::Shooting,
    };
    Ok(ShootingOutcome {
        orbit,
        period: t,
        converged: classification == Classification::Periodic,
        residual_history: history,
        classification,
    })
}

/// Shoot from each seed in parallel; outcomes in seed order.
pub fn shoot_many(
    problem: &PeriodicityProblem,
    seeds: &[(Vec<Vec<f64>>, f64)],
    cfg: &ShootConfig,
) -> Vec<Result<ShootingOutcome>> {
    seeds
        .par_iter()
        .map(|(pts, t)| gauss_newton_shoot(problem, pts, *t, cfg))
        .collect()
}

/// Converged outcomes with pairwise distinct periods (relative `tol`),
/// sorted by period.
pub fn distinct_solutions(outcomes: &[ShootingOutcome], tol: f64) -> Vec<ShootingOutcome> {
    let mut conv: Vec<&ShootingOutcome> = outcomes.iter().filter(|o| o.converged).collect();
    conv.sort_by(|a, b| a.period.total_cmp(&b.period));
    let mut out: Vec<ShootingOutcome> = Vec::new();
    for o in conv {
        if out
            .last()
            .is_none_or(|p| (o.period - p.period).abs() > tol * p.period.abs())
        {
            out.push(o.clone());
        }
    }
    out
}

/// Round to a dyadic rational with `bits` fractional bits.
fn round_dyadic(x: &Scalar, bits: usize) -> Scalar {
    let scale = BigInt::one() << bits;
    let n = (x * Scalar::from_integer(scale.clone())).round().to_integer();
    Scalar::new(n, scale)
}

/// Interior points of the orbit at period `t` followed forward from the
/// initial point. Kahan steps use the exact step map in rational arithmetic
/// rounded to 256 fractional bits, which keeps strongly expanding orbits
/// accurate; other schemes use [`Stepper`]. `None` if a step fails.
pub fn forward_seed(problem: &PeriodicityProblem, t: f64) -> Option<Vec<Vec<f64>>> {
    let n = problem.n;
    if problem.scheme.kind == SchemeKind::Kahan {
        let map = kahan_rational_map(&problem.scheme.field).ok()?;
        let dt = scalar_from_f64(t / n as f64)?;
        let mut x = problem.initial.clone();
        let mut out = Vec::with_capacity(n - 1);
        for _ in 1..n {
            x = map.apply_exact(&x, &dt)?.iter().map(|v| round_dyadic(v, 256)).collect();
            out.push(x.iter().map(scalar_to_f64).collect());
        }
        return Some(out);
    }
    let orbit = run_orbit(&problem.scheme, &problem.initial_f64(), t / n as f64, n).ok()?;
    Some(orbit.points[1..].to_vec())
}

/// Shoot from the forward orbit at each candidate period (typically the
/// certified roots of the eliminant); candidates without a seed are skipped.
pub fn shoot_from_periods(problem: &PeriodicityProblem, periods: &[f64], cfg: &ShootConfig) -> Vec<ShootingOutcome> {
    let seeds: Vec<(Vec<Vec<f64>>, f64)> = periods
        .par_iter()
        .filter_map(|&t| forward_seed(problem, t).map(|s| (s, t)))
        .collect();
    shoot_many(problem, &seeds, cfg)
        .into_iter()
        .filter_map(|r| r.ok())
        .map(|mut o| {
            o.orbit.source = OrbitSource::AlgebraicCertificate;
            o
        })
        .collect()
}

/// Shooting from two seed families: the forward orbit at each candidate
/// period, and the reference trajectory of the underlying field resampled
/// over `span` (seeded at `T = span`).
/// Failed seeds are dropped; outcomes keep seed order.
pub fn shoot_seeded(
    problem: &PeriodicityProblem,
    candidates: &[f64],
    span: f64,
    h: f64,
    cfg: &ShootConfig,
) -> Result<Vec<ShootingOutcome>> {
    let mut out = shoot_from_periods(problem, candidates, cfg);
    let seed = trajectory_seed(&problem.scheme.field, &problem.initial_f64(), problem.n, span, h)?;
    if let Ok(o) = gauss_newton_shoot(problem, &seed, span, cfg) {
        out.push(o);
    }
    Ok(out)
}

/// Compiled vector field for the reference integrator.
#[derive(Clone, Debug)]
pub struct FloatField {
    comps: Vec<FloatPoly>,
}

impl FloatField {
    pub fn new(field: &VectorField) -> Self {
        FloatField {
            comps: field.components().iter().map(FloatPoly::new).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    fn rk4(&self, x: &[f64], h: f64) -> Vec<f64> {
        let axpy = |a: &[f64], k: &[f64], s: f64| -> Vec<f64> { a.iter().zip(k).map(|(x, k)| x + s * k).collect() };
        let k1 = self.eval(x);
        let k2 = self.eval(&axpy(x, &k1, h / 2.0));
        let k3 = self.eval(&axpy(x, &k2, h / 2.0));
        let k4 = self.eval(&axpy(x, &k3, h));
        (0..x.len())
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Linear interpolation at time `t` inside the covered range.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let k = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.states[k - 1]
            .iter()
            .zip(&self.states[k])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().unwrap()
    }
}

/// Classical fourth-order Runge–Kutta with fixed step `h` up to `t_end`
/// (the last step is shortened to land on `t_end`).
pub fn rk_reference(field: &VectorField, x0: &[f64], t_end: f64, h: f64) -> Result<Trajectory> {
    if h.is_nan() || h <= 0.0 || t_end.is_nan() || t_end < 0.0 {
        return Err(Error::Invalid(format!(
            "need h > 0 and t_end >= 0, got h = {h}, t_end = {t_end}"
        )));
    }
    let f = FloatField::new(field);
    let steps = (t_end / h).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    times.push(0.0);
    states.push(x.clone());
    for k in 0..steps {
        let t = k as f64 * h;
        let hk = h.min(t_end - t);
        x = f.rk4(&x, hk);
        times.push(t + hk);
        states.push(x.clone());
    }
    Ok(Trajectory { times, states })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleConfig {
    pub h: f64,
    pub horizon: f64,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            h: 1e-3,
            horizon: 1000.0,
            tolerance: 1e-12,
        }
    }
}

/// First return time to the hyperplane through `x0` orthogonal to
/// `f(x0)`, crossing in the direction of the flow.
pub fn poincare_period(field: &VectorField, x0: &[f64], cfg: &OracleConfig) -> Result<f64> {
    let f = FloatField::new(field);
    let normal = f.eval(x0);
    if normal.iter().all(|v| *v == 0.0) {
        return Err(Error::Invalid("x0 is an equilibrium".into()));
    }
    let side = |x: &[f64]| -> f64 { x.iter().zip(x0).zip(&normal).map(|((a, b), n)| (a - b) * n).sum() };
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut s_prev = 0.0;
    while t < cfg.horizon {
        let next = f.rk4(&x, cfg.h);
        let s = side(&next);
        if s_prev < 0.0 && s >= 0.0 {
            let (mut lo, mut hi) = (0.0, cfg.h);
            while hi - lo > cfg.tolerance {
                let mid = 0.5 * (lo + hi);
                if side(&f.rk4(&x, mid)) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(t + 0.5 * (lo + hi));
        }
        s_prev = s;
        x = next;
        t += cfg.h;
    }
    Err(Error::NoReturn { horizon: cfg.horizon })
}

/// Interior seed for an `n`-step problem: the reference trajectory from
/// `x0` sampled at `n + 1` uniform times over `[0, span]`, endpoints dropped.
pub fn trajectory_seed(field: &VectorField, x0: &[f64], n: usize, span: f64, h: f64) -> Result<Vec<Vec<f64>>> {
    let traj = rk_reference(field, x0, span, h)?;
    Ok((1..n).map(|k| traj.at(span * k as f64 / n as f64)).collect())
}

/// `true` if all turns of the closed polygon have one orientation and it
/// winds once around its centroid (a star polygon turns uniformly too).
pub fn is_convex_polygon(points: &[Vec<f64>]) -> bool {
    let m = points.len();
    if m < 3 {
        return false;
    }
    let cross = |k: usize| {
        let (a, b, c) = (&points[k], &points[(k + 1) % m], &points[(k + 2) % m]);
        (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
    };
    let signs: Vec<f64> = (0..m).map(cross).collect();
    let uniform = signs.iter().all(|&s| s > 0.0) || signs.iter().all(|&s| s < 0.0);
    let c = [
        points.iter().map(|p| p[0]).sum::<f64>() / m as f64,
        points.iter().map(|p| p[1]).sum::<f64>() / m as f64,
    ];
    uniform && winding_number(points, c) == 1
}

/// Winding number of the closed polygon around `center` (absolute value).
pub fn winding_number(points: &[Vec<f64>], center: [f64; 2]) -> i64 {
    let m = points.len();
    let angle = |p: &Vec<f64>| (p[1] - center[1]).atan2(p[0] - center[0]);
    let mut total = 0.0;
    for k in 0..m {
        let mut d = angle(&points[(k + 1) % m]) - angle(&points[k]);
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    (total / std::f64::consts::TAU).round().abs() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::instantiate;
    use crate::schemes::build_scheme;

    fn scheme(model: &str, kind: SchemeKind) -> SchemeSystem {
        build_scheme(kind, &instantiate(model, &[]).unwrap().field).unwrap()
    }

    #[test]
    fn midpoint_quarter_turn() {
        let y = newton_step(&scheme("linear", SchemeKind::Midpoint), &[0.0, 1.0], 2.0).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-13 && y[1].abs() < 1e-13);
    }

    #[test]
    fn euler_step() {
        let y = newton_step(&scheme("linear", SchemeKind::ExplicitEuler), &[0.0, 1.0], 1.0).unwrap();
        assert_eq!(y, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(newton_step(&scheme("linear", SchemeKind::Midpoint), &[0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn linear_orbit_closes() {
        let dt = 2.0 * (std::f64::consts::PI / 15.0).tan();
        let o = run_orbit(&scheme("linear", SchemeKind::Midpoint), &[0.0, 1.0], dt, 15).unwrap();
        assert!(o.closure_residual < 1e-12);
        for p in o.all_points() {
            assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_linear_period() {
        let f = instantiate("linear", &[]).unwrap().field;
        let t = poincare_period(&f, &[0.0, 1.0], &OracleConfig::default()).unwrap();
        assert!((t - std::f64::consts::TAU).abs() < 1e-8, "{t}");
    }

    #[test]
    fn polygon_checks() {
        let square = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert!(is_convex_polygon(&square));
        assert_eq!(winding_number(&square, [0.0, 0.0]), 1);
        let star: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let a = 4.0 * std::f64::consts::PI * k as f64 / 5.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        assert!(!is_convex_polygon(&star));
        assert_eq!(winding_number(&star, [0.0, 0.0]), 2);
    }
}
