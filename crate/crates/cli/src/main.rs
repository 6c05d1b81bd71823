//! `scheme-periods` command-line tool.
//!
//! Exit codes: 0 success or roots found, 1 certified empty or a runtime
//! failure, 2 usage error, 3 elimination budget exhausted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use scheme_periods::algebra::{parse_scalar, scalar_to_f64, Scalar};
use scheme_periods::groebner::DEFAULT_MAX_REDUCTIONS;
use scheme_periods::models::{catalog, instantiate, parse_overrides, ModelSpec};
use scheme_periods::numeric::{
    poincare_period, run_orbit, shoot_from_periods, shoot_seeded, OracleConfig, Orbit, ShootConfig,
};
use scheme_periods::periodicity::{
    build_boundary_system, build_cyclic_system, eliminate_to_period, EliminationConfig, PeriodicityProblem, Strategy,
};
use scheme_periods::schemes::{build_scheme, SchemeKind};
use scheme_periods::Error;

#[derive(Parser)]
#[command(
    name = "scheme-periods",
    version,
    about = "Periodic solutions of difference schemes for polynomial ODEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models.
    Models(OutputArgs),
    /// Eliminate the orbit points and certify the positive periods.
    Periods(ProblemArgs),
    /// Step an orbit and write it as CSV.
    Orbit(OrbitArgs),
    /// Gauss-Newton shooting from certified and reference-trajectory seeds.
    Shoot(ShootArgs),
    /// Reference period by first return to a Poincare section.
    Oracle(OracleArgs),
    /// Print the periodicity equations.
    System(ProblemArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long)]
    model: Option<String>,
    /// midpoint, euler or kahan; defaults to kahan for vl and top, midpoint otherwise.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated initial state (exact decimals or fractions).
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Shorthand for `--param eps=...`.
    #[arg(long)]
    eps: Option<String>,
    /// Model parameter override `name=value`; repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
}

#[derive(Args)]
struct ProblemArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of steps per period.
    #[arg(short = 'n')]
    n: usize,
    /// Half-period boundary problem: n/2 steps from x0 to the end state.
    #[arg(long)]
    boundary: bool,
    /// End state for --boundary; defaults to x0 with its second component negated.
    #[arg(long, allow_hyphen_values = true)]
    x_end: Option<String>,
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Buchberger reduction budget.
    #[arg(long, env = "SCHEME_PERIODS_MAX_REDUCTIONS")]
    max_reductions: Option<u64>,
    /// Degree cap in T for map composition.
    #[arg(long, env = "SCHEME_PERIODS_MAX_DEGREE")]
    max_degree: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'n')]
    n: Option<usize>,
    /// Period; the step is T/n.
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Number of steps; defaults to n.
    #[arg(long)]
    count: Option<usize>,
    /// JSON written by `periods`; its config and a certificate supply the rest.
    #[arg(long)]
    from: Option<PathBuf>,
    /// Certificate index within --from.
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ShootArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Reference integrator step.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = 1000.0)]
    horizon: f64,
    #[command(flatten)]
    out: OutputArgs,
}

/// Everything needed to rebuild a problem; echoed into JSON results.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunConfig {
    model: String,
    scheme: SchemeKind,
    n: usize,
    x0: Vec<String>,
    boundary: bool,
    x_end: Option<Vec<String>>,
    params: BTreeMap<String, String>,
    strategy: Strategy,
    max_reductions: u64,
    max_composition_degree: usize,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownModel(_)
            | Error::UnknownParameter { .. }
            | Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::NotQuadratic { .. }
            | Error::Invalid(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn parse_state(text: &str) -> Result<Vec<Scalar>, Failure> {
    text.split(',')
        .map(|v| parse_scalar(v).map_err(Failure::from))
        .collect()
}

fn show(s: &[Scalar]) -> Vec<String> {
    s.iter().map(|v| v.to_string()).collect()
}

struct Resolved {
    spec: ModelSpec,
    kind: SchemeKind,
    x0: Vec<Scalar>,
    params: BTreeMap<String, String>,
}

fn resolve_model(args: &ModelArgs) -> Result<Resolved, Failure> {
    let name = args
        .model
        .as_deref()
        .ok_or_else(|| Failure::Usage("--model is required".into()))?;
    let mut items: Vec<String> = args.params.clone();
    if let Some(e) = &args.eps {
        items.push(format!("eps={e}"));
    }
    let overrides = parse_overrides(items.iter().map(String::as_str))?;
    let spec = instantiate(name, &overrides)?;
    let kind = match &args.scheme {
        Some(s) => s.parse()?,
        None if matches!(name, "vl" | "top") => SchemeKind::Kahan,
        None => SchemeKind::Midpoint,
    };
    let x0 = match &args.x0 {
        Some(t) => parse_state(t)?,
        None => spec.default_x0.clone(),
    };
    if x0.len() != spec.dimension() {
        return Err(Failure::Usage(format!("x0 needs {} components", spec.dimension())));
    }
    let params = spec
        .parameters
        .iter()
        .map(|(k, v)| (k.clone(), v.to_string()))
        .collect();
    Ok(Resolved { spec, kind, x0, params })
}

fn run_config(args: &ProblemArgs) -> Result<RunConfig, Failure> {
    let r = resolve_model(&args.model)?;
    let x_end = if args.boundary {
        Some(match &args.x_end {
            Some(t) => parse_state(t)?,
            None => {
                let mut e = r.x0.clone();
                if e.len() > 1 {
                    e[1] = -e[1].clone();
                }
                e
            }
        })
    } else {
        None
    };
    Ok(RunConfig {
        model: r.spec.name.to_string(),
        scheme: r.kind,
        n: args.n,
        x0: show(&r.x0),
        boundary: args.boundary,
        x_end: x_end.as_deref().map(show),
        params: r.params,
        strategy: args.strategy.parse()?,
        max_reductions: args.max_reductions.unwrap_or(DEFAULT_MAX_REDUCTIONS),
        max_composition_degree: args
            .max_degree
            .unwrap_or(EliminationConfig::default().max_composition_degree),
    })
}

struct Built {
    spec: ModelSpec,
    problem: PeriodicityProblem,
    elimination: EliminationConfig,
}

impl RunConfig {
    /// Steps in the problem: `n`, or `n/2` for the half-period boundary variant.
    fn problem_steps(&self) -> usize {
        if self.boundary {
            self.n / 2
        } else {
            self.n
        }
    }

    fn build(&self) -> Result<Built, Failure> {
        let items: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let spec = instantiate(&self.model, &parse_overrides(items.iter().map(String::as_str))?)?;
        let scheme = build_scheme(self.scheme, &spec.field)?;
        let x0 = self.x0.iter().map(|v| parse_scalar(v)).collect::<Result<Vec<_>, _>>()?;
        let problem = match &self.x_end {
            Some(end) => {
                if !self.n.is_multiple_of(2) || self.n < 4 {
                    return Err(Failure::Usage("--boundary needs an even n >= 4".into()));
                }
                let end = end.iter().map(|v| parse_scalar(v)).collect::<Result<Vec<_>, _>>()?;
                build_boundary_system(&scheme, self.problem_steps(), &x0, &end)?
            }
            None => build_cyclic_system(&scheme, self.n, &x0)?,
        };
        let mut elimination = EliminationConfig::default();
        elimination.groebner.max_reductions = self.max_reductions;
        elimination.max_composition_degree = self.max_composition_degree;
        Ok(Built {
            spec,
            problem,
            elimination,
        })
    }
}

fn emit(out: &OutputArgs, body: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_models(out: &OutputArgs) -> Outcome {
    let models = catalog();
    let body = match out.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&serde_json::to_value(models.iter().map(|m| m.summary()).collect::<Vec<_>>()).unwrap()),
        _ => {
            let mut s = String::new();
            for m in &models {
                let sum = m.summary();
                writeln!(
                    s,
                    "{:<7} dim {}  {}  x0 = ({})",
                    sum.name,
                    sum.dimension,
                    sum.equations.join(", "),
                    sum.default_x0.join(", ")
                )
                .unwrap();
            }
            s
        }
    };
    emit(out, &body)?;
    Ok(0)
}

fn cmd_periods(args: &ProblemArgs) -> Outcome {
    let cfg = run_config(args)?;
    let built = cfg.build()?;
    let started = Instant::now();
    let r = eliminate_to_period(&built.problem, cfg.strategy, &built.elimination)?;
    let seconds = started.elapsed().as_secs_f64();
    let certificates: Vec<Value> = r
        .certificates
        .iter()
        .map(|c| {
            let mut v = json!({"lo": c.lo.to_string(), "hi": c.hi.to_string(), "value": c.value});
            if cfg.boundary {
                v["t_half"] = json!(c.value);
                v["t_full"] = json!(2.0 * c.value);
            }
            v
        })
        .collect();
    let eliminant: Option<Vec<String>> = r
        .eliminant
        .as_ref()
        .map(|e| e.poly.coeffs().iter().map(|c| c.to_string()).collect());
    let result = json!({
        "config": cfg,
        "status": r.status.as_str(),
        "strategy": r.strategy.as_str(),
        "eliminant": eliminant,
        "deflation": r.eliminant.as_ref().map(|e| e.deflation),
        "certificates": certificates,
        "diagnostics": r.diagnostics,
        "timing": {"seconds": seconds},
    });
    let body = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&result),
        _ => {
            let mut s = format!(
                "status {} via {} in {seconds:.3} s\n",
                r.status.as_str(),
                r.strategy.as_str()
            );
            if let Some(e) = &r.eliminant {
                writeln!(
                    s,
                    "eliminant degree {} after removing T^{}",
                    e.poly.degree(),
                    e.deflation
                )
                .unwrap();
            }
            for c in &r.certificates {
                write!(
                    s,
                    "T = {:.12} in [{:.15}, {:.15}]",
                    c.value,
                    scalar_to_f64(&c.lo),
                    scalar_to_f64(&c.hi)
                )
                .unwrap();
                if cfg.boundary {
                    write!(s, "  T_full = {:.12}", 2.0 * c.value).unwrap();
                }
                s.push('\n');
            }
            s
        }
    };
    emit(&args.out, &body)?;
    Ok(r.status.exit_code() as u8)
}

fn orbit_csv(orbit: &Orbit, names: &[String]) -> String {
    let mut s = format!("k,t,{}\n", names.join(","));
    for (k, p) in orbit.all_points().iter().enumerate() {
        let cols: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{k},{},{}", k as f64 * orbit.dt, cols.join(",")).unwrap();
    }
    s
}

fn cmd_orbit(args: &OrbitArgs) -> Outcome {
    let (spec, kind, x0, dt, count, problem) = match &args.from {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let v: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let cfg: RunConfig = serde_json::from_value(v["config"].clone())
                .map_err(|e| Failure::Usage(format!("{}: bad config: {e}", path.display())))?;
            let t = v["certificates"][args.root]["value"]
                .as_f64()
                .ok_or_else(|| Failure::Usage(format!("no certificate {} in {}", args.root, path.display())))?;
            let built = cfg.build()?;
            let steps = cfg.problem_steps();
            let x0 = built.problem.initial_f64();
            (
                built.spec,
                cfg.scheme,
                x0,
                t / steps as f64,
                args.count.unwrap_or(steps),
                Some((built.problem, t)),
            )
        }
        None => {
            let r = resolve_model(&args.model)?;
            let dt = match (args.dt, args.period, args.n) {
                (Some(dt), None, _) => dt,
                (None, Some(t), Some(n)) => t / n as f64,
                _ => return Err(Failure::Usage("give --dt, or --period with -n, or --from".into())),
            };
            let count = args
                .count
                .or(args.n)
                .ok_or_else(|| Failure::Usage("give --count or -n".into()))?;
            let x0: Vec<f64> = r.x0.iter().map(scalar_to_f64).collect();
            let problem = match (args.period, args.n) {
                (Some(t), Some(n)) if count == n => {
                    let scheme = build_scheme(r.kind, &r.spec.field)?;
                    Some((build_cyclic_system(&scheme, n, &r.x0)?, t))
                }
                _ => None,
            };
            (r.spec, r.kind, x0, dt, count, problem)
        }
    };
    let scheme = build_scheme(kind, &spec.field)?;
    let orbit = run_orbit(&scheme, &x0, dt, count)?;
    // boundary orbits end at x_end rather than x_0
    let residual = match &problem {
        Some((p, t)) if p.is_boundary() && count == p.n => p.residual_norm(&orbit.points[1..], *t)?,
        _ => orbit.closure_residual,
    };
    eprintln!("closure_residual {residual:e} gap {:e}", orbit.gap());
    let body = match args.out.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&json!({"orbit": orbit, "closure_residual": residual})),
        _ => orbit_csv(&orbit, spec.state_names()),
    };
    emit(&args.out, &body)?;
    Ok(0)
}

fn cmd_shoot(args: &ShootArgs) -> Outcome {
    let cfg = run_config(&args.problem)?;
    let built = cfg.build()?;
    let p = &built.problem;
    let started = Instant::now();
    let search = eliminate_to_period(p, cfg.strategy, &built.elimination)?;
    let candidates: Vec<f64> = search.certificates.iter().map(|c| c.value).collect();
    let oracle = poincare_period(
        &built.spec.field,
        &p.initial_f64(),
        &OracleConfig {
            h: args.h,
            ..OracleConfig::default()
        },
    )
    .ok();
    let shoot_cfg = ShootConfig::default();
    let outcomes = match oracle {
        Some(period) => {
            let span = if cfg.boundary { period / 2.0 } else { period };
            shoot_seeded(p, &candidates, span, args.h, &shoot_cfg)?
        }
        None => shoot_from_periods(p, &candidates, &shoot_cfg),
    };
    let seconds = started.elapsed().as_secs_f64();
    let scale = if cfg.boundary { 2.0 } else { 1.0 };
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = json!({
                "period": o.period,
                "classification": o.classification.as_str(),
                "converged": o.converged,
                "residual": o.residual_history.last(),
                "iterations": o.residual_history.len() - 1,
                "source": o.orbit.source,
                "points": o.orbit.all_points(),
            });
            if cfg.boundary {
                v["t_half"] = json!(o.period);
                v["t_full"] = json!(scale * o.period);
            }
            v
        })
        .collect();
    let distinct: Vec<f64> = scheme_periods::numeric::distinct_solutions(&outcomes, 1e-6)
        .iter()
        .map(|o| scale * o.period)
        .collect();
    let result = json!({
        "config": cfg,
        "certified_periods": candidates,
        "oracle_period": oracle,
        "outcomes": rows,
        "distinct_converged": distinct,
        "timing": {"seconds": seconds},
    });
    let body = match args.problem.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&result),
        _ => {
            let mut s = String::new();
            for o in &outcomes {
                writeln!(
                    s,
                    "T = {:.6}  reported {:.6}  {}  residual {:.3e}",
                    o.period,
                    scale * o.period,
                    o.classification.as_str(),
                    o.residual_history.last().unwrap()
                )
                .unwrap();
            }
            writeln!(s, "distinct converged: {distinct:?}").unwrap();
            s
        }
    };
    emit(&args.problem.out, &body)?;
    Ok(if distinct.is_empty() { 1 } else { 0 })
}

fn cmd_oracle(args: &OracleArgs) -> Outcome {
    let r = resolve_model(&args.model)?;
    let x0: Vec<f64> = r.x0.iter().map(scalar_to_f64).collect();
    let cfg = OracleConfig {
        h: args.h,
        horizon: args.horizon,
        ..OracleConfig::default()
    };
    let period = poincare_period(&r.spec.field, &x0, &cfg)?;
    let body = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "model": r.spec.name,
            "x0": show(&r.x0),
            "params": r.params,
            "period": period,
            "h": cfg.h,
            "tolerance": cfg.tolerance,
        })),
        _ => format!("{period}\n"),
    };
    emit(&args.out, &body)?;
    Ok(0)
}

fn cmd_system(args: &ProblemArgs) -> Outcome {
    let cfg = run_config(args)?;
    let built = cfg.build()?;
    let eqs: Vec<String> = built.problem.equations.iter().map(|e| e.to_text()).collect();
    let body = match args.out.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&json!({
            "config": cfg,
            "variables": built.problem.ring.names(),
            "equations": eqs,
        })),
        _ => eqs.iter().map(|e| format!("{e}\n")).collect(),
    };
    emit(&args.out, &body)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Models(out) => cmd_models(out),
        Command::Periods(a) => cmd_periods(a),
        Command::Orbit(a) => cmd_orbit(a),
        Command::Shoot(a) => cmd_shoot(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::System(a) => cmd_system(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
