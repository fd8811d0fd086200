//! Command-line front end for `coordproj-core`.
//!
//! Points (columns) and rows are numbered from 1 on the command line and in
//! reports.

pub mod error;
pub mod input;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use coordproj_core::complexity::{
    ell_parameter, gaussian_complexity, min_sign_norm, rademacher_complexity, rademacher_exact, t_parameter,
    theorem13_audit, type_infratype_report, ComplexityKind, SignMethod, SignMode,
};
use coordproj_core::entropy::{covering_estimate, entropy_inequality_audit, ConstantName, FittedConstant};
use coordproj_core::orlicz::{psi_norm, psi_power_identity_check};
use coordproj_core::rotation::{coordinate_jl, normalized_basis, DEFAULT_C_FIT};
use coordproj_core::selector::{almost_isometry_experiment, tail_experiment};
use coordproj_core::shatter::{
    dual_ball_class, is_shattered, l1_domination, vc_convex_hull, vc_dimension, DominationMode, HullMethod,
    PatternAssignment, ShatterConfig, ShatterWitness, DOMINATION_EXACT_MAX,
};
use coordproj_core::{normalized_lp, project, CoordinateSubset, Error, FunctionClass, Norm, RealVector, RngStream};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "coordproj", version, about = "Coordinate projections, shattering and entropy of finite classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random stream.
    #[arg(long, global = true, env = "COORDPROJ_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Also write plot-ready `curve,x,y` rows here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Omit wall-clock timing so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads (1 forces the sequential reference path).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orlicz psi_p norm of each input row.
    Psi(PsiArgs),
    /// Fixed coordinate projection, or random selector experiments.
    Project(ProjectArgs),
    /// Coordinate Johnson-Lindenstrauss embedding.
    Jl(JlArgs),
    /// Shattering dimension of a finite class.
    Shatter(ShatterArgs),
    /// Shattering by the convex hull of a class.
    Hull(HullArgs),
    /// Packing and covering numbers, with the entropy audit.
    Entropy(EntropyArgs),
    /// Gaussian or Rademacher complexity, l_k and t(F, eps).
    Complexity(ComplexityArgs),
    /// Minimum over signs against the Gaussian average.
    Typecmp(TypecmpArgs),
    /// Fitted constant of the Gaussian-complexity entropy integral.
    Audit(AuditArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Psi(_) => "psi",
            Command::Project(_) => "project",
            Command::Jl(_) => "jl",
            Command::Shatter(_) => "shatter",
            Command::Hull(_) => "hull",
            Command::Entropy(_) => "entropy",
            Command::Complexity(_) => "complexity",
            Command::Typecmp(_) => "typecmp",
            Command::Audit(_) => "audit",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PsiArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated coordinates to keep.
    #[arg(long)]
    pub indices: Option<String>,
    /// Selector mean for the random experiments.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Deviation parameter for the tail experiment.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct JlArgs {
    /// Rows are unit vectors in normalized L2.
    #[arg(long, conflicts_with = "basis")]
    pub input: Option<PathBuf>,
    /// Use the normalized basis of L2^N instead of an input file.
    #[arg(long)]
    pub basis: Option<usize>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub cfit: Option<f64>,
    /// Independent runs; run r uses stream r of the seed.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ShatterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub t: f64,
    /// Test only this set of points instead of computing vc(F, t).
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub max_points: usize,
    #[arg(long, default_value_t = 64)]
    pub max_functions: usize,
    #[arg(long, default_value_t = 20)]
    pub max_domain: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullMethodArg {
    Joint,
    CuttingPlane,
}

#[derive(Debug, Args, Serialize)]
pub struct HullArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, value_enum, default_value_t = HullMethodArg::Joint)]
    pub method: HullMethodArg,
    #[arg(long, default_value_t = 4)]
    pub max_points: usize,
    /// Rows are points of l_inf^k; the class is the vertices of the dual ball.
    #[arg(long)]
    pub dual_ball: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub t_grid: String,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Gaussian,
    Rademacher,
}

impl From<KindArg> for ComplexityKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gaussian => ComplexityKind::Gaussian,
            KindArg::Rademacher => ComplexityKind::Rademacher,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Gaussian)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Enumerate all sign vectors (Rademacher only).
    #[arg(long)]
    pub exact: bool,
    /// Also estimate l_k(F).
    #[arg(long)]
    pub k: Option<usize>,
    /// Also estimate t(F, eps).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TypecmpArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `p` for an l_p norm, or `inf`.
    #[arg(long, default_value = "2")]
    pub norm: String,
    #[arg(long, default_value = "0.25,0.5,1")]
    pub lambdas: String,
    #[arg(long, default_value_t = 8)]
    pub subsets: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
}

/// Protocol text for the default `C_fit`.
pub const C_FIT_PROTOCOL: &str = "smallest C on the grid 0.1, 0.2, ..., 3.0 for which the coordinate JL embedding of the normalized basis of L2^128 at eps = 0.25 has max distortion <= eps on at least half of seeds 0..200";

fn config_of<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn load_class(path: &Path) -> CliResult<FunctionClass> {
    let rows = input::read_rows(path)?;
    let mut class = FunctionClass::new(rows)?;
    if class.max_abs() <= 1.0 {
        class.mark_bounded()?;
    }
    Ok(class)
}

fn load_vectors(path: &Path) -> CliResult<Vec<RealVector>> {
    input::read_rows(path)?
        .into_iter()
        .map(|r| RealVector::new(r).map_err(CliError::from))
        .collect()
}

/// Parses 1-based point numbers into a subset of `{0, .., n-1}`.
fn parse_subset(text: &str, n: usize) -> CliResult<CoordinateSubset> {
    let items: Vec<usize> = input::parse_list(text)?;
    if items.contains(&0) {
        return Err(CliError::Usage("points are numbered from 1".into()));
    }
    Ok(CoordinateSubset::new(items.iter().map(|i| i - 1).collect(), n)?)
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

fn parse_norm(text: &str) -> CliResult<Norm> {
    let norm = match text.trim() {
        "inf" | "sup" => Norm::Sup,
        p => Norm::Lp(p.parse().map_err(|_| CliError::Usage(format!("unknown norm {p:?}")))?),
    };
    norm.validate()?;
    Ok(norm)
}

fn witness_json(w: &ShatterWitness) -> Value {
    let assignment: Vec<Value> = w
        .assignment
        .iter()
        .enumerate()
        .map(|(mask, a)| {
            let pattern: Vec<i32> = (0..w.sigma.len()).map(|k| if mask >> k & 1 == 1 { 1 } else { -1 }).collect();
            match a {
                PatternAssignment::Function(j) => json!({"pattern": pattern, "function": j + 1}),
                PatternAssignment::Weights(v) => json!({"pattern": pattern, "weights": v}),
            }
        })
        .collect();
    json!({
        "sigma": one_based(w.sigma.indices()),
        "level": w.level,
        "scale": w.scale,
        "assignment": assignment,
    })
}

/// Runs one command. Timing is filled in by the caller.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let seed = cli.seed;
    let mut rng = RngStream::new(seed, 0);
    let name = cli.command.name();
    let report = match &cli.command {
        Command::Psi(a) => run_psi(a, Report::new(name, config_of(a), seed))?,
        Command::Project(a) => run_project(a, Report::new(name, config_of(a), seed), &mut rng)?,
        Command::Jl(a) => run_jl(a, Report::new(name, config_of(a), seed), seed)?,
        Command::Shatter(a) => run_shatter(a, Report::new(name, config_of(a), seed))?,
        Command::Hull(a) => run_hull(a, Report::new(name, config_of(a), seed), &mut rng)?,
        Command::Entropy(a) => run_entropy(a, Report::new(name, config_of(a), seed))?,
        Command::Complexity(a) => run_complexity(a, Report::new(name, config_of(a), seed), &mut rng)?,
        Command::Typecmp(a) => run_typecmp(a, Report::new(name, config_of(a), seed), &mut rng)?,
        Command::Audit(a) => run_audit(a, Report::new(name, config_of(a), seed), &mut rng)?,
    };
    Ok(report)
}

fn run_psi(a: &PsiArgs, mut report: Report) -> CliResult<Report> {
    let rows = input::read_rows(&a.input)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let r = psi_norm(row, a.p, a.tol)?;
        let identity = psi_power_identity_check(row, a.p, 1e-8)?;
        report.curve("psi", (i + 1) as f64, r.value);
        out.push(json!({
            "row": i + 1,
            "value": r.value,
            "iterations": r.iterations,
            "residual": r.residual,
            "power_identity_holds": identity,
        }));
    }
    report.results = json!({ "p": a.p, "rows": out });
    Ok(report)
}

fn run_project(a: &ProjectArgs, mut report: Report, rng: &mut RngStream) -> CliResult<Report> {
    let rows = input::read_rows(&a.input)?;
    let n = rows[0].len();
    match (&a.indices, a.delta) {
        (Some(idx), None) => {
            let sigma = parse_subset(idx, n)?;
            let mut out = Vec::new();
            for row in &rows {
                let p = project(row, &sigma)?;
                out.push(json!({
                    "projected": p.as_slice(),
                    "normalized_l2": normalized_lp(&p, 2.0)?,
                    "original_normalized_l2": normalized_lp(row, 2.0)?,
                }));
            }
            report.results = json!({ "sigma": one_based(sigma.indices()), "rows": out });
        }
        (None, Some(delta)) => {
            let mut out = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let mut sub = rng.substream(i as u64);
                let iso = almost_isometry_experiment(row, delta, a.eps, a.trials, &mut sub)?;
                let mut entry = json!({
                    "row": i + 1,
                    "isometry_probability": iso.probability,
                    "empty_draws": iso.empty_draws,
                });
                if let Some(t) = a.t {
                    let tail = tail_experiment(row, delta, t, a.trials, &mut sub)?;
                    for f in &tail.flags {
                        report.flag(f.code());
                    }
                    entry["tail"] = json!({
                        "psi1": tail.psi1,
                        "empirical_prob": tail.empirical_prob,
                        "empirical_two_sided": tail.empirical_two_sided,
                        "chernoff_bound": tail.chernoff_bound,
                        "exact_prob": tail.exact_prob(),
                        "fitted_c": tail.fitted_c,
                        "fitted_c_exact": tail.fitted_c_exact,
                    });
                    if let Some(c) = tail.fitted_c_exact.or(tail.fitted_c) {
                        let inputs: Vec<f64> = row.iter().copied().chain([delta, t, a.trials as f64]).collect();
                        report.constant(&FittedConstant::new(
                            ConstantName::LowerC,
                            c,
                            "c = -ln P{sum (delta_i - delta) a_i > t delta n} * M^2 / (t^2 delta n), M = psi_1 norm of a; exact tail when available, else Monte-Carlo frequency",
                            &inputs,
                        )?);
                    }
                }
                report.curve("isometry_probability", (i + 1) as f64, iso.probability);
                out.push(entry);
            }
            report.results = json!({ "delta": delta, "eps": a.eps, "rows": out });
        }
        _ => return Err(CliError::Usage("give exactly one of --indices or --delta".into())),
    }
    Ok(report)
}

fn run_jl(a: &JlArgs, mut report: Report, seed: u64) -> CliResult<Report> {
    let vectors = match (&a.input, a.basis) {
        (Some(path), None) => load_vectors(path)?,
        (None, Some(n)) if n >= 2 => normalized_basis(n),
        _ => return Err(CliError::Usage("give --input or --basis N (N >= 2)".into())),
    };
    if a.runs == 0 {
        return Err(CliError::Usage("runs must be positive".into()));
    }
    let c_fit = a.cfit.unwrap_or(DEFAULT_C_FIT);
    let outcomes: Vec<Result<_, Error>> = (0..a.runs)
        .into_par_iter()
        .map(|r| coordinate_jl(&vectors, a.eps, c_fit, &mut RngStream::new(seed, r as u64)))
        .collect();
    let mut runs = Vec::with_capacity(a.runs);
    let mut successes = 0;
    for (r, outcome) in outcomes.into_iter().enumerate() {
        let rep = outcome?;
        let success = rep.max_deviation <= a.eps;
        successes += success as usize;
        for f in &rep.flags {
            report.flag(f.code());
        }
        report.curve("max_deviation", r as f64, rep.max_deviation);
        runs.push(json!({
            "run": r,
            "max_deviation": rep.max_deviation,
            "success": success,
            "sigma_size": rep.sigma.len(),
            "target_cardinality": rep.target_cardinality,
            "delta": rep.delta,
            "psi2_max": rep.psi2_max,
            "flags": rep.flags.iter().map(|f| f.code()).collect::<Vec<_>>(),
        }));
    }
    if a.cfit.is_none() {
        report.constant(&FittedConstant::new(ConstantName::UpperC, DEFAULT_C_FIT, C_FIT_PROTOCOL, &[128.0, 0.25, 200.0])?);
    }
    report.results = json!({
        "n": vectors[0].len(),
        "vectors": vectors.len(),
        "c_fit": c_fit,
        "success_frequency": successes as f64 / a.runs as f64,
        "runs": runs,
    });
    Ok(report)
}

fn run_shatter(a: &ShatterArgs, mut report: Report) -> CliResult<Report> {
    let class = load_class(&a.input)?;
    let config = ShatterConfig {
        max_points: a.max_points,
        max_functions: a.max_functions,
        max_domain: a.max_domain,
        ..ShatterConfig::default()
    };
    report.results = match &a.sigma {
        Some(s) => {
            let sigma = parse_subset(s, class.cols())?;
            let w = is_shattered(&class, &sigma, a.t, &config)?;
            json!({
                "sigma": one_based(sigma.indices()),
                "shattered": w.is_some(),
                "witness": w.as_ref().map(witness_json),
            })
        }
        None => {
            let r = vc_dimension(&class, a.t, &config)?;
            json!({
                "vc": r.dimension,
                "subsets_checked": r.subsets_checked,
                "witness": r.witness.as_ref().map(witness_json),
            })
        }
    };
    Ok(report)
}

fn run_hull(a: &HullArgs, mut report: Report, rng: &mut RngStream) -> CliResult<Report> {
    let (class, points) = if a.dual_ball {
        let points = load_vectors(&a.input)?;
        (dual_ball_class(&points)?, Some(points))
    } else {
        (load_class(&a.input)?, None)
    };
    let sigma = match &a.sigma {
        Some(s) => parse_subset(s, class.cols())?,
        None => CoordinateSubset::full(class.cols()),
    };
    let config = ShatterConfig {
        hull_max_points: a.max_points,
        hull_method: match a.method {
            HullMethodArg::Joint => HullMethod::JointLp,
            HullMethodArg::CuttingPlane => HullMethod::CuttingPlane,
        },
        ..ShatterConfig::default()
    };
    let w = vc_convex_hull(&class, &sigma, a.t, &config)?;
    let mut results = json!({
        "sigma": one_based(sigma.indices()),
        "shattered": w.is_some(),
        "witness": w.as_ref().map(witness_json),
    });
    if let Some(points) = points {
        let chosen: Vec<RealVector> = sigma.indices().iter().map(|&i| points[i].clone()).collect();
        let mode = if chosen.len() <= DOMINATION_EXACT_MAX {
            DominationMode::Exact
        } else {
            report.flag("SAMPLED_DOMINATION");
            DominationMode::Sampled { directions: 1000 }
        };
        let d = l1_domination(&chosen, Norm::Sup, mode, rng)?;
        results["l1_domination"] = json!({
            "epsilon_star": d.epsilon_star,
            "minimizer": d.minimizer.as_slice(),
            "exact": mode == DominationMode::Exact,
        });
    }
    report.results = results;
    Ok(report)
}

fn run_entropy(a: &EntropyArgs, mut report: Report) -> CliResult<Report> {
    let class = load_class(&a.input)?;
    let grid: Vec<f64> = input::parse_list(&a.t_grid)?;
    let mut per_t = Vec::new();
    for &t in &grid {
        let est = covering_estimate(&class, t)?;
        if let Some(n) = est.covering_upper() {
            report.curve("covering", t, n as f64);
        }
        report.curve("packing", t, est.packing_lower() as f64);
        per_t.push(json!({
            "t": t,
            "packing_greedy": est.packing_greedy,
            "packing_exact": est.packing_exact,
            "covering_greedy": est.covering_greedy,
            "covering_exact": est.covering_exact,
            "exact": est.exact,
        }));
    }
    let mut results = json!({ "rows": class.rows(), "points": class.cols(), "estimates": per_t });
    if class.bounded_by_one() {
        let audit = entropy_inequality_audit(&class, &grid, a.c, &ShatterConfig::default())?;
        for f in &audit.flags {
            report.flag(f.code());
        }
        report.constant(&audit.constant);
        results["audit"] = json!({
            "c_assumed": audit.c_assumed,
            "k_fit": audit.constant.value,
            "grid": audit.rows.iter().map(|r| json!({
                "t": r.t,
                "covering": r.covering,
                "covering_exact": r.covering_exact,
                "vc": r.vc,
                "ratio": r.ratio,
            })).collect::<Vec<_>>(),
        });
    } else {
        report.flag("UNBOUNDED_CLASS");
    }
    report.results = results;
    Ok(report)
}

fn estimate_json(e: &coordproj_core::complexity::ComplexityEstimate) -> Value {
    json!({ "mean": e.mean, "std_error": e.std_error, "trials": e.trials, "kind": e.kind.name() })
}

fn run_complexity(a: &ComplexityArgs, mut report: Report, rng: &mut RngStream) -> CliResult<Report> {
    let class = load_class(&a.input)?;
    let kind: ComplexityKind = a.kind.into();
    let base = match (kind, a.exact) {
        (ComplexityKind::Rademacher, true) => rademacher_exact(&class, None)?,
        (ComplexityKind::Gaussian, true) => return Err(CliError::Usage("--exact applies to rademacher only".into())),
        (ComplexityKind::Gaussian, false) => gaussian_complexity(&class, None, a.trials, &mut rng.substream(0))?,
        (ComplexityKind::Rademacher, false) => rademacher_complexity(&class, None, a.trials, &mut rng.substream(0))?,
    };
    let mut results = json!({ "complexity": estimate_json(&base) });
    if let Some(k) = a.k {
        let e = ell_parameter(&class, k, a.trials, kind, &mut rng.substream(1))?;
        results["ell"] = json!({
            "k": k,
            "estimate": estimate_json(&e.estimate),
            "points": one_based(&e.points),
            "method": format!("{:?}", e.method).to_lowercase(),
        });
    }
    if let Some(eps) = a.eps {
        let t = t_parameter(&class, eps, a.k_max, a.trials, kind, &mut rng.substream(2))?;
        if t.capped {
            report.flag("CAPPED");
        }
        for e in &t.per_k {
            report.curve("ell_over_k", e.k as f64, e.estimate.mean / e.k as f64);
        }
        results["t_parameter"] = json!({
            "eps": eps,
            "value": t.value,
            "capped": t.capped,
            "per_k": t.per_k.iter().map(|e| json!({"k": e.k, "estimate": estimate_json(&e.estimate)})).collect::<Vec<_>>(),
        });
    }
    report.results = results;
    Ok(report)
}

fn run_typecmp(a: &TypecmpArgs, mut report: Report, rng: &mut RngStream) -> CliResult<Report> {
    let vectors = load_vectors(&a.input)?;
    let norm = parse_norm(&a.norm)?;
    let lambdas: Vec<f64> = input::parse_list(&a.lambdas)?;
    let minimum = match min_sign_norm(&vectors, norm, SignMode::Exact, &mut rng.substream(0)) {
        Ok(r) => r,
        Err(Error::SizeCap { .. }) => {
            report.flag("HEURISTIC_SIGN_MINIMUM");
            min_sign_norm(&vectors, norm, SignMode::Heuristic, &mut rng.substream(0))?
        }
        Err(e) => return Err(e.into()),
    };
    let t = type_infratype_report(&vectors, norm, &lambdas, a.subsets, a.trials, &mut rng.substream(1))?;
    for row in &t.rows {
        if row.heuristic_used {
            report.flag("HEURISTIC_SUBSET_MINIMUM");
        }
        report.curve("c_emp", row.lambda, row.c_emp);
    }
    report.results = json!({
        "vectors": vectors.len(),
        "min_sign_norm": {
            "value": minimum.value,
            "exact": minimum.method == SignMethod::Exact,
            "signs": minimum.signs,
        },
        "gaussian_average": estimate_json(&t.gaussian_average),
        "rows": t.rows.iter().map(|r| json!({
            "lambda": r.lambda,
            "subset_size": r.subset_size,
            "m_emp": r.m_emp,
            "c_emp": r.c_emp,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

fn run_audit(a: &AuditArgs, mut report: Report, rng: &mut RngStream) -> CliResult<Report> {
    let class = load_class(&a.input)?;
    let audit = theorem13_audit(&class, a.trials, &ShatterConfig::default(), rng)?;
    for f in &audit.flags {
        report.flag(f.code());
    }
    for (t, v) in audit.grid.iter().zip(&audit.vc) {
        report.curve("vc", *t, *v as f64);
    }
    report.constant(&audit.constant);
    report.results = json!({
        "expectation": estimate_json(&audit.expectation),
        "lower_limit": audit.lower_limit,
        "integral": audit.integral,
        "k_fit": audit.constant.value,
    });
    Ok(report)
}
