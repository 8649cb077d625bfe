//! deltasat: generate hard balanced Max-E3SAT instances, solve them with the
//! continuous-time solver or the WalkSAT baseline, verify assignments, and
//! run time/memory scaling benchmarks.
//!
//! Exit codes: 0 success (threshold reached for solve), 1 threshold not
//! reached, 2 input error, 3 I/O failure, 4 numeric failure, 5 insufficient
//! data for a fit.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use deltasat::bench::{
    censored_fraction_by_n, fit_scaling, median_time_per_n, parse_csv, run_sweep, SolverId,
    SweepSpec,
};
use deltasat::dmm::DmmError;
use deltasat::fit::{FitError, ScalingModel};
use deltasat::instance::{
    emit_dimacs, emit_xcnf, generate_balanced_xorsat, generate_planted_xorsat, parse_dimacs,
    DimacsError, GenerateError, InstanceMetadata,
};
use deltasat::result::threshold_count;
use deltasat::{solve_dmm, solve_sls, Assignment, CnfFormula, SolveResult, StopReason};

use config::{GenerateConfig, SolveConfig};

const EXIT_OK: i32 = 0;
const EXIT_NOT_REACHED: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_NUMERIC: i32 = 4;
const EXIT_INSUFFICIENT: i32 = 5;

#[derive(Parser)]
#[command(
    name = "deltasat",
    version,
    about = "Balanced delta-Max-E3SAT toolkit: generate, solve, verify, bench, fit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a balanced 3-XORSAT instance and its CNF expansion
    Generate(GenerateArgs),
    /// Solve a DIMACS CNF instance to an unsat-fraction threshold
    Solve(SolveArgs),
    /// Count unsatisfied clauses of an assignment against a CNF file
    Verify(VerifyArgs),
    /// Run a solver x size x seed sweep, appending rows to a CSV
    Bench(BenchArgs),
    /// Fit scaling models to a sweep CSV
    Fit(FitArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Variable count
    #[arg(short = 'n', long)]
    n: Option<usize>,
    /// XOR clause density (clauses per variable)
    #[arg(long = "rho")]
    rho_xor: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Plant a satisfying assignment (parities derived from a seeded
    /// assignment; writes a .plant file)
    #[arg(long)]
    planted: bool,
    /// Output directory
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// key = value config file (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS CNF input
    cnf: Option<PathBuf>,
    #[arg(long)]
    solver: Option<SolverId>,
    /// Stop once best unsat <= floor(threshold * M)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Long-term memory cap (number or `auto`)
    #[arg(long)]
    xl_max: Option<String>,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    eval_stride: Option<u64>,
    #[arg(long)]
    sample_stride: Option<u64>,
    #[arg(long)]
    adaptive_dt: Option<bool>,
    /// WalkSAT noise probability
    #[arg(long)]
    noise: Option<f64>,
    /// WalkSAT flips per restart (number or `auto` = 100 per variable)
    #[arg(long)]
    max_flips: Option<String>,
    #[arg(long)]
    max_restarts: Option<u64>,
    /// Write the result as JSON
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Print the best assignment as a competition-style v line
    #[arg(long)]
    print_assignment: bool,
    /// key = value config file (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct VerifyArgs {
    cnf: PathBuf,
    /// Assignment file: 0/1 digits in variable order, or `v` lines of
    /// signed literals
    assignment: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Sweep spec as a key = value file (defaults to the desk-scale sweep)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output CSV (appended to; already-present cells are skipped)
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Print the resolved sweep spec and exit
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct FitArgs {
    csv: PathBuf,
    /// Restrict to one solver (default: every solver present)
    #[arg(long)]
    solver: Option<SolverId>,
    /// Model to report: power_law, exponential, or auto (both + choice)
    #[arg(long, default_value = "auto")]
    model: String,
    /// Emit JSON instead of aligned text
    #[arg(long)]
    json: bool,
}

struct CodedError {
    code: i32,
    err: anyhow::Error,
}

impl CodedError {
    fn new(code: i32, err: anyhow::Error) -> Self {
        Self { code, err }
    }
}

trait Coded<T> {
    fn code(self, code: i32) -> Result<T, CodedError>;
}

impl<T, E: Into<anyhow::Error>> Coded<T> for Result<T, E> {
    fn code(self, code: i32) -> Result<T, CodedError> {
        self.map_err(|e| CodedError::new(code, e.into()))
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Fit(args) => cmd_fit(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {:#}", e.err);
            std::process::exit(e.code);
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<i32, CodedError> {
    let mut config = GenerateConfig::default();
    if let Some(path) = &args.config {
        config.load_file(path).code(EXIT_INPUT)?;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(rho) = args.rho_xor {
        config.rho_xor = rho;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.planted {
        config.planted = true;
    }
    if args.print_config {
        print!("{}", config.to_config_string());
        return Ok(EXIT_OK);
    }

    let out_dir = args
        .out
        .ok_or_else(|| anyhow!("--out DIR is required"))
        .code(EXIT_INPUT)?;

    let (xor, plant) = if config.planted {
        let (xor, plant) = generate_planted_xorsat(config.n, config.rho_xor, config.seed)
            .map_err(generate_error)?;
        (xor, Some(plant))
    } else {
        let xor = generate_balanced_xorsat(config.n, config.rho_xor, config.seed)
            .map_err(generate_error)?;
        (xor, None)
    };
    let cnf = xor.expand();
    let meta = InstanceMetadata::for_instance(&xor, config.rho_xor);

    std::fs::create_dir_all(&out_dir).code(EXIT_IO)?;
    let base = format!("d{}_s{}", config.n, config.seed);
    let write = |name: String, text: String| -> Result<PathBuf, CodedError> {
        let path = out_dir.join(name);
        std::fs::write(&path, text).code(EXIT_IO)?;
        Ok(path)
    };
    let xcnf_path = write(format!("{base}.xcnf"), emit_xcnf(&xor))?;
    let cnf_path = write(format!("{base}.cnf"), emit_dimacs(&cnf))?;
    let meta_path = write(format!("{base}.meta.json"), meta.to_json() + "\n")?;
    println!("{}", xcnf_path.display());
    println!("{}", cnf_path.display());
    println!("{}", meta_path.display());
    if let Some(plant) = plant {
        let path = write(format!("{base}.plant"), plant.to_string() + "\n")?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}

fn generate_error(e: GenerateError) -> CodedError {
    CodedError::new(EXIT_INPUT, e.into())
}

fn cmd_solve(args: SolveArgs) -> Result<i32, CodedError> {
    let mut config = SolveConfig::default();
    if let Some(path) = &args.config {
        config.load_file(path).code(EXIT_INPUT)?;
    }
    apply_solve_flags(&mut config, &args).code(EXIT_INPUT)?;
    if args.print_config {
        print!("{}", config.to_config_string());
        return Ok(EXIT_OK);
    }

    let cnf_path = args
        .cnf
        .as_ref()
        .ok_or_else(|| anyhow!("a CNF input file is required"))
        .code(EXIT_INPUT)?;
    let formula = read_formula(cnf_path)?;
    let target = threshold_count(config.threshold, formula.n_clauses());

    let result = match config.solver {
        SolverId::Dmm => {
            let params = config.dmm_params(formula.n_clauses());
            solve_dmm(&formula, &params, config.threshold, config.seed).map_err(|e| match e {
                DmmError::NonFiniteState { .. } => CodedError::new(EXIT_NUMERIC, e.into()),
                DmmError::InvalidParams(_) => CodedError::new(EXIT_INPUT, e.into()),
            })?
        }
        SolverId::Sls => solve_sls(&formula, &config.sls_params(formula.n_vars())),
    };

    print_result(&config, &formula, target, &result);
    if args.print_assignment {
        println!("{}", result.assignment_v_line());
    }
    if let Some(path) = &args.out {
        std::fs::write(path, result.to_json() + "\n").code(EXIT_IO)?;
    }
    Ok(if result.stop_reason == StopReason::ThresholdReached {
        EXIT_OK
    } else {
        EXIT_NOT_REACHED
    })
}

fn apply_solve_flags(config: &mut SolveConfig, args: &SolveArgs) -> Result<()> {
    if let Some(v) = args.solver {
        config.solver = v;
    }
    if let Some(v) = args.threshold {
        config.threshold = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.beta {
        config.beta = v;
    }
    if let Some(v) = args.gamma {
        config.gamma = v;
    }
    if let Some(v) = args.delta {
        config.delta = v;
    }
    if let Some(v) = args.epsilon {
        config.epsilon = v;
    }
    if let Some(v) = args.zeta {
        config.zeta = v;
    }
    if let Some(v) = args.dt {
        config.dt = v;
    }
    if let Some(v) = &args.xl_max {
        config.xl_max = v.parse().map_err(anyhow::Error::msg)?;
    }
    if let Some(v) = args.max_steps {
        config.max_steps = v;
    }
    if let Some(v) = args.eval_stride {
        config.eval_stride = v;
    }
    if let Some(v) = args.sample_stride {
        config.sample_stride = v;
    }
    if let Some(v) = args.adaptive_dt {
        config.adaptive_dt = v;
    }
    if let Some(v) = args.noise {
        if !(0.0..=1.0).contains(&v) {
            anyhow::bail!("noise must be in [0, 1]");
        }
        config.noise = v;
    }
    if let Some(v) = &args.max_flips {
        config.max_flips = v.parse().map_err(anyhow::Error::msg)?;
    }
    if let Some(v) = args.max_restarts {
        config.max_restarts = v;
    }
    if !(0.0..=1.0).contains(&config.threshold) {
        anyhow::bail!("threshold must be in [0, 1]");
    }
    Ok(())
}

fn read_formula(path: &Path) -> Result<CnfFormula, CodedError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .code(EXIT_IO)?;
    let parsed = parse_dimacs(&text).map_err(|e: DimacsError| {
        CodedError::new(EXIT_INPUT, anyhow!("{}: {e}", path.display()))
    })?;
    Ok(parsed.formula)
}

fn print_result(config: &SolveConfig, formula: &CnfFormula, target: usize, r: &SolveResult) {
    println!("solver            {}", config.solver);
    println!("n_vars            {}", formula.n_vars());
    println!("n_clauses         {}", formula.n_clauses());
    println!("threshold         {} (count {target})", config.threshold);
    println!("stop_reason       {}", r.stop_reason);
    println!("best_unsat        {}", r.best_unsat);
    println!("step_of_best      {}", r.step_of_best);
    println!("steps_total       {}", r.steps_total);
    println!("wall_time_s       {:.6}", r.wall_time);
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CodedError> {
    let formula = read_formula(&args.cnf)?;
    let text = std::fs::read_to_string(&args.assignment)
        .with_context(|| format!("reading {}", args.assignment.display()))
        .code(EXIT_IO)?;
    let assignment = parse_assignment(&text, formula.n_vars()).code(EXIT_INPUT)?;
    let unsat = formula.count_unsat(&assignment).code(EXIT_INPUT)?;
    println!("{unsat}");
    Ok(if unsat == 0 { EXIT_OK } else { EXIT_NOT_REACHED })
}

/// Accepts either whitespace-separated 0/1 digits in variable order, or
/// competition-style `v` lines with signed literals (0 terminators ignored).
fn parse_assignment(text: &str, n_vars: usize) -> Result<Assignment> {
    let mut v_lines = false;
    let mut digits: Vec<bool> = Vec::new();
    let mut by_var: Vec<Option<bool>> = vec![None; n_vars];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let mut tokens = line.split_whitespace().peekable();
        if tokens.peek() == Some(&"v") {
            v_lines = true;
            tokens.next();
            for token in tokens {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| anyhow!("line {line_no}: bad literal `{token}`"))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs() as usize;
                if var == 0 || var > n_vars {
                    anyhow::bail!("line {line_no}: literal {lit} out of range 1..={n_vars}");
                }
                by_var[var - 1] = Some(lit > 0);
            }
        } else {
            for token in tokens {
                match token {
                    "0" => digits.push(false),
                    "1" => digits.push(true),
                    other => anyhow::bail!("line {line_no}: expected 0/1 digits, got `{other}`"),
                }
            }
        }
    }

    if v_lines {
        if !digits.is_empty() {
            anyhow::bail!("mixed v-line and digit formats");
        }
        let bits = by_var
            .iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| anyhow!("variable {} unassigned in v lines", i + 1)))
            .collect::<Result<Vec<bool>>>()?;
        return Ok(Assignment::new(bits));
    }
    if digits.len() != n_vars {
        anyhow::bail!(
            "assignment has {} bits but the formula has {} variables",
            digits.len(),
            n_vars
        );
    }
    Ok(Assignment::new(digits))
}

fn cmd_bench(args: BenchArgs) -> Result<i32, CodedError> {
    let mut spec = SweepSpec::default();
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .code(EXIT_IO)?;
        spec = SweepSpec::parse(&text).map_err(anyhow::Error::msg).code(EXIT_INPUT)?;
    }
    if args.print_config {
        print!("{}", spec.to_config_string());
        return Ok(EXIT_OK);
    }
    let out = args
        .out
        .ok_or_else(|| anyhow!("--out CSV is required"))
        .code(EXIT_INPUT)?;
    let records = run_sweep(&spec, Some(&out)).code(EXIT_IO)?;
    println!("{} records in {}", records.len(), out.display());
    for &solver in &spec.solvers {
        if let Some(report) = fit_report_text(&records, solver) {
            print!("{report}");
        }
    }
    Ok(EXIT_OK)
}

fn fit_report_text(records: &[deltasat::bench::BenchRecord], solver: SolverId) -> Option<String> {
    let medians = median_time_per_n(records, solver);
    let mut out = String::new();
    writeln!(out, "solver {solver}: {} aggregated sizes", medians.len()).ok()?;
    match (
        fit_scaling(records, solver, ScalingModel::PowerLaw),
        fit_scaling(records, solver, ScalingModel::Exponential),
    ) {
        (Ok(p), Ok(e)) => {
            writeln!(
                out,
                "  power_law:   slope {:9.4}  intercept {:9.4}  r2 {:.6}",
                p.slope, p.intercept, p.r_squared
            )
            .ok()?;
            writeln!(
                out,
                "  exponential: rate  {:9.6}  intercept {:9.4}  r2 {:.6}",
                e.slope, e.intercept, e.r_squared
            )
            .ok()?;
            let better = if p.r_squared >= e.r_squared {
                ScalingModel::PowerLaw
            } else {
                ScalingModel::Exponential
            };
            writeln!(out, "  better fit:  {better}").ok()?;
        }
        _ => {
            writeln!(out, "  not enough threshold-reached points to fit").ok()?;
        }
    }
    let censored = censored_fraction_by_n(records, solver);
    if !censored.is_empty() {
        let parts: Vec<String> = censored
            .iter()
            .map(|(n, f)| format!("{n}: {f:.2}"))
            .collect();
        writeln!(out, "  censored fraction by n: {}", parts.join(", ")).ok()?;
    }
    Some(out)
}

fn cmd_fit(args: FitArgs) -> Result<i32, CodedError> {
    let text = std::fs::read_to_string(&args.csv)
        .with_context(|| format!("reading {}", args.csv.display()))
        .code(EXIT_IO)?;
    let records = parse_csv(&text).map_err(anyhow::Error::msg).code(EXIT_INPUT)?;

    let solvers: Vec<SolverId> = match args.solver {
        Some(s) => vec![s],
        None => {
            let mut solvers = Vec::new();
            for r in &records {
                if !solvers.contains(&r.solver) {
                    solvers.push(r.solver);
                }
            }
            solvers
        }
    };
    if solvers.is_empty() {
        return Err(CodedError::new(
            EXIT_INSUFFICIENT,
            anyhow!("CSV contains no records"),
        ));
    }

    let models: Vec<ScalingModel> = match args.model.as_str() {
        "auto" => vec![ScalingModel::PowerLaw, ScalingModel::Exponential],
        other => vec![other
            .parse::<ScalingModel>()
            .map_err(anyhow::Error::msg)
            .code(EXIT_INPUT)?],
    };

    let mut json_entries = Vec::new();
    for &solver in &solvers {
        let mut fits = Vec::new();
        for &model in &models {
            let fit = fit_scaling(&records, solver, model).map_err(|e| {
                let code = match e {
                    FitError::InsufficientData { .. } => EXIT_INSUFFICIENT,
                    _ => EXIT_INPUT,
                };
                CodedError::new(code, anyhow!("solver {solver}: {e}"))
            })?;
            fits.push(fit);
        }
        if args.json {
            let mut entry = format!("{{\"solver\":\"{solver}\"");
            for fit in &fits {
                write!(
                    entry,
                    ",\"{}\":{{\"slope\":{},\"intercept\":{},\"r_squared\":{},\"n_points\":{}}}",
                    fit.model, fit.slope, fit.intercept, fit.r_squared, fit.n_points
                )
                .unwrap();
            }
            entry.push('}');
            json_entries.push(entry);
        } else {
            println!("solver {solver}");
            for fit in &fits {
                println!(
                    "  {:12} slope {:10.5}  intercept {:10.4}  r2 {:.6}  points {}",
                    fit.model.to_string() + ":",
                    fit.slope,
                    fit.intercept,
                    fit.r_squared,
                    fit.n_points
                );
            }
            if fits.len() == 2 {
                let better = if fits[0].r_squared >= fits[1].r_squared {
                    fits[0].model
                } else {
                    fits[1].model
                };
                println!("  better fit:  {better}");
            }
            let censored = censored_fraction_by_n(&records, solver);
            let parts: Vec<String> = censored
                .iter()
                .map(|(n, f)| format!("{n}: {f:.2}"))
                .collect();
            println!("  censored fraction by n: {}", parts.join(", "));
        }
    }
    if args.json {
        println!("[{}]", json_entries.join(","));
    }
    Ok(EXIT_OK)
}
