//! Time-to-threshold and memory benchmarks over solver x instance sweeps,
//! with CSV persistence and scaling fits.

use std::collections::HashSet;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use crate::dmm::{solve_dmm_with_deadline, DmmParams};
use crate::fit::{fit_scaling_points, FitError, ScalingFit, ScalingModel};
use crate::instance::{generate_balanced_xorsat, CnfFormula};
use crate::kv::parse_key_values;
use crate::result::StopReason;
use crate::rng::derive_seed;
use crate::sls::{solve_sls_with_deadline, SlsParams};

/// Seed-derivation tags: a cell seed generates the instance directly; the
/// solver initializer seed is derived from it with its solver's tag.
pub const SEED_TAG_DMM_INIT: u64 = 1;
pub const SEED_TAG_SLS_INIT: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverId {
    Dmm,
    Sls,
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverId::Dmm => "dmm",
            SolverId::Sls => "sls",
        })
    }
}

impl FromStr for SolverId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dmm" => Ok(SolverId::Dmm),
            "sls" => Ok(SolverId::Sls),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

/// Cell outcome: a solver stop reason, or `failed` when the cell could not
/// run at all (sweeps tolerate partial failure).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Stop(StopReason),
    Failed,
}

impl CellStatus {
    pub fn reached_threshold(self) -> bool {
        self == CellStatus::Stop(StopReason::ThresholdReached)
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Stop(r) => r.fmt(f),
            CellStatus::Failed => f.write_str("failed"),
        }
    }
}

impl FromStr for CellStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "failed" {
            return Ok(CellStatus::Failed);
        }
        StopReason::from_str(s).map(CellStatus::Stop)
    }
}

/// One measurement row of the benchmark protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub solver: SolverId,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub threshold_fraction: f64,
    pub status: CellStatus,
    /// Wall seconds to first reach the threshold; present iff the status is
    /// threshold_reached.
    pub time_to_threshold_s: Option<f64>,
    pub steps_or_flips: u64,
    pub best_unsat: usize,
    pub mem_model_bytes: u64,
    pub peak_rss_bytes: Option<u64>,
}

/// Fixed overhead constant of the analytic memory model.
pub const MEM_MODEL_OVERHEAD_BYTES: u64 = 4096;

/// Analytic solver memory: 8 bytes per state component (N voltages + 2M
/// memories), the same again for derivative buffers, 8 per literal
/// occurrence for the incidence arrays, plus a fixed overhead.
pub fn memory_model(f: &CnfFormula) -> u64 {
    let n = f.n_vars() as u64;
    let m = f.n_clauses() as u64;
    let lits = f.total_literals() as u64;
    8 * (n + 2 * m) + 8 * (n + 2 * m) + 8 * lits + MEM_MODEL_OVERHEAD_BYTES
}

/// Peak resident set of this process, if the platform exposes it
/// (Linux VmHWM). Process-wide and cumulative, so only indicative.
pub fn peak_rss_bytes() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb = rest.trim().strip_suffix("kB")?.trim().parse::<u64>().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}

/// Per-solver knobs a sweep may override; everything else follows the
/// defaults for the instance at hand.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTuning {
    pub dmm_dt: f64,
    pub dmm_max_steps: u64,
    pub sls_noise: f64,
    /// max_flips = sls_max_flips_per_var * n.
    pub sls_max_flips_per_var: u64,
    pub sls_max_restarts: u64,
}

impl Default for SolverTuning {
    fn default() -> Self {
        let dmm = DmmParams::<f64>::defaults_for_clause_count(1);
        let sls = SlsParams::defaults_for_n_vars(1);
        Self {
            dmm_dt: dmm.dt,
            dmm_max_steps: dmm.max_steps,
            sls_noise: sls.noise,
            sls_max_flips_per_var: 100,
            sls_max_restarts: sls.max_restarts,
        }
    }
}

/// Runs one solver on one formula with a wall-clock budget and records the
/// first wall time at which the best assignment met the threshold. Timing
/// starts at solver-state allocation (instance generation and parsing are
/// excluded by the caller).
pub fn time_to_threshold(
    solver: SolverId,
    f: &CnfFormula,
    threshold_fraction: f64,
    budget: Duration,
    seed: u64,
) -> BenchRecord {
    time_to_threshold_with(solver, f, threshold_fraction, budget, seed, &SolverTuning::default())
}

pub fn time_to_threshold_with(
    solver: SolverId,
    f: &CnfFormula,
    threshold_fraction: f64,
    budget: Duration,
    seed: u64,
    tuning: &SolverTuning,
) -> BenchRecord {
    let deadline = Some(Instant::now() + budget);
    let (status, time, steps, best_unsat) = match solver {
        SolverId::Dmm => {
            let mut params = DmmParams::<f64>::defaults_for_clause_count(f.n_clauses());
            params.dt = tuning.dmm_dt;
            params.max_steps = tuning.dmm_max_steps;
            let init_seed = derive_seed(seed, SEED_TAG_DMM_INIT, 0);
            match solve_dmm_with_deadline(f, &params, threshold_fraction, init_seed, deadline) {
                Ok(r) => (
                    CellStatus::Stop(r.stop_reason),
                    (r.stop_reason == StopReason::ThresholdReached).then_some(r.wall_time),
                    r.steps_total,
                    r.best_unsat,
                ),
                Err(_) => (CellStatus::Failed, None, 0, f.n_clauses()),
            }
        }
        SolverId::Sls => {
            let mut params = SlsParams::defaults_for_n_vars(f.n_vars());
            params.noise = tuning.sls_noise;
            params.max_flips = tuning.sls_max_flips_per_var * f.n_vars() as u64;
            params.max_restarts = tuning.sls_max_restarts;
            params.threshold_fraction = threshold_fraction;
            params.seed = derive_seed(seed, SEED_TAG_SLS_INIT, 0);
            let r = solve_sls_with_deadline(f, &params, deadline);
            (
                CellStatus::Stop(r.stop_reason),
                (r.stop_reason == StopReason::ThresholdReached).then_some(r.wall_time),
                r.steps_total,
                r.best_unsat,
            )
        }
    };
    BenchRecord {
        solver,
        n: f.n_vars(),
        m: f.n_clauses(),
        seed,
        threshold_fraction,
        status,
        time_to_threshold_s: time,
        steps_or_flips: steps,
        best_unsat,
        mem_model_bytes: memory_model(f),
        peak_rss_bytes: peak_rss_bytes(),
    }
}

/// Sweep configuration: solver set, size grid, seeds, budgets, and solver
/// tuning. Serializes to and from `key = value` text.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub solvers: Vec<SolverId>,
    pub n_values: Vec<usize>,
    pub seeds_per_n: usize,
    pub rho_xor: f64,
    pub threshold_fraction: f64,
    /// Wall-clock budget per cell, seconds.
    pub budget_s: f64,
    pub workers: usize,
    pub base_seed: u64,
    pub tuning: SolverTuning,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            solvers: vec![SolverId::Dmm, SolverId::Sls],
            n_values: vec![250, 500, 1000, 2000, 4000],
            seeds_per_n: 5,
            rho_xor: 1.25,
            threshold_fraction: 0.015,
            budget_s: 120.0,
            workers: 1,
            base_seed: 1,
            tuning: SolverTuning::default(),
        }
    }
}

impl SweepSpec {
    /// Parses `key = value` text over the defaults; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut spec = SweepSpec::default();
        for (key, value) in parse_key_values(text)? {
            spec.apply(&key, &value)?;
        }
        Ok(spec)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse::<T>()
                .map_err(|_| format!("bad value `{value}` for `{key}`"))
        }
        match key {
            "solvers" => {
                self.solvers = value
                    .split(',')
                    .map(|s| s.trim().parse::<SolverId>())
                    .collect::<Result<_, _>>()?;
            }
            "n_values" => {
                self.n_values = value
                    .split(',')
                    .map(|s| num::<usize>(key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "seeds_per_n" => self.seeds_per_n = num(key, value)?,
            "rho_xor" => self.rho_xor = num(key, value)?,
            "threshold_fraction" => self.threshold_fraction = num(key, value)?,
            "budget_s" => self.budget_s = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "base_seed" => self.base_seed = num(key, value)?,
            "dmm_dt" => self.tuning.dmm_dt = num(key, value)?,
            "dmm_max_steps" => self.tuning.dmm_max_steps = num(key, value)?,
            "sls_noise" => self.tuning.sls_noise = num(key, value)?,
            "sls_max_flips_per_var" => self.tuning.sls_max_flips_per_var = num(key, value)?,
            "sls_max_restarts" => self.tuning.sls_max_restarts = num(key, value)?,
            other => return Err(format!("unknown sweep key `{other}`")),
        }
        Ok(())
    }

    /// Emits the spec as loadable `key = value` text.
    pub fn to_config_string(&self) -> String {
        let solvers: Vec<String> = self.solvers.iter().map(|s| s.to_string()).collect();
        let ns: Vec<String> = self.n_values.iter().map(|n| n.to_string()).collect();
        format!(
            "solvers = {}\nn_values = {}\nseeds_per_n = {}\nrho_xor = {}\n\
             threshold_fraction = {}\nbudget_s = {}\nworkers = {}\nbase_seed = {}\n\
             dmm_dt = {}\ndmm_max_steps = {}\nsls_noise = {}\n\
             sls_max_flips_per_var = {}\nsls_max_restarts = {}\n",
            solvers.join(","),
            ns.join(","),
            self.seeds_per_n,
            self.rho_xor,
            self.threshold_fraction,
            self.budget_s,
            self.workers,
            self.base_seed,
            self.tuning.dmm_dt,
            self.tuning.dmm_max_steps,
            self.tuning.sls_noise,
            self.tuning.sls_max_flips_per_var,
            self.tuning.sls_max_restarts,
        )
    }

    /// Cell list in deterministic order; the cell seed depends only on
    /// (base_seed, n, repetition), so both solvers see the same instance.
    fn cells(&self) -> Vec<(SolverId, usize, u64)> {
        let mut cells = Vec::new();
        for &n in &self.n_values {
            for rep in 0..self.seeds_per_n {
                let seed = derive_seed(self.base_seed, n as u64, rep as u64);
                for &solver in &self.solvers {
                    cells.push((solver, n, seed));
                }
            }
        }
        cells
    }
}

/// CSV column order; the header row is mandatory.
pub const CSV_HEADER: &str = "solver,n,m,seed,threshold_fraction,status,time_to_threshold_s,\
                              steps_or_flips,best_unsat,mem_model_bytes,peak_rss_bytes";

fn record_to_row(r: &BenchRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.solver,
        r.n,
        r.m,
        r.seed,
        r.threshold_fraction,
        r.status,
        r.time_to_threshold_s.map(|t| t.to_string()).unwrap_or_default(),
        r.steps_or_flips,
        r.best_unsat,
        r.mem_model_bytes,
        r.peak_rss_bytes.map(|b| b.to_string()).unwrap_or_default(),
    )
}

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_to_row(r));
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, String> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        _ => return Err("missing or wrong CSV header".to_string()),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(format!("line {}: expected 11 fields", idx + 1));
        }
        let err = |what: &str| format!("line {}: bad {what}", idx + 1);
        fn opt(s: &str) -> Option<&str> {
            if s.is_empty() {
                None
            } else {
                Some(s)
            }
        }
        records.push(BenchRecord {
            solver: fields[0].parse().map_err(|_| err("solver"))?,
            n: fields[1].parse().map_err(|_| err("n"))?,
            m: fields[2].parse().map_err(|_| err("m"))?,
            seed: fields[3].parse().map_err(|_| err("seed"))?,
            threshold_fraction: fields[4].parse().map_err(|_| err("threshold_fraction"))?,
            status: fields[5].parse().map_err(|_| err("status"))?,
            time_to_threshold_s: opt(fields[6])
                .map(|s| s.parse().map_err(|_| err("time_to_threshold_s")))
                .transpose()?,
            steps_or_flips: fields[7].parse().map_err(|_| err("steps_or_flips"))?,
            best_unsat: fields[8].parse().map_err(|_| err("best_unsat"))?,
            mem_model_bytes: fields[9].parse().map_err(|_| err("mem_model_bytes"))?,
            peak_rss_bytes: opt(fields[10])
                .map(|s| s.parse().map_err(|_| err("peak_rss_bytes")))
                .transpose()?,
        });
    }
    Ok(records)
}

fn run_cell(spec: &SweepSpec, solver: SolverId, n: usize, seed: u64) -> BenchRecord {
    let budget = Duration::from_secs_f64(spec.budget_s);
    match generate_balanced_xorsat(n, spec.rho_xor, seed) {
        Ok(xor) => {
            let f = xor.expand();
            time_to_threshold_with(
                solver,
                &f,
                spec.threshold_fraction,
                budget,
                seed,
                &spec.tuning,
            )
        }
        Err(_) => BenchRecord {
            solver,
            n,
            m: 0,
            seed,
            threshold_fraction: spec.threshold_fraction,
            status: CellStatus::Failed,
            time_to_threshold_s: None,
            steps_or_flips: 0,
            best_unsat: 0,
            mem_model_bytes: 0,
            peak_rss_bytes: None,
        },
    }
}

/// Runs the sweep, appending one CSV row per completed cell to `out_csv`
/// (created with a header if absent). Cells whose (solver, n, seed) already
/// appear in the file are skipped, so an interrupted sweep resumes. Cells
/// run on up to `workers` threads; rows are written by a single writer in
/// completion order. Returns all records, previously existing ones included.
pub fn run_sweep(spec: &SweepSpec, out_csv: Option<&Path>) -> io::Result<Vec<BenchRecord>> {
    let mut existing: Vec<BenchRecord> = Vec::new();
    let mut writer: Option<BufWriter<File>> = None;
    if let Some(path) = out_csv {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            existing =
                parse_csv(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            writer = Some(BufWriter::new(
                OpenOptions::new().append(true).open(path)?,
            ));
        } else {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{CSV_HEADER}")?;
            w.flush()?;
            writer = Some(w);
        }
    }

    let done: HashSet<(SolverId, usize, u64)> = existing
        .iter()
        .map(|r| (r.solver, r.n, r.seed))
        .collect();
    let cells: Vec<(SolverId, usize, u64)> = spec
        .cells()
        .into_iter()
        .filter(|&(solver, n, seed)| !done.contains(&(solver, n, seed)))
        .collect();

    let workers = spec.workers.max(1).min(cells.len().max(1));
    let mut records = existing;
    let total = cells.len();

    if workers <= 1 {
        for (i, &(solver, n, seed)) in cells.iter().enumerate() {
            let record = run_cell(spec, solver, n, seed);
            log_record(i + 1, total, &record);
            if let Some(w) = writer.as_mut() {
                writeln!(w, "{}", record_to_row(&record))?;
                w.flush()?;
            }
            records.push(record);
        }
        return Ok(records);
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<BenchRecord>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let cells = &cells;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (solver, n, seed) = cells[i];
                let _ = tx.send(run_cell(spec, solver, n, seed));
            });
        }
        drop(tx);
        let mut finished = 0usize;
        for record in rx {
            finished += 1;
            log_record(finished, total, &record);
            if let Some(w) = writer.as_mut() {
                if writeln!(w, "{}", record_to_row(&record)).and_then(|_| w.flush()).is_err() {
                    eprintln!("[bench] warning: CSV write failed; continuing in memory");
                }
            }
            records.push(record);
        }
    });
    Ok(records)
}

fn log_record(done: usize, total: usize, r: &BenchRecord) {
    eprintln!(
        "[bench {done}/{total}] {} n={} seed={} -> {} (best_unsat={}, steps={}{})",
        r.solver,
        r.n,
        r.seed,
        r.status,
        r.best_unsat,
        r.steps_or_flips,
        r.time_to_threshold_s
            .map(|t| format!(", {t:.3}s"))
            .unwrap_or_default(),
    );
}

/// Median time-to-threshold per N for one solver, over threshold-reached
/// cells only; sorted by N. Order-independent in the input records.
pub fn median_time_per_n(records: &[BenchRecord], solver: SolverId) -> Vec<(f64, f64)> {
    let mut by_n: Vec<(usize, Vec<f64>)> = Vec::new();
    for r in records {
        if r.solver != solver || !r.status.reached_threshold() {
            continue;
        }
        let Some(t) = r.time_to_threshold_s else {
            continue;
        };
        match by_n.iter_mut().find(|(n, _)| *n == r.n) {
            Some((_, ts)) => ts.push(t),
            None => by_n.push((r.n, vec![t])),
        }
    }
    by_n.sort_by_key(|&(n, _)| n);
    by_n
        .into_iter()
        .map(|(n, mut ts)| {
            ts.sort_by(f64::total_cmp);
            let mid = ts.len() / 2;
            let median = if ts.len() % 2 == 1 {
                ts[mid]
            } else {
                (ts[mid - 1] + ts[mid]) / 2.0
            };
            (n as f64, median)
        })
        .collect()
}

/// Fits a scaling model to the per-N median times of one solver.
pub fn fit_scaling(
    records: &[BenchRecord],
    solver: SolverId,
    model: ScalingModel,
) -> Result<ScalingFit<f64>, FitError> {
    fit_scaling_points(&median_time_per_n(records, solver), model)
}

/// Fraction of cells per N that did not reach the threshold; sorted by N.
pub fn censored_fraction_by_n(records: &[BenchRecord], solver: SolverId) -> Vec<(usize, f64)> {
    let mut by_n: Vec<(usize, usize, usize)> = Vec::new(); // (n, censored, total)
    for r in records {
        if r.solver != solver {
            continue;
        }
        let entry = match by_n.iter_mut().find(|(n, _, _)| *n == r.n) {
            Some(e) => e,
            None => {
                by_n.push((r.n, 0, 0));
                by_n.last_mut().unwrap()
            }
        };
        entry.2 += 1;
        if !r.status.reached_threshold() {
            entry.1 += 1;
        }
    }
    by_n.sort_by_key(|&(n, _, _)| n);
    by_n
        .into_iter()
        .map(|(n, censored, total)| (n, censored as f64 / total as f64))
        .collect()
}
