//! Deterministic continuous-time Max-SAT solver in the digital-memcomputing
//! style: per-variable voltages driven by per-clause short- and long-term
//! memories, integrated with explicit forward Euler and read out by sign.
//!
//! The flow field, for clause m over literals i with polarity q in {-1, +1}:
//!
//! ```text
//! C_m      = 1/2 * min_i (1 - q_i v_i)                    clause violation in [0, 1]
//! G_{m,i}  = 1/2 * q_i * min_{j != i} (1 - q_j v_j)       gradient-like drive
//! R_{m,i}  = 1/2 * (q_i - v_i)   if i attains the clause minimum, else 0
//! dv_i     = sum_{m on i} [ xl_m xs_m G_{m,i} + (1 + zeta xl_m)(1 - xs_m) R_{m,i} ]
//! dxs_m    = beta (xs_m + epsilon)(C_m - gamma)
//! dxl_m    = alpha (C_m - delta)
//! ```
//!
//! States are clamped after every Euler step: v in [-1, 1], xs in [0, 1],
//! xl in [1, xl_max]. The minimum over an empty set (the co-minimum of a
//! unit clause's only literal) is taken as 2, the largest possible factor.
//! All sums run in clause-major, literal order, so trajectories are
//! bit-reproducible regardless of thread count.

use std::time::Instant;

use thiserror::Error;

use crate::instance::{Assignment, CnfFormula};
use crate::num::Real;
use crate::result::{threshold_count, SolveResult, StopReason};
use crate::rng::SplitMix64;

/// Convergence declared after this many consecutive evaluations with
/// max|dv| below [`CONVERGENCE_DV_EPS`].
pub const CONVERGENCE_EVALS: u32 = 100;
pub const CONVERGENCE_DV_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DmmError {
    #[error("non-finite state at step {step}; dt is likely too large")]
    NonFiniteState { step: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Parameters of the flow field and its integration.
#[derive(Debug, Clone, PartialEq)]
pub struct DmmParams<T: Real> {
    /// Long-term memory rate.
    pub alpha: T,
    /// Short-term memory rate.
    pub beta: T,
    /// Short-term threshold, in (0, 0.5).
    pub gamma: T,
    /// Long-term threshold, in (0, gamma).
    pub delta: T,
    /// Short-term floor offset.
    pub epsilon: T,
    /// Rigidity weight.
    pub zeta: T,
    /// Euler step size (dimensionless time).
    pub dt: T,
    /// Long-term memory cap.
    pub xl_max: T,
    /// Step budget.
    pub max_steps: u64,
    /// Steps between unsat-count evaluations.
    pub eval_stride: u64,
    /// Steps between trajectory samples.
    pub sample_stride: u64,
    /// Rescale dt from feedback on max|dt*dv|; off by default so benchmark
    /// timings stay comparable.
    pub adaptive_dt: bool,
}

impl<T: Real> DmmParams<T> {
    /// Benchmark defaults (see docs/parameters.md for the tuning ledger);
    /// the long-term cap scales with the clause count.
    pub fn defaults_for_clause_count(m: usize) -> Self {
        Self {
            alpha: T::from_f64_lossy(5.0),
            beta: T::from_f64_lossy(20.0),
            gamma: T::from_f64_lossy(0.25),
            delta: T::from_f64_lossy(0.05),
            epsilon: T::from_f64_lossy(1e-3),
            zeta: T::from_f64_lossy(0.1),
            dt: T::from_f64_lossy(0.1),
            xl_max: T::from_f64_lossy(1e4 * m.max(1) as f64),
            max_steps: 1_000_000,
            eval_stride: 10,
            sample_stride: 100,
            adaptive_dt: false,
        }
    }

    pub fn validate(&self) -> Result<(), DmmError> {
        let zero = T::zero();
        let half = T::from_f64_lossy(0.5);
        let bad = |msg: &str| Err(DmmError::InvalidParams(msg.to_string()));
        if !(self.alpha > zero && self.beta > zero && self.epsilon > zero && self.zeta > zero) {
            return bad("rates alpha, beta, epsilon, zeta must be positive");
        }
        if !(self.delta > zero && self.delta < self.gamma && self.gamma < half) {
            return bad("need 0 < delta < gamma < 0.5");
        }
        if !(self.dt > zero && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.xl_max >= T::one()) {
            return bad("xl_max must be at least 1");
        }
        if self.eval_stride == 0 || self.sample_stride == 0 {
            return bad("strides must be at least 1");
        }
        Ok(())
    }
}

/// Continuous state: voltages v (length N), short-term memories xs and
/// long-term memories xl (length M), simulated time and step count.
#[derive(Debug, Clone, PartialEq)]
pub struct DmmState<T: Real> {
    pub v: Vec<T>,
    pub xs: Vec<T>,
    pub xl: Vec<T>,
    pub t: T,
    pub step: u64,
}

impl<T: Real> DmmState<T> {
    /// Seeded initial state: v uniform in [-1, 1) drawn per variable in
    /// order from SplitMix64(seed), xs at the neutral 0.5, xl at the floor 1.
    pub fn init(f: &CnfFormula, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let v = (0..f.n_vars())
            .map(|_| T::from_f64_lossy(rng.next_signed_unit()))
            .collect();
        Self {
            v,
            xs: vec![T::from_f64_lossy(0.5); f.n_clauses()],
            xl: vec![T::one(); f.n_clauses()],
            t: T::zero(),
            step: 0,
        }
    }

    pub fn bounds_hold(&self, xl_max: T) -> bool {
        let one = T::one();
        self.v.iter().all(|&x| x >= -one && x <= one)
            && self.xs.iter().all(|&x| x >= T::zero() && x <= one)
            && self.xl.iter().all(|&x| x >= one && x <= xl_max)
    }
}

fn polarity<T: Real>(negated: bool) -> T {
    if negated {
        -T::one()
    } else {
        T::one()
    }
}

fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Continuous violation measure of clause `m`: 1/2 * min over its literals
/// of (1 - q v). Zero iff some literal sits at full satisfying voltage; 1 at
/// maximal violation.
pub fn clause_value<T: Real>(f: &CnfFormula, m: usize, v: &[T]) -> T {
    let half = T::from_f64_lossy(0.5);
    let min = f
        .clause(m)
        .literals()
        .iter()
        .map(|l| T::one() - polarity::<T>(l.is_negated()) * v[l.var() - 1])
        .fold(T::infinity(), T::min);
    half * min
}

/// Reference implementation of the flow field; returns (dv, dxs, dxl).
///
/// This is the semantic definition. [`DmmSolver`] computes the same field
/// over flattened arrays and is tested for exact agreement with this
/// function.
pub fn compute_derivatives<T: Real>(
    f: &CnfFormula,
    s: &DmmState<T>,
    p: &DmmParams<T>,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let half = T::from_f64_lossy(0.5);
    let co_min_empty = T::from_f64_lossy(2.0);
    let mut dv = vec![T::zero(); f.n_vars()];
    let mut dxs = vec![T::zero(); f.n_clauses()];
    let mut dxl = vec![T::zero(); f.n_clauses()];

    for (m, clause) in f.clauses().iter().enumerate() {
        // Two smallest violation factors; strict < keeps the lowest literal
        // index on ties.
        let mut min1 = T::infinity();
        let mut min2 = T::infinity();
        let mut min_pos = 0usize;
        for (k, lit) in clause.literals().iter().enumerate() {
            let term = T::one() - polarity::<T>(lit.is_negated()) * s.v[lit.var() - 1];
            if term < min1 {
                min2 = min1;
                min1 = term;
                min_pos = k;
            } else if term < min2 {
                min2 = term;
            }
        }
        if clause.len() == 1 {
            min2 = co_min_empty;
        }

        let c_m = half * min1;
        dxs[m] = p.beta * (s.xs[m] + p.epsilon) * (c_m - p.gamma);
        dxl[m] = p.alpha * (c_m - p.delta);

        let w_grad = s.xl[m] * s.xs[m];
        let w_rig = (T::one() + p.zeta * s.xl[m]) * (T::one() - s.xs[m]);
        for (k, lit) in clause.literals().iter().enumerate() {
            let q = polarity::<T>(lit.is_negated());
            let co_min = if k == min_pos { min2 } else { min1 };
            let var = lit.var() - 1;
            dv[var] = dv[var] + w_grad * half * q * co_min;
            if k == min_pos {
                dv[var] = dv[var] + w_rig * half * (q - s.v[var]);
            }
        }
    }
    (dv, dxs, dxl)
}

/// One explicit Euler step with post-step clamping; the reference form of
/// the engine's in-place step.
pub fn euler_step<T: Real>(
    f: &CnfFormula,
    s: &DmmState<T>,
    p: &DmmParams<T>,
) -> Result<DmmState<T>, DmmError> {
    let (dv, dxs, dxl) = compute_derivatives(f, s, p);
    let one = T::one();
    let mut next = s.clone();
    let mut finite = true;
    for i in 0..next.v.len() {
        let raw = next.v[i] + p.dt * dv[i];
        finite &= raw.is_finite();
        next.v[i] = clamp(raw, -one, one);
    }
    for m in 0..next.xs.len() {
        let raw_s = next.xs[m] + p.dt * dxs[m];
        let raw_l = next.xl[m] + p.dt * dxl[m];
        finite &= raw_s.is_finite() && raw_l.is_finite();
        next.xs[m] = clamp(raw_s, T::zero(), one);
        next.xl[m] = clamp(raw_l, one, p.xl_max);
    }
    if !finite {
        return Err(DmmError::NonFiniteState { step: s.step + 1 });
    }
    next.t = next.t + p.dt;
    next.step += 1;
    Ok(next)
}

/// Sign readout: bit i is 1 iff v_i > 0 (zero maps to 0).
pub fn readout<T: Real>(s: &DmmState<T>) -> Assignment {
    Assignment::new(s.v.iter().map(|&x| x > T::zero()).collect())
}

/// Compiled solver: the formula flattened into index arrays plus the mutable
/// state and derivative buffers.
pub struct DmmSolver<T: Real> {
    params: DmmParams<T>,
    n: usize,
    m: usize,
    clause_start: Vec<u32>,
    lit_var: Vec<u32>,
    lit_q: Vec<T>,
    state: DmmState<T>,
    dv: Vec<T>,
    dxs: Vec<T>,
    dxl: Vec<T>,
    bits: Vec<bool>,
    last_max_abs_dv: T,
    dt_current: T,
}

impl<T: Real> DmmSolver<T> {
    pub fn new(f: &CnfFormula, params: DmmParams<T>, seed: u64) -> Result<Self, DmmError> {
        let state = DmmState::init(f, seed);
        Self::with_state(f, params, state)
    }

    /// Builds the solver around an externally constructed state.
    pub fn with_state(
        f: &CnfFormula,
        params: DmmParams<T>,
        state: DmmState<T>,
    ) -> Result<Self, DmmError> {
        params.validate()?;
        assert_eq!(state.v.len(), f.n_vars(), "state sized for the formula");
        assert_eq!(state.xs.len(), f.n_clauses());
        assert_eq!(state.xl.len(), f.n_clauses());
        let (n, m) = (f.n_vars(), f.n_clauses());
        let mut clause_start = Vec::with_capacity(m + 1);
        let mut lit_var = Vec::with_capacity(f.total_literals());
        let mut lit_q = Vec::with_capacity(f.total_literals());
        clause_start.push(0);
        for clause in f.clauses() {
            for lit in clause.literals() {
                lit_var.push((lit.var() - 1) as u32);
                lit_q.push(polarity::<T>(lit.is_negated()));
            }
            clause_start.push(lit_var.len() as u32);
        }
        let dt = params.dt;
        Ok(Self {
            params,
            n,
            m,
            clause_start,
            lit_var,
            lit_q,
            state,
            dv: vec![T::zero(); n],
            dxs: vec![T::zero(); m],
            dxl: vec![T::zero(); m],
            bits: vec![false; n],
            last_max_abs_dv: T::zero(),
            dt_current: dt,
        })
    }

    pub fn state(&self) -> &DmmState<T> {
        &self.state
    }

    pub fn params(&self) -> &DmmParams<T> {
        &self.params
    }

    /// max|dv_i| of the most recent step.
    pub fn max_abs_dv(&self) -> T {
        self.last_max_abs_dv
    }

    /// Current step size (differs from params.dt only in adaptive mode).
    pub fn dt_current(&self) -> T {
        self.dt_current
    }

    fn derivatives(&mut self) {
        let half = T::from_f64_lossy(0.5);
        let co_min_empty = T::from_f64_lossy(2.0);
        let p = &self.params;
        let s = &self.state;
        self.dv.iter_mut().for_each(|x| *x = T::zero());

        for m in 0..self.m {
            let lo = self.clause_start[m] as usize;
            let hi = self.clause_start[m + 1] as usize;

            let mut min1 = T::infinity();
            let mut min2 = T::infinity();
            let mut min_k = lo;
            for k in lo..hi {
                let term =
                    T::one() - self.lit_q[k] * s.v[self.lit_var[k] as usize];
                if term < min1 {
                    min2 = min1;
                    min1 = term;
                    min_k = k;
                } else if term < min2 {
                    min2 = term;
                }
            }
            if hi - lo == 1 {
                min2 = co_min_empty;
            }

            let c_m = half * min1;
            self.dxs[m] = p.beta * (s.xs[m] + p.epsilon) * (c_m - p.gamma);
            self.dxl[m] = p.alpha * (c_m - p.delta);

            let w_grad = s.xl[m] * s.xs[m];
            let w_rig = (T::one() + p.zeta * s.xl[m]) * (T::one() - s.xs[m]);
            for k in lo..hi {
                let q = self.lit_q[k];
                let var = self.lit_var[k] as usize;
                let co_min = if k == min_k { min2 } else { min1 };
                self.dv[var] = self.dv[var] + w_grad * half * q * co_min;
                if k == min_k {
                    self.dv[var] = self.dv[var] + w_rig * half * (q - s.v[var]);
                }
            }
        }

        self.last_max_abs_dv = self
            .dv
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    }

    /// One Euler step with clamping; errors out on non-finite components.
    pub fn step(&mut self) -> Result<(), DmmError> {
        self.derivatives();
        let dt = self.dt_current;
        let one = T::one();
        let mut finite = true;
        for i in 0..self.n {
            let raw = self.state.v[i] + dt * self.dv[i];
            finite &= raw.is_finite();
            self.state.v[i] = clamp(raw, -one, one);
        }
        for m in 0..self.m {
            let raw_s = self.state.xs[m] + dt * self.dxs[m];
            let raw_l = self.state.xl[m] + dt * self.dxl[m];
            finite &= raw_s.is_finite() && raw_l.is_finite();
            self.state.xs[m] = clamp(raw_s, T::zero(), one);
            self.state.xl[m] = clamp(raw_l, one, self.params.xl_max);
        }
        if !finite {
            return Err(DmmError::NonFiniteState {
                step: self.state.step + 1,
            });
        }
        self.state.t = self.state.t + dt;
        self.state.step += 1;

        if self.params.adaptive_dt {
            let reach = dt * self.last_max_abs_dv;
            let base = self.params.dt;
            if reach > T::from_f64_lossy(0.5) {
                self.dt_current = (dt * T::from_f64_lossy(0.5))
                    .max(base / T::from_f64_lossy(128.0));
            } else if reach < T::from_f64_lossy(0.05) {
                self.dt_current =
                    (dt * T::from_f64_lossy(2.0)).min(base * T::from_f64_lossy(10.0));
            }
        }
        Ok(())
    }

    fn refresh_bits(&mut self) {
        for i in 0..self.n {
            self.bits[i] = self.state.v[i] > T::zero();
        }
    }

    /// Unsat count of the current sign readout.
    pub fn eval_unsat(&mut self) -> usize {
        self.refresh_bits();
        let mut unsat = 0usize;
        for m in 0..self.m {
            let lo = self.clause_start[m] as usize;
            let hi = self.clause_start[m + 1] as usize;
            let sat = (lo..hi).any(|k| {
                let positive = self.lit_q[k] > T::zero();
                self.bits[self.lit_var[k] as usize] == positive
            });
            unsat += usize::from(!sat);
        }
        unsat
    }

    pub fn readout(&self) -> Assignment {
        readout(&self.state)
    }

    /// Integrates until the unsat threshold, the step budget, convergence, or
    /// an optional wall-clock deadline (checked at evaluation strides; a
    /// deadline stop reports BudgetExhausted and is the one stop whose step
    /// count may vary between runs).
    pub fn run(
        &mut self,
        threshold_fraction: f64,
        deadline: Option<Instant>,
    ) -> Result<SolveResult, DmmError> {
        self.run_from(threshold_fraction, deadline, Instant::now())
    }

    fn run_from(
        &mut self,
        threshold_fraction: f64,
        deadline: Option<Instant>,
        start: Instant,
    ) -> Result<SolveResult, DmmError> {
        assert!(
            (0.0..=1.0).contains(&threshold_fraction),
            "threshold fraction must be in [0, 1]"
        );
        let target = threshold_count(threshold_fraction, self.m);
        let conv_eps = T::from_f64_lossy(CONVERGENCE_DV_EPS);
        let sample_stride = self.params.sample_stride;

        let mut trajectory: Vec<(u64, usize)> = Vec::new();
        let mut unsat = self.eval_unsat();
        let mut best_unsat = unsat;
        let mut best_assignment = self.readout();
        let mut step_of_best = self.state.step;
        trajectory.push((self.state.step, unsat));
        let mut next_sample = self.state.step + sample_stride;

        let mut conv_run = 0u32;
        let stop_reason = loop {
            if best_unsat <= target {
                break StopReason::ThresholdReached;
            }
            if self.state.step >= self.params.max_steps {
                break StopReason::BudgetExhausted;
            }
            self.step()?;

            if self.state.step % self.params.eval_stride == 0
                || self.state.step >= self.params.max_steps
            {
                unsat = self.eval_unsat();
                if unsat < best_unsat {
                    best_unsat = unsat;
                    best_assignment = self.readout();
                    step_of_best = self.state.step;
                }
                if self.state.step >= next_sample {
                    trajectory.push((self.state.step, unsat));
                    next_sample = self.state.step - self.state.step % sample_stride
                        + sample_stride;
                }
                if self.last_max_abs_dv < conv_eps {
                    conv_run += 1;
                    if conv_run >= CONVERGENCE_EVALS {
                        break StopReason::Converged;
                    }
                } else {
                    conv_run = 0;
                }
                if let Some(d) = deadline {
                    if Instant::now() >= d && best_unsat > target {
                        break StopReason::BudgetExhausted;
                    }
                }
            }
        };

        if trajectory.last().map(|&(s, _)| s) != Some(self.state.step) {
            trajectory.push((self.state.step, unsat));
        }
        Ok(SolveResult {
            best_assignment,
            stop_reason,
            best_unsat,
            steps_total: self.state.step,
            wall_time: start.elapsed().as_secs_f64(),
            step_of_best,
            trajectory,
        })
    }
}

/// Runs the solver from a seeded initial state. Deterministic in
/// (formula, params, seed); wall time is the only field that varies.
pub fn solve_dmm<T: Real>(
    f: &CnfFormula,
    p: &DmmParams<T>,
    threshold_fraction: f64,
    seed: u64,
) -> Result<SolveResult, DmmError> {
    solve_dmm_with_deadline(f, p, threshold_fraction, seed, None)
}

/// [`solve_dmm`] with an optional wall-clock cutoff. Timing starts before
/// state allocation so reported wall times include solver initialization.
pub fn solve_dmm_with_deadline<T: Real>(
    f: &CnfFormula,
    p: &DmmParams<T>,
    threshold_fraction: f64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<SolveResult, DmmError> {
    let start = Instant::now();
    let mut solver = DmmSolver::new(f, p.clone(), seed)?;
    solver.run_from(threshold_fraction, deadline, start)
}
