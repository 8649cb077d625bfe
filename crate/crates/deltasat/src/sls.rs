//! Stochastic local-search baseline: WalkSAT/SKC with restarts.
//!
//! Serves as the local-search comparison curve for the scaling benchmarks.
//! Per flip: pick a uniformly random unsatisfied clause; if any of its
//! variables has break count 0, flip the lowest-indexed such variable;
//! otherwise flip a uniformly random clause variable with probability
//! `noise`, else the minimum-break variable (lowest index on ties).
//! Deterministic given the seed.

use std::time::Instant;

use crate::instance::{Assignment, CnfFormula};
use crate::result::{threshold_count, SolveResult, StopReason};
use crate::rng::SplitMix64;

/// Best-so-far is recorded on every improvement and every this many flips.
pub const TRAJECTORY_STRIDE: u64 = 1000;

const DEADLINE_CHECK_MASK: u64 = 0x3FF; // every 1024 flips

#[derive(Debug, Clone, PartialEq)]
pub struct SlsParams {
    /// Probability of a random walk move when no free flip exists.
    pub noise: f64,
    /// Flip budget per restart.
    pub max_flips: u64,
    /// Number of restarts (seeded re-initializations of the assignment).
    pub max_restarts: u64,
    pub seed: u64,
    /// Stop once best unsat <= floor(threshold_fraction * M).
    pub threshold_fraction: f64,
}

impl SlsParams {
    /// Benchmark defaults, scaled to the variable count (see
    /// docs/parameters.md).
    pub fn defaults_for_n_vars(n: usize) -> Self {
        Self {
            noise: 0.5,
            max_flips: 100 * n.max(1) as u64,
            max_restarts: 100,
            seed: 0,
            threshold_fraction: 0.015,
        }
    }

    fn assert_valid(&self) {
        assert!(
            (0.0..=1.0).contains(&self.noise),
            "noise must be a probability"
        );
        assert!(
            self.max_flips >= 1 && self.max_restarts >= 1,
            "budgets must be at least 1"
        );
        assert!(
            (0.0..=1.0).contains(&self.threshold_fraction),
            "threshold fraction must be in [0, 1]"
        );
    }
}

/// Number of clauses that become unsatisfied if `var` flips: clauses where
/// `var` currently provides the only true literal. O(occurrences of var).
pub fn break_count(f: &CnfFormula, a: &Assignment, var: usize) -> usize {
    assert_eq!(a.len(), f.n_vars(), "assignment sized for the formula");
    let current = a.bit(var);
    f.occurrences(var)
        .iter()
        .filter(|occ| {
            let lit_true = current != occ.negated;
            lit_true
                && f.clause(occ.clause as usize)
                    .literals()
                    .iter()
                    .filter(|l| l.var() != var)
                    .all(|l| !l.evaluate(a.bits()))
        })
        .count()
}

#[derive(Debug, PartialEq, Eq)]
struct FlipChoice {
    clause: usize,
    var: usize,
    break_of_chosen: usize,
    zero_break_available: bool,
    noise_move: bool,
}

/// Incremental WalkSAT state: per-clause true-literal counts plus an O(1)
/// add/remove list of unsatisfied clauses.
struct SlsEngine<'a> {
    f: &'a CnfFormula,
    bits: Vec<bool>,
    num_true: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
}

const NOT_UNSAT: u32 = u32::MAX;

impl<'a> SlsEngine<'a> {
    fn new(f: &'a CnfFormula) -> Self {
        Self {
            f,
            bits: vec![false; f.n_vars()],
            num_true: vec![0; f.n_clauses()],
            unsat: Vec::with_capacity(f.n_clauses()),
            unsat_pos: vec![NOT_UNSAT; f.n_clauses()],
        }
    }

    /// Fresh random assignment, one bool per variable in order.
    fn reset(&mut self, rng: &mut SplitMix64) {
        for b in &mut self.bits {
            *b = rng.next_bool();
        }
        self.unsat.clear();
        self.unsat_pos.iter_mut().for_each(|p| *p = NOT_UNSAT);
        for (c, clause) in self.f.clauses().iter().enumerate() {
            let t = clause
                .literals()
                .iter()
                .filter(|l| l.evaluate(&self.bits))
                .count() as u32;
            self.num_true[c] = t;
            if t == 0 {
                self.unsat_pos[c] = self.unsat.len() as u32;
                self.unsat.push(c as u32);
            }
        }
    }

    fn unsat_count(&self) -> usize {
        self.unsat.len()
    }

    fn break_count(&self, var: usize) -> usize {
        let current = self.bits[var - 1];
        self.f
            .occurrences(var)
            .iter()
            .filter(|occ| {
                current != occ.negated && self.num_true[occ.clause as usize] == 1
            })
            .count()
    }

    fn flip(&mut self, var: usize) {
        let new = !self.bits[var - 1];
        self.bits[var - 1] = new;
        for occ in self.f.occurrences(var) {
            let c = occ.clause as usize;
            if new != occ.negated {
                // literal became true
                self.num_true[c] += 1;
                if self.num_true[c] == 1 {
                    let pos = self.unsat_pos[c];
                    let moved = *self.unsat.last().unwrap();
                    self.unsat.swap_remove(pos as usize);
                    if moved != c as u32 {
                        self.unsat_pos[moved as usize] = pos;
                    }
                    self.unsat_pos[c] = NOT_UNSAT;
                }
            } else {
                self.num_true[c] -= 1;
                if self.num_true[c] == 0 {
                    self.unsat_pos[c] = self.unsat.len() as u32;
                    self.unsat.push(c as u32);
                }
            }
        }
    }

    /// One WalkSAT/SKC move. RNG draws, in order: clause pick; then, only
    /// when no zero-break variable exists, the noise coin; then, only on a
    /// noise move, the position pick.
    fn step(&mut self, rng: &mut SplitMix64, noise: f64) -> FlipChoice {
        debug_assert!(!self.unsat.is_empty());
        let clause = self.unsat[rng.next_below(self.unsat.len() as u64) as usize] as usize;
        let lits = self.f.clause(clause).literals();

        let mut min_break = usize::MAX;
        let mut min_var = usize::MAX;
        for lit in lits {
            let b = self.break_count(lit.var());
            if b < min_break || (b == min_break && lit.var() < min_var) {
                min_break = b;
                min_var = lit.var();
            }
        }

        let choice = if min_break == 0 {
            FlipChoice {
                clause,
                var: min_var,
                break_of_chosen: 0,
                zero_break_available: true,
                noise_move: false,
            }
        } else if rng.next_f64() < noise {
            let pos = rng.next_below(lits.len() as u64) as usize;
            let var = lits[pos].var();
            FlipChoice {
                clause,
                var,
                break_of_chosen: self.break_count(var),
                zero_break_available: false,
                noise_move: true,
            }
        } else {
            FlipChoice {
                clause,
                var: min_var,
                break_of_chosen: min_break,
                zero_break_available: false,
                noise_move: false,
            }
        };
        self.flip(choice.var);
        choice
    }
}

/// Runs WalkSAT/SKC with restarts. Deterministic given the seed; wall time
/// is the only varying field.
pub fn solve_sls(f: &CnfFormula, p: &SlsParams) -> SolveResult {
    solve_sls_with_deadline(f, p, None)
}

/// [`solve_sls`] with an optional wall-clock cutoff, checked every 1024
/// flips.
pub fn solve_sls_with_deadline(
    f: &CnfFormula,
    p: &SlsParams,
    deadline: Option<Instant>,
) -> SolveResult {
    p.assert_valid();
    let start = Instant::now();
    let target = threshold_count(p.threshold_fraction, f.n_clauses());
    let mut rng = SplitMix64::new(p.seed);
    let mut engine = SlsEngine::new(f);

    let mut best_unsat = usize::MAX;
    let mut best_bits: Vec<bool> = vec![false; f.n_vars()];
    let mut step_of_best = 0u64;
    let mut flips_total = 0u64;
    let mut trajectory: Vec<(u64, usize)> = Vec::new();
    let push = |trajectory: &mut Vec<(u64, usize)>, entry: (u64, usize)| {
        if trajectory.last() != Some(&entry) {
            trajectory.push(entry);
        }
    };

    let mut stop_reason = StopReason::BudgetExhausted;
    'outer: for _restart in 0..p.max_restarts {
        engine.reset(&mut rng);
        if engine.unsat_count() < best_unsat {
            best_unsat = engine.unsat_count();
            best_bits.copy_from_slice(&engine.bits);
            step_of_best = flips_total;
            push(&mut trajectory, (flips_total, best_unsat));
        }
        if best_unsat <= target {
            stop_reason = StopReason::ThresholdReached;
            break 'outer;
        }
        for _ in 0..p.max_flips {
            if flips_total & DEADLINE_CHECK_MASK == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        break 'outer;
                    }
                }
            }
            engine.step(&mut rng, p.noise);
            flips_total += 1;
            if engine.unsat_count() < best_unsat {
                best_unsat = engine.unsat_count();
                best_bits.copy_from_slice(&engine.bits);
                step_of_best = flips_total;
                push(&mut trajectory, (flips_total, best_unsat));
                if best_unsat <= target {
                    stop_reason = StopReason::ThresholdReached;
                    break 'outer;
                }
            }
            if flips_total % TRAJECTORY_STRIDE == 0 {
                push(&mut trajectory, (flips_total, best_unsat));
            }
        }
    }

    push(&mut trajectory, (flips_total, best_unsat));
    SolveResult {
        best_assignment: Assignment::new(best_bits),
        stop_reason,
        best_unsat,
        steps_total: flips_total,
        wall_time: start.elapsed().as_secs_f64(),
        step_of_best,
        trajectory,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_random_3sat, CnfFormula};
    use crate::rng::derive_seed;

    #[test]
    fn break_count_examples() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let a = Assignment::new(vec![true, false]);
        assert_eq!(break_count(&f, &a, 1), 1);
        let a = Assignment::new(vec![true, true]);
        assert_eq!(break_count(&f, &a, 1), 0);
    }

    #[test]
    fn break_count_matches_direct_recount() {
        // Independent oracle: a clause breaks iff satisfied before the flip
        // and unsatisfied after it.
        let mut rng = SplitMix64::new(77);
        for case in 0..30 {
            let f = generate_random_3sat(8, 2.5, 1000 + case);
            for index in 0..(1u64 << 8) {
                let a = Assignment::new((0..8).map(|i| index >> i & 1 == 1).collect());
                let var = rng.next_below(8) as usize + 1;
                let mut flipped = a.clone();
                flipped.set(var, !a.bit(var));
                let oracle = f
                    .clauses()
                    .iter()
                    .filter(|c| c.is_satisfied_by(a.bits()) && !c.is_satisfied_by(flipped.bits()))
                    .count();
                assert_eq!(break_count(&f, &a, var), oracle);
            }
        }
    }

    #[test]
    fn engine_break_count_matches_public_fn() {
        let f = generate_random_3sat(12, 3.0, 5);
        let mut engine = SlsEngine::new(&f);
        let mut rng = SplitMix64::new(2);
        engine.reset(&mut rng);
        let a = Assignment::new(engine.bits.clone());
        for var in 1..=12 {
            assert_eq!(engine.break_count(var), break_count(&f, &a, var));
        }
    }

    #[test]
    fn single_clause_satisfied_within_one_flip() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2, 3]]).unwrap();
        for seed in 0..10 {
            let p = SlsParams {
                seed,
                threshold_fraction: 0.0,
                ..SlsParams::defaults_for_n_vars(3)
            };
            let r = solve_sls(&f, &p);
            assert_eq!(r.stop_reason, StopReason::ThresholdReached);
            assert_eq!(r.best_unsat, 0);
            assert!(r.steps_total <= 1);
        }
    }

    #[test]
    fn flips_target_unsat_clauses_and_respect_min_break() {
        let f = generate_random_3sat(20, 4.0, 9);
        let mut engine = SlsEngine::new(&f);
        let mut rng = SplitMix64::new(4);
        engine.reset(&mut rng);
        for _ in 0..500 {
            if engine.unsat_count() == 0 {
                break;
            }
            let unsat_before: Vec<u32> = engine.unsat.clone();
            let bits_before = engine.bits.clone();
            let choice = engine.step(&mut rng, 0.0); // noise off
            // The flipped variable occurs in the picked clause, which was
            // unsatisfied.
            assert!(unsat_before.contains(&(choice.clause as u32)));
            assert!(f
                .clause(choice.clause)
                .literals()
                .iter()
                .any(|l| l.var() == choice.var));
            // With noise = 0 the choice minimizes break count over the
            // clause's variables.
            let a = Assignment::new(bits_before);
            let min_break = f
                .clause(choice.clause)
                .literals()
                .iter()
                .map(|l| break_count(&f, &a, l.var()))
                .min()
                .unwrap();
            assert_eq!(choice.break_of_chosen, min_break);
            assert!(!choice.noise_move);
        }
    }

    #[test]
    fn solves_low_density_random_3sat() {
        let mut solved = 0;
        for rep in 0..3 {
            let f = generate_random_3sat(100, 3.0, derive_seed(40, 0, rep));
            let p = SlsParams {
                seed: derive_seed(40, 1, rep),
                threshold_fraction: 0.0,
                ..SlsParams::defaults_for_n_vars(100)
            };
            let r = solve_sls(&f, &p);
            if r.best_unsat == 0 {
                assert_eq!(f.count_unsat(&r.best_assignment), Ok(0));
                solved += 1;
            }
        }
        assert!(solved >= 2, "solved only {solved}/3 easy instances");
    }

    #[test]
    fn runs_are_deterministic() {
        let f = generate_random_3sat(50, 4.2, 8);
        let p = SlsParams {
            seed: 31,
            max_flips: 2000,
            max_restarts: 3,
            threshold_fraction: 0.0,
            ..SlsParams::defaults_for_n_vars(50)
        };
        let a = solve_sls(&f, &p);
        let b = solve_sls(&f, &p);
        assert!(a.deterministic_eq(&b));
    }

    #[test]
    fn best_so_far_is_non_increasing() {
        let f = generate_random_3sat(60, 4.2, 3);
        let p = SlsParams {
            seed: 5,
            max_flips: 5000,
            max_restarts: 2,
            threshold_fraction: 0.0,
            ..SlsParams::defaults_for_n_vars(60)
        };
        let r = solve_sls(&f, &p);
        let bests: Vec<usize> = r.trajectory.iter().map(|&(_, u)| u).collect();
        assert!(bests.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(f.count_unsat(&r.best_assignment), Ok(r.best_unsat));
    }
}
