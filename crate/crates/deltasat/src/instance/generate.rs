//! Seeded generators for the balanced 3-XORSAT family and test helpers.
//!
//! The balanced generator is the reproducibility-critical piece: given
//! (n, rho_xor, seed) it must emit the same instance on every platform and
//! in any reimplementation. The procedure, in RNG consumption order:
//!
//! 1. m = round(rho_xor * n) clauses, 3m literal slots. Solving
//!    a + b = n, 3a + 4b = 3m gives b = 3m - 3n variables with 4
//!    occurrences and a = 4n - 3m with 3; infeasible unless 3n <= 3m <= 4n.
//! 2. Shuffle [1..n]; the first b variables get 4 occurrences.
//! 3. Build the slot list (each variable repeated its occurrence count, in
//!    ascending variable order) and shuffle it; consecutive triples are the
//!    clauses.
//! 4. Repair triples with repeated variables: pick a random offending
//!    clause, one of its duplicated slots, a random slot of a random other
//!    clause, and swap; repeat until all triples are distinct, giving up
//!    after [`MAX_REPAIR_ATTEMPTS`] swaps.
//! 5. Draw one uniform parity bit per clause, in clause order (the planted
//!    variant instead draws n assignment bits, variable order, and derives
//!    the parities from them).
//!
//! All draws come from one [`SplitMix64`] stream seeded with `seed`.

use thiserror::Error;

use crate::instance::types::{CnfClause, CnfFormula, Literal, XorClause, XorInstance};
use crate::instance::Assignment;
use crate::rng::SplitMix64;

/// Swap budget for the duplicate-repair loop.
pub const MAX_REPAIR_ATTEMPTS: u64 = 1_000_000;

/// Smallest supported instance.
pub const MIN_VARIABLES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("n = {n} is below the minimum of {min} variables")]
    TooFewVariables { n: usize, min: usize },
    #[error(
        "no 3-or-4 occurrence mix fits n = {n}, rho_xor = {rho_xor}: \
         need 3n <= 3*round(rho_xor*n) <= 4n"
    )]
    InfeasibleBalance { n: usize, rho_xor: f64 },
    #[error("duplicate repair did not converge within {attempts} swap attempts")]
    RepairExhausted { attempts: u64 },
}

/// Generates a balanced 3-XORSAT instance: round(rho_xor * n) clauses, every
/// variable occurring 3 or 4 times, parities i.i.d. uniform. Deterministic in
/// (n, rho_xor, seed).
pub fn generate_balanced_xorsat(
    n: usize,
    rho_xor: f64,
    seed: u64,
) -> Result<XorInstance, GenerateError> {
    let mut rng = SplitMix64::new(seed);
    let triples = balanced_triples(n, rho_xor, &mut rng)?;
    let clauses = triples
        .into_iter()
        .map(|vars| {
            let parity = rng.next_bool();
            XorClause::new(vars, parity).expect("repair leaves triples distinct")
        })
        .collect();
    Ok(XorInstance::new(n, clauses, seed).expect("generated variables are in range"))
}

/// Balanced instance with a planted solution: the parities are chosen so a
/// seeded random assignment satisfies every clause (so the expanded CNF is
/// satisfiable). Returns the instance and the planted assignment.
pub fn generate_planted_xorsat(
    n: usize,
    rho_xor: f64,
    seed: u64,
) -> Result<(XorInstance, Assignment), GenerateError> {
    let mut rng = SplitMix64::new(seed);
    let triples = balanced_triples(n, rho_xor, &mut rng)?;
    let bits: Vec<bool> = (0..n).map(|_| rng.next_bool()).collect();
    let clauses = triples
        .into_iter()
        .map(|vars| {
            let parity = vars
                .iter()
                .fold(false, |acc, &v| acc ^ bits[v as usize - 1]);
            XorClause::new(vars, parity).expect("repair leaves triples distinct")
        })
        .collect();
    let instance = XorInstance::new(n, clauses, seed).expect("generated variables are in range");
    Ok((instance, Assignment::new(bits)))
}

/// Uniform Random-3SAT sanity-test helper: round(rho * n) clauses, each over
/// three distinct uniform variables with uniform polarities.
pub fn generate_random_3sat(n: usize, rho: f64, seed: u64) -> CnfFormula {
    assert!(n >= 3, "need at least 3 variables");
    let m = (rho * n as f64).round() as usize;
    let mut rng = SplitMix64::new(seed);
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vars = [0u32; 3];
        for slot in 0..3 {
            loop {
                let v = rng.next_below(n as u64) as u32 + 1;
                if !vars[..slot].contains(&v) {
                    vars[slot] = v;
                    break;
                }
            }
        }
        let lits = vars
            .iter()
            .map(|&v| Literal::new(v, rng.next_bool()))
            .collect();
        clauses.push(CnfClause::new(lits).expect("distinct variables"));
    }
    CnfFormula::new(n, clauses).expect("variables in range")
}

/// Occurrence mix (three_count, four_count) for the slot arithmetic, or the
/// balance error.
pub fn occurrence_mix(n: usize, rho_xor: f64) -> Result<(usize, usize), GenerateError> {
    if n < MIN_VARIABLES {
        return Err(GenerateError::TooFewVariables {
            n,
            min: MIN_VARIABLES,
        });
    }
    if !(rho_xor > 0.0) {
        return Err(GenerateError::InfeasibleBalance { n, rho_xor });
    }
    let m = (rho_xor * n as f64).round() as usize;
    let slots = 3 * m;
    if slots < 3 * n || slots > 4 * n {
        return Err(GenerateError::InfeasibleBalance { n, rho_xor });
    }
    let four_count = slots - 3 * n;
    Ok((n - four_count, four_count))
}

fn balanced_triples(
    n: usize,
    rho_xor: f64,
    rng: &mut SplitMix64,
) -> Result<Vec<[u32; 3]>, GenerateError> {
    let (_, four_count) = occurrence_mix(n, rho_xor)?;
    let m = (rho_xor * n as f64).round() as usize;

    let mut vars: Vec<u32> = (1..=n as u32).collect();
    rng.shuffle(&mut vars);
    let mut occ = vec![3u8; n];
    for &v in &vars[..four_count] {
        occ[v as usize - 1] = 4;
    }

    let mut slots: Vec<u32> = Vec::with_capacity(3 * m);
    for v in 1..=n as u32 {
        for _ in 0..occ[v as usize - 1] {
            slots.push(v);
        }
    }
    debug_assert_eq!(slots.len(), 3 * m);
    rng.shuffle(&mut slots);

    repair_duplicates(&mut slots, m, rng)?;

    Ok((0..m)
        .map(|c| [slots[3 * c], slots[3 * c + 1], slots[3 * c + 2]])
        .collect())
}

fn has_duplicate(slots: &[u32], clause: usize) -> bool {
    let t = &slots[3 * clause..3 * clause + 3];
    t[0] == t[1] || t[0] == t[2] || t[1] == t[2]
}

/// Positions (0..3) within the clause that collide with another slot of the
/// same clause.
fn duplicate_positions(slots: &[u32], clause: usize) -> Vec<usize> {
    let t = &slots[3 * clause..3 * clause + 3];
    (0..3)
        .filter(|&i| (0..3).any(|j| j != i && t[j] == t[i]))
        .collect()
}

fn repair_duplicates(
    slots: &mut [u32],
    m: usize,
    rng: &mut SplitMix64,
) -> Result<(), GenerateError> {
    const NOT_BAD: u32 = u32::MAX;
    let mut bad: Vec<u32> = Vec::new();
    let mut bad_pos = vec![NOT_BAD; m];
    for c in 0..m {
        if has_duplicate(slots, c) {
            bad_pos[c] = bad.len() as u32;
            bad.push(c as u32);
        }
    }

    let update = |bad: &mut Vec<u32>, bad_pos: &mut Vec<u32>, slots: &[u32], c: usize| {
        let is_bad = has_duplicate(slots, c);
        let pos = bad_pos[c];
        if is_bad && pos == NOT_BAD {
            bad_pos[c] = bad.len() as u32;
            bad.push(c as u32);
        } else if !is_bad && pos != NOT_BAD {
            let moved = *bad.last().unwrap();
            bad.swap_remove(pos as usize);
            if moved != c as u32 {
                bad_pos[moved as usize] = pos;
            }
            bad_pos[c] = NOT_BAD;
        }
    };

    let mut attempts = 0u64;
    while !bad.is_empty() {
        attempts += 1;
        if attempts > MAX_REPAIR_ATTEMPTS {
            return Err(GenerateError::RepairExhausted {
                attempts: MAX_REPAIR_ATTEMPTS,
            });
        }
        let c1 = bad[rng.next_below(bad.len() as u64) as usize] as usize;
        let dups = duplicate_positions(slots, c1);
        let s1 = 3 * c1 + dups[rng.next_below(dups.len() as u64) as usize];
        let mut c2 = rng.next_below(m as u64 - 1) as usize;
        if c2 >= c1 {
            c2 += 1;
        }
        let s2 = 3 * c2 + rng.next_below(3) as usize;
        slots.swap(s1, s2);
        update(&mut bad, &mut bad_pos, slots, c1);
        update(&mut bad, &mut bad_pos, slots, c2);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occurrence_mix_matches_slot_arithmetic() {
        // 3a + 4b = 3.75N with a + b = N gives a = 0.25N, b = 0.75N.
        assert_eq!(occurrence_mix(1000, 1.25), Ok((250, 750)));
        assert_eq!(occurrence_mix(8, 1.25), Ok((2, 6)));
        assert_eq!(occurrence_mix(100, 1.0), Ok((100, 0)));
        assert!(matches!(
            occurrence_mix(100, 2.0),
            Err(GenerateError::InfeasibleBalance { .. })
        ));
        assert!(matches!(
            occurrence_mix(100, 0.5),
            Err(GenerateError::InfeasibleBalance { .. })
        ));
        assert!(matches!(
            occurrence_mix(4, 1.25),
            Err(GenerateError::TooFewVariables { .. })
        ));
    }

    #[test]
    fn generated_instance_is_balanced() {
        let inst = generate_balanced_xorsat(1000, 1.25, 7).unwrap();
        assert_eq!(inst.n_clauses(), 1250);
        let counts = inst.occurrence_counts();
        assert_eq!(counts.iter().filter(|&&c| c == 4).count(), 750);
        assert_eq!(counts.iter().filter(|&&c| c == 3).count(), 250);
        for clause in inst.clauses() {
            let [a, b, c] = clause.vars();
            assert!(a != b && a != c && b != c);
        }
    }

    #[test]
    fn small_instance_occurrence_multiset() {
        let inst = generate_balanced_xorsat(8, 1.25, 1).unwrap();
        assert_eq!(inst.n_clauses(), 10);
        let counts = inst.occurrence_counts();
        let total: usize = counts.iter().sum();
        assert_eq!(total, 30);
        assert_eq!(counts.iter().filter(|&&c| c == 3).count(), 2);
        assert_eq!(counts.iter().filter(|&&c| c == 4).count(), 6);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_balanced_xorsat(1000, 1.25, 7).unwrap();
        let b = generate_balanced_xorsat(1000, 1.25, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_balanced_xorsat(1000, 1.25, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn expansion_density_is_five() {
        let inst = generate_balanced_xorsat(1000, 1.25, 7).unwrap();
        let f = inst.expand();
        assert_eq!(f.n_clauses(), 5000);
        assert_eq!(f.density(), 5.0);
        // Each variable appears in 4x its XOR occurrence count: 12 or 16.
        for var in 1..=f.n_vars() {
            let occ = f.occurrences(var).len();
            assert!(occ == 12 || occ == 16, "var {var} occurs {occ} times");
        }
    }

    #[test]
    fn planted_instance_is_satisfied_by_plant() {
        let (inst, plant) = generate_planted_xorsat(50, 1.25, 3).unwrap();
        assert_eq!(inst.count_violated(&plant), Ok(0));
        let f = inst.expand();
        assert_eq!(f.count_unsat(&plant), Ok(0));
        // Planting fixes parities, not the triple structure.
        let balanced = generate_balanced_xorsat(50, 1.25, 3).unwrap();
        let plain_vars: Vec<[u32; 3]> = balanced.clauses().iter().map(|c| c.vars()).collect();
        let planted_vars: Vec<[u32; 3]> = inst.clauses().iter().map(|c| c.vars()).collect();
        assert_eq!(plain_vars, planted_vars);
    }

    #[test]
    fn random_3sat_has_expected_shape() {
        let f = generate_random_3sat(100, 3.0, 11);
        assert_eq!(f.n_vars(), 100);
        assert_eq!(f.n_clauses(), 300);
        assert!(f.clauses().iter().all(|c| c.len() == 3));
    }

    #[test]
    fn balance_holds_across_seeds_and_sizes() {
        for n in [8usize, 100, 1000] {
            for seed in 0..20u64 {
                let inst = generate_balanced_xorsat(n, 1.25, seed).unwrap();
                for (i, c) in inst.occurrence_counts().iter().enumerate() {
                    assert!(
                        *c == 3 || *c == 4,
                        "n={n} seed={seed} var {} occurs {c} times",
                        i + 1
                    );
                }
            }
        }
    }
}
