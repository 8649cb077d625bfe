//! Exhaustive Max-SAT oracle for small formulas.

use crate::instance::types::{Assignment, CnfFormula, InstanceError};

/// Exhaustive-scan limit: 2^24 assignments.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Global Max-SAT optimum by scanning all 2^N assignments.
///
/// Returns the minimum unsatisfied-clause count and the witness attaining
/// it. Ties go to the lowest assignment index in the encoding of
/// [`Assignment::from_index`] (variable i is bit i-1, so (1,0,0) precedes
/// (0,1,1)).
pub fn brute_force_max_sat(f: &CnfFormula) -> Result<(usize, Assignment), InstanceError> {
    let n = f.n_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(InstanceError::TooLarge {
            n_vars: n,
            limit: BRUTE_FORCE_MAX_VARS,
        });
    }

    // Bit masks per clause: satisfied iff a positive literal's bit is set or
    // a negated literal's bit is clear.
    let masks: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for lit in c.literals() {
                let bit = 1u64 << (lit.var() - 1);
                if lit.is_negated() {
                    neg |= bit;
                } else {
                    pos |= bit;
                }
            }
            (pos, neg)
        })
        .collect();

    let mut best_unsat = usize::MAX;
    let mut best_index = 0u64;
    for k in 0..1u64 << n {
        let unsat = masks
            .iter()
            .filter(|&&(pos, neg)| pos & k == 0 && neg & !k == 0)
            .count();
        if unsat < best_unsat {
            best_unsat = unsat;
            best_index = k;
            if unsat == 0 {
                break;
            }
        }
    }
    Ok((best_unsat, Assignment::from_index(n, best_index)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate::generate_planted_xorsat;

    fn seven_clause_example() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(
            3,
            &[
                &[1, 2],
                &[1, -2, 3],
                &[1, -2, -3],
                &[-1, -2, 3],
                &[-1, -3],
                &[-2, 3],
                &[-1, 2, 3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn example_formula_optimum() {
        let f = seven_clause_example();
        let (min_unsat, witness) = brute_force_max_sat(&f).unwrap();
        assert_eq!(min_unsat, 1);
        // Several assignments attain 1 — (0,0,0), (0,0,1), (1,0,0), (0,1,1)
        // among them; the enumeration order picks the lowest index, (0,0,0).
        assert_eq!(witness.bits(), &[false, false, false]);
        // (1,0,0) is one of the optima.
        let hand = Assignment::new(vec![true, false, false]);
        assert_eq!(f.count_unsat(&hand), Ok(1));
    }

    #[test]
    fn witness_attains_reported_optimum() {
        let f = seven_clause_example();
        let (min_unsat, witness) = brute_force_max_sat(&f).unwrap();
        assert_eq!(f.count_unsat(&witness), Ok(min_unsat));
    }

    #[test]
    fn complementary_units() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let (min_unsat, _) = brute_force_max_sat(&f).unwrap();
        assert_eq!(min_unsat, 1);
    }

    #[test]
    fn planted_expansion_is_satisfiable() {
        let (inst, plant) = generate_planted_xorsat(16, 1.25, 9).unwrap();
        let f = inst.expand();
        let (min_unsat, witness) = brute_force_max_sat(&f).unwrap();
        assert_eq!(min_unsat, 0);
        assert_eq!(f.count_unsat(&witness), Ok(0));
        assert_eq!(f.count_unsat(&plant), Ok(0));
    }

    #[test]
    fn rejects_oversized_formulas() {
        let f = CnfFormula::from_dimacs_clauses(25, &[&[1, 2, 3]]).unwrap();
        assert_eq!(
            brute_force_max_sat(&f),
            Err(InstanceError::TooLarge {
                n_vars: 25,
                limit: 24
            })
        );
    }
}
