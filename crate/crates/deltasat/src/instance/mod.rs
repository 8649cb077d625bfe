//! Instance model and tooling: CNF formulas, the balanced 3-XORSAT family
//! that expands into hard Max-E3SAT instances, an exhaustive oracle for
//! small formulas, and DIMACS interchange.

mod dimacs;
mod generate;
mod oracle;
mod types;

pub use dimacs::{
    emit_dimacs, emit_xcnf, parse_dimacs, parse_xcnf, DimacsError, InstanceMetadata, ParsedCnf,
    GENERATOR_VERSION,
};
pub use generate::{
    generate_balanced_xorsat, generate_planted_xorsat, generate_random_3sat, occurrence_mix,
    GenerateError, MAX_REPAIR_ATTEMPTS, MIN_VARIABLES,
};
pub use oracle::{brute_force_max_sat, BRUTE_FORCE_MAX_VARS};
pub use types::{
    expand_instance, xor_to_cnf, Assignment, CnfClause, CnfFormula, InstanceError, Literal,
    Occurrence, XorClause, XorInstance,
};
