//! Desk-scale stress-test kit for hard Max-E3SAT optimization: generate
//! balanced delta-Max-E3SAT instances (3-XORSAT at density 1.25 expanded
//! to CNF at density 5), solve them with a deterministic continuous-time
//! dynamical solver or a WalkSAT baseline, and measure time- and
//! memory-to-threshold scaling.
//!
//! The continuous dynamics and the regression code are generic over the
//! scalar type via [`Real`]; the aliases below pin the common choices.
//!
//! ```
//! use deltasat::{generate_balanced_xorsat, solve_dmm, DmmParamsF64};
//!
//! let xor = generate_balanced_xorsat(16, 1.25, 7).unwrap();
//! let f = xor.expand();
//! let params = DmmParamsF64::defaults_for_clause_count(f.n_clauses());
//! let result = solve_dmm(&f, &params, 0.10, 1).unwrap();
//! assert_eq!(f.count_unsat(&result.best_assignment), Ok(result.best_unsat));
//! ```

pub mod bench;
pub mod dmm;
pub mod fit;
pub mod instance;
pub mod kv;
pub mod num;
pub mod result;
pub mod rng;
pub mod sls;

pub use instance::{
    brute_force_max_sat, emit_dimacs, emit_xcnf, expand_instance, generate_balanced_xorsat,
    generate_planted_xorsat, generate_random_3sat, parse_dimacs, parse_xcnf, xor_to_cnf,
    Assignment, CnfClause, CnfFormula, InstanceMetadata, Literal, XorClause, XorInstance,
};
pub use num::Real;
pub use result::{threshold_count, trajectory_diagnostics, SolveResult, StopReason};
pub use dmm::{solve_dmm, solve_dmm_with_deadline};
pub use sls::{break_count, solve_sls, solve_sls_with_deadline};

// Concrete scalar aliases for the generic core.
pub type DmmParamsF32 = dmm::DmmParams<f32>;
pub type DmmParamsF64 = dmm::DmmParams<f64>;
pub type DmmStateF32 = dmm::DmmState<f32>;
pub type DmmStateF64 = dmm::DmmState<f64>;
pub type DmmSolverF32 = dmm::DmmSolver<f32>;
pub type DmmSolverF64 = dmm::DmmSolver<f64>;
pub type LinearFitF64 = fit::LinearFit<f64>;
pub type ScalingFitF64 = fit::ScalingFit<f64>;
