//! Estimates the reachable floor of one delta instance by attacking it with
//! many solver seeds (both solvers) and reporting the best ever seen.

use deltasat::dmm::DmmParams;
use deltasat::rng::derive_seed;
use deltasat::sls::SlsParams;
use deltasat::{generate_balanced_xorsat, solve_dmm, solve_sls, threshold_count};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(250, |s| s.parse().unwrap());
    let rep: u64 = args.get(1).map_or(0, |s| s.parse().unwrap());
    let tries: u64 = args.get(2).map_or(5, |s| s.parse().unwrap());
    let dmm_steps: u64 = args.get(3).map_or(300_000, |s| s.parse().unwrap());

    let cell = derive_seed(1, n as u64, rep);
    let xor = generate_balanced_xorsat(n, 1.25, cell).unwrap();
    let f = xor.expand();
    let target = threshold_count(0.015, f.n_clauses());
    println!("n={n} rep={rep} m={} target={target}", f.n_clauses());

    let mut best = usize::MAX;
    for k in 0..tries {
        let mut p = DmmParams::<f64>::defaults_for_clause_count(f.n_clauses());
        p.xl_max = std::env::var("XL").map_or(10.0, |v| v.parse().unwrap());
        p.zeta = std::env::var("ZETA").map_or(2.0, |v| v.parse().unwrap());
        p.delta = std::env::var("DELTA").map_or(0.2, |v| v.parse().unwrap());
        p.max_steps = dmm_steps;
        let r = solve_dmm(&f, &p, 0.0, derive_seed(cell, 77, k)).unwrap();
        best = best.min(r.best_unsat);
        println!("  dmm try {k}: best={} (cumulative {best})", r.best_unsat);
    }
    for k in 0..tries {
        let p = SlsParams {
            seed: derive_seed(cell, 78, k),
            max_flips: 200_000,
            max_restarts: 10,
            threshold_fraction: 0.0,
            ..SlsParams::defaults_for_n_vars(n)
        };
        let r = solve_sls(&f, &p);
        best = best.min(r.best_unsat);
        println!("  sls try {k}: best={} (cumulative {best})", r.best_unsat);
    }
    println!("floor estimate: {best} (target {target})");
}
