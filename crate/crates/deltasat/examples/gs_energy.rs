//! Measures exact optima of small delta instances with the exhaustive
//! oracle, to situate the threshold fraction against the true ground state.

use deltasat::rng::derive_seed;
use deltasat::{brute_force_max_sat, generate_balanced_xorsat, threshold_count};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(20, |s| s.parse().unwrap());
    let seeds: u64 = args.get(1).map_or(10, |s| s.parse().unwrap());

    let mut total_frac = 0.0;
    for rep in 0..seeds {
        let xor = generate_balanced_xorsat(n, 1.25, derive_seed(2, n as u64, rep)).unwrap();
        let f = xor.expand();
        let (min_unsat, _) = brute_force_max_sat(&f).unwrap();
        let frac = min_unsat as f64 / f.n_clauses() as f64;
        total_frac += frac;
        println!(
            "n={n} rep={rep} m={} min_unsat={min_unsat} frac={:.4} target_1.5%={}",
            f.n_clauses(),
            frac,
            threshold_count(0.015, f.n_clauses())
        );
    }
    println!("mean unsat fraction at optimum: {:.4}", total_frac / seeds as f64);
}
