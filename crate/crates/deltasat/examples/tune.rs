//! Parameter probe for the continuous solver on the delta family.
//!
//! Usage: cargo run --release -p deltasat --example tune -- \
//!            [n] [seeds] [dt] [max_steps] [xl_max|auto] [threshold]

use std::time::Instant;

use deltasat::dmm::DmmParams;
use deltasat::rng::derive_seed;
use deltasat::{generate_balanced_xorsat, solve_dmm, threshold_count, StopReason};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(500, |s| s.parse().unwrap());
    let seeds: u64 = args.get(1).map_or(10, |s| s.parse().unwrap());
    let dt: f64 = args.get(2).map_or(0.1, |s| s.parse().unwrap());
    let max_steps: u64 = args.get(3).map_or(1_000_000, |s| s.parse().unwrap());
    let threshold: f64 = args.get(5).map_or(0.015, |s| s.parse().unwrap());

    let mut reached = 0;
    for rep in 0..seeds {
        let cell = derive_seed(1, n as u64, rep);
        let xor = generate_balanced_xorsat(n, 1.25, cell).unwrap();
        let f = xor.expand();
        let mut p = DmmParams::<f64>::defaults_for_clause_count(f.n_clauses());
        p.dt = dt;
        p.max_steps = max_steps;
        if let Some(xl) = args.get(4) {
            if xl != "auto" {
                p.xl_max = xl.parse().unwrap();
            }
        }
        let env_knob = |name: &str, field: &mut f64| {
            if let Ok(v) = std::env::var(name) {
                *field = v.parse().unwrap();
            }
        };
        env_knob("ALPHA", &mut p.alpha);
        env_knob("BETA", &mut p.beta);
        env_knob("GAMMA", &mut p.gamma);
        env_knob("DELTA", &mut p.delta);
        env_knob("EPSILON", &mut p.epsilon);
        env_knob("ZETA", &mut p.zeta);
        if let Ok(v) = std::env::var("EVAL_STRIDE") {
            p.eval_stride = v.parse().unwrap();
        }
        let target = threshold_count(threshold, f.n_clauses());
        let start = Instant::now();
        match solve_dmm(&f, &p, threshold, derive_seed(cell, 1, 0)) {
            Ok(r) => {
                let ok = r.stop_reason == StopReason::ThresholdReached;
                reached += u64::from(ok);
                println!(
                    "n={n} rep={rep} target={target} -> {:?} best={} steps={} t={:.2}s",
                    r.stop_reason,
                    r.best_unsat,
                    r.steps_total,
                    start.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("n={n} rep={rep} -> ERROR {e}"),
        }
    }
    println!("reached {reached}/{seeds}");
}
