//! Random search over solver parameters, scored by how far runs get below
//! the threshold on a fixed set of delta instances.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use deltasat::dmm::DmmParams;
use deltasat::rng::{derive_seed, SplitMix64};
use deltasat::{generate_balanced_xorsat, solve_dmm, threshold_count, CnfFormula, StopReason};

fn sample_params(rng: &mut SplitMix64, m: usize, refine: bool) -> DmmParams<f64> {
    let log_uniform = |rng: &mut SplitMix64, lo: f64, hi: f64| {
        (lo.ln() + rng.next_f64() * (hi.ln() - lo.ln())).exp()
    };
    if refine {
        // Local search around the best coarse-search point.
        let gamma = 0.26 + rng.next_f64() * 0.12;
        let delta = gamma * (0.4 + rng.next_f64() * 0.35);
        return DmmParams {
            alpha: log_uniform(rng, 0.25, 1.5),
            beta: log_uniform(rng, 20.0, 90.0),
            gamma,
            delta,
            epsilon: log_uniform(rng, 0.02, 0.12),
            zeta: log_uniform(rng, 0.05, 0.4),
            dt: log_uniform(rng, 0.03, 0.12),
            xl_max: log_uniform(rng, 80.0, 700.0),
            max_steps: 250_000,
            ..DmmParams::defaults_for_clause_count(m)
        };
    }
    let gamma = 0.05 + rng.next_f64() * 0.40;
    let delta = gamma * (0.2 + rng.next_f64() * 0.79);
    DmmParams {
        alpha: log_uniform(rng, 0.5, 50.0),
        beta: log_uniform(rng, 2.0, 100.0),
        gamma,
        delta,
        epsilon: log_uniform(rng, 1e-4, 0.1),
        zeta: log_uniform(rng, 0.1, 10.0),
        dt: log_uniform(rng, 0.02, 0.3),
        xl_max: log_uniform(rng, 5.0, 2000.0),
        max_steps: 250_000,
        ..DmmParams::defaults_for_clause_count(m)
    }
}

fn score(p: &DmmParams<f64>, instances: &[(CnfFormula, u64)], target: usize) -> (f64, usize) {
    let mut excess_sum = 0.0;
    let mut hits = 0;
    for (f, cell) in instances {
        match solve_dmm(f, p, 0.015, derive_seed(*cell, 7, 0)) {
            Ok(r) => {
                if r.stop_reason == StopReason::ThresholdReached {
                    hits += 1;
                    // earlier is better, weakly
                    excess_sum += r.steps_total as f64 / p.max_steps as f64 - 1.0;
                } else {
                    excess_sum += (r.best_unsat as f64 - target as f64).max(0.0);
                }
            }
            Err(_) => excess_sum += 1e6,
        }
    }
    (excess_sum / instances.len() as f64, hits)
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(250, |s| s.parse().unwrap());
    let configs: u64 = args.get(1).map_or(40, |s| s.parse().unwrap());
    let search_seed: u64 = args.get(2).map_or(1234, |s| s.parse().unwrap());

    let refine = std::env::var("REFINE").is_ok();
    let n_instances: u64 = std::env::var("INSTANCES").map_or(3, |v| v.parse().unwrap());
    let instances: Vec<(CnfFormula, u64)> = (0..n_instances)
        .map(|rep| {
            let cell = derive_seed(1, n as u64, rep);
            (
                generate_balanced_xorsat(n, 1.25, cell).unwrap().expand(),
                cell,
            )
        })
        .collect();
    let target = threshold_count(0.015, instances[0].0.n_clauses());

    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= configs as usize {
                    break;
                }
                let mut rng = SplitMix64::new(derive_seed(search_seed, 9, i as u64));
                let p = sample_params(&mut rng, instances[0].0.n_clauses(), refine);
                let (s, hits) = score(&p, &instances, target);
                println!(
                    "cfg {i:3}: score {s:8.3} hits {hits} | a={:.2} b={:.2} g={:.3} d={:.3} e={:.4} z={:.2} dt={:.3} xl={:.0}",
                    p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.zeta, p.dt, p.xl_max
                );
                results.lock().unwrap().push((s, hits, i));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("--- best configs ---");
    for (s, hits, i) in results.iter().take(8) {
        println!("cfg {i}: score {s:.3} hits {hits}");
    }
}
