//! End-to-end tests of the deltasat binary: exit codes, file outputs,
//! determinism, and config round trips.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn deltasat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltasat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SEVEN_CLAUSE: &str = "p cnf 3 7\n1 2 0\n1 -2 3 0\n1 -2 -3 0\n-1 -2 3 0\n-1 -3 0\n-2 3 0\n-1 2 3 0\n";

#[test]
fn generate_is_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    let out = deltasat(
        &["generate", "-n", "40", "--rho", "1.25", "--seed", "7", "-o", "a"],
        tmp.path(),
    );
    assert!(out.status.success(), "{:?}", out);
    let out2 = deltasat(
        &["generate", "-n", "40", "--rho", "1.25", "--seed", "7", "-o", "b"],
        tmp.path(),
    );
    assert!(out2.status.success());
    for name in ["d40_s7.xcnf", "d40_s7.cnf", "d40_s7.meta.json"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical invocations");
    }
    let cnf = std::fs::read_to_string(tmp.path().join("a/d40_s7.cnf")).unwrap();
    assert!(cnf.starts_with("p cnf 40 200\n"));
}

#[test]
fn generate_records_actual_density_on_rounded_sizes() {
    let tmp = TempDir::new().unwrap();
    let out = deltasat(
        &["generate", "-n", "9", "--rho", "1.25", "--seed", "1", "-o", "inst"],
        tmp.path(),
    );
    assert!(out.status.success());
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("inst/d9_s1.meta.json")).unwrap(),
    )
    .unwrap();
    // round(1.25 * 9) = 11 XOR clauses -> 44 CNF clauses, density 44/9.
    assert_eq!(meta["m_xor"], 11);
    assert_eq!(meta["m_cnf"], 44);
    assert!((meta["rho_cnf"].as_f64().unwrap() - 44.0 / 9.0).abs() < 1e-12);
}

#[test]
fn generate_rejects_infeasible_density() {
    let tmp = TempDir::new().unwrap();
    let out = deltasat(
        &["generate", "-n", "100", "--rho", "2.0", "--seed", "1", "-o", "x"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn planted_instance_verifies_to_zero() {
    let tmp = TempDir::new().unwrap();
    let out = deltasat(
        &["generate", "-n", "24", "--seed", "5", "--planted", "-o", "p"],
        tmp.path(),
    );
    assert!(out.status.success());
    let verify = deltasat(
        &["verify", "p/d24_s5.cnf", "p/d24_s5.plant"],
        tmp.path(),
    );
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(stdout(&verify).trim(), "0");
}

#[test]
fn solve_trivial_instance_exits_zero_and_repeats_identically() {
    let tmp = TempDir::new().unwrap();
    let cnf = write(tmp.path(), "tiny.cnf", "p cnf 3 1\n1 2 3 0\n");
    let args = ["solve", "--solver", "dmm", "--threshold", "0", "--seed", "1", &cnf];
    let a = deltasat(&args, tmp.path());
    assert_eq!(a.status.code(), Some(0), "{a:?}");
    let b = deltasat(&args, tmp.path());
    let strip_wall = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with("wall_time_s"))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(strip_wall(&stdout(&a)), strip_wall(&stdout(&b)));
    assert!(stdout(&a).contains("best_unsat        0"));
}

#[test]
fn solve_reports_threshold_not_reached() {
    let tmp = TempDir::new().unwrap();
    // x1 and not-x1 cannot both hold; threshold 0 is unreachable.
    let cnf = write(tmp.path(), "unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let out = deltasat(
        &[
            "solve", "--solver", "sls", "--threshold", "0", "--max-flips", "50",
            "--max-restarts", "2", "--seed", "3", &cnf,
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("best_unsat        1"));
}

#[test]
fn solve_rejects_malformed_cnf() {
    let tmp = TempDir::new().unwrap();
    let cnf = write(tmp.path(), "bad.cnf", "p cnf 2 1\n1 x 0\n");
    let out = deltasat(&["solve", "--solver", "dmm", &cnf], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_json_result() {
    let tmp = TempDir::new().unwrap();
    let cnf = write(tmp.path(), "tiny.cnf", "p cnf 3 1\n-1 2 3 0\n");
    let out = deltasat(
        &[
            "solve", "--solver", "sls", "--threshold", "0", "--seed", "2", "--out",
            "r.json", "--print-assignment", &cnf,
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l.starts_with("v ")));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("r.json")).unwrap())
            .unwrap();
    assert_eq!(json["stop_reason"], "threshold_reached");
    assert_eq!(json["best_unsat"], 0);
    assert!(json["trajectory"].as_array().is_some());
}

#[test]
fn verify_counts_unsatisfied_clauses() {
    let tmp = TempDir::new().unwrap();
    let cnf = write(tmp.path(), "seven.cnf", SEVEN_CLAUSE);
    let assignment = write(tmp.path(), "a.txt", "1 0 0\n");
    let out = deltasat(&["verify", &cnf, &assignment], tmp.path());
    assert_eq!(stdout(&out).trim(), "1");
    assert_eq!(out.status.code(), Some(1));

    // (0,1,1) also leaves exactly one clause unsatisfied.
    let assignment = write(tmp.path(), "b.txt", "0 1 1\n");
    let out = deltasat(&["verify", &cnf, &assignment], tmp.path());
    assert_eq!(stdout(&out).trim(), "1");

    // v-line form of a satisfying assignment for a satisfiable formula.
    let sat_cnf = write(tmp.path(), "sat.cnf", "p cnf 2 2\n1 0\n-2 0\n");
    let v = write(tmp.path(), "v.txt", "v 1 -2\n");
    let out = deltasat(&["verify", &sat_cnf, &v], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn verify_rejects_wrong_length_and_garbage() {
    let tmp = TempDir::new().unwrap();
    let cnf = write(tmp.path(), "seven.cnf", SEVEN_CLAUSE);
    let short = write(tmp.path(), "short.txt", "1 0\n");
    let out = deltasat(&["verify", &cnf, &short], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let garbage = write(tmp.path(), "garbage.txt", "1 0 maybe\n");
    let out = deltasat(&["verify", &cnf, &garbage], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 1"), "diagnostic missing line number: {err}");
}

#[test]
fn bench_micro_sweep_writes_csv_and_resumes() {
    let tmp = TempDir::new().unwrap();
    let spec = write(
        tmp.path(),
        "sweep.conf",
        "n_values = 8,16\nseeds_per_n = 1\nthreshold_fraction = 0.2\nbudget_s = 10\n",
    );
    let out = deltasat(&["bench", "--spec", &spec, "--out", "sweep.csv"], tmp.path());
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 5, "header + 4 rows:\n{text}");
    let again = deltasat(&["bench", "--spec", &spec, "--out", "sweep.csv"], tmp.path());
    assert!(again.status.success());
    assert_eq!(std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap(), text);
}

#[test]
fn fit_recovers_exact_linear_scaling() {
    let tmp = TempDir::new().unwrap();
    let mut csv = String::from(
        "solver,n,m,seed,threshold_fraction,status,time_to_threshold_s,steps_or_flips,best_unsat,mem_model_bytes,peak_rss_bytes\n",
    );
    for n in [250u64, 500, 1000, 2000] {
        csv.push_str(&format!(
            "dmm,{n},{},1,0.015,threshold_reached,{},10,0,100,\n",
            5 * n,
            2 * n
        ));
    }
    let path = write(tmp.path(), "lin.csv", &csv);
    let out = deltasat(&["fit", &path, "--model", "power_law"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("slope    1.00000"), "{text}");
    assert!(text.contains("r2 1.000000"), "{text}");
}

#[test]
fn fit_with_too_few_points_exits_five() {
    let tmp = TempDir::new().unwrap();
    let csv = "solver,n,m,seed,threshold_fraction,status,time_to_threshold_s,steps_or_flips,best_unsat,mem_model_bytes,peak_rss_bytes\n\
               dmm,250,1250,1,0.015,threshold_reached,1.0,10,0,100,\n\
               dmm,500,2500,1,0.015,threshold_reached,2.0,10,0,100,\n";
    let path = write(tmp.path(), "short.csv", csv);
    let out = deltasat(&["fit", &path], tmp.path());
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn print_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let out = deltasat(&["solve", "--print-config"], tmp.path());
    assert!(out.status.success());
    let config_path = write(tmp.path(), "solve.conf", &stdout(&out));
    let reloaded = deltasat(
        &["solve", "--config", &config_path, "--print-config"],
        tmp.path(),
    );
    assert_eq!(stdout(&out), stdout(&reloaded));

    // Flags win over the config file.
    let overridden = deltasat(
        &[
            "solve", "--config", &config_path, "--solver", "sls", "--noise", "0.25",
            "--print-config",
        ],
        tmp.path(),
    );
    let text = stdout(&overridden);
    assert!(text.contains("solver = sls"));
    assert!(text.contains("noise = 0.25"));

    let bench_out = deltasat(&["bench", "--print-config"], tmp.path());
    assert!(bench_out.status.success());
    let spec_path = write(tmp.path(), "bench.conf", &stdout(&bench_out));
    let bench_again = deltasat(
        &["bench", "--spec", &spec_path, "--print-config"],
        tmp.path(),
    );
    assert_eq!(stdout(&bench_out), stdout(&bench_again));
}

#[test]
fn config_file_with_unknown_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let config = write(tmp.path(), "bad.conf", "solver = dmm\nwibble = 3\n");
    let cnf = write(tmp.path(), "tiny.cnf", "p cnf 3 1\n1 2 3 0\n");
    let out = deltasat(&["solve", "--config", &config, &cnf], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
