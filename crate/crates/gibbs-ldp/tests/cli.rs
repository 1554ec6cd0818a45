//! CLI behavior: subcommand contracts, exit codes (0 success, 1 config,
//! 2 estimator, 3 invariant violation), config-file/flag precedence, and
//! byte-identical reruns for fixed (config, seed).

use std::path::Path;

use gibbs_ldp::cli::run;

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.join("out");
    let mut argv: Vec<String> = vec!["gibbs-ldp".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    run(argv)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name))
        .unwrap_or_else(|e| panic!("missing artifact {name}: {e}"))
}

#[test]
fn stirling_emits_exact_profile_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &["stirling", "--n-ladder", "10,100,1000", "--lambda", "1"],
    );
    assert_eq!(code, 0);
    let csv = read(tmp.path(), "stirling.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,estimate,std_error,samples,method"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("10,"), "{first}");
    let value: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - gibbs_ldp::stirling_normalized(10, 1.0)).abs() < 1e-15);
    let sidecar = read(tmp.path(), "sidecar.json");
    assert!(sidecar.contains("\"config_sha256\""));
    assert!(sidecar.contains("\"wall_time_seconds\""));
}

#[test]
fn hard_core_intensity_violation_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "free-energy", "--model", "hardcore", "--R", "0.9", "--lambda", "1", "--d", "2",
            "--n", "2",
        ],
    );
    assert_eq!(code, 1);
}

#[test]
fn free_energy_naive_two_points() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "free-energy", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--lambda",
            "1", "--d", "2", "--n", "2", "--samples", "200000", "--seed", "7",
        ],
    );
    assert_eq!(code, 0);
    let json = read(tmp.path(), "free_energy.json");
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mean = parsed["weight_mean"].as_f64().unwrap();
    assert!((mean - (1.0 - std::f64::consts::PI / 16.0)).abs() < 0.005);
}

#[test]
fn free_energy_ti_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "free-energy", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n", "4",
            "--method", "ti", "--beta-nodes", "5", "--burn-in", "20", "--thin", "1",
            "--samples", "400", "--seed", "9",
        ],
    );
    assert_eq!(code, 0);
    let csv = read(tmp.path(), "free_energy.csv");
    assert!(csv.contains("thermodynamic-integration"), "{csv}");
}

#[test]
fn tail_zero_hits_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "tail", "--model", "strauss", "--gamma", "1", "--r", "0.5", "--score",
            "neighbor-count", "--score-r", "0.5", "--a", "-1", "--direction", "lt", "--n", "32",
            "--samples", "2000", "--seed", "3",
        ],
    );
    assert_eq!(code, 2);
}

#[test]
fn coupling_verify_reports_zero_violations() {
    let tmp = tempfile::tempdir().unwrap();
    // Feasible parameters: r = 0.1 gives n_r = 4 and K_r = 3, so n = 64
    // clears the window threshold and b = auto resolves to 4.
    let code = run_in(
        tmp.path(),
        &[
            "coupling-verify", "--model", "strauss", "--gamma", "0.5", "--r", "0.1", "--s-cap",
            "1.5", "--n", "64", "--b", "auto", "--eps", "0.1", "--trials", "200", "--seed", "7",
        ],
    );
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "coupling_report.json")).unwrap();
    assert_eq!(report["bounded_clause_failures"], 0);
    assert_eq!(report["increasing_clause_failures"], 0);
    assert_eq!(report["partner_dense_failures"], 0);
    assert_eq!(report["constants"]["k_r"], 3);
    // The coupling dump carries the mark/replacement/density columns.
    let dump = read(tmp.path(), "coupling_0000.csv");
    assert!(dump.starts_with("x0,x1,u_mark,replaced,dense\n"));
}

#[test]
fn coupling_verify_rejects_windows_below_n_r() {
    let tmp = tempfile::tempdir().unwrap();
    // r = 0.5 at λ = 1 needs n_r = 82 > 64: a configuration error.
    let code = run_in(
        tmp.path(),
        &[
            "coupling-verify", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n",
            "64", "--b", "auto", "--eps", "0.1", "--trials", "10", "--seed", "7",
        ],
    );
    assert_eq!(code, 1);
}

#[test]
fn dense_check_emits_schema_record() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "dense-check", "--r", "0.1", "--n", "64", "--lambda", "1", "--d", "2", "--b",
            "auto", "--eps", "0.2", "--trials", "200", "--seed", "11",
        ],
    );
    assert_eq!(code, 0);
    let record: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "dense_report.json")).unwrap();
    for key in [
        "n", "lambda", "d", "r", "b", "N_r", "N_2r", "s_n", "A_r", "K_r", "n_r", "bound_log",
        "event_E",
    ] {
        assert!(record.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(record["K_r"], 3);
    assert_eq!(record["event_E"], true);
}

#[test]
fn boundary_check_passes_for_capped_strauss() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "boundary-check", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--s-cap",
            "2", "--n", "100", "--lambda", "1", "--d", "2", "--eps", "0.2", "--samples",
            "500", "--seed", "13",
        ],
    );
    assert_eq!(code, 0);
    let report: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "gap_report.json")).unwrap();
    assert_eq!(report["violations_h1"], 0);
    assert_eq!(report["violations_h2"], 0);
}

#[test]
fn sample_dumps_follow_the_csv_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "sample", "--process", "binomial", "--n", "16", "--lambda", "1", "--d", "3",
            "--count", "2", "--seed", "5",
        ],
    );
    assert_eq!(code, 0);
    let dump = read(tmp.path(), "sample_0000.csv");
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("x0,x1,x2"));
    assert_eq!(lines.count(), 16);
    assert!(tmp.path().join("out/sample_0001.csv").exists());
}

#[test]
fn config_file_parses_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("exp.cfg");
    std::fs::write(
        &cfg_path,
        "# experiment\nmodel.kind = strauss\nmodel.gamma = 0.5\nmodel.r = 0.3\nwindow.n = 16\nseed = 1\n",
    )
    .unwrap();
    let code = run_in(
        tmp.path(),
        &[
            "sample", "--config", cfg_path.to_str().unwrap(), "--process", "binomial",
            "--r", "0.5",
        ],
    );
    assert_eq!(code, 0);
    let resolved = read(tmp.path(), "config.resolved");
    assert!(resolved.contains("model.r = 0.5"), "flag must win:\n{resolved}");
    assert!(resolved.contains("model.gamma = 0.5"));
    assert!(resolved.contains("window.n = 16"));
}

#[test]
fn unknown_config_key_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.cfg");
    std::fs::write(&cfg_path, "modell.kind = strauss\n").unwrap();
    let code = run_in(
        tmp.path(),
        &["sample", "--config", cfg_path.to_str().unwrap()],
    );
    assert_eq!(code, 1);
}

#[test]
fn reruns_are_byte_identical() {
    let run_once = |label: &str| -> Vec<(String, Vec<u8>)> {
        let tmp = tempfile::tempdir().unwrap();
        let code = run_in(
            tmp.path(),
            &[
                "convergence", "--profile", "partition", "--method", "naive", "--model",
                "strauss", "--gamma", "0.5", "--r", "0.5", "--n-ladder", "2,4,8", "--samples",
                "5000", "--seed", "99",
            ],
        );
        assert_eq!(code, 0, "{label}");
        // config.resolved embeds the (distinct) output path; the data
        // artifacts are the byte-identity contract.
        let mut artifacts = Vec::new();
        for name in ["profile.csv", "profile.json"] {
            artifacts.push((
                name.to_string(),
                std::fs::read(tmp.path().join("out").join(name)).unwrap(),
            ));
        }
        artifacts
    };
    let a = run_once("first");
    let b = run_once("second");
    assert_eq!(a, b, "artifacts must be byte-identical across reruns");
}

#[test]
fn thread_cap_env_var_does_not_change_results() {
    // The cap is applied via a global pool, so exercise it in-process only
    // once; determinism across thread counts is carried by the per-replica
    // streams and the sorted merge.
    let tmp = tempfile::tempdir().unwrap();
    std::env::set_var("GIBBS_LDP_THREADS", "1");
    let code = run_in(
        tmp.path(),
        &[
            "free-energy", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n", "8",
            "--samples", "20000", "--seed", "42",
        ],
    );
    std::env::remove_var("GIBBS_LDP_THREADS");
    assert_eq!(code, 0);
    let single = read(tmp.path(), "free_energy.csv");
    // Same run on the default pool (in-process, already initialized).
    let tmp2 = tempfile::tempdir().unwrap();
    let code = run_in(
        tmp2.path(),
        &[
            "free-energy", "--model", "strauss", "--gamma", "0.5", "--r", "0.5", "--n", "8",
            "--samples", "20000", "--seed", "42",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(single, read(tmp2.path(), "free_energy.csv"));
}
