use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hybridnet_cli::commands::read_curve;
use hybridnet_core::analysis::Curve;
use hybridnet_core::graph::io::{read_edge_list, read_node_metadata};
use hybridnet_core::propagation::SimulationTrace;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridnet"))
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn exec(sub: &str, config: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--quiet")
        .args(extra)
        .output()
        .unwrap()
}

fn summary(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn network_i(dir: &Path) -> Value {
    json!({
        "seed": 1,
        "output_dir": dir,
        "generator": {"kind": "network_i", "n_total": 1000, "a": 0.9, "k_ring": 4, "p_rewire": 0.3, "m_attach": 4},
        "propagation": {
            "lambda": 0.15, "beta": 0.3, "sigma": 0.3,
            "mixture": {"sis": 0.8, "sirs": 0.05, "sir": 0.15},
            "phi_trigger": 0.1, "horizon": 40, "replicas": 6
        }
    })
}

#[test]
fn generate_network_i_edge_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &network_i(tmp.path()));
    let out = exec("generate", &cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path(), "summary.json");
    assert_eq!(s["edges"], 3800);
    assert_eq!(s["n"], 1000);

    let g = read_edge_list(
        fs::File::open(tmp.path().join("graph.edges"))
            .map(std::io::BufReader::new)
            .unwrap(),
        None,
    )
    .unwrap();
    assert_eq!(g.edge_count(), 3800);
    let meta = read_node_metadata(std::io::BufReader::new(
        fs::File::open(tmp.path().join("nodes.json")).unwrap(),
    ))
    .unwrap();
    assert_eq!(meta.len(), 1000);
    for line in fs::read_to_string(tmp.path().join("construction.jsonl"))
        .unwrap()
        .lines()
    {
        serde_json::from_str::<Value>(line).unwrap();
    }
    summary(tmp.path(), "run_manifest.json");
}

#[test]
fn single_subnet_network_iii_has_no_bridges() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["generator"] = json!({
        "kind": "network_iii", "n_total": 500, "a": 1.0, "k_ring": 4, "p_rewire": 0.3, "m_attach": 4,
        "subnet_plan": {"sizes": [500], "kinds": ["ba"]}
    });
    let path = write_config(tmp.path(), &cfg);
    let out = exec("generate", &path, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(summary(tmp.path(), "summary.json")["inter_subnet_edges"], 0);
}

#[test]
fn generate_twice_gives_identical_edge_lists() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), &network_i(&tmp.path().join("unused")));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = exec("generate", &path, &["--out", dir.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(a.join("graph.edges")).unwrap(),
        fs::read(b.join("graph.edges")).unwrap()
    );
}

#[test]
fn seed_override_changes_the_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), &network_i(&tmp.path().join("unused")));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(exec("generate", &path, &["--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(exec("generate", &path, &["--out", b.to_str().unwrap(), "--seed", "2"])
        .status
        .success());
    assert_ne!(
        fs::read(a.join("graph.edges")).unwrap(),
        fs::read(b.join("graph.edges")).unwrap()
    );
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();

    let mut cfg = network_i(tmp.path());
    cfg["generator"]["bogus"] = json!(1);
    let out = exec("generate", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(2));

    let mut cfg = network_i(tmp.path());
    cfg["generator"]["a"] = json!(1.5);
    let out = exec("generate", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('a'));

    let mut cfg = network_i(tmp.path());
    cfg["propagation"]["mixture"] = json!({"sis": 0.5, "sirs": 0.2, "sir": 0.2});
    let out = exec("simulate", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(2));

    // section required by the subcommand is absent
    let out = exec("meanfield", &write_config(tmp.path(), &network_i(tmp.path())), &[]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin().arg("generate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_code_3() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["propagation"]["graph"] = json!(tmp.path().join("missing.edges"));
    let out = exec("simulate", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(3));

    let curve = tmp.path().join("bad.csv");
    fs::write(&curve, "t,value\n0,0.1\n0,0.2\n").unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["compare"] = json!({"curve": curve});
    let out = exec("compare", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(3));

    fs::write(&curve, "t,value\n").unwrap();
    let out = exec("compare", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(3));

    fs::write(&curve, "time,v\n0,1\n1,2\n").unwrap();
    let out = exec("compare", &write_config(tmp.path(), &cfg), &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_writes_parseable_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["propagation"]["keep_replicas"] = json!(true);
    let out = exec("simulate", &write_config(tmp.path(), &cfg), &["--replicas", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = SimulationTrace::read_csv(std::io::BufReader::new(
        fs::File::open(tmp.path().join("trace.csv")).unwrap(),
    ))
    .unwrap();
    assert_eq!(trace.horizon(), 40);
    let s = summary(tmp.path(), "simulate_summary.json");
    assert_eq!(s["replicas"], 3);
    let triggers = summary(tmp.path(), "triggers.json");
    assert_eq!(triggers.as_array().unwrap().len(), 3);
    assert_eq!(fs::read_dir(tmp.path().join("trace_replicas")).unwrap().count(), 3);
}

#[test]
fn unreachable_trigger_never_fires() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["propagation"]["phi_trigger"] = json!(1.0);
    assert!(exec("simulate", &write_config(tmp.path(), &cfg), &[]).status.success());
    assert_eq!(summary(tmp.path(), "simulate_summary.json")["trigger_fraction"], 0.0);
    let trace = SimulationTrace::read_csv(std::io::BufReader::new(
        fs::File::open(tmp.path().join("trace.csv")).unwrap(),
    ))
    .unwrap();
    assert!(trace.gamma.iter().all(|&g| g == 0.0));
}

#[test]
fn zero_rate_gives_nonincreasing_spreaders() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = network_i(tmp.path());
    cfg["propagation"]["lambda"] = json!(0.0);
    assert!(exec("simulate", &write_config(tmp.path(), &cfg), &[]).status.success());
    let trace = SimulationTrace::read_csv(std::io::BufReader::new(
        fs::File::open(tmp.path().join("trace.csv")).unwrap(),
    ))
    .unwrap();
    assert!(trace.i.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn more_sis_reaches_at_least_the_same_peak() {
    let tmp = tempfile::tempdir().unwrap();
    let mut peaks = Vec::new();
    for (name, mix) in [
        ("hi", json!({"sis": 0.8, "sirs": 0.05, "sir": 0.15})),
        ("lo", json!({"sis": 0.5, "sirs": 0.05, "sir": 0.45})),
    ] {
        let dir = tmp.path().join(name);
        let mut cfg = network_i(&dir);
        cfg["propagation"]["mixture"] = mix;
        cfg["propagation"]["lambda"] = json!(0.1);
        cfg["propagation"]["beta"] = json!(0.4);
        cfg["propagation"]["sigma"] = json!(0.2);
        cfg["propagation"]["replicas"] = json!(20);
        fs::create_dir_all(&dir).unwrap();
        assert!(exec("simulate", &write_config(&dir, &cfg), &[]).status.success());
        peaks.push(summary(&dir, "simulate_summary.json")["peak_i"].as_f64().unwrap());
    }
    assert!(peaks[0] >= peaks[1], "{peaks:?}");
}

fn meanfield_config(dir: &Path, lambda: f64, sigma: f64) -> Value {
    json!({
        "seed": 3,
        "output_dir": dir,
        "meanfield": {
            "lambda": lambda,
            "mixture": {"sis": 0.5, "sirs": 0.3, "sir": 0.2},
            "sigma": sigma,
            "t_max": 2000.0,
            "support": {"type": "power_law", "exponent": 3.0, "k_min": 4, "k_max": 100}
        }
    })
}

#[test]
fn meanfield_subcritical_decays() {
    let tmp = tempfile::tempdir().unwrap();
    let out = exec(
        "meanfield",
        &write_config(tmp.path(), &meanfield_config(tmp.path(), 0.02, 0.5)),
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path(), "meanfield_summary.json");
    assert!(s["terminal_spreader_density"].as_f64().unwrap() < 1e-6);
    assert_eq!(s["fixed_point_theta"], 0.0);
}

#[test]
fn meanfield_supercritical_matches_fixed_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = exec(
        "meanfield",
        &write_config(tmp.path(), &meanfield_config(tmp.path(), 0.3, 0.5)),
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path(), "meanfield_summary.json");
    let terminal = s["terminal_spreader_density"].as_f64().unwrap();
    let predicted = s["predicted_spreader_density"].as_f64().unwrap();
    assert!(terminal > 1e-3);
    assert!((terminal - predicted).abs() < 1e-3, "{terminal} vs {predicted}");

    let report = summary(tmp.path(), "threshold.json");
    assert!(report["lambda_c_empirical"].is_number());
    assert!(report["lambda_c_closedform"].is_number());

    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,k,s_k,i_k,r_k,theta"));
}

#[test]
fn meanfield_without_recovery_reports_infinite_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let out = exec(
        "meanfield",
        &write_config(tmp.path(), &meanfield_config(tmp.path(), 0.3, 0.0)),
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = summary(tmp.path(), "threshold.json");
    assert_eq!(report["lambda_c_empirical"], "infinite");
}

#[test]
fn analyze_reads_a_generated_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let gen_dir = tmp.path().join("gen");
    let cfg = network_i(&gen_dir);
    fs::create_dir_all(&gen_dir).unwrap();
    assert!(exec("generate", &write_config(&gen_dir, &cfg), &[]).status.success());

    let cfg = json!({
        "seed": 1,
        "output_dir": tmp.path(),
        "analyze": {
            "graph": gen_dir.join("graph.edges"),
            "reference": {"k_ring": 4, "p_rewire": 0.3, "a": 0.9, "m_attach": 4, "n_total": 1000}
        }
    });
    let out = exec("analyze", &write_config(tmp.path(), &cfg), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path(), "analysis.json");
    assert_eq!(s["n"], 1000);
    assert!((s["mean_degree"].as_f64().unwrap() - 7.6).abs() < 1e-12);
    let tv = s["tv_distance"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&tv));
    let raw = fs::read_to_string(tmp.path().join("degree_histogram.csv")).unwrap();
    assert!(raw.starts_with("k,count,pk"));
}

fn compare_run(dir: &Path, curve: &Curve) -> Value {
    let path = dir.join("reference.csv");
    let mut f = fs::File::create(&path).unwrap();
    hybridnet_cli::commands::write_curve(curve, &mut f).unwrap();
    let mut cfg = network_i(dir);
    cfg["compare"] = json!({"curve": path, "mixtures": [{"sis": 0.8, "sirs": 0.05, "sir": 0.15}]});
    let out = exec("compare", &write_config(dir, &cfg), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    summary(dir, "similarity.json")
}

#[test]
fn compare_against_own_curve_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let sim_dir = tmp.path().join("sim");
    fs::create_dir_all(&sim_dir).unwrap();
    assert!(exec("simulate", &write_config(&sim_dir, &network_i(&sim_dir)), &[])
        .status
        .success());
    let trace = SimulationTrace::read_csv(std::io::BufReader::new(
        fs::File::open(sim_dir.join("trace.csv")).unwrap(),
    ))
    .unwrap();
    let own = Curve::from_values("own", &trace.i).unwrap();

    let report = compare_run(tmp.path(), &own);
    assert_eq!(report["ranking"][0]["rho"], 1.0);

    // the written reference parses back to the same samples
    let back = read_curve(&tmp.path().join("reference.csv")).unwrap();
    assert_eq!(back.samples(), own.samples());
}

#[test]
fn compare_against_zero_curve_scores_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let zero = Curve::from_values("zero", &[0.0; 41]).unwrap();
    let report = compare_run(tmp.path(), &zero);
    assert_eq!(report["ranking"][0]["rho"], 0.0);
}

#[test]
fn saved_manifest_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = network_i(tmp.path());
    assert!(exec("generate", &write_config(tmp.path(), &cfg), &[]).status.success());
    let manifest = summary(tmp.path(), "run_manifest.json");
    let reloaded = hybridnet_cli::ExperimentConfig::from_json(&manifest["config"].to_string()).unwrap();
    let original = hybridnet_cli::ExperimentConfig::from_json(&cfg.to_string()).unwrap();
    assert_eq!(reloaded.to_json(), original.to_json());
}
