use std::fs;
use std::process::{Command, Output};

fn ptgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptgraph")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn build_loop_matches_display_diagonal() {
    let o = ptgraph(&["build", "--model", "loop", "--K", "3", "--g", "0", "--h", "0", "--z", "0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 8);
    let diag: Vec<f64> = (0..8).map(|i| rows[i][i]).collect();
    assert_eq!(diag, vec![2.0, 2.0, 3.0, 2.0, 2.0, 3.0, 2.0, 2.0]);
}

#[test]
fn build_chain_two_by_two() {
    let o = ptgraph(&["build", "--model", "chain", "--K", "1", "--nu", "0.5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "col_1,col_2\n2,-1.5\n-0.5,2\n");
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["build", "--model", "ring"],
        vec!["build", "--model", "loop", "--K", "1"],
        vec!["build", "--model", "chain", "--K", "0"],
        vec!["build", "--model", "chain", "--g", "1"],
        vec!["build"],
        vec!["scan", "--z", "1:0:0.1"],
        vec!["scan", "--z", "0:1"],
        vec!["boundary", "--samples", "1"],
        vec!["figure", "fig1"],
        vec!["ep", "--bracket", "1"],
        vec!["ep", "--gamma", "1.035", "--bracket", "1.001", "1.1", "--tol", "0"],
    ] {
        let o = ptgraph(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let unknown = ptgraph(&["figure", "nope"]);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("fig2, fig3"));
}

#[test]
fn scan_shows_reality_transition() {
    let o = ptgraph(&["scan", "--gamma", "0", "--delta", "0", "--z", "0:2:0.005"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().ends_with("ImE_8,n_real"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let z: f64 = cells[0].parse().unwrap();
        let n: usize = cells[cells.len() - 1].parse().unwrap();
        if z < 0.999 {
            assert_eq!(n, 8, "z = {z}");
        } else if z > 1.001 {
            assert!(n < 8, "z = {z}");
        }
    }
}

#[test]
fn scan_island_window() {
    let o = ptgraph(&["scan", "--gamma", "1.035", "--z", "0.9:1.1:0.0005"]);
    let text = stdout(&o);
    let real: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",8"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!real.is_empty());
    // z = 1 itself is a fully real degeneracy point
    assert!(real.iter().all(|&z| (1.0..1.022).contains(&z)));
}

#[test]
fn ep_examples() {
    let near = json(&ptgraph(&["ep", "--gamma", "1.035", "--bracket", "1.001", "1.1"]));
    assert!((near["z_ep"].as_f64().unwrap() - 1.022).abs() < 2e-3);
    let far = json(&ptgraph(&["ep", "--gamma", "1.035", "--bracket", "2", "4"]));
    assert!((far["z_ep"].as_f64().unwrap() - 3.0).abs() < 0.3);
    let chain = json(&ptgraph(&["ep", "--model", "chain", "--K", "2", "--bracket", "0.5", "1.5"]));
    assert!((chain["nu_ep"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let bad = ptgraph(&["ep", "--gamma", "1.035", "--bracket", "1.1", "1.2"]);
    assert_eq!(code(&bad), 3);
}

#[test]
fn boundary_endpoints_and_verification() {
    let o = ptgraph(&["boundary", "--samples", "21", "--branch", "plus", "--verify"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][2], "0.38196601125");
    assert_eq!(rows[20][2], "4");
    assert_eq!(rows[20][3], "0");
    // the window (1, z_max) shrinks below the margin as y approaches -1
    assert_eq!(rows[20][7], "degenerate-window");
    assert!(rows.iter().all(|r| r[7] != "refuted"));
    assert!(rows[..10].iter().all(|r| r[7] == "confirmed"));
    let report: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(report["refuted"], 0);
    assert_eq!(report["samples"], 21);
}

#[test]
fn metric_examples() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("validity.json");
    let o = ptgraph(&["metric", "--model", "chain", "--nu", "0.5", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let validity: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(validity["spd"], true);
    assert_eq!(validity["symmetric"], true);
    assert!(validity["residual"].as_f64().unwrap() < 1e-10);
    assert!(stdout(&o).starts_with("col_1,col_2\n"));

    let complex = ptgraph(&["metric", "--model", "chain", "--nu", "1.5"]);
    assert_eq!(code(&complex), 4);
    let ep = ptgraph(&["metric", "--model", "chain", "--nu", "1"]);
    assert_eq!(code(&ep), 4);

    let island = ptgraph(&["metric", "--model", "loop", "--g", "1.035", "--h", "1.035", "--z", "1.01", "--quiet"]);
    assert_eq!(code(&island), 0);
    assert!(island.stderr.is_empty());
    assert_eq!(stdout(&island).lines().count(), 9);

    let weights = ptgraph(&["metric", "--model", "chain", "--nu", "0.5", "--weights", "1,-1"]);
    assert_eq!(code(&weights), 2);
}

#[test]
fn figures_are_deterministic() {
    for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"] {
        let a = ptgraph(&["figure", name]);
        let b = ptgraph(&["figure", name]);
        assert_eq!(code(&a), 0, "{name}");
        assert!(a.stdout.len() > 100, "{name}");
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
    let fig2 = stdout(&ptgraph(&["figure", "fig2"]));
    assert!(fig2.starts_with("z,ReE_1,"));
    let fig6 = stdout(&ptgraph(&["figure", "fig6"]));
    assert!(fig6.starts_with("y,mu_hat_minus,mu_hat_plus,lambda_hat_minus,lambda_hat_plus\n"));
}

#[test]
fn out_flag_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"model": "chain", "K": 1, "nu": 0.25, "bracket": [0.5, 1.5]}"#).unwrap();
    let out = dir.path().join("m.csv");
    let cfg = config.to_str().unwrap();

    let o = ptgraph(&["--config", cfg, "--out", out.to_str().unwrap(), "build"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&out).unwrap(), "col_1,col_2\n2,-1.25\n-0.75,2\n");

    // flags override the file
    let o = ptgraph(&["build", "--config", cfg, "--nu", "0.5"]);
    assert_eq!(stdout(&o), "col_1,col_2\n2,-1.5\n-0.5,2\n");

    let ep = json(&ptgraph(&["ep", "--config", cfg]));
    assert_eq!(ep["model"], "chain");

    fs::write(&config, r#"{"modle": "chain"}"#).unwrap();
    assert_eq!(code(&ptgraph(&["build", "--config", cfg])), 2);
    assert_eq!(code(&ptgraph(&["build", "--config", "/nonexistent/run.json"])), 2);
}
