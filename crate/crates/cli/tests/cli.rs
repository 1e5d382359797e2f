use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use meanmotion_cli::input::ProblemSpecFile;
use meanmotion_cli::report::AnalysisReport;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanmotion"))
        .args(args)
        .env("MEANMOTION_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_worked_example() {
    let file = data("worked.json");
    let v = json(&run(&["analyze", "--input", path(&file), "--T", "500"]));
    let omega = v["mean_motion"]["omega"].as_f64().unwrap();
    assert!((omega - 2.0614).abs() < 5e-3, "omega {omega}");
    assert_eq!(v["zeros"]["bound"]["holds"], true);
    assert!(v["zeros"]["count"].as_u64().unwrap() as f64 >= omega / PI * 500.0 - 2.0);
    assert_eq!(v["resonance"]["status"], "non_resonant_up_to_bound");
}

#[test]
fn analyze_system_reports_spectrum() {
    let file = data("four_state.json");
    let v = json(&run(&["analyze", "--input", path(&file), "--T", "50"]));
    assert_eq!(v["spectrum"]["controllability"]["controllable"], true);
    assert_eq!(v["spectrum"]["frequencies"].as_array().unwrap().len(), 2);
    assert_eq!(v["oscillators"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_table_output() {
    let file = data("worked.json");
    let text = stdout(&run(&["analyze", "--input", path(&file), "--T", "100", "--format", "table"]));
    assert!(text.contains("omega"));
    assert!(text.contains("N(100)"));
}

#[test]
fn analyze_with_monte_carlo_needs_seed() {
    let file = data("worked.json");
    let out = run(&["analyze", "--input", path(&file), "--T", "10", "--method", "mc"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&run(&[
        "analyze", "--input", path(&file), "--T", "10", "--method", "mc", "--seed", "7",
    ]));
    let omega = v["mean_motion"]["omega"].as_f64().unwrap();
    assert!((omega - 2.0614).abs() < 0.01);
}

#[test]
fn report_round_trips() {
    let file = data("four_state.json");
    let text = stdout(&run(&[
        "analyze", "--input", path(&file), "--T", "80", "--horizons", "20,40,80",
    ]));
    let report: AnalysisReport = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&report).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    assert_eq!(report.empirical.len(), 3);
}

#[test]
fn output_is_deterministic() {
    let file = data("worked.json");
    let args = ["analyze", "--input", path(&file), "--T", "200", "--method", "mc", "--seed", "42"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let conv = ["convergence", "--input", path(&file), "--T-max", "200", "--points", "8"];
    assert_eq!(run(&conv).stdout, run(&conv).stdout);
    let mc = ["wvolume", "--r", "2", "--amps", "1,2,2.5", "--method", "mc", "--seed", "3", "--samples", "50000"];
    assert_eq!(run(&mc).stdout, run(&mc).stdout);
}

#[test]
fn blocks_sine_and_cosine_counts() {
    let horizon = format!("{}", 10.0 * PI);
    // p = (1, 0) gives m(t) = −sin t, zero at both endpoints of [0, 10π].
    let sine = json(&run(&["zeros", "--input", path(&data("sine_block.json")), "--T", &horizon]));
    assert_eq!(sine["count"], 11);
    let cosine = json(&run(&["zeros", "--input", path(&data("cosine_block.json")), "--T", &horizon]));
    assert_eq!(cosine["count"], 10);
    let via_analyze = json(&run(&["analyze", "--input", path(&data("cosine_block.json")), "--T", &horizon]));
    assert_eq!(via_analyze["zeros"]["count"], 10);
}

#[test]
fn convergence_csv() {
    let file = data("worked.json");
    let text = stdout(&run(&["convergence", "--input", path(&file), "--T-max", "1000", "--points", "50"]));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["T", "omega_hat", "omega_formula", "zeros", "zero_density_times_pi"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            assert_eq!(r.len(), 5);
            r.iter().map(|f| f.parse().unwrap()).collect()
        })
        .collect();
    assert_eq!(rows.len(), 50);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1000.0);
    assert!((last[1] - 2.0614).abs() <= 0.05);
}

#[test]
fn convergence_single_oscillator_is_exact() {
    let file = data("single.json");
    let text = stdout(&run(&[
        "convergence", "--input", path(&file), "--T-max", "300", "--points", "6", "--spacing", "log",
    ]));
    for line in text.lines().skip(1) {
        let omega_hat: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((omega_hat - 2.0).abs() <= 1e-9);
    }
}

#[test]
fn wvolume_closed_form() {
    let v = json(&run(&["wvolume", "--r", "1", "--amps", "2.5,3"]));
    let q: f64 = (1.0 - 2.5f64.powi(2) - 9.0) / (2.0 * 2.5 * 3.0);
    assert!((v["value"].as_f64().unwrap() - (1.0 - q.acos() / PI)).abs() < 1e-15);
    let bww = json(&run(&["wvolume", "--r", "1", "--amps", "2.5,3", "--method", "bww"]));
    assert!((bww["value"].as_f64().unwrap() - v["value"].as_f64().unwrap()).abs() < 1e-6);
    let out = run(&["wvolume", "--r", "1", "--amps", "2.5,3,1", "--method", "closed"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["wvolume", "--r", "1", "--amps", "2.5,3", "--method", "mc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bessel_values() {
    let v = json(&run(&["bessel", "--order", "0", "--x", "0"]));
    assert_eq!(v["value"], 1.0);
    let v = json(&run(&["bessel", "--order", "1", "--x", "-7.5", "--oracle"]));
    assert!((v["value"].as_f64().unwrap() - v["oracle"].as_f64().unwrap()).abs() < 1e-10);
    assert_eq!(run(&["bessel", "--order", "2", "--x", "1"]).status.code(), Some(2));
}

#[test]
fn zeros_two_oscillator_bracket() {
    let v = json(&run(&["zeros", "--freqs", "3,1.41421356", "--amps", "2,1", "--T", "50"]));
    let n = v["count"].as_f64().unwrap();
    assert!((47.75..=48.75).contains(&n));
}

#[test]
fn simulate_switches_at_zeros() {
    let file = data("four_state.json");
    let v = json(&run(&["simulate", "--input", path(&file), "--T", "20", "--stride", "100"]));
    let switches = v["switch_times"].as_array().unwrap().len();
    let zeros = json(&run(&["zeros", "--input", path(&file), "--T", "20"]));
    assert_eq!(switches as u64, zeros["count"].as_u64().unwrap());
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.last().unwrap()["t"], 20.0);
    assert!(points.iter().all(|p| p["u"].as_f64().unwrap().abs() == 1.0));
    let out = run(&["simulate", "--input", path(&data("worked.json")), "--T", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--input", path(&file), "--T", "5", "--h", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_with_validation_code() {
    let dir = data("malformed");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(files.len() >= 10);
    for f in &files {
        let out = run(&["analyze", "--input", path(f), "--T", "10"]);
        assert_eq!(out.status.code(), Some(2), "{}", f.display());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error: "), "{}: {err}", f.display());
    }
    let err = String::from_utf8(run(&["analyze", "--input", path(&dir.join("real_spectrum.json")), "--T", "1"]).stderr)
        .unwrap();
    assert!(err.contains("purely imaginary"));
}

#[test]
fn numerical_failures_exit_with_code_three() {
    for name in ["numerical/through_origin.json", "numerical/panel_budget.json"] {
        let out = run(&["analyze", "--input", path(&data(name)), "--T", "10"]);
        assert_eq!(out.status.code(), Some(3), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["analyze", "--T", "1"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--input", "/nonexistent.json", "--T", "1"]).status.code(), Some(2));
    let file = data("worked.json");
    assert_eq!(run(&["analyze", "--input", path(&file), "--T", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--input", path(&file), "--T", "1", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["convergence", "--input", path(&file), "--T-max", "10", "--points", "1"]).status.code(), Some(2));
}

#[test]
fn spec_file_parses_every_form() {
    for name in ["worked.json", "four_state.json", "sine_block.json", "single.json"] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let spec = ProblemSpecFile::parse(&text).unwrap();
        assert!(spec.problem().is_ok(), "{name}");
    }
}
