use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled-wave"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--json-summary")
        .output()
        .expect("binary runs")
}

fn summary(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad summary `{text}`: {e}; stderr {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn column(csv_path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(csv_path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

const SMALL: &str = r#"
[domain]
length = 1
n = 29

[coefficients]
alpha = "constant(0)"
beta = "constant(0)"

[initial]
data = "zero"

[solver]
dt = 0.01
t_final = 1
stride = 10

[frequency]
sigma_min = 1.5
sigma_max = 6
count = 10
"#;

#[test]
fn zero_initial_data_gives_an_all_zero_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("e.csv");
    let o = run(&["simulate"], &cfg, &out);
    assert!(o.status.success());
    for name in ["E", "D", "H_norm_sq", "C_log_running"] {
        assert!(column(&out, name).iter().all(|v| *v == 0.0), "{name}");
    }
    assert_eq!(column(&out, "t").len(), 11);
}

#[test]
fn counterexample_energy_is_conserved_on_the_fine_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate"], &scenario("counterexample-fine.toml"), &dir.path().join("e.csv"));
    assert!(o.status.success());
    let s = summary(&o);
    assert!((s["ET_over_E0"].as_f64().unwrap() - 1.0).abs() < 1e-8, "{s}");
}

#[test]
fn overlap_energy_column_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = run(&["simulate"], &scenario("overlap.toml"), &out);
    assert!(o.status.success());
    let e = column(&out, "E");
    assert_eq!(*column(&out, "t").last().unwrap(), 1e4);
    assert!(e.windows(2).all(|w| w[1] - w[0] <= 1e-12 * e[0]));
    assert!(e.last().unwrap() < &(0.5 * e[0]));
}

#[test]
fn spectrum_flags_the_counterexample_and_the_conservative_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum"], &scenario("counterexample.toml"), &dir.path().join("s.csv"));
    assert!(o.status.success());
    assert_eq!(summary(&o)["feasible"], false);

    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("c.csv");
    let s = summary(&run(&["spectrum"], &cfg, &out));
    assert_eq!(s["numerically_imaginary"], s["eigenvalues"]);
    assert!(column(&out, "re").iter().all(|r| r.abs() < 1e-9));
}

#[test]
fn overlap_region_is_stable_under_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["spectrum", "--refine"], &scenario("overlap.toml"), &out);
    assert!(o.status.success());
    let s = summary(&o);
    assert_eq!(s["feasible"], true);
    assert_eq!(s["refined_feasible"], true);
    assert!(s["C_region_change"].as_f64().unwrap() < 0.2);
    assert!(dir.path().join("s.refined.csv").exists());
}

#[test]
fn resolvent_peaks_near_five_for_the_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&["resolvent"], &scenario("counterexample.toml"), &out);
    assert!(o.status.success());
    let s = summary(&o);
    assert!((s["peak_sigma"].as_f64().unwrap() - 5.0).abs() < 0.05, "{s}");
    assert!(s["hille_yosida_max"].as_f64().unwrap() <= 1.0 + 1e-9);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("sigma,resolvent_norm,log_norm,flag\n"));
}

#[test]
fn empty_sweep_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("sigma_max = 6", "sigma_max = 1.5"));
    let o = run(&["resolvent"], &cfg, &dir.path().join("r.csv"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma_min < sigma_max"));
}

#[test]
fn carleman_sweeps_pass_and_small_mu_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let o = run(&["carleman"], &scenario("overlap.toml"), &out);
    assert!(o.status.success());
    assert!(summary(&o)["threshold"].is_number());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("mu,lambda,lhs,rhs_f_term,rhs_local_term,ratio,pass,log_scale\n"));

    let zero = std::fs::read_to_string(scenario("overlap.toml")).unwrap().replace("poly-sine(1)", "zero");
    let o = run(&["carleman"], &write_config(dir.path(), &zero), &out);
    assert!(o.status.success());
    assert!(column(&out, "lhs").iter().all(|v| *v == 0.0));

    let small = std::fs::read_to_string(scenario("overlap.toml")).unwrap().replace("mu = 2", "mu = 0.5");
    let o = run(&["carleman"], &write_config(dir.path(), &small), &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b0 < b"));
}

#[test]
fn config_errors_report_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("n = 29", "n = 29\ncolour = 1"));
    let o = run(&["simulate"], &cfg, &dir.path().join("e.csv"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scenario.toml:5:1") && err.contains("colour"), "{err}");

    let cfg = write_config(dir.path(), &SMALL.replace("constant(0)\"\nbeta", "bump(0.5, 0, 1)\"\nbeta"));
    let o = run(&["simulate"], &cfg, &dir.path().join("e.csv"));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scenario.toml:7:9") && err.contains("width"), "{err}");
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("\"zero\"", "\"random(11)\"").replace("constant(0)\"\nbeta = \"constant(0)", "bump(0.4, 0.6, 1)\"\nbeta = \"bump(0.6, 0.6, 1)"));
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        assert!(run(&["simulate"], &cfg, out).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    for out in [&a, &b] {
        let o = bin().args(["resolvent", "--config"]).arg(&cfg).arg("--out").arg(out).env("COUPLED_WAVE_THREADS", "2").output().unwrap();
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn thread_variable_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("e.csv"))
        .env("COUPLED_WAVE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_writes_every_configured_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("\"zero\"", "\"eigenmode(2)\""));
    let out = dir.path().join("report");
    let o = bin().args(["report", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["simulate.csv", "spectrum.csv", "resolvent.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("carleman.csv").exists());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["pass"], true);
    assert_eq!(s["spectrum"]["feasible"], false);
}

#[test]
fn counterexample_command_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = bin().arg("counterexample").arg("--out").arg(&out).arg("--json-summary").output().unwrap();
    assert!(o.status.success());
    let s = summary(&o);
    assert_eq!(s["decreasing"], true);
    assert!(s["resolutions"][2]["rel_max_error"].as_f64().unwrap() <= 0.05);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,x,y_exact,y_sim,z_exact,z_sim,abs_err\n"));
}
