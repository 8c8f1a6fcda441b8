use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use coupled_wave::carleman::{
    carleman_sweep, parse_conductivity, parse_manufactured, write_carleman_csv, PsiHat, QuadratureOptions,
};
use coupled_wave::counterexample;
use coupled_wave::frequency::{
    fit_spectral_region, parse_eigen_solver, parse_sigma_solver, resolvent_norm_with, resolvent_sweep_with, tol_eig,
    write_eigen_csv, write_sweep_csv,
};
use coupled_wave::timedomain::{fit_log_decay, simulate, write_energy_csv, DecayFit, SimulationConfig};
use coupled_wave::{graph_norm_sq, Grid1D};

use crate::config::ScenarioConfig;

/// Summary of one command: the checks it ran and the numbers behind them.
#[derive(Debug, Default)]
pub struct Outcome {
    pub pass: bool,
    pub fields: Map<String, Value>,
}

impl Outcome {
    fn new(pass: bool) -> Self {
        Self { pass, fields: Map::new() }
    }

    fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.fields.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self, command: &str) -> Value {
        let mut m = self.fields.clone();
        m.insert("command".into(), command.into());
        m.insert("pass".into(), self.pass.into());
        Value::Object(m)
    }

    pub fn line(&self, command: &str) -> String {
        let parts: Vec<String> = self.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let status = if self.pass { "ok" } else { "FAILED" };
        format!("{command}: {status} {}", parts.join(" "))
    }
}

/// CSV destination: a file, or stdout when no path is given.
pub enum Sink {
    File(PathBuf),
    Stdout,
}

impl Sink {
    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match self {
            Sink::File(p) => {
                Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))
            }
            Sink::Stdout => Box::new(std::io::stdout().lock()),
        })
    }

    /// Sibling file for the refined rerun, `out.csv` -> `out.refined.csv`.
    fn refined(&self) -> Option<Sink> {
        match self {
            Sink::File(p) => {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let ext = p.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
                Some(Sink::File(p.with_file_name(format!("{stem}.refined{ext}"))))
            }
            Sink::Stdout => None,
        }
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs()
}

struct SimRun {
    e0: f64,
    e_t: f64,
    c_log: f64,
    budget: f64,
    increase: f64,
    growth: Option<f64>,
}

fn run_simulation(cfg: &ScenarioConfig, grid: &Grid1D, sink: &Sink) -> Result<SimRun> {
    let a = cfg.generator(grid)?;
    let u0 = cfg.initial_data()?.state(grid)?;
    let s = cfg.solver()?;
    let g0 = graph_norm_sq(&u0, &a)?;
    let sim = simulate(&SimulationConfig { generator: a, initial: u0, dt: s.dt, t_final: s.t_final, stride: s.stride })?;
    let fit = if g0 > 0.0 {
        fit_log_decay(&sim.reports, g0)?
    } else {
        // zero data: nothing decays, the running constant is 0 throughout
        let m = sim.reports.len();
        DecayFit {
            c_log: 0.0,
            times: sim.reports.iter().map(|r| r.t).collect(),
            running: vec![0.0; m],
            residual: vec![0.0; m],
            feasible: true,
        }
    };
    let mut out = sink.open()?;
    write_energy_csv(&mut out, &sim, &fit)?;
    out.flush()?;
    Ok(SimRun {
        e0: sim.initial_energy(),
        e_t: sim.final_energy(),
        c_log: fit.c_log,
        budget: sim.budget_residual(),
        increase: sim.max_energy_increase(),
        growth: if g0 > 0.0 { fit.last_decade_growth() } else { None },
    })
}

/// Energy history; passes when E is monotone and the discrete budget closes.
pub fn cmd_simulate(cfg: &ScenarioConfig, sink: &Sink, refine: bool) -> Result<Outcome> {
    let grid = cfg.grid(false)?;
    let r = run_simulation(cfg, &grid, sink)?;
    let mut o = Outcome::new(r.increase <= 1e-12 && r.budget < 1e-8);
    o.set("n", grid.n());
    o.set("E0", r.e0);
    o.set("ET", r.e_t);
    o.set("ET_over_E0", if r.e0 > 0.0 { r.e_t / r.e0 } else { 1.0 });
    o.set("C_log", r.c_log);
    o.set("budget_residual", r.budget);
    o.set("max_energy_increase", r.increase);
    if let Some(g) = r.growth {
        o.set("last_decade_growth", g);
    }
    if refine {
        let fine = cfg.grid(true)?;
        let sink = sink.refined().unwrap_or(Sink::File(std::env::temp_dir().join("coupled-wave-refined.csv")));
        let f = run_simulation(cfg, &fine, &sink)?;
        o.pass &= f.increase <= 1e-12 && f.budget < 1e-8;
        o.set("refined_n", fine.n());
        o.set("refined_ET_over_E0", if f.e0 > 0.0 { f.e_t / f.e0 } else { 1.0 });
        o.set("refined_C_log", f.c_log);
    }
    Ok(o)
}

struct SpectrumRun {
    count: usize,
    max_re: f64,
    feasible: bool,
    c_region: Option<f64>,
    imaginary: usize,
    unstable: usize,
}

fn run_spectrum(cfg: &ScenarioConfig, grid: &Grid1D, sink: &Sink) -> Result<SpectrumRun> {
    let a = cfg.generator(grid)?;
    let solver = match &cfg.frequency {
        Some(f) => parse_eigen_solver(f.eigen_solver.get_ref())?,
        None => parse_eigen_solver("dense")?,
    };
    let pairs = solver.solve(&a)?;
    let mut out = sink.open()?;
    write_eigen_csv(&mut out, &pairs)?;
    out.flush()?;
    let eigs: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
    let fit = fit_spectral_region(&eigs, tol_eig(&a))?;
    Ok(SpectrumRun {
        count: eigs.len(),
        max_re: eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max),
        feasible: fit.feasible,
        c_region: fit.c_region,
        imaginary: fit.numerically_imaginary.len(),
        unstable: fit.unstable.len(),
    })
}

/// Eigenvalues and the spectral-region fit. With `refine`, passes only if
/// C_region moves by less than 20% on the halved grid.
pub fn cmd_spectrum(cfg: &ScenarioConfig, sink: &Sink, refine: bool) -> Result<Outcome> {
    let grid = cfg.grid(false)?;
    let r = run_spectrum(cfg, &grid, sink)?;
    let mut o = Outcome::new(true);
    o.set("n", grid.n());
    o.set("eigenvalues", r.count);
    o.set("max_re", r.max_re);
    o.set("feasible", r.feasible);
    o.set("numerically_imaginary", r.imaginary);
    o.set("unstable", r.unstable);
    if let Some(c) = r.c_region {
        o.set("C_region", c);
    }
    if refine {
        let fine = cfg.grid(true)?;
        let sink = sink.refined().unwrap_or(Sink::File(std::env::temp_dir().join("coupled-wave-refined.csv")));
        let f = run_spectrum(cfg, &fine, &sink)?;
        o.set("refined_n", fine.n());
        o.set("refined_feasible", f.feasible);
        match (r.c_region, f.c_region) {
            (Some(a), Some(b)) if r.feasible && f.feasible => {
                let ch = rel_change(a, b);
                o.set("refined_C_region", b);
                o.set("C_region_change", ch);
                o.pass = ch < 0.2;
            }
            _ => o.pass = r.feasible == f.feasible,
        }
    }
    Ok(o)
}

/// Contraction check `‖(A - γ)⁻¹‖ <= 1/Re γ` at a few shifts right of the
/// axis; returns the largest `Re γ · ‖R(γ)‖`.
fn hille_yosida(cfg: &ScenarioConfig, grid: &Grid1D) -> Result<f64> {
    let a = cfg.generator(grid)?;
    let f = cfg.frequency()?;
    let solver = parse_sigma_solver(f.sigma_solver.get_ref())?;
    let sigma = 0.5 * (f.sigma_min + f.sigma_max);
    let mut worst: f64 = 0.0;
    for xi in [0.25, 1.0, 4.0] {
        let r = resolvent_norm_with(solver.as_ref(), &a, Complex64::new(xi, sigma))?;
        worst = worst.max(xi * r);
    }
    Ok(worst)
}

struct ResolventRun {
    c_res: Option<f64>,
    certified: bool,
    at_spectrum: usize,
    peak: Option<(f64, f64)>,
}

fn run_resolvent(cfg: &ScenarioConfig, grid: &Grid1D, sink: &Sink) -> Result<ResolventRun> {
    let a = cfg.generator(grid)?;
    let f = cfg.frequency()?;
    let solver = parse_sigma_solver(f.sigma_solver.get_ref())?;
    let sw = resolvent_sweep_with(solver.as_ref(), &a, &f.sweep())?;
    let mut out = sink.open()?;
    write_sweep_csv(&mut out, &sw)?;
    out.flush()?;
    Ok(ResolventRun {
        c_res: sw.c_res,
        certified: sw.certified,
        at_spectrum: sw.at_spectrum,
        peak: sw.peak().map(|p| (p.gamma.im, p.value)),
    })
}

/// Resolvent sweep along the imaginary axis plus the contraction spot check.
pub fn cmd_resolvent(cfg: &ScenarioConfig, sink: &Sink, refine: bool) -> Result<Outcome> {
    let grid = cfg.grid(false)?;
    let r = run_resolvent(cfg, &grid, sink)?;
    let hy = hille_yosida(cfg, &grid)?;
    let mut o = Outcome::new(hy <= 1.0 + 1e-9);
    o.set("n", grid.n());
    o.set("certified", r.certified);
    o.set("at_spectrum", r.at_spectrum);
    o.set("hille_yosida_max", hy);
    if let Some(c) = r.c_res {
        o.set("C_res", c);
    }
    if let Some((s, v)) = r.peak {
        o.set("peak_sigma", s);
        o.set("peak_norm", v);
    }
    if refine {
        let fine = cfg.grid(true)?;
        let sink = sink.refined().unwrap_or(Sink::File(std::env::temp_dir().join("coupled-wave-refined.csv")));
        let f = run_resolvent(cfg, &fine, &sink)?;
        o.set("refined_n", fine.n());
        o.set("refined_certified", f.certified);
        if let Some(c) = f.c_res {
            o.set("refined_C_res", c);
        }
        if let Some((_, v)) = f.peak {
            o.set("refined_peak_norm", v);
        }
        if let (Some(a), Some(b)) = (r.c_res, f.c_res) {
            o.set("C_res_change", rel_change(a, b));
        }
    }
    Ok(o)
}

/// λ sweep of the weighted estimate; passes when some threshold exists.
pub fn cmd_carleman(cfg: &ScenarioConfig, sink: &Sink) -> Result<Outcome> {
    let k = cfg.carleman()?;
    let w = parse_manufactured(k.manufactured.get_ref())?;
    let g = parse_conductivity(k.conductivity.get_ref())?;
    let psi = PsiHat::new(cfg.length()?, (k.omega0[0], k.omega0[1]))?;
    let sw = carleman_sweep(w.as_ref(), k.mu, &k.lambdas, psi, g.as_ref(), k.c_candidate, &QuadratureOptions::default())?;
    let mut out = sink.open()?;
    write_carleman_csv(&mut out, &sw.rows)?;
    out.flush()?;
    let mut o = Outcome::new(sw.threshold.is_some());
    o.set("mu", k.mu);
    o.set("c_candidate", k.c_candidate);
    o.set("max_ratio", sw.max_ratio);
    o.set("threshold", sw.threshold.map_or(Value::Null, Value::from));
    Ok(o)
}

/// Closed form versus simulation at three resolutions; the CSV holds the
/// finest.
pub fn cmd_counterexample(sink: &Sink) -> Result<Outcome> {
    let mut errors = Vec::new();
    let mut reports = Vec::new();
    for n in [199, 399, 799] {
        let grid = Grid1D::new(2.0 * std::f64::consts::PI, n)?;
        let rep = counterexample::compare_with_simulation(&grid, 0.5 * grid.h(), 10.0, 50)?;
        errors.push(json!({"n": n, "rel_max_error": rep.rel_max_error, "energy_drift": rep.max_energy_drift}));
        reports.push(rep);
    }
    let finest = reports.last().expect("three resolutions");
    let mut out = sink.open()?;
    finest.write_csv(&mut out)?;
    out.flush()?;
    let decreasing = reports.windows(2).all(|w| w[1].rel_max_error < w[0].rel_max_error);
    let mut o = Outcome::new(decreasing && finest.rel_max_error <= 0.05);
    o.set("resolutions", Value::Array(errors));
    o.set("decreasing", decreasing);
    o.set("continuum_energy", counterexample::continuum_energy());
    Ok(o)
}

/// Runs every command the scenario has a section for, into `dir`.
pub fn cmd_report(cfg: &ScenarioConfig, dir: &Path, refine: bool) -> Result<Outcome> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut o = Outcome::new(true);
    let mut record = |name: &str, r: Outcome| {
        o.pass &= r.pass;
        o.set(name, r.to_json(name));
    };
    if cfg.initial.is_some() && cfg.solver.is_some() {
        record("simulate", cmd_simulate(cfg, &Sink::File(dir.join("simulate.csv")), refine)?);
    }
    record("spectrum", cmd_spectrum(cfg, &Sink::File(dir.join("spectrum.csv")), refine)?);
    if cfg.frequency.is_some() {
        record("resolvent", cmd_resolvent(cfg, &Sink::File(dir.join("resolvent.csv")), refine)?);
    }
    if cfg.carleman.is_some() {
        record("carleman", cmd_carleman(cfg, &Sink::File(dir.join("carleman.csv")))?);
    }
    let summary = serde_json::to_string_pretty(&o.to_json("report"))?;
    std::fs::write(dir.join("summary.json"), summary + "\n")?;
    Ok(o)
}
