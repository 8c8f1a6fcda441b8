//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines are always shown. A criterion listed
//! in `KNOWN_FAILURES` is expected to fail for a documented reason; the run
//! fails if any other criterion fails or if a known failure starts passing.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use coupled_wave::carleman::{
    build_eta2, build_weights, carleman_check, carleman_sweep, parse_manufactured, weight_b, weight_b0,
    ConstantConductivity, PsiHat, QuadratureOptions, Scaled,
};
use coupled_wave::coeffs::{parse_profile, CoefficientField};
use coupled_wave::counterexample;
use coupled_wave::energy::{dissipation, inner_h};
use coupled_wave::frequency::{
    eigenvalues, fit_spectral_region, resolvent_sweep, tol_eig, EigenSolver, ShiftInvert, SweepConfig,
};
use coupled_wave::initial::{parse_initial, InitialData, Random};
use coupled_wave::timedomain::{fit_log_decay, simulate, SimulationConfig};
use coupled_wave::{GeneratorMatrix, Grid1D, Result};

const KNOWN_FAILURES: &[&str] = &[
    // the printed cutoff polynomial is only C² at |x| = r (third derivative -10240/(9r³))
    "5",
];

const OVERLAP_ALPHA: &str = "bump(1.3, 2pi, 2)";
const OVERLAP_BETA: &str = "bump(1.9, 2pi, 1.2)";

fn generator(length: f64, n: usize, alpha: &str, beta: &str, g: &str) -> Result<GeneratorMatrix> {
    let grid = Grid1D::new(length, n)?;
    let coeffs = CoefficientField::sample(
        &grid,
        parse_profile(alpha)?.as_ref(),
        parse_profile(beta)?.as_ref(),
        parse_profile(g)?.as_ref(),
    )?;
    GeneratorMatrix::new(&grid, coeffs)
}

fn overlap(n: usize) -> Result<GeneratorMatrix> {
    generator(PI, n, OVERLAP_ALPHA, OVERLAP_BETA, "constant(1)")
}

fn section4(n: usize) -> Result<GeneratorMatrix> {
    let grid = Grid1D::new(2.0 * PI, n)?;
    GeneratorMatrix::new(&grid, counterexample::coefficients(&grid)?)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn judge(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() < limit
}

/// Closed-form residuals, convergence against the simulation, and energy
/// constancy.
fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = SplitMix64::seed_from_u64(1);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut worst_residual: f64 = 0.0;
    let mut points = 0;
    while points < 10_000 {
        let (t, x) = (10.0 * unit(), 2.0 * PI * unit());
        let Ok((ry, rz)) = counterexample::residual(t, x, 1e-6) else { continue };
        worst_residual = worst_residual.max(ry.abs()).max(rz.abs());
        points += 1;
    }
    let mut errors = Vec::new();
    for n in [199, 399, 799] {
        let grid = Grid1D::new(2.0 * PI, n)?;
        let rep = counterexample::compare_with_simulation(&grid, 0.5 * grid.h(), 10.0, 50)?;
        errors.push((rep.rel_max_error, rep.max_energy_drift));
    }
    let grid = Grid1D::new(2.0 * PI, 3199)?;
    let finest = counterexample::compare_with_simulation(&grid, 0.5 * grid.h(), 10.0, 400)?;
    let err799 = errors[2].0;
    let decreasing = errors.windows(2).all(|w| w[1].0 < w[0].0);
    let pass = worst_residual < 1e-12
        && err799 <= 0.05
        && decreasing
        && finest.max_energy_drift < 1e-8
        && within(start, Duration::from_secs(60));
    judge(
        pass,
        format!(
            "max residual {worst_residual:.2e} (<1e-12); rel err n=199/399/799 {:.2e}/{:.2e}/{:.2e} (n=799 <= 5e-2, decreasing); \
             energy drift n=799 {:.2e}, n=3199 {:.2e} (<1e-8); {:.1?}",
            errors[0].0,
            errors[1].0,
            err799,
            errors[2].1,
            finest.max_energy_drift,
            start.elapsed()
        ),
    )
}

/// Dissipation identity and monotone energy over randomized scenarios.
fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = SplitMix64::seed_from_u64(2);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut worst_identity: f64 = 0.0;
    let mut worst_increase: f64 = 0.0;
    for k in 0..20 {
        let length = 1.0 + 3.0 * unit();
        let n = 20 + (100.0 * unit()) as usize;
        let alpha = format!("bump({}, {}, {})", length * unit(), length * (0.2 + unit()), 3.0 * unit());
        let beta = if k % 2 == 0 {
            format!("bump({}, {}, {})", length * unit(), length * (0.2 + unit()), 0.1 + 2.0 * unit())
        } else {
            format!("piecewise({}:0, {}:{})", 0.5 * length, length, 0.1 + 2.0 * unit())
        };
        let g = format!("piecewise({}:{}, {}:{})", 0.4 * length, 0.5 + unit(), length, 0.5 + 2.0 * unit());
        let a = generator(length, n, &alpha, &beta, &g)?;
        let u = Random(100 + k).state(a.grid())?;
        let au = a.apply(&u)?;
        let lhs = inner_h(&au, &u, a.grid(), a.coeffs())?;
        let d = dissipation(&u, a.grid(), a.coeffs())?;
        worst_identity = worst_identity.max((lhs + d).abs() / d);
        let sim = simulate(&SimulationConfig { generator: a, initial: u, dt: 0.01, t_final: 5.0, stride: 1 })?;
        worst_increase = worst_increase.max(sim.max_energy_increase());
    }
    let pass = worst_identity < 1e-12 && worst_increase <= 1e-12 && within(start, Duration::from_secs(60));
    judge(
        pass,
        format!(
            "identity rel err {worst_identity:.2e} (<1e-12); max relative E increase {worst_increase:.2e} (<=1e-12); {:.1?}",
            start.elapsed()
        ),
    )
}

/// Instability witness for the counterexample and a damped, grid-stable
/// spectral region for the overlapping scenario.
fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let target = Complex64::new(0.0, 5.0);
    let a4 = section4(199)?;
    let nearest = eigenvalues(&a4)?
        .into_iter()
        .min_by(|p, q| (p - target).norm().total_cmp(&(q - target).norm()))
        .expect("nonempty spectrum");
    let bound = (10.0 * a4.grid().h()).max(5e-2);
    let witness = (nearest - target).norm() <= bound;
    let shifted = ShiftInvert::new(vec![target]).solve(&a4)?[0].value;

    let mut fits = Vec::new();
    let mut max_re = f64::NEG_INFINITY;
    let mut damped = true;
    for n in [249, 498] {
        let a = overlap(n)?;
        let tol = tol_eig(&a);
        let eigs = eigenvalues(&a)?;
        let re = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        max_re = max_re.max(re);
        damped &= re < -tol;
        fits.push(fit_spectral_region(&eigs, tol)?);
    }
    let c: Vec<f64> = fits.iter().filter_map(|f| f.c_region).collect();
    let feasible = fits.iter().all(|f| f.feasible) && c.len() == 2;
    let change = if c.len() == 2 { (c[1] - c[0]).abs() / c[0] } else { f64::INFINITY };
    let pass = witness && damped && feasible && change < 0.2 && within(start, Duration::from_secs(300));
    judge(
        pass,
        format!(
            "nearest to 5i at n=199: {:.4e}{:+.6}i (dist {:.2e} <= {bound:.2e}), shift-invert {:.2e}{:+.6}i; \
             overlap max Re {max_re:.3e} (< -tol), feasible {feasible}, C_region n=249/498 {:?} change {change:.2e} (<0.2); {:.1?}",
            nearest.re,
            nearest.im,
            (nearest - target).norm(),
            shifted.re,
            shifted.im,
            c,
            start.elapsed()
        ),
    )
}

/// Finite, refinement-stable C_res for the overlap; a growing peak near
/// σ = 5 for the counterexample.
fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let ns = [199, 399, 799];
    let mut c_res = Vec::new();
    let mut certified = true;
    for n in ns {
        let sw = resolvent_sweep(&overlap(n)?, &SweepConfig::new(1.5, 20.0, 186))?;
        certified &= sw.certified;
        c_res.push(sw.c_res.unwrap_or(f64::NAN));
    }
    let change = c_res.windows(2).map(|w| (w[1] - w[0]).abs() / w[0]).fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for n in ns {
        let sw = resolvent_sweep(&section4(n)?, &SweepConfig::new(1.5, 8.0, 131))?;
        peaks.push(sw.peak_in(4.9, 5.1).map_or(f64::NAN, |p| p.value));
    }
    let growing = peaks.windows(2).all(|w| w[1] > 2.0 * w[0]);
    let pass = certified && change < 0.05 && growing && within(start, Duration::from_secs(300));
    judge(
        pass,
        format!(
            "overlap C_res n=199/399/799 {:.5}/{:.5}/{:.5} certified {certified}, max change {change:.2e} (<5e-2); \
             counterexample peak near 5 {:.2e}/{:.2e}/{:.2e} (each > 2x previous); {:.1?}",
            c_res[0],
            c_res[1],
            c_res[2],
            peaks[0],
            peaks[1],
            peaks[2],
            start.elapsed()
        ),
    )
}

/// Weighted elliptic estimate, homogeneity, and the cutoff η₂.
fn criterion_5() -> Result<Outcome> {
    let start = Instant::now();
    let psi = PsiHat::new(PI, (1.3, 1.9))?;
    let g = ConstantConductivity(1.0);
    let quad = QuadratureOptions::default();
    let c = 2.0;
    let lambdas = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut all_thresholds = true;
    let mut max_ratio: f64 = 0.0;
    let mut worst_homogeneity: f64 = 0.0;
    for spec in ["poly-sine(1)", "gaussian-bump(1.6, 0.5)", "psi-profile"] {
        let w = parse_manufactured(spec)?;
        for mu in [1.0, 2.0, 4.0] {
            let sw = carleman_sweep(w.as_ref(), mu, &lambdas, psi, &g, c, &quad)?;
            all_thresholds &= sw.threshold.is_some();
            max_ratio = max_ratio.max(sw.max_ratio);
        }
        let weights = build_weights(2.0, 8.0, psi)?;
        let r1 = carleman_check(w.as_ref(), &weights, &g, c, &quad)?;
        let r2 = carleman_check(&Scaled { inner: w.as_ref(), factor: 2.0 }, &weights, &g, c, &quad)?;
        for (a, b) in [(r1.lhs, r2.lhs), (r1.rhs_f, r2.rhs_f), (r1.rhs_local, r2.rhs_local)] {
            worst_homogeneity = worst_homogeneity.max((b / a - 4.0).abs() / 4.0);
        }
    }
    let eta = build_eta2(0.0, 1.0)?;
    let at_half = eta.value(0.5);
    let at_r: Vec<f64> = (0..4).map(|k| eta.polynomial_derivative(1.0, k)).collect();
    let values_ok = at_half == 1.0 && at_r[0].abs() < 1e-12 && at_r[1].abs() < 1e-12 && at_r[2].abs() < 1e-12;
    let third_ok = at_r[3].abs() < 1e-12;
    let pass = all_thresholds
        && worst_homogeneity < 1e-12
        && values_ok
        && third_ok
        && within(start, Duration::from_secs(120));
    judge(
        pass,
        format!(
            "C = {c}: threshold found for all families and mu {all_thresholds} (max ratio {max_ratio:.4}); \
             homogeneity {worst_homogeneity:.1e} (<1e-12); eta2(r/2) = {at_half:?}; at r: value {:.1e}, d1 {:.1e}, d2 {:.1e}, d3 {:.4e} (r=1, each <1e-12); {:.1?}",
            at_r[0],
            at_r[1],
            at_r[2],
            at_r[3],
            start.elapsed()
        ),
    )
}

/// Running log-decay constant: saturates for the overlap, grows like ln T
/// for the counterexample.
fn criterion_6() -> Result<Outcome> {
    let start = Instant::now();
    let a = overlap(99)?;
    let u0 = parse_initial("eigenmode(1)")?.state(a.grid())?;
    let g0 = coupled_wave::graph_norm_sq(&u0, &a)?;
    let sim = simulate(&SimulationConfig { generator: a, initial: u0, dt: 0.05, t_final: 1e4, stride: 20 })?;
    let growth = fit_log_decay(&sim.reports, g0)?.last_decade_growth().unwrap_or(f64::INFINITY);

    let a = section4(799)?;
    let u0 = parse_initial("counterexample")?.state(a.grid())?;
    let g0 = coupled_wave::graph_norm_sq(&u0, &a)?;
    let sim = simulate(&SimulationConfig { generator: a, initial: u0, dt: 0.05, t_final: 1e4, stride: 20 })?;
    let law = fit_log_decay(&sim.reports, g0)?.ln_law(10.0)?;
    let pass = growth < 0.05 && law.max_rel_deviation < 0.10 && within(start, Duration::from_secs(600));
    judge(
        pass,
        format!(
            "overlap last-decade growth {growth:.2e} (<5e-2); counterexample ln-law slope {:.4e}, max deviation {:.2e} (<0.1); {:.1?}",
            law.slope,
            law.max_rel_deviation,
            start.elapsed()
        ),
    )
}

/// Weight ordering and pointwise θ-bounds.
fn criterion_7() -> Result<Outcome> {
    let start = Instant::now();
    let ordered = (1..=50).all(|k| {
        let mu = LN_2 + (10.0 - LN_2) * k as f64 / 50.0;
        let (b, b0) = (weight_b(mu), weight_b0(mu));
        1.0 < b0 && b0 < b && b < 2.0
    });
    let psi = PsiHat::new(PI, (1.3, 1.9))?;
    let mut violations = 0;
    let mut checked = 0;
    for mu in [1.0, 2.0, 4.0] {
        for lambda in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let rep = build_weights(mu, lambda, psi)?.verify_theta_bounds(200, 200)?;
            violations += rep.violations;
            checked += rep.inner_checked + rep.outer_checked;
        }
    }
    let pass = ordered && violations == 0 && within(start, Duration::from_secs(10));
    judge(
        pass,
        format!(
            "1 < b0 < b < 2 at 50 mu in (ln 2, 10]: {ordered}; theta bounds {violations} violations of {checked} checks; {:.1?}",
            start.elapsed()
        ),
    )
}

/// Localized bumps: spurious grid-scale modes sit inside the eigenvalue
/// tolerance. Reported only.
fn localized_info() -> Result<String> {
    let a = generator(PI, 249, "bump(1.4, 1.6, 2)", "bump(1.8, 1.6, 1.5)", "constant(1)")?;
    let tol = tol_eig(&a);
    let eigs = eigenvalues(&a)?;
    let fit = fit_spectral_region(&eigs, tol)?;
    let max_re = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "INFO localized bumps n=249: max Re {max_re:.3e}, tol {tol:.2e}, numerically imaginary {}, feasible {}",
        fit.numerically_imaginary.len(),
        fit.feasible
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Result<Outcome>); 7] = [
        ("1", "counterexample reproduction", criterion_1),
        ("2", "energy identity", criterion_2),
        ("3", "spectral dichotomy", criterion_3),
        ("4", "resolvent bound shape", criterion_4),
        ("5", "weighted elliptic estimate", criterion_5),
        ("6", "log-decay trend", criterion_6),
        ("7", "weight formulas", criterion_7),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let known = KNOWN_FAILURES.contains(&id);
        match run() {
            Ok(o) => {
                let status = if o.pass { "PASS" } else { "FAIL" };
                let note = if known { " [known failure]" } else { "" };
                println!("{status} {id} {name}{note}: {}", o.detail);
                if o.pass == known {
                    unexpected += 1;
                }
            }
            Err(e) => {
                println!("FAIL {id} {name}: error: {e}");
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if filter.is_empty() {
        match localized_info() {
            Ok(line) => println!("{line}"),
            Err(e) => println!("INFO localized bumps: error: {e}"),
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criterion outcome(s) differ from expectations");
        ExitCode::FAILURE
    }
}
