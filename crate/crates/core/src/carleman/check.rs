//! Quadrature check of the weighted elliptic estimate
//!
//! `λμ² ∬ θ²φ (a w_x² + w_s² + λ²μ²φ² w²)
//!     <= C ∬ θ² f² + C λμ² ∬_{ω₀} θ²φ (w_x² + w_s² + λ²μ²φ² w²)`
//!
//! with `f = w_ss + (g w_x)_x`, on `(-b, b) × (0, L)`. θ² is astronomically
//! large, so every integral is evaluated with the factor `e^{-2λφ_max}`
//! divided out; `log_scale` records it.

use std::io::Write;

use rayon::prelude::*;

use super::manufactured::{Conductivity, Manufactured};
use super::psi::PsiHat;
use super::weights::{build_weights, CarlemanWeights};
use crate::error::{invalid, Error, Result};
use crate::output::{fmt17, write_table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Trapezoid subintervals per panel at the first level.
    pub points_per_panel: usize,
    pub max_doublings: usize,
    /// Largest accepted relative change of any term under one doubling.
    pub rel_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { points_per_panel: 4, max_doublings: 6, rel_tol: 5e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanResult {
    pub mu: f64,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs_f: f64,
    pub rhs_local: f64,
    /// `lhs / (rhs_f + rhs_local)`, 0 when everything vanishes.
    pub ratio: f64,
    pub pass: bool,
    /// Natural log of the factor removed from all three integrals.
    pub log_scale: f64,
    pub nodes: (usize, usize),
    pub doublings: usize,
}

/// 1-D rule: nodes, full weights and the part of each weight coming from
/// panels marked local.
struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
    w_local: Vec<f64>,
}

/// Panel breaks graded geometrically around `peak`, plus `extra` breaks.
fn graded_breaks(lo: f64, hi: f64, peak: f64, width: f64, extra: &[f64]) -> Vec<f64> {
    let mut b = vec![lo, hi, peak];
    b.extend(extra.iter().copied().filter(|&e| e > lo && e < hi));
    let mut d = width;
    while peak - d > lo || peak + d < hi {
        for e in [peak - d, peak + d] {
            if e > lo && e < hi {
                b.push(e);
            }
        }
        d *= 2.0;
    }
    b.sort_by(f64::total_cmp);
    let tol = 1e-14 * (hi - lo);
    b.dedup_by(|a, b| (*a - *b).abs() <= tol);
    b
}

fn trapezoid(breaks: &[f64], m: usize, local: impl Fn(f64) -> bool) -> Rule {
    let nodes = (breaks.len() - 1) * m + 1;
    let mut r = Rule { x: Vec::with_capacity(nodes), w: vec![0.0; nodes], w_local: vec![0.0; nodes] };
    r.x.push(breaks[0]);
    for (p, pair) in breaks.windows(2).enumerate() {
        let h = (pair[1] - pair[0]) / m as f64;
        let inside = local(0.5 * (pair[0] + pair[1]));
        for k in 1..=m {
            r.x.push(if k == m { pair[1] } else { pair[0] + k as f64 * h });
        }
        for k in 0..=m {
            let wk = if k == 0 || k == m { 0.5 * h } else { h };
            let idx = p * m + k;
            r.w[idx] += wk;
            if inside {
                r.w_local[idx] += wk;
            }
        }
    }
    r
}

/// Rejects `w` unless it vanishes at `s = ±b` and at `x = 0, L` to 1e-10
/// relative to its sampled size.
fn check_boundary(w: &dyn Manufactured, weights: &CarlemanWeights) -> Result<()> {
    let (b, l) = (weights.b, weights.psi_hat.length);
    let samples = 64;
    let s_max = (0..=samples)
        .map(|i| w.s_factor(weights, -b + 2.0 * b * i as f64 / samples as f64).v.abs())
        .fold(0.0, f64::max);
    let x_max = (0..=samples)
        .map(|i| w.x_factor(weights, l * i as f64 / samples as f64).v.abs())
        .fold(0.0, f64::max);
    let scale = s_max * x_max;
    let edge_s = w.s_factor(weights, b).v.abs().max(w.s_factor(weights, -b).v.abs()) * x_max;
    let edge_x = w.x_factor(weights, 0.0).v.abs().max(w.x_factor(weights, l).v.abs()) * s_max;
    let worst = edge_s.max(edge_x);
    if worst > 1e-10 * scale {
        return invalid(format!(
            "manufactured solution `{}` does not vanish on the boundary (|w| = {worst:e} vs scale {scale:e})",
            w.spec()
        ));
    }
    Ok(())
}

/// `[lhs, rhs_f, rhs_local]` on one pair of rules, each without the λμ² or C
/// prefactors' scale removed.
fn integrate(
    w: &dyn Manufactured,
    weights: &CarlemanWeights,
    g: &dyn Conductivity,
    rs: &Rule,
    rx: &Rule,
) -> [f64; 3] {
    let (mu, lambda) = (weights.mu, weights.lambda);
    let psi = &weights.psi_hat;
    let a = g.ellipticity();
    let phi_max = weights.phi_max();
    let bb = weights.b * weights.b;
    // φ = e^{μ(b² - s²)} e^{μψ̂/‖ψ̂‖} factors exactly
    let xs: Vec<_> = rx
        .x
        .iter()
        .map(|&x| (w.x_factor(weights, x), g.jet(x), (mu * psi.value(x) / psi.sup()).exp()))
        .collect();
    let lm2 = lambda * lambda * mu * mu;
    let rows: Vec<[f64; 3]> = rs
        .x
        .par_iter()
        .zip(&rs.w)
        .map(|(&s, &ws)| {
            let sj = w.s_factor(weights, s);
            let phi_s = (mu * (bb - s * s)).exp();
            let mut acc = [0.0; 3];
            for ((xj, gj, phi_x), (&wx, &wl)) in xs.iter().zip(rx.w.iter().zip(&rx.w_local)) {
                let phi = phi_s * phi_x;
                let e = (2.0 * lambda * (phi - phi_max)).exp();
                if e == 0.0 {
                    continue;
                }
                let u = sj.v * xj.v;
                let u_s = sj.d1 * xj.v;
                let u_x = sj.v * xj.d1;
                let f = sj.d2 * xj.v + gj.d1 * u_x + gj.v * sj.v * xj.d2;
                let zero_order = lm2 * phi * phi * u * u;
                acc[0] += wx * e * phi * (a * u_x * u_x + u_s * u_s + zero_order);
                acc[1] += wx * e * f * f;
                if wl > 0.0 {
                    acc[2] += wl * e * phi * (u_x * u_x + u_s * u_s + zero_order);
                }
            }
            [acc[0] * ws, acc[1] * ws, acc[2] * ws]
        })
        .collect();
    let mut total = [0.0; 3];
    for r in rows {
        for k in 0..3 {
            total[k] += r[k];
        }
    }
    let pref = lambda * mu * mu;
    [pref * total[0], total[1], pref * total[2]]
}

pub fn carleman_check(
    w: &dyn Manufactured,
    weights: &CarlemanWeights,
    g: &dyn Conductivity,
    c_candidate: f64,
    quad: &QuadratureOptions,
) -> Result<CarlemanResult> {
    if !(c_candidate > 0.0 && c_candidate.is_finite()) {
        return invalid(format!("candidate constant must be positive, got {c_candidate}"));
    }
    if quad.points_per_panel == 0 || !(quad.rel_tol > 0.0) {
        return invalid("quadrature needs at least one point per panel and a positive tolerance");
    }
    check_boundary(w, weights)?;
    let (mu, lambda, b) = (weights.mu, weights.lambda, weights.b);
    let psi = &weights.psi_hat;
    let phi_max = weights.phi_max();
    let xc = psi.critical_point();
    let width_s = 1.0 / (4.0 * lambda * mu * phi_max).sqrt();
    let curvature = psi.d2(xc).abs() / psi.sup();
    let width_x = 1.0 / (2.0 * lambda * mu * phi_max * curvature).sqrt();
    let s_breaks = graded_breaks(-b, b, 0.0, width_s, &[]);
    let x_breaks = graded_breaks(0.0, psi.length, xc, width_x, &[psi.omega0.0, psi.omega0.1]);

    let rules = |m: usize| {
        (trapezoid(&s_breaks, m, |_| false), trapezoid(&x_breaks, m, |x| psi.in_omega0(x)))
    };
    let mut m = quad.points_per_panel;
    let (rs, rx) = rules(m);
    let mut prev = integrate(w, weights, g, &rs, &rx);
    let mut doublings = 0;
    let mut change = f64::INFINITY;
    let mut nodes = (rs.x.len(), rx.x.len());
    while doublings < quad.max_doublings {
        m *= 2;
        doublings += 1;
        let (rs, rx) = rules(m);
        nodes = (rs.x.len(), rx.x.len());
        let next = integrate(w, weights, g, &rs, &rx);
        change = prev
            .iter()
            .zip(&next)
            .map(|(p, n)| if *n == 0.0 && *p == 0.0 { 0.0 } else { (n - p).abs() / n.abs().max(p.abs()) })
            .fold(0.0, f64::max);
        prev = next;
        if change < quad.rel_tol {
            break;
        }
    }
    if !(change < quad.rel_tol) {
        return Err(Error::QuadratureNotConverged { doublings, change });
    }
    let [lhs, rhs_f, rhs_local] = prev;
    let rhs = rhs_f + rhs_local;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(CarlemanResult {
        mu,
        lambda,
        lhs,
        rhs_f,
        rhs_local,
        ratio,
        pass: lhs <= c_candidate * rhs,
        log_scale: 2.0 * lambda * phi_max,
        nodes,
        doublings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanSweep {
    pub rows: Vec<CarlemanResult>,
    /// Smallest λ from which every larger λ in the sweep passes.
    pub threshold: Option<f64>,
    pub max_ratio: f64,
}

/// Runs the check for each λ (in parallel) at fixed μ; rows come back in
/// ascending λ.
pub fn carleman_sweep(
    w: &dyn Manufactured,
    mu: f64,
    lambdas: &[f64],
    psi_hat: PsiHat,
    g: &dyn Conductivity,
    c_candidate: f64,
    quad: &QuadratureOptions,
) -> Result<CarlemanSweep> {
    if lambdas.is_empty() {
        return invalid("lambda list is empty");
    }
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let rows = lambdas
        .par_iter()
        .map(|&lambda| carleman_check(w, &build_weights(mu, lambda, psi_hat)?, g, c_candidate, quad))
        .collect::<Result<Vec<_>>>()?;
    let mut threshold = None;
    for r in rows.iter().rev() {
        if !r.pass {
            break;
        }
        threshold = Some(r.lambda);
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CarlemanSweep { rows, threshold, max_ratio })
}

pub fn write_carleman_csv<W: Write>(out: W, rows: &[CarlemanResult]) -> Result<()> {
    write_table(
        out,
        &["mu", "lambda", "lhs", "rhs_f_term", "rhs_local_term", "ratio", "pass", "log_scale"],
        rows.iter().map(|r| {
            vec![
                fmt17(r.mu),
                fmt17(r.lambda),
                fmt17(r.lhs),
                fmt17(r.rhs_f),
                fmt17(r.rhs_local),
                fmt17(r.ratio),
                r.pass.to_string(),
                fmt17(r.log_scale),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::manufactured::{ConstantConductivity, PolySine, Scaled, ZeroSolution};
    use crate::carleman::Jet;
    use std::f64::consts::PI;

    fn psi() -> PsiHat {
        PsiHat::new(PI, (1.3, 1.9)).unwrap()
    }

    #[test]
    fn zero_solution_passes_trivially() {
        let wts = build_weights(2.0, 4.0, psi()).unwrap();
        let r = carleman_check(&ZeroSolution, &wts, &ConstantConductivity(1.0), 1.0, &QuadratureOptions::default())
            .unwrap();
        assert_eq!((r.lhs, r.rhs_f, r.rhs_local, r.ratio), (0.0, 0.0, 0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn doubling_w_quadruples_every_term() {
        let wts = build_weights(2.0, 8.0, psi()).unwrap();
        let g = ConstantConductivity(1.0);
        let q = QuadratureOptions::default();
        let w = PolySine { k: 1 };
        let r1 = carleman_check(&w, &wts, &g, 2.0, &q).unwrap();
        let r2 = carleman_check(&Scaled { inner: &w, factor: 2.0 }, &wts, &g, 2.0, &q).unwrap();
        for (a, b) in [(r1.lhs, r2.lhs), (r1.rhs_f, r2.rhs_f), (r1.rhs_local, r2.rhs_local)] {
            assert!((b / a - 4.0).abs() < 1e-12, "{a} {b}");
        }
        assert_eq!(r1.pass, r2.pass);
    }

    #[derive(Debug)]
    struct Nonvanishing;
    impl Manufactured for Nonvanishing {
        fn s_factor(&self, _w: &CarlemanWeights, _s: f64) -> Jet {
            Jet { v: 1.0, d1: 0.0, d2: 0.0 }
        }
        fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet {
            Jet { v: x * (w.psi_hat.length - x), d1: w.psi_hat.length - 2.0 * x, d2: -2.0 }
        }
        fn spec(&self) -> String {
            "nonvanishing".into()
        }
    }

    #[test]
    fn rejects_boundary_violation() {
        let wts = build_weights(2.0, 4.0, psi()).unwrap();
        let err = carleman_check(&Nonvanishing, &wts, &ConstantConductivity(1.0), 1.0, &QuadratureOptions::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn quadrature_agrees_with_a_much_finer_rule() {
        let wts = build_weights(2.0, 16.0, psi()).unwrap();
        let g = ConstantConductivity(1.0);
        let w = PolySine { k: 1 };
        let coarse = carleman_check(&w, &wts, &g, 1.0, &QuadratureOptions::default()).unwrap();
        let fine = QuadratureOptions { points_per_panel: 64, max_doublings: 1, rel_tol: 5e-3 };
        let fine = carleman_check(&w, &wts, &g, 1.0, &fine).unwrap();
        assert!((coarse.lhs / fine.lhs - 1.0).abs() < 5e-3);
        assert!((coarse.rhs_local / fine.rhs_local - 1.0).abs() < 5e-3);
    }

    #[test]
    fn sweep_reports_threshold_and_sorted_rows() {
        let g = ConstantConductivity(1.0);
        let sw = carleman_sweep(&PolySine { k: 1 }, 2.0, &[8.0, 2.0, 4.0], psi(), &g, 10.0, &QuadratureOptions::default())
            .unwrap();
        let l: Vec<f64> = sw.rows.iter().map(|r| r.lambda).collect();
        assert_eq!(l, vec![2.0, 4.0, 8.0]);
        assert!(sw.max_ratio.is_finite() && sw.max_ratio > 0.0);
        let mut buf = Vec::new();
        write_carleman_csv(&mut buf, &sw.rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mu,lambda,lhs,rhs_f_term,rhs_local_term,ratio,pass,log_scale"));
        assert_eq!(text.lines().count(), 4);
    }
}
