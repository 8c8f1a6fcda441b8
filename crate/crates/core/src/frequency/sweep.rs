use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::resolvent::{resolvent_norm_with, InverseIteration, SmallestSingularValue};
use crate::discretization::GeneratorMatrix;
use crate::error::{invalid, Error, Result};
use crate::output::{fmt17, write_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Eigenvalue,
    ResolventSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub gamma: Complex64,
    pub kind: PointKind,
    /// Eigenvalue modulus or resolvent norm; `∞` for samples at the spectrum.
    pub value: f64,
    pub at_spectrum: bool,
    /// Added by peak refinement rather than the uniform grid.
    pub refined: bool,
}

impl SpectralPoint {
    pub fn eigenvalue(lambda: Complex64) -> Self {
        Self {
            gamma: lambda,
            kind: PointKind::Eigenvalue,
            value: lambda.norm(),
            at_spectrum: false,
            refined: false,
        }
    }

    pub fn flag(&self) -> &'static str {
        match (self.kind, self.at_spectrum, self.refined) {
            (PointKind::Eigenvalue, ..) => "eigenvalue",
            (_, true, _) => "at_spectrum",
            (_, false, true) => "refined",
            _ => "ok",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub count: usize,
    /// Golden-section steps spent on every interior local maximum; 0
    /// disables refinement.
    pub refine_steps: usize,
}

impl SweepConfig {
    pub fn new(sigma_min: f64, sigma_max: f64, count: usize) -> Self {
        Self {
            sigma_min,
            sigma_max,
            count,
            refine_steps: 60,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1.0 < self.sigma_min && self.sigma_min < self.sigma_max && self.sigma_max.is_finite()) {
            return invalid(format!(
                "sweep needs 1 < sigma_min < sigma_max, got [{}, {}]",
                self.sigma_min, self.sigma_max
            ));
        }
        if self.count < 2 {
            return invalid(format!("sweep needs at least 2 samples, got {}", self.count));
        }
        Ok(())
    }

    pub fn sigmas(&self) -> Vec<f64> {
        let d = (self.sigma_max - self.sigma_min) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.sigma_min + k as f64 * d).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Samples in increasing σ, refined points merged in.
    pub points: Vec<SpectralPoint>,
    /// Smallest C with `ln‖R(iσ)‖ <= Cσ + ln C` at every finite sample.
    pub c_res: Option<f64>,
    pub at_spectrum: usize,
    /// No sample hit the spectrum, so `c_res` bounds every sample.
    pub certified: bool,
}

impl SweepResult {
    pub fn peak(&self) -> Option<&SpectralPoint> {
        self.points
            .iter()
            .filter(|p| !p.at_spectrum)
            .max_by(|p, q| p.value.total_cmp(&q.value))
    }

    /// Largest norm among samples with σ in `[lo, hi]`.
    pub fn peak_in(&self, lo: f64, hi: f64) -> Option<&SpectralPoint> {
        self.points
            .iter()
            .filter(|p| !p.at_spectrum && (lo..=hi).contains(&p.gamma.im))
            .max_by(|p, q| p.value.total_cmp(&q.value))
    }

    /// `|C_fine - C_coarse| / C_coarse`, when both are certified.
    pub fn c_res_change(&self, finer: &SweepResult) -> Option<f64> {
        match (self.certified, finer.certified, self.c_res, finer.c_res) {
            (true, true, Some(a), Some(b)) => Some((b - a).abs() / a),
            _ => None,
        }
    }
}

/// Root of `Cσ + ln C = ln N` (unique: the left side increases in C).
pub fn c_res_for(sigma: f64, norm: f64) -> Result<f64> {
    if !(sigma > 0.0 && norm > 0.0 && norm.is_finite()) {
        return invalid(format!("need sigma > 0 and a finite positive norm, got {sigma}, {norm}"));
    }
    let target = norm.ln();
    let f = |u: f64| u.exp() * sigma + u - target;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) > 0.0 {
        lo *= 2.0;
    }
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

fn sample(solver: &dyn SmallestSingularValue, a: &GeneratorMatrix, sigma: f64, refined: bool) -> Result<SpectralPoint> {
    let gamma = Complex64::new(0.0, sigma);
    let (value, at_spectrum) = match resolvent_norm_with(solver, a, gamma) {
        Ok(v) => (v, false),
        Err(Error::AtSpectrum { .. }) => (f64::INFINITY, true),
        Err(e) => return Err(e),
    };
    Ok(SpectralPoint {
        gamma,
        kind: PointKind::ResolventSample,
        value,
        at_spectrum,
        refined,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of the norm on `[lo, hi]`.
fn refine_peak(
    solver: &dyn SmallestSingularValue,
    a: &GeneratorMatrix,
    mut lo: f64,
    mut hi: f64,
    steps: usize,
) -> Result<SpectralPoint> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = sample(solver, a, x1, true)?;
    let mut f2 = sample(solver, a, x2, true)?;
    for _ in 0..steps {
        if f1.at_spectrum {
            return Ok(f1);
        }
        if f2.at_spectrum {
            return Ok(f2);
        }
        if f1.value >= f2.value {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = sample(solver, a, x1, true)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = sample(solver, a, x2, true)?;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(if f1.value >= f2.value { f1 } else { f2 })
}

/// Samples `‖(A - iσ)⁻¹‖` on a uniform σ grid, refines every interior
/// local maximum, and fits `C_res`. Samples run in parallel; output order
/// depends only on the configuration.
pub fn resolvent_sweep_with(
    solver: &dyn SmallestSingularValue,
    a: &GeneratorMatrix,
    cfg: &SweepConfig,
) -> Result<SweepResult> {
    cfg.validate()?;
    let sigmas = cfg.sigmas();
    let mut points = sigmas
        .par_iter()
        .map(|&s| sample(solver, a, s, false))
        .collect::<Result<Vec<_>>>()?;
    if cfg.refine_steps > 0 {
        let peaks: Vec<usize> = (1..points.len() - 1)
            .filter(|&k| {
                let p = &points[k];
                !p.at_spectrum && p.value >= points[k - 1].value && p.value >= points[k + 1].value
            })
            .collect();
        let extra = peaks
            .par_iter()
            .map(|&k| refine_peak(solver, a, sigmas[k - 1], sigmas[k + 1], cfg.refine_steps))
            .collect::<Result<Vec<_>>>()?;
        points.extend(extra);
        points.sort_by(|p, q| p.gamma.im.total_cmp(&q.gamma.im));
    }
    let at_spectrum = points.iter().filter(|p| p.at_spectrum).count();
    let mut c_res: Option<f64> = None;
    for p in points.iter().filter(|p| !p.at_spectrum) {
        let c = c_res_for(p.gamma.im, p.value)?;
        c_res = Some(c_res.map_or(c, |m| m.max(c)));
    }
    Ok(SweepResult {
        points,
        c_res,
        at_spectrum,
        certified: at_spectrum == 0 && c_res.is_some(),
    })
}

pub fn resolvent_sweep(a: &GeneratorMatrix, cfg: &SweepConfig) -> Result<SweepResult> {
    resolvent_sweep_with(&InverseIteration::default(), a, cfg)
}

/// Columns `sigma, resolvent_norm, log_norm, flag`.
pub fn write_sweep_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let rows = sweep.points.iter().map(|p| {
        vec![fmt17(p.gamma.im), fmt17(p.value), fmt17(p.value.ln()), p.flag().to_string()]
    });
    write_table(out, &["sigma", "resolvent_norm", "log_norm", "flag"], rows)
}
