use crate::energy::EnergyReport;
use crate::error::{invalid, Result};

/// Empirical constant in `E(t) <= C / ln(t + 2) · ‖U₀‖²_{D(A)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub c_log: f64,
    pub times: Vec<f64>,
    /// Running maximum of `E(t) ln(t + 2) / ‖U₀‖²_{D(A)}`.
    pub running: Vec<f64>,
    /// `C/ln(t+2) · ‖U₀‖² - E(t)` at every sample; nonnegative when feasible.
    pub residual: Vec<f64>,
    pub feasible: bool,
}

/// `C(t) ≈ intercept + slope · ln(t + 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLawFit {
    pub intercept: f64,
    pub slope: f64,
    /// Largest `|fit - C(t)| / C(t)` over the fitted samples.
    pub max_rel_deviation: f64,
    pub samples: usize,
}

pub fn fit_log_decay(reports: &[EnergyReport], graph_norm0_sq: f64) -> Result<DecayFit> {
    if reports.is_empty() {
        return invalid("decay fit needs at least one energy report");
    }
    if !(graph_norm0_sq > 0.0 && graph_norm0_sq.is_finite()) {
        return invalid(format!("initial graph norm must be positive, got {graph_norm0_sq}"));
    }
    let mut running = Vec::with_capacity(reports.len());
    let mut c: f64 = 0.0;
    for r in reports {
        if r.t < 0.0 {
            return invalid(format!("negative sample time {}", r.t));
        }
        c = c.max(r.energy * (r.t + 2.0).ln() / graph_norm0_sq);
        running.push(c);
    }
    let residual: Vec<f64> = reports
        .iter()
        .map(|r| c / (r.t + 2.0).ln() * graph_norm0_sq - r.energy)
        .collect();
    let tol = 1e-12 * graph_norm0_sq;
    let feasible = residual.iter().all(|&x| x >= -tol);
    Ok(DecayFit {
        c_log: c,
        times: reports.iter().map(|r| r.t).collect(),
        running,
        residual,
        feasible,
    })
}

impl DecayFit {
    /// Running constant at the last sample with `t <= at`.
    pub fn running_at(&self, at: f64) -> Option<f64> {
        let k = self.times.partition_point(|&t| t <= at);
        k.checked_sub(1).map(|k| self.running[k])
    }

    /// Relative growth of the running constant over the last decade,
    /// `C(T) / C(T/10) - 1`.
    pub fn last_decade_growth(&self) -> Option<f64> {
        let t_end = *self.times.last()?;
        let early = self.running_at(t_end / 10.0)?;
        (early > 0.0).then(|| self.c_log / early - 1.0)
    }

    /// Whether a single constant bounds `E(t) ln(t+2)` on the sampled
    /// horizon: growth over the last decade stays below `threshold`.
    pub fn saturated(&self, threshold: f64) -> bool {
        self.last_decade_growth().is_some_and(|g| g < threshold)
    }

    /// Least-squares fit of the running constant against `ln(t + 2)` on
    /// samples with `t >= t_min`.
    pub fn ln_law(&self, t_min: f64) -> Result<LogLawFit> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.running)
            .filter(|(t, _)| **t >= t_min)
            .map(|(t, c)| ((t + 2.0).ln(), *c))
            .collect();
        if pts.len() < 2 {
            return invalid(format!("ln-law fit needs two samples with t >= {t_min}"));
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let det = m * sxx - sx * sx;
        if det.abs() <= f64::EPSILON * m * sxx {
            return invalid("ln-law fit is degenerate (all samples at one time)");
        }
        let slope = (m * sxy - sx * sy) / det;
        let intercept = (sy - slope * sx) / m;
        let max_rel_deviation = pts
            .iter()
            .map(|(x, c)| ((intercept + slope * x) - c).abs() / c.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        Ok(LogLawFit {
            intercept,
            slope,
            max_rel_deviation,
            samples: pts.len(),
        })
    }
}
