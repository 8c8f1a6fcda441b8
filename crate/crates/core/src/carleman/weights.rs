use std::f64::consts::LN_2;

use num_dual::{Dual2_64, DualNum};

use super::psi::PsiHat;
use crate::error::{invalid, Result};

/// `b = √(1 + ln(2 + e^μ)/μ)`.
pub fn weight_b(mu: f64) -> f64 {
    (1.0 + (2.0 + mu.exp()).ln() / mu).sqrt()
}

/// `b₀ = √(b² - ln((1 + e^μ)/e^μ)/μ)`.
pub fn weight_b0(mu: f64) -> f64 {
    let b2 = 1.0 + (2.0 + mu.exp()).ln() / mu;
    // ln((1 + e^μ)/e^μ) = ln(1 + e^{-μ})
    (b2 - (-mu).exp().ln_1p() / mu).sqrt()
}

/// `ψ = ψ̂/‖ψ̂‖ + b² - s²`, `φ = e^{μψ}`, `l = λφ`, `θ = e^l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanWeights {
    pub mu: f64,
    pub lambda: f64,
    pub b: f64,
    pub b0: f64,
    pub psi_hat: PsiHat,
}

pub fn build_weights(mu: f64, lambda: f64, psi_hat: PsiHat) -> Result<CarlemanWeights> {
    if !(mu > LN_2 && mu.is_finite()) {
        return invalid(format!("mu must exceed ln 2 for 1 < b0 < b < 2, got {mu}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    Ok(CarlemanWeights {
        mu,
        lambda,
        b: weight_b(mu),
        b0: weight_b0(mu),
        psi_hat,
    })
}

impl CarlemanWeights {
    pub fn psi(&self, s: f64, x: f64) -> f64 {
        self.psi_hat.value(x) / self.psi_hat.sup() + self.b * self.b - s * s
    }

    pub fn phi(&self, s: f64, x: f64) -> f64 {
        (self.mu * self.psi(s, x)).exp()
    }

    /// `l = λφ = ln θ`.
    pub fn l(&self, s: f64, x: f64) -> f64 {
        self.lambda * self.phi(s, x)
    }

    /// May overflow to `∞`; integrals work with `l` instead.
    pub fn theta(&self, s: f64, x: f64) -> f64 {
        self.l(s, x).exp()
    }

    /// Largest φ on the cylinder, at `s = 0` and the maximum of ψ̂.
    pub fn phi_max(&self) -> f64 {
        (self.mu * (1.0 + self.b * self.b)).exp()
    }

    /// `(l, l_s, l_ss)` by forward-mode differentiation in s.
    pub fn l_s_derivatives(&self, s: f64, x: f64) -> (f64, f64, f64) {
        let sd = Dual2_64::from_re(s).derivative();
        let base = self.psi_hat.value(x) / self.psi_hat.sup() + self.b * self.b;
        let psi = -(sd * sd) + base;
        let l = (psi * self.mu).exp() * self.lambda;
        (l.re, l.v1, l.v2)
    }

    /// Checks `l >= λ(2 + e^μ)` for `|s| <= 1` and `l <= λ(1 + e^μ)` for
    /// `b₀ <= |s| <= b` on an `ns × nx` grid of `[-b, b] × [0, L]`.
    pub fn verify_theta_bounds(&self, ns: usize, nx: usize) -> Result<ThetaBoundReport> {
        if ns < 2 || nx < 2 {
            return invalid("theta-bound grid needs at least 2 points per direction");
        }
        let lower = self.lambda * (2.0 + self.mu.exp());
        let upper = self.lambda * (1.0 + self.mu.exp());
        let slack = 1e-12;
        let mut rep = ThetaBoundReport::default();
        for i in 0..ns {
            let s = -self.b + 2.0 * self.b * i as f64 / (ns - 1) as f64;
            for j in 0..nx {
                let x = self.psi_hat.length * j as f64 / (nx - 1) as f64;
                let l = self.l(s, x);
                if s.abs() <= 1.0 {
                    rep.inner_checked += 1;
                    let m = l / lower - 1.0;
                    rep.inner_margin = rep.inner_margin.min(m);
                    if m < -slack {
                        rep.violations += 1;
                    }
                }
                if s.abs() >= self.b0 {
                    rep.outer_checked += 1;
                    let m = 1.0 - l / upper;
                    rep.outer_margin = rep.outer_margin.min(m);
                    if m < -slack {
                        rep.violations += 1;
                    }
                }
            }
        }
        Ok(rep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaBoundReport {
    pub inner_checked: usize,
    pub outer_checked: usize,
    /// Smallest relative margin `l/(λ(2+e^μ)) - 1` on `|s| <= 1`.
    pub inner_margin: f64,
    /// Smallest relative margin `1 - l/(λ(1+e^μ))` on `b₀ <= |s| <= b`.
    pub outer_margin: f64,
    pub violations: usize,
}

impl Default for ThetaBoundReport {
    fn default() -> Self {
        Self {
            inner_checked: 0,
            outer_checked: 0,
            inner_margin: f64::INFINITY,
            outer_margin: f64::INFINITY,
            violations: 0,
        }
    }
}

impl ThetaBoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.inner_checked > 0 && self.outer_checked > 0
    }
}
