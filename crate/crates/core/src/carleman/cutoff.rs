//! The s-cutoff φ and the spatial cutoff η₂.

use crate::error::{invalid, Result};

/// `S(t) = 35t⁴ - 84t⁵ + 70t⁶ - 20t⁷` and its first three derivatives.
fn smoothstep(t: f64, k: usize) -> f64 {
    match k {
        0 => t.powi(4) * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t))),
        1 => 140.0 * t.powi(3) * (1.0 - t).powi(3),
        2 => 140.0 * t * t * (3.0 + t * (-12.0 + t * (15.0 - 6.0 * t))),
        3 => 140.0 * t * (6.0 + t * (-36.0 + t * (60.0 - 30.0 * t))),
        _ => unreachable!("derivative order above 3"),
    }
}

/// `φ(s) = 1` on `[-b₀, b₀]`, `1 - S((|s| - b₀)/(b - b₀))` between, 0 beyond
/// `b`. C³, so φ and three derivatives vanish at `±b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Varphi {
    pub b0: f64,
    pub b: f64,
}

impl Varphi {
    pub fn new(b0: f64, b: f64) -> Result<Self> {
        if !(0.0 < b0 && b0 < b && b.is_finite()) {
            return invalid(format!("varphi needs 0 < b0 < b, got {b0}, {b}"));
        }
        Ok(Self { b0, b })
    }

    /// k-th derivative, `k <= 3`.
    pub fn derivative(&self, s: f64, k: usize) -> f64 {
        let a = s.abs();
        if a <= self.b0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if a >= self.b {
            return 0.0;
        }
        let w = self.b - self.b0;
        let t = (a - self.b0) / w;
        let sign = if s < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        if k == 0 {
            1.0 - smoothstep(t, 0)
        } else {
            -sign * smoothstep(t, k) / w.powi(k as i32)
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }
}

/// Even polynomial in `τ = |x - c|/r`, coefficients of τ⁰, τ², ..., τ¹⁰ of
/// `(1 - τ²)³(16τ⁴ - 2τ² + 1)`; η₂ on the annulus is `128/81` times it.
pub const ETA2_EVEN: [f64; 6] = [1.0, -5.0, 25.0, -55.0, 50.0, -16.0];

/// `η₂ = 1` for `|x - c| < r/2`, `(128/81r¹⁰)(r² - t²)³(16t⁴ - 2r²t² + r⁴)`
/// for `r/2 <= t <= r`, 0 beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eta2 {
    pub center: f64,
    pub r: f64,
}

pub fn build_eta2(center: f64, r: f64) -> Result<Eta2> {
    if !(r > 0.0 && r.is_finite() && center.is_finite()) {
        return invalid(format!("eta2 needs a finite positive radius, got {r}"));
    }
    Ok(Eta2 { center, r })
}

impl Eta2 {
    /// k-th τ-derivative of the polynomial piece, scaled by 128 (exact
    /// at τ = 1/2 where it equals 81).
    fn poly128(tau: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        for (j, c) in ETA2_EVEN.iter().enumerate().rev() {
            let p = 2 * j;
            if p < k {
                continue;
            }
            let falling: f64 = (0..k).map(|i| (p - i) as f64).product();
            acc += 128.0 * c * falling * tau.powi((p - k) as i32);
        }
        acc
    }

    /// k-th derivative of the annulus polynomial at distance `t` from the
    /// centre (as a function of t), whatever piece t falls in.
    pub fn polynomial_derivative(&self, t: f64, k: usize) -> f64 {
        Self::poly128(t / self.r, k) / 81.0 / self.r.powi(k as i32)
    }

    /// k-th x-derivative.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        let d = x - self.center;
        let t = d.abs();
        if t < 0.5 * self.r {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if t > self.r {
            return 0.0;
        }
        let sign = if d < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * self.polynomial_derivative(t, k)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    /// `max |η₂'|²/η₂` over `samples` equispaced points of the open annulus.
    pub fn ratio_sup(&self, samples: usize) -> f64 {
        (1..samples)
            .map(|i| {
                let x = self.center + 0.5 * self.r * (1.0 + i as f64 / samples as f64);
                let e = self.value(x);
                if e > 0.0 {
                    self.derivative(x, 1).powi(2) / e
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}
