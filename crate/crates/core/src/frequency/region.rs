use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Fit of the spectral region `Re λ < -e^{-C|Im λ|} / C`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFit {
    /// Smallest admissible C over the retained eigenvalues.
    pub c_region: Option<f64>,
    pub feasible: bool,
    /// Every eigenvalue was filtered out.
    pub inconclusive: bool,
    pub retained: usize,
    /// `|Re λ| < tol`: cannot be separated from the imaginary axis.
    pub numerically_imaginary: Vec<Complex64>,
    /// `Re λ >= tol`.
    pub unstable: Vec<Complex64>,
    /// Eigenvalue that fixes `c_region`.
    pub binding: Option<Complex64>,
}

/// Smallest C with `|Re λ| >= e^{-C|Im λ|} / C`, i.e. the root of
/// `ln C + C|Im λ| + ln|Re λ| = 0`. The left side increases in C, so the
/// root is unique.
pub fn region_constant(lambda: Complex64) -> Result<f64> {
    if !(lambda.re < 0.0) || !lambda.is_finite() {
        return invalid(format!("region constant needs Re λ < 0, got {lambda}"));
    }
    let (b, c) = (lambda.im.abs(), lambda.re.abs().ln());
    let f = |u: f64| u + u.exp() * b + c;
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

pub fn fit_spectral_region(eigs: &[Complex64], tol: f64) -> Result<RegionFit> {
    if eigs.is_empty() {
        return invalid("spectral region fit needs at least one eigenvalue");
    }
    if !(tol >= 0.0) {
        return invalid(format!("tolerance must be nonnegative, got {tol}"));
    }
    let mut fit = RegionFit {
        c_region: None,
        feasible: false,
        inconclusive: false,
        retained: 0,
        numerically_imaginary: Vec::new(),
        unstable: Vec::new(),
        binding: None,
    };
    for &z in eigs {
        if z.re >= tol {
            fit.unstable.push(z);
        } else if z.re.abs() < tol || z.re == 0.0 {
            fit.numerically_imaginary.push(z);
        } else {
            fit.retained += 1;
            let c = region_constant(z)?;
            if fit.c_region.is_none_or(|best| c > best) {
                fit.c_region = Some(c);
                fit.binding = Some(z);
            }
        }
    }
    fit.inconclusive = fit.retained == 0;
    fit.feasible = !fit.inconclusive && fit.unstable.is_empty() && fit.numerically_imaginary.is_empty();
    Ok(fit)
}
