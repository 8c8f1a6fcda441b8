use crate::error::{invalid, Result};
use crate::grid::Grid1D;

/// `ψ̂(x) = x^p (L - x)^q`, positive inside, zero at both ends, with its
/// only critical point `pL/(p+q)` placed at the centre of ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiHat {
    pub length: f64,
    pub p: f64,
    pub q: f64,
    pub omega0: (f64, f64),
    sup: f64,
}

impl PsiHat {
    pub fn new(length: f64, omega0: (f64, f64)) -> Result<Self> {
        let (lo, hi) = omega0;
        if !(length > 0.0 && length.is_finite()) {
            return invalid(format!("domain length must be positive, got {length}"));
        }
        if !(lo < hi) {
            return invalid(format!("omega0 = ({lo}, {hi}) is empty"));
        }
        if !(lo > 0.0 && hi < length) {
            return invalid(format!("omega0 = ({lo}, {hi}) must lie strictly inside (0, {length})"));
        }
        let r = 0.5 * (lo + hi) / length;
        // smaller exponent pinned at 2 keeps ψ̂ in C² up to the boundary
        let (p, q) = if r <= 0.5 { (2.0, 2.0 * (1.0 - r) / r) } else { (2.0 * r / (1.0 - r), 2.0) };
        let mut s = Self { length, p, q, omega0, sup: 1.0 };
        s.sup = s.value(s.critical_point());
        Ok(s)
    }

    pub fn critical_point(&self) -> f64 {
        self.p * self.length / (self.p + self.q)
    }

    /// `‖ψ̂‖_∞`, attained at the critical point.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.length {
            return 0.0;
        }
        x.powf(self.p) * (self.length - x).powf(self.q)
    }

    pub fn d1(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.length {
            return 0.0;
        }
        let (p, q, y) = (self.p, self.q, self.length - x);
        x.powf(p - 1.0) * y.powf(q - 1.0) * (p * y - q * x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        // boundary limits: p(p-1) x^{p-2} L^q is 2L^q for p = 2, else 0
        if x <= 0.0 {
            return if self.p == 2.0 { 2.0 * self.length.powf(self.q) } else { 0.0 };
        }
        if x >= self.length {
            return if self.q == 2.0 { 2.0 * self.length.powf(self.p) } else { 0.0 };
        }
        let (p, q, y) = (self.p, self.q, self.length - x);
        x.powf(p - 2.0) * y.powf(q - 2.0) * (p * (p - 1.0) * y * y - 2.0 * p * q * x * y + q * (q - 1.0) * x * x)
    }

    pub(crate) fn in_omega0(&self, x: f64) -> bool {
        x > self.omega0.0 && x < self.omega0.1
    }
}

/// Builds ψ̂ and checks `ψ̂ > 0` at interior nodes, `ψ̂ = 0` at both ends
/// and `ψ̂' ≠ 0` at interior nodes outside ω₀.
pub fn build_psi_hat(grid: &Grid1D, omega0: (f64, f64)) -> Result<PsiHat> {
    let psi = PsiHat::new(grid.length(), omega0)?;
    if psi.value(0.0) != 0.0 || psi.value(grid.length()) != 0.0 {
        return invalid("psi_hat does not vanish on the boundary");
    }
    for x in grid.nodes() {
        if !(psi.value(x) > 0.0) {
            return invalid(format!("psi_hat({x}) is not positive"));
        }
        if !psi.in_omega0(x) && psi.d1(x) == 0.0 {
            return invalid(format!("psi_hat has a critical point at {x} outside omega0"));
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponents_place_the_critical_point() {
        let l = PI;
        let s = PsiHat::new(l, (l / 2.0 - 0.2, l / 2.0 + 0.2)).unwrap();
        assert_eq!((s.p, s.q), (2.0, 2.0));
        let t = PsiHat::new(l, (l / 3.0 - 0.1, l / 3.0 + 0.1)).unwrap();
        assert!((t.p - 2.0).abs() < 1e-12 && (t.q - 4.0).abs() < 1e-12);
        assert!((t.critical_point() - l / 3.0).abs() < 1e-12);
        let u = PsiHat::new(l, (2.0, 2.4)).unwrap();
        assert!((u.critical_point() - 2.2).abs() < 1e-12 && u.q == 2.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = PsiHat::new(2.0, (0.4, 0.7)).unwrap();
        let d = 1e-5;
        for x in [0.2, 0.55, 1.3, 1.9] {
            let fd1 = (s.value(x + d) - s.value(x - d)) / (2.0 * d);
            let fd2 = (s.d1(x + d) - s.d1(x - d)) / (2.0 * d);
            assert!((fd1 - s.d1(x)).abs() < 1e-6 * (1.0 + s.d1(x).abs()));
            assert!((fd2 - s.d2(x)).abs() < 1e-6 * (1.0 + s.d2(x).abs()));
        }
        assert!(s.d1(s.critical_point()).abs() < 1e-12);
    }

    #[test]
    fn sampled_properties_and_rejections() {
        let g = Grid1D::new(PI, 101).unwrap();
        let s = build_psi_hat(&g, (1.2, 1.6)).unwrap();
        assert_eq!(s.value(0.0), 0.0);
        assert_eq!(s.value(PI), 0.0);
        assert!(build_psi_hat(&g, (1.0, 1.0)).is_err());
        assert!(build_psi_hat(&g, (0.0, 1.0)).is_err());
        assert!(build_psi_hat(&g, (2.0, PI)).is_err());
    }
}
