//! Sampled coefficients α (coupling), β (damping) and g (elliptic
//! conductivity), plus the named profiles used to build them.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::registry::{parse_number, CallSpec, Registry};

/// A scalar coefficient profile on the physical domain.
pub trait Profile: Debug + Send + Sync {
    fn value(&self, x: f64) -> f64;
    /// Canonical spec string; parsing it yields an equal profile.
    fn spec(&self) -> String;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constant(pub f64);

impl Profile for Constant {
    fn value(&self, _x: f64) -> f64 {
        self.0
    }
    fn spec(&self) -> String {
        format!("constant({})", self.0)
    }
}

/// `height * cos^2(pi (x - center) / width)` on `|x - center| < width / 2`,
/// zero elsewhere (a C¹ bump).
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

impl Profile for Bump {
    fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        if d.abs() >= 0.5 * self.width {
            return 0.0;
        }
        let c = (PI * d / self.width).cos();
        self.height * c * c
    }
    fn spec(&self) -> String {
        format!("bump({}, {}, {})", self.center, self.width, self.height)
    }
}

/// Piecewise-constant profile. Segment `k` holds `values[k]` on
/// `(ends[k-1], ends[k]]`, so at a jump the left-limit value wins. An end
/// absorbs points within a few ulps so a grid node on a jump is treated as
/// lying on it. Points beyond the last end keep the last value.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pub ends: Vec<f64>,
    pub values: Vec<f64>,
}

impl Profile for Piecewise {
    fn value(&self, x: f64) -> f64 {
        for (end, v) in self.ends.iter().zip(&self.values) {
            if x <= *end + 8.0 * f64::EPSILON * end.abs().max(1.0) {
                return *v;
            }
        }
        *self.values.last().expect("nonempty piecewise profile")
    }
    fn spec(&self) -> String {
        let parts: Vec<String> = self
            .ends
            .iter()
            .zip(&self.values)
            .map(|(e, v)| format!("{e}:{v}"))
            .collect();
        format!("piecewise({})", parts.join(", "))
    }
}

pub type ProfileFactory = fn(&CallSpec) -> Result<Box<dyn Profile>>;

fn make_constant(c: &CallSpec) -> Result<Box<dyn Profile>> {
    c.arity(1)?;
    Ok(Box::new(Constant(c.number(0)?)))
}

fn make_bump(c: &CallSpec) -> Result<Box<dyn Profile>> {
    c.arity(3)?;
    let width = c.number(1)?;
    if width <= 0.0 {
        return invalid(format!("bump width must be positive, got {width}"));
    }
    Ok(Box::new(Bump {
        center: c.number(0)?,
        width,
        height: c.number(2)?,
    }))
}

fn make_piecewise(c: &CallSpec) -> Result<Box<dyn Profile>> {
    if c.args.is_empty() {
        return invalid("piecewise needs at least one `end:value` segment");
    }
    let mut ends = Vec::with_capacity(c.args.len());
    let mut values = Vec::with_capacity(c.args.len());
    for arg in &c.args {
        let Some((e, v)) = arg.split_once(':') else {
            return invalid(format!("piecewise segment `{arg}` is not `end:value`"));
        };
        ends.push(parse_number(e)?);
        values.push(parse_number(v)?);
    }
    if ends.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("piecewise segment ends must be strictly increasing");
    }
    Ok(Box::new(Piecewise { ends, values }))
}

pub fn profiles() -> &'static Registry<ProfileFactory> {
    static REG: OnceLock<Registry<ProfileFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("coefficient profile")
            .with("constant", make_constant as ProfileFactory)
            .with("bump", make_bump)
            .with("piecewise", make_piecewise)
    })
}

pub fn parse_profile(spec: &str) -> Result<Box<dyn Profile>> {
    let call = CallSpec::parse(spec)?;
    (profiles().get(&call.name)?)(&call)
}

/// Node samples of α and β, midpoint samples of g, and the ellipticity
/// bound `a` with `g_mid[i] >= a > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    g_mid: Vec<f64>,
    ellipticity: f64,
}

impl CoefficientField {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, g_mid: Vec<f64>, ellipticity: f64) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n || g_mid.len() != n + 1 {
            return invalid(format!(
                "coefficient lengths must be (n, n, n+1); got ({}, {}, {})",
                n,
                beta.len(),
                g_mid.len()
            ));
        }
        if let Some((i, v)) = alpha.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return invalid(format!("alpha[{i}] = {v} must be finite and nonnegative"));
        }
        if let Some((i, v)) = beta.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return invalid(format!("beta[{i}] = {v} must be finite and nonnegative"));
        }
        if !(ellipticity > 0.0 && ellipticity.is_finite()) {
            return invalid(format!("ellipticity bound must be positive, got {ellipticity}"));
        }
        if let Some((i, v)) = g_mid.iter().enumerate().find(|(_, v)| !(**v >= ellipticity && v.is_finite())) {
            return invalid(format!("g_mid[{i}] = {v} violates g >= a = {ellipticity}"));
        }
        Ok(Self {
            alpha,
            beta,
            g_mid,
            ellipticity,
        })
    }

    /// Samples α, β at nodes and g at midpoints; `a` is taken as min g.
    pub fn sample(grid: &Grid1D, alpha: &dyn Profile, beta: &dyn Profile, g: &dyn Profile) -> Result<Self> {
        let nodes = grid.nodes();
        let a: Vec<f64> = nodes.iter().map(|&x| alpha.value(x)).collect();
        let b: Vec<f64> = nodes.iter().map(|&x| beta.value(x)).collect();
        let gm: Vec<f64> = grid.midpoints().iter().map(|&x| g.value(x)).collect();
        let min_g = gm.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_g > 0.0) {
            return invalid(format!("g must be positive on the domain, min sample is {min_g}"));
        }
        Self::new(a, b, gm, min_g)
    }

    /// Constant-coefficient field (handy for tests and conservative runs).
    pub fn uniform(grid: &Grid1D, alpha: f64, beta: f64, g: f64) -> Result<Self> {
        Self::sample(grid, &Constant(alpha), &Constant(beta), &Constant(g))
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
    pub fn g_mid(&self) -> &[f64] {
        &self.g_mid
    }
    pub fn ellipticity(&self) -> f64 {
        self.ellipticity
    }

    pub fn has_coupling(&self) -> bool {
        self.alpha.iter().any(|&v| v > 0.0)
    }

    pub fn has_damping(&self) -> bool {
        self.beta.iter().any(|&v| v > 0.0)
    }

    /// Both ω_α and ω_β nonempty.
    pub fn require_nonempty_supports(&self) -> Result<()> {
        match (self.has_coupling(), self.has_damping()) {
            (true, true) => Ok(()),
            (false, _) => invalid("coupling coefficient alpha vanishes identically"),
            (_, false) => invalid("damping coefficient beta vanishes identically"),
        }
    }

    /// Whether some node carries both coupling and damping, i.e. the sampled
    /// supports intersect.
    pub fn supports_intersect(&self) -> bool {
        self.alpha.iter().zip(&self.beta).any(|(a, b)| *a > 0.0 && *b > 0.0)
    }
}
