//! Manufactured solutions `w(s, x) = S(s) X(x)` for the Carleman check,
//! vanishing at `s = ±b` and at both ends of the interval, and the
//! conductivities `g` of the elliptic operator.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::OnceLock;

use num_dual::{Dual2_64, DualNum};

use super::weights::CarlemanWeights;
use crate::error::{invalid, Result};
use crate::registry::{CallSpec, Registry};

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl From<Dual2_64> for Jet {
    fn from(d: Dual2_64) -> Self {
        Self { v: d.re, d1: d.v1, d2: d.v2 }
    }
}

impl Jet {
    pub fn scaled(self, a: f64) -> Self {
        Self { v: a * self.v, d1: a * self.d1, d2: a * self.d2 }
    }
}

fn seed(t: f64) -> Dual2_64 {
    Dual2_64::from_re(t).derivative()
}

pub trait Manufactured: Debug + Send + Sync {
    fn s_factor(&self, w: &CarlemanWeights, s: f64) -> Jet;
    fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet;
    fn spec(&self) -> String;
}

/// `(b² - s²)²` by forward differentiation.
fn quartic_s(b: f64, s: f64) -> Jet {
    let s = seed(s);
    let q = -(s * s) + b * b;
    (q * q).into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSolution;

impl Manufactured for ZeroSolution {
    fn s_factor(&self, _w: &CarlemanWeights, _s: f64) -> Jet {
        Jet::default()
    }
    fn x_factor(&self, _w: &CarlemanWeights, _x: f64) -> Jet {
        Jet::default()
    }
    fn spec(&self) -> String {
        "zero".into()
    }
}

/// `(b² - s²)² sin(kπx/L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolySine {
    pub k: u32,
}

impl Manufactured for PolySine {
    fn s_factor(&self, w: &CarlemanWeights, s: f64) -> Jet {
        quartic_s(w.b, s)
    }
    fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet {
        (seed(x) * (self.k as f64 * PI / w.psi_hat.length)).sin().into()
    }
    fn spec(&self) -> String {
        format!("poly-sine({})", self.k)
    }
}

/// `(b² - s²) e^{-s²/2σ²} · x(L - x) e^{-(x - x₀)²/2σ²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub x0: f64,
    pub sigma: f64,
}

impl Manufactured for GaussianBump {
    fn s_factor(&self, w: &CarlemanWeights, s: f64) -> Jet {
        let s = seed(s);
        let k = -0.5 / (self.sigma * self.sigma);
        ((-(s * s) + w.b * w.b) * (s * s * k).exp()).into()
    }
    fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet {
        let x = seed(x);
        let k = -0.5 / (self.sigma * self.sigma);
        let d = x - self.x0;
        (x * (-x + w.psi_hat.length) * (d * d * k).exp()).into()
    }
    fn spec(&self) -> String {
        format!("gaussian-bump({}, {})", self.x0, self.sigma)
    }
}

/// `(b² - s²)² ψ̂(x)/‖ψ̂‖`, tied to the weight's own profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiProfile;

impl Manufactured for PsiProfile {
    fn s_factor(&self, w: &CarlemanWeights, s: f64) -> Jet {
        quartic_s(w.b, s)
    }
    fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet {
        let p = &w.psi_hat;
        Jet { v: p.value(x), d1: p.d1(x), d2: p.d2(x) }.scaled(1.0 / p.sup())
    }
    fn spec(&self) -> String {
        "psi-profile".into()
    }
}

/// `factor · w`.
#[derive(Debug)]
pub struct Scaled<'a> {
    pub inner: &'a dyn Manufactured,
    pub factor: f64,
}

impl Manufactured for Scaled<'_> {
    fn s_factor(&self, w: &CarlemanWeights, s: f64) -> Jet {
        self.inner.s_factor(w, s).scaled(self.factor)
    }
    fn x_factor(&self, w: &CarlemanWeights, x: f64) -> Jet {
        self.inner.x_factor(w, x)
    }
    fn spec(&self) -> String {
        format!("{} * {}", self.factor, self.inner.spec())
    }
}

pub type ManufacturedFactory = fn(&CallSpec) -> Result<Box<dyn Manufactured>>;

fn no_args(c: &CallSpec) -> Result<()> {
    if c.args.is_empty() {
        Ok(())
    } else {
        c.arity(0)
    }
}

pub fn manufactured_solutions() -> &'static Registry<ManufacturedFactory> {
    static REG: OnceLock<Registry<ManufacturedFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("manufactured solution")
            .with("zero", (|c: &CallSpec| {
                no_args(c)?;
                Ok(Box::new(ZeroSolution) as Box<dyn Manufactured>)
            }) as ManufacturedFactory)
            .with("poly-sine", |c| {
                let k = if c.args.is_empty() { 1.0 } else { c.arity(1).and_then(|_| c.number(0))? };
                if !(k >= 1.0 && k.fract() == 0.0 && k <= u32::MAX as f64) {
                    return invalid(format!("poly-sine mode must be a positive integer, got {k}"));
                }
                Ok(Box::new(PolySine { k: k as u32 }))
            })
            .with("gaussian-bump", |c| {
                c.arity(2)?;
                let sigma = c.number(1)?;
                if !(sigma > 0.0) {
                    return invalid(format!("gaussian-bump width must be positive, got {sigma}"));
                }
                Ok(Box::new(GaussianBump { x0: c.number(0)?, sigma }))
            })
            .with("psi-profile", |c| {
                no_args(c)?;
                Ok(Box::new(PsiProfile))
            })
    })
}

pub fn parse_manufactured(spec: &str) -> Result<Box<dyn Manufactured>> {
    let call = CallSpec::parse(spec)?;
    (manufactured_solutions().get(&call.name)?)(&call)
}

/// Elliptic coefficient `g` with its derivative, bounded below by
/// `ellipticity()`.
pub trait Conductivity: Debug + Send + Sync {
    fn jet(&self, x: f64) -> Jet;
    fn ellipticity(&self) -> f64;
    fn spec(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantConductivity(pub f64);

impl Conductivity for ConstantConductivity {
    fn jet(&self, _x: f64) -> Jet {
        Jet { v: self.0, d1: 0.0, d2: 0.0 }
    }
    fn ellipticity(&self) -> f64 {
        self.0
    }
    fn spec(&self) -> String {
        format!("constant({})", self.0)
    }
}

/// `base + amp · sin(freq · x)` with `base > |amp|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineConductivity {
    pub base: f64,
    pub amp: f64,
    pub freq: f64,
}

impl Conductivity for SineConductivity {
    fn jet(&self, x: f64) -> Jet {
        ((seed(x) * self.freq).sin() * self.amp + self.base).into()
    }
    fn ellipticity(&self) -> f64 {
        self.base - self.amp.abs()
    }
    fn spec(&self) -> String {
        format!("sine({}, {}, {})", self.base, self.amp, self.freq)
    }
}

pub type ConductivityFactory = fn(&CallSpec) -> Result<Box<dyn Conductivity>>;

pub fn conductivities() -> &'static Registry<ConductivityFactory> {
    static REG: OnceLock<Registry<ConductivityFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("conductivity")
            .with("constant", (|c: &CallSpec| {
                c.arity(1)?;
                let g = c.number(0)?;
                if !(g > 0.0) {
                    return invalid(format!("conductivity must be positive, got {g}"));
                }
                Ok(Box::new(ConstantConductivity(g)) as Box<dyn Conductivity>)
            }) as ConductivityFactory)
            .with("sine", |c| {
                c.arity(3)?;
                let (base, amp, freq) = (c.number(0)?, c.number(1)?, c.number(2)?);
                if !(base > amp.abs()) {
                    return invalid(format!("sine conductivity needs base > |amp|, got {base}, {amp}"));
                }
                Ok(Box::new(SineConductivity { base, amp, freq }))
            })
    })
}

pub fn parse_conductivity(spec: &str) -> Result<Box<dyn Conductivity>> {
    let call = CallSpec::parse(spec)?;
    (conductivities().get(&call.name)?)(&call)
}
