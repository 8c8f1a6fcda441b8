//! Scenario files: TOML with `[domain]`, `[coefficients]`, `[initial]`,
//! `[solver]`, `[frequency]` and `[carleman]` sections.

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use coupled_wave::carleman::{parse_conductivity, parse_manufactured, PsiHat};
use coupled_wave::coeffs::{parse_profile, CoefficientField};
use coupled_wave::frequency::{parse_eigen_solver, parse_sigma_solver, SweepConfig};
use coupled_wave::initial::{parse_initial, InitialData};
use coupled_wave::registry::parse_number;
use coupled_wave::{GeneratorMatrix, Grid1D};

/// A real written either as a TOML number or as a string such as `"2pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    pub fn value(&self) -> coupled_wave::Result<f64> {
        match self {
            Real::Number(x) => Ok(*x),
            Real::Text(s) => parse_number(s),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Number(x) => write!(f, "{x}"),
            Real::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub length: Spanned<Real>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub alpha: Spanned<String>,
    pub beta: Spanned<String>,
    #[serde(default = "default_g")]
    pub g: Spanned<String>,
}

fn default_g() -> Spanned<String> {
    Spanned::new(0..0, "constant(1)".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub data: Spanned<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequency {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub count: usize,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
    #[serde(default = "default_eigen")]
    pub eigen_solver: Spanned<String>,
    #[serde(default = "default_sigma")]
    pub sigma_solver: Spanned<String>,
}

fn default_refine_steps() -> usize {
    60
}

fn default_eigen() -> Spanned<String> {
    Spanned::new(0..0, "dense".into())
}

fn default_sigma() -> Spanned<String> {
    Spanned::new(0..0, "inverse-iteration".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Carleman {
    pub mu: f64,
    pub lambdas: Vec<f64>,
    pub manufactured: Spanned<String>,
    pub omega0: [f64; 2],
    #[serde(default = "default_conductivity")]
    pub conductivity: Spanned<String>,
    pub c_candidate: f64,
}

fn default_conductivity() -> Spanned<String> {
    Spanned::new(0..0, "constant(1)".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: Domain,
    pub coefficients: Coefficients,
    pub initial: Option<Initial>,
    pub solver: Option<Solver>,
    pub frequency: Option<Frequency>,
    pub carleman: Option<Carleman>,
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |k| before.len() - k - 1) + 1;
    (line, col)
}

/// Wraps a semantic error with the position of the offending value.
struct Located<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Located<'_> {
    fn check<T, E: fmt::Display>(&self, span: std::ops::Range<usize>, r: std::result::Result<T, E>) -> Result<T> {
        r.map_err(|e| {
            if span.is_empty() {
                anyhow!("{}: {e}", self.origin)
            } else {
                let (line, col) = line_col(self.text, span.start);
                anyhow!("{}:{line}:{col}: {e}", self.origin)
            }
        })
    }
}

impl ScenarioConfig {
    /// Parses and validates; every error names the line and column.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                anyhow!("{origin}:{line}:{col}: {}", e.message())
            }
            None => anyhow!("{origin}: {}", e.message()),
        })?;
        cfg.validate(&Located { text, origin })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    fn validate(&self, at: &Located<'_>) -> Result<()> {
        let d = &self.domain;
        let length = at.check(d.length.span(), d.length.get_ref().value())?;
        let grid = at.check(d.length.span(), Grid1D::new(length, d.n))?;
        let c = &self.coefficients;
        let profile = |s: &Spanned<String>| at.check(s.span(), parse_profile(s.get_ref()));
        let (alpha, beta, g) = (profile(&c.alpha)?, profile(&c.beta)?, profile(&c.g)?);
        // the field constructor enforces α, β >= 0 and g >= a > 0
        if let Err(e) = CoefficientField::sample(&grid, alpha.as_ref(), beta.as_ref(), g.as_ref()) {
            let msg = e.to_string();
            let culprit = if msg.contains("beta") {
                &c.beta
            } else if msg.contains("g_mid") || msg.contains("g must") || msg.contains("ellipticity") {
                &c.g
            } else {
                &c.alpha
            };
            at.check(culprit.span(), Err::<(), _>(msg))?;
        }
        if let Some(i) = &self.initial {
            at.check(i.data.span(), parse_initial(i.data.get_ref()))?;
        }
        if let Some(s) = &self.solver {
            if !(s.dt > 0.0 && s.t_final >= s.dt && s.stride >= 1) {
                return Err(anyhow!(
                    "{}: [solver] needs dt > 0, t_final >= dt and stride >= 1; got {}, {}, {}",
                    at.origin,
                    s.dt,
                    s.t_final,
                    s.stride
                ));
            }
        }
        if let Some(f) = &self.frequency {
            at.check(f.eigen_solver.span(), parse_eigen_solver(f.eigen_solver.get_ref()))?;
            at.check(f.sigma_solver.span(), parse_sigma_solver(f.sigma_solver.get_ref()))?;
            if !(1.0 < f.sigma_min && f.sigma_min < f.sigma_max && f.count >= 2) {
                return Err(anyhow!(
                    "{}: [frequency] needs 1 < sigma_min < sigma_max and count >= 2; got [{}, {}] with {}",
                    at.origin,
                    f.sigma_min,
                    f.sigma_max,
                    f.count
                ));
            }
        }
        if let Some(k) = &self.carleman {
            at.check(k.manufactured.span(), parse_manufactured(k.manufactured.get_ref()))?;
            at.check(k.conductivity.span(), parse_conductivity(k.conductivity.get_ref()))?;
            PsiHat::new(length, (k.omega0[0], k.omega0[1])).map_err(|e| anyhow!("{}: [carleman] {e}", at.origin))?;
            if k.lambdas.is_empty() || k.lambdas.iter().any(|l| !(*l > 0.0)) {
                return Err(anyhow!("{}: [carleman] lambdas must be a nonempty list of positive values", at.origin));
            }
        }
        Ok(())
    }

    pub fn length(&self) -> Result<f64> {
        Ok(self.domain.length.get_ref().value()?)
    }

    pub fn grid(&self, refine: bool) -> Result<Grid1D> {
        let g = Grid1D::new(self.length()?, self.domain.n)?;
        Ok(if refine { g.refined() } else { g })
    }

    pub fn generator(&self, grid: &Grid1D) -> Result<GeneratorMatrix> {
        let c = &self.coefficients;
        let field = CoefficientField::sample(
            grid,
            parse_profile(c.alpha.get_ref())?.as_ref(),
            parse_profile(c.beta.get_ref())?.as_ref(),
            parse_profile(c.g.get_ref())?.as_ref(),
        )?;
        Ok(GeneratorMatrix::new(grid, field)?)
    }

    pub fn initial_data(&self) -> Result<Box<dyn InitialData>> {
        let i = self.initial.as_ref().ok_or_else(|| anyhow!("scenario has no [initial] section"))?;
        Ok(parse_initial(i.data.get_ref())?)
    }

    pub fn solver(&self) -> Result<&Solver> {
        self.solver.as_ref().ok_or_else(|| anyhow!("scenario has no [solver] section"))
    }

    pub fn frequency(&self) -> Result<&Frequency> {
        self.frequency.as_ref().ok_or_else(|| anyhow!("scenario has no [frequency] section"))
    }

    pub fn carleman(&self) -> Result<&Carleman> {
        self.carleman.as_ref().ok_or_else(|| anyhow!("scenario has no [carleman] section"))
    }
}

impl Frequency {
    pub fn sweep(&self) -> SweepConfig {
        SweepConfig { refine_steps: self.refine_steps, ..SweepConfig::new(self.sigma_min, self.sigma_max, self.count) }
    }
}
