//! Named initial states.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::OnceLock;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::counterexample;
use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::registry::{CallSpec, Registry};
use crate::state::StateVector;

pub trait InitialData: Debug + Send + Sync {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>>;
    fn spec(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero;

impl InitialData for Zero {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>> {
        Ok(StateVector::zeros(grid.n()))
    }
    fn spec(&self) -> String {
        "zero".into()
    }
}

/// `y = z = sin(kπx/L)`, at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenmode(pub u32);

impl InitialData for Eigenmode {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>> {
        let w = self.0 as f64 * PI / grid.length();
        let mode: Vec<f64> = grid.nodes().iter().map(|x| (w * x).sin()).collect();
        let mut s = StateVector::zeros(grid.n());
        s.y = mode.clone();
        s.z = mode;
        Ok(s)
    }
    fn spec(&self) -> String {
        format!("eigenmode({})", self.0)
    }
}

/// Smooth random state: each component is `Σ_{k≤8} c_k sin(kπx/L) / k²`
/// with `c_k` uniform on [-1, 1] drawn from SplitMix64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Random(pub u64);

pub const RANDOM_MODES: usize = 8;

impl InitialData for Random {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>> {
        let mut rng = SplitMix64::seed_from_u64(self.0);
        let nodes = grid.nodes();
        let mut comp = || {
            let c: Vec<f64> = (0..RANDOM_MODES)
                .map(|_| 2.0 * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) - 1.0)
                .collect();
            nodes
                .iter()
                .map(|x| {
                    c.iter()
                        .enumerate()
                        .map(|(k, ck)| {
                            let k = (k + 1) as f64;
                            ck * (k * PI * x / grid.length()).sin() / (k * k)
                        })
                        .sum()
                })
                .collect::<Vec<f64>>()
        };
        let (y, u, z, v) = (comp(), comp(), comp(), comp());
        StateVector::from_components(y, u, z, v)
    }
    fn spec(&self) -> String {
        format!("random({})", self.0)
    }
}

/// Closed-form solution at t = 0 (requires L = 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample;

impl InitialData for Counterexample {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>> {
        counterexample::initial_state(grid)
    }
    fn spec(&self) -> String {
        "counterexample".into()
    }
}

/// The initial data as printed, with `y¹` missing the factor 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexamplePrinted;

impl InitialData for CounterexamplePrinted {
    fn state(&self, grid: &Grid1D) -> Result<StateVector<f64>> {
        counterexample::initial_state(grid)?;
        let mut s = StateVector::zeros(grid.n());
        for (i, x) in grid.nodes().into_iter().enumerate() {
            let [y0, y1, z0, z1] = counterexample::printed_initial_data(x)?;
            s.y[i] = y0;
            s.u[i] = y1;
            s.z[i] = z0;
            s.v[i] = z1;
        }
        Ok(s)
    }
    fn spec(&self) -> String {
        "counterexample-printed".into()
    }
}

pub type InitialFactory = fn(&CallSpec) -> Result<Box<dyn InitialData>>;

fn no_args(c: &CallSpec) -> Result<()> {
    if c.args.is_empty() {
        Ok(())
    } else {
        c.arity(0)
    }
}

pub fn initial_data() -> &'static Registry<InitialFactory> {
    static REG: OnceLock<Registry<InitialFactory>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new("initial data")
            .with("zero", (|c| no_args(c).map(|_| Box::new(Zero) as Box<dyn InitialData>)) as InitialFactory)
            .with("eigenmode", |c| {
                c.arity(1)?;
                let k = c.number(0)?;
                if !(k >= 1.0 && k.fract() == 0.0 && k <= u32::MAX as f64) {
                    return invalid(format!("eigenmode index must be a positive integer, got {k}"));
                }
                Ok(Box::new(Eigenmode(k as u32)))
            })
            .with("random", |c| {
                c.arity(1)?;
                let seed: u64 = c.args[0]
                    .trim()
                    .parse()
                    .map_err(|_| crate::Error::InvalidInput(format!("seed `{}` is not a u64", c.args[0])))?;
                Ok(Box::new(Random(seed)))
            })
            .with("counterexample", |c| no_args(c).map(|_| Box::new(Counterexample) as Box<dyn InitialData>))
            .with("counterexample-printed", |c| {
                no_args(c).map(|_| Box::new(CounterexamplePrinted) as Box<dyn InitialData>)
            })
    })
}

pub fn parse_initial(spec: &str) -> Result<Box<dyn InitialData>> {
    let call = CallSpec::parse(spec)?;
    (initial_data().get(&call.name)?)(&call)
}
