use crate::banded::BandedLu;
use crate::discretization::GeneratorMatrix;
use crate::energy::{dissipation, EnergyReport};
use crate::error::{invalid, Result};
use crate::state::StateVector;

/// `(I - dt/2 A)` factored once and reused for every step.
pub struct MidpointStepper<'a> {
    a: &'a GeneratorMatrix,
    dt: f64,
    lu: BandedLu<f64>,
}

impl<'a> MidpointStepper<'a> {
    /// A negative `dt` steps backward in time.
    pub fn new(a: &'a GeneratorMatrix, dt: f64) -> Result<Self> {
        if !(dt != 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be finite and nonzero, got {dt}"));
        }
        let lu = a.shifted_banded(1.0, -0.5 * dt).factor()?;
        Ok(Self { a, dt, lu })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, u: &StateVector<f64>) -> Result<StateVector<f64>> {
        let mut rhs = u.clone();
        rhs.axpy(0.5 * self.dt, &self.a.apply(u)?);
        let mut x = rhs.to_interleaved();
        self.lu.solve_in_place(&mut x);
        StateVector::from_interleaved(&x)
    }

    /// One step plus the dissipation rate at the midpoint state
    /// `(U + U⁺)/2`, for which `E⁺ - E = -dt · D_mid` holds exactly.
    pub fn step_with_dissipation(&self, u: &StateVector<f64>) -> Result<(StateVector<f64>, f64)> {
        let next = self.step(u)?;
        let mut mid = u.clone();
        mid.axpy(1.0, &next);
        let mid = mid.scaled(0.5);
        let d = dissipation(&mid, self.a.grid(), self.a.coeffs())?;
        Ok((next, d))
    }
}

/// Single implicit-midpoint step; factors the system on every call.
pub fn step_midpoint(u: &StateVector<f64>, a: &GeneratorMatrix, dt: f64) -> Result<StateVector<f64>> {
    MidpointStepper::new(a, dt)?.step(u)
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub generator: GeneratorMatrix,
    pub initial: StateVector<f64>,
    pub dt: f64,
    pub t_final: f64,
    /// Steps between energy reports.
    pub stride: usize,
}

impl SimulationConfig {
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_final >= self.dt) {
            return invalid(format!(
                "final time {} must be at least one step {}",
                self.t_final, self.dt
            ));
        }
        if self.stride == 0 {
            return invalid("report stride must be at least 1");
        }
        self.initial.check_len(self.generator.n())?;
        Ok((self.t_final / self.dt).round() as usize)
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub reports: Vec<EnergyReport>,
    /// Cumulative `Σ dt · D_mid` up to each report.
    pub dissipated: Vec<f64>,
    pub final_state: StateVector<f64>,
    pub steps: usize,
}

impl Simulation {
    pub fn initial_energy(&self) -> f64 {
        self.reports[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.reports.last().map(|r| r.energy).unwrap_or(0.0)
    }

    /// `|E(0) - E(T) - ∫D| / E(0)` with the midpoint quadrature of D.
    pub fn budget_residual(&self) -> f64 {
        let e0 = self.initial_energy();
        if e0 == 0.0 {
            return 0.0;
        }
        let spent = self.dissipated.last().copied().unwrap_or(0.0);
        (e0 - self.final_energy() - spent).abs() / e0
    }

    /// Largest increase of E between consecutive reports, relative to E(0).
    pub fn max_energy_increase(&self) -> f64 {
        let e0 = self.initial_energy();
        if e0 == 0.0 {
            return 0.0;
        }
        self.reports
            .windows(2)
            .map(|w| (w[1].energy - w[0].energy) / e0)
            .fold(0.0, f64::max)
    }

    /// Largest `|E(t_k) - E(0)| / E(0)`.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.initial_energy();
        if e0 == 0.0 {
            return 0.0;
        }
        self.reports
            .iter()
            .map(|r| (r.energy - e0).abs() / e0)
            .fold(0.0, f64::max)
    }
}

pub fn simulate(cfg: &SimulationConfig) -> Result<Simulation> {
    let steps = cfg.steps()?;
    let a = &cfg.generator;
    let stepper = MidpointStepper::new(a, cfg.dt)?;
    let mut u = cfg.initial.clone();
    let mut reports = vec![EnergyReport::at(0.0, &u, a)?];
    let mut dissipated = vec![0.0];
    let mut spent = 0.0;
    for k in 1..=steps {
        let (next, d_mid) = stepper.step_with_dissipation(&u)?;
        spent += cfg.dt * d_mid;
        u = next;
        if k % cfg.stride == 0 || k == steps {
            reports.push(EnergyReport::at(k as f64 * cfg.dt, &u, a)?);
            dissipated.push(spent);
        }
    }
    Ok(Simulation {
        reports,
        dissipated,
        final_state: u,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientField;
    use crate::energy::energy;
    use crate::grid::Grid1D;
    use std::f64::consts::PI;

    fn conservative(n: usize) -> GeneratorMatrix {
        let grid = Grid1D::new(PI, n).unwrap();
        GeneratorMatrix::new(&grid, CoefficientField::uniform(&grid, 0.0, 0.0, 1.0).unwrap()).unwrap()
    }

    fn mode(a: &GeneratorMatrix, k: f64) -> StateVector<f64> {
        let mut s = StateVector::zeros(a.n());
        s.y = a.grid().nodes().iter().map(|x| (k * x).sin()).collect();
        s.z = a.grid().nodes().iter().map(|x| (2.0 * k * x).sin()).collect();
        s
    }

    #[test]
    fn zero_stays_zero() {
        let a = conservative(10);
        let z = StateVector::zeros(10);
        assert_eq!(step_midpoint(&z, &a, 0.1).unwrap(), z);
    }

    #[test]
    fn conserves_energy_over_ten_thousand_steps() {
        let a = conservative(31);
        let (g, c) = (a.grid(), a.coeffs());
        let stepper = MidpointStepper::new(&a, 0.01).unwrap();
        let mut u = mode(&a, 1.0);
        let e0 = energy(&u, g, c).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            u = stepper.step(&u).unwrap();
            worst = worst.max((energy(&u, g, c).unwrap() - e0).abs() / e0);
        }
        assert!(worst < 1e-10, "drift {worst}");
    }

    #[test]
    fn reversible_without_damping() {
        let grid = Grid1D::new(PI, 20).unwrap();
        let c = CoefficientField::uniform(&grid, 0.7, 0.0, 1.0).unwrap();
        let a = GeneratorMatrix::new(&grid, c).unwrap();
        let u0 = mode(&a, 3.0);
        let fwd = step_midpoint(&u0, &a, 0.05).unwrap();
        let back = step_midpoint(&fwd, &a, -0.05).unwrap();
        let mut d = back.clone();
        d.axpy(-1.0, &u0);
        assert!(d.max_abs() < 1e-12 * u0.max_abs(), "{}", d.max_abs());
    }

    #[test]
    fn second_order_in_space_and_time() {
        // y = sin(x) cos(t), z = sin(2x) cos(2t) on (0, π), dt = h
        let mut errs = Vec::new();
        for n in [15, 31, 63] {
            let a = conservative(n);
            let dt = a.grid().h();
            let cfg = SimulationConfig {
                generator: a.clone(),
                initial: mode(&a, 1.0),
                dt,
                t_final: 1.0,
                stride: 1_000_000,
            };
            let steps = cfg.steps().unwrap();
            let stepper = MidpointStepper::new(&a, dt).unwrap();
            let mut u = cfg.initial.clone();
            for _ in 0..steps {
                u = stepper.step(&u).unwrap();
            }
            let t = steps as f64 * dt;
            let err = a
                .grid()
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let ey = x.sin() * t.cos();
                    let ez = (2.0 * x).sin() * (2.0 * t).cos();
                    (u.y[i] - ey).abs().max((u.z[i] - ez).abs())
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "order {order} from {errs:?}");
        }
    }

    #[test]
    fn damped_energy_is_monotone_and_budget_closes() {
        let grid = Grid1D::new(PI, 40).unwrap();
        let c = CoefficientField::uniform(&grid, 1.0, 0.5, 1.0).unwrap();
        let a = GeneratorMatrix::new(&grid, c).unwrap();
        let cfg = SimulationConfig {
            initial: mode(&a, 2.0),
            generator: a,
            dt: 0.02,
            t_final: 20.0,
            stride: 5,
        };
        let sim = simulate(&cfg).unwrap();
        assert!(sim.max_energy_increase() <= 1e-12);
        assert!(sim.budget_residual() < 1e-10, "{}", sim.budget_residual());
        assert!(sim.final_energy() < 0.5 * sim.initial_energy());
    }

    #[test]
    fn rejects_bad_config() {
        let a = conservative(10);
        let mk = |dt, t_final, stride| SimulationConfig {
            generator: a.clone(),
            initial: StateVector::zeros(10),
            dt,
            t_final,
            stride,
        };
        assert!(simulate(&mk(0.0, 1.0, 1)).is_err());
        assert!(simulate(&mk(0.1, 0.01, 1)).is_err());
        assert!(simulate(&mk(0.1, 1.0, 0)).is_err());
        let zero = simulate(&mk(0.1, 1.0, 2)).unwrap();
        assert!(zero.reports.iter().all(|r| r.energy == 0.0 && r.dissipation == 0.0));
    }
}
