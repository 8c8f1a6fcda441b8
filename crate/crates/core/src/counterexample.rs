//! Closed-form non-decaying solution on `(0, 2π)` with disjoint coupling
//! and damping supports:
//!
//! ```text
//! α = 24/5 on (0, π),  0 on (π, 2π)
//! β = 0    on (0, π),  1 on (π, 2π)
//! y = sin 5t (7 sin x - sin 7x)     on (0, π),  0                 beyond
//! z = -cos 5t (7 sin x + sin 7x)    on (0, π),  -14/5 cos 5t sin 5x beyond
//! ```
//!
//! y vanishes where β lives, so nothing is dissipated and the energy is
//! constant in time.

use std::f64::consts::PI;
use std::io::Write;

use crate::coeffs::{CoefficientField, Piecewise};
use crate::discretization::GeneratorMatrix;
use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::output::{fmt17, write_table};
use crate::state::StateVector;
use crate::timedomain::MidpointStepper;

pub const DOMAIN_LENGTH: f64 = 2.0 * PI;
pub const INTERFACE: f64 = PI;
pub const COUPLING: f64 = 24.0 / 5.0;
pub const DAMPING: f64 = 1.0;
pub const FREQUENCY: f64 = 5.0;

/// Values of the closed form and their time derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub y: f64,
    pub y_t: f64,
    pub z: f64,
    pub z_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_point(t: f64, x: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time must be finite and nonnegative, got {t}"));
    }
    if !(0.0..=DOMAIN_LENGTH).contains(&x) {
        return invalid(format!("x = {x} lies outside [0, 2π]"));
    }
    Ok(())
}

fn side_of(x: f64) -> Side {
    if x < INTERFACE {
        Side::Left
    } else {
        Side::Right
    }
}

fn eval_piece(side: Side, t: f64, x: f64) -> ClosedFormValue {
    let (s5, c5) = (FREQUENCY * t).sin_cos();
    match side {
        Side::Left => {
            let (a, b) = (7.0 * x.sin(), (7.0 * x).sin());
            ClosedFormValue {
                y: s5 * (a - b),
                y_t: 5.0 * c5 * (a - b),
                z: -c5 * (a + b),
                z_t: 5.0 * s5 * (a + b),
            }
        }
        Side::Right => {
            let s = (5.0 * x).sin();
            ClosedFormValue {
                y: 0.0,
                y_t: 0.0,
                z: -2.8 * c5 * s,
                z_t: 14.0 * s5 * s,
            }
        }
    }
}

/// `(y, y_t, z, z_t)` at `(t, x)`; the right formula is used on `[π, 2π]`.
pub fn eval(t: f64, x: f64) -> Result<ClosedFormValue> {
    check_point(t, x)?;
    Ok(eval_piece(side_of(x), t, x))
}

/// One-sided `(y_x, z_x)` using the formula of the given piece.
pub fn spatial_derivative(t: f64, x: f64, side: Side) -> Result<(f64, f64)> {
    check_point(t, x)?;
    let c5 = (FREQUENCY * t).cos();
    let s5 = (FREQUENCY * t).sin();
    Ok(match side {
        Side::Left => {
            let (a, b) = (7.0 * x.cos(), 7.0 * (7.0 * x).cos());
            (s5 * (a - b), -c5 * (a + b))
        }
        Side::Right => (0.0, -14.0 * c5 * (5.0 * x).cos()),
    })
}

/// Second derivatives `(y_tt, y_xx, z_tt, z_xx)`, differentiated by hand.
fn second_derivatives(t: f64, x: f64) -> [f64; 4] {
    let (s5, c5) = (FREQUENCY * t).sin_cos();
    match side_of(x) {
        Side::Left => {
            let (sx, s7) = (x.sin(), (7.0 * x).sin());
            [
                -25.0 * s5 * (7.0 * sx - s7),
                s5 * (-7.0 * sx + 49.0 * s7),
                25.0 * c5 * (7.0 * sx + s7),
                c5 * (7.0 * sx + 49.0 * s7),
            ]
        }
        Side::Right => {
            let s = (5.0 * x).sin();
            [0.0, 0.0, 70.0 * c5 * s, 70.0 * c5 * s]
        }
    }
}

pub fn alpha(x: f64) -> f64 {
    if x < INTERFACE {
        COUPLING
    } else {
        0.0
    }
}

pub fn beta(x: f64) -> f64 {
    if x > INTERFACE {
        DAMPING
    } else {
        0.0
    }
}

/// PDE residuals `(r_y, r_z)`; rejected within `eps` of the boundary or
/// the coefficient jump.
pub fn residual(t: f64, x: f64, eps: f64) -> Result<(f64, f64)> {
    check_point(t, x)?;
    for p in [0.0, INTERFACE, DOMAIN_LENGTH] {
        if (x - p).abs() <= eps {
            return invalid(format!("x = {x} is within {eps} of the singular point {p}"));
        }
    }
    let v = eval_piece(side_of(x), t, x);
    let [y_tt, y_xx, z_tt, z_xx] = second_derivatives(t, x);
    let (a, b) = (alpha(x), beta(x));
    Ok((y_tt - y_xx + a * v.z_t + b * v.y_t, z_tt - z_xx - a * v.y_t))
}

/// The initial data exactly as printed: `(y⁰, y¹, z⁰, z¹)`. Its `y¹` lacks
/// the factor 5 carried by `y_t(0, x)` of the closed form.
pub fn printed_initial_data(x: f64) -> Result<[f64; 4]> {
    check_point(0.0, x)?;
    Ok(if x < INTERFACE {
        [0.0, 7.0 * x.sin() - (7.0 * x).sin(), -(7.0 * x.sin() + (7.0 * x).sin()), 0.0]
    } else {
        [0.0, 0.0, -2.8 * (5.0 * x).sin(), 0.0]
    })
}

/// Continuum energy of the closed form; constant in time.
pub fn continuum_energy() -> f64 {
    386.0 * PI
}

fn check_grid(grid: &Grid1D) -> Result<()> {
    if (grid.length() - DOMAIN_LENGTH).abs() > 1e-12 {
        return invalid(format!("the closed form lives on (0, 2π), grid length is {}", grid.length()));
    }
    Ok(())
}

/// α and β sampled at nodes (left-limit value at a node on π), g ≡ 1.
pub fn coefficients(grid: &Grid1D) -> Result<CoefficientField> {
    check_grid(grid)?;
    let a = Piecewise { ends: vec![INTERFACE, DOMAIN_LENGTH], values: vec![COUPLING, 0.0] };
    let b = Piecewise { ends: vec![INTERFACE, DOMAIN_LENGTH], values: vec![0.0, DAMPING] };
    CoefficientField::sample(grid, &a, &b, &crate::coeffs::Constant(1.0))
}

pub fn state_at(grid: &Grid1D, t: f64) -> Result<StateVector<f64>> {
    check_grid(grid)?;
    let n = grid.n();
    let mut s = StateVector::zeros(n);
    for (i, x) in grid.nodes().into_iter().enumerate() {
        let v = eval(t, x)?;
        s.y[i] = v.y;
        s.u[i] = v.y_t;
        s.z[i] = v.z;
        s.v[i] = v.z_t;
    }
    Ok(s)
}

pub fn initial_state(grid: &Grid1D) -> Result<StateVector<f64>> {
    state_at(grid, 0.0)
}

#[derive(Debug, Clone)]
pub struct ComparisonSnapshot {
    pub t: f64,
    pub state: StateVector<f64>,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub grid: Grid1D,
    pub dt: f64,
    pub steps: usize,
    /// `max |U_sim - U_exact| / max |U_exact|` over y and z at every sample.
    pub rel_max_error: f64,
    pub max_abs_error: f64,
    /// Same for the velocities u and v.
    pub rel_velocity_error: f64,
    pub initial_energy: f64,
    pub max_energy_drift: f64,
    pub max_dissipation: f64,
    pub snapshots: Vec<ComparisonSnapshot>,
}

/// Runs the midpoint scheme from the sampled closed form and measures the
/// discrepancy every `stride` steps.
pub fn compare_with_simulation(grid: &Grid1D, dt: f64, t_final: f64, stride: usize) -> Result<ComparisonReport> {
    if !(dt > 0.0) || !(t_final >= dt) || stride == 0 {
        return invalid(format!("need dt > 0, T >= dt, stride >= 1; got {dt}, {t_final}, {stride}"));
    }
    let a = GeneratorMatrix::new(grid, coefficients(grid)?)?;
    let stepper = MidpointStepper::new(&a, dt)?;
    let steps = (t_final / dt).round() as usize;
    let mut u = initial_state(grid)?;
    let e0 = crate::energy::energy(&u, grid, a.coeffs())?;
    let mut report = ComparisonReport {
        grid: grid.clone(),
        dt,
        steps,
        rel_max_error: 0.0,
        max_abs_error: 0.0,
        rel_velocity_error: 0.0,
        initial_energy: e0,
        max_energy_drift: 0.0,
        max_dissipation: crate::energy::dissipation(&u, grid, a.coeffs())?,
        snapshots: vec![ComparisonSnapshot { t: 0.0, state: u.clone() }],
    };
    let mut scale: f64 = 0.0;
    let mut vscale: f64 = 0.0;
    let mut verr: f64 = 0.0;
    for k in 1..=steps {
        u = stepper.step(&u)?;
        if k % stride != 0 && k != steps {
            continue;
        }
        let t = k as f64 * dt;
        let exact = state_at(grid, t)?;
        for (sim, ex) in [(&u.y, &exact.y), (&u.z, &exact.z)] {
            for (s, e) in sim.iter().zip(ex) {
                report.max_abs_error = report.max_abs_error.max((s - e).abs());
                scale = scale.max(e.abs());
            }
        }
        for (sim, ex) in [(&u.u, &exact.u), (&u.v, &exact.v)] {
            for (s, e) in sim.iter().zip(ex) {
                verr = verr.max((s - e).abs());
                vscale = vscale.max(e.abs());
            }
        }
        let e = crate::energy::energy(&u, grid, a.coeffs())?;
        report.max_energy_drift = report.max_energy_drift.max((e - e0).abs() / e0);
        report.max_dissipation = report
            .max_dissipation
            .max(crate::energy::dissipation(&u, grid, a.coeffs())?);
        report.snapshots.push(ComparisonSnapshot { t, state: u.clone() });
    }
    report.rel_max_error = report.max_abs_error / scale.max(f64::MIN_POSITIVE);
    report.rel_velocity_error = verr / vscale.max(f64::MIN_POSITIVE);
    Ok(report)
}

impl ComparisonReport {
    /// Columns `t, x, y_exact, y_sim, z_exact, z_sim, abs_err`, one row per
    /// snapshot and node.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let nodes = self.grid.nodes();
        let mut rows = Vec::with_capacity(self.snapshots.len() * nodes.len());
        for snap in &self.snapshots {
            for (i, &x) in nodes.iter().enumerate() {
                let v = eval(snap.t, x)?;
                let (ys, zs) = (snap.state.y[i], snap.state.z[i]);
                let err = (ys - v.y).abs().max((zs - v.z).abs());
                rows.push(vec![fmt17(snap.t), fmt17(x), fmt17(v.y), fmt17(ys), fmt17(v.z), fmt17(zs), fmt17(err)]);
            }
        }
        write_table(out, &["t", "x", "y_exact", "y_sim", "z_exact", "z_sim", "abs_err"], rows)
    }
}
