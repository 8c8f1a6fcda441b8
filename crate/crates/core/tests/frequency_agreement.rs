use std::f64::consts::PI;

use num_complex::Complex64;

use coupled_wave::coeffs::{parse_profile, CoefficientField};
use coupled_wave::counterexample;
use coupled_wave::frequency::{
    eigenvalues, fit_spectral_region, parse_eigen_solver, parse_sigma_solver, resolvent_norm_with, resolvent_sweep,
    tol_eig, SweepConfig,
};
use coupled_wave::{GeneratorMatrix, Grid1D};

fn overlap(n: usize) -> GeneratorMatrix {
    let grid = Grid1D::new(PI, n).unwrap();
    let f = CoefficientField::sample(
        &grid,
        parse_profile("bump(1.3, 2pi, 2)").unwrap().as_ref(),
        parse_profile("bump(1.9, 2pi, 1.2)").unwrap().as_ref(),
        parse_profile("constant(1)").unwrap().as_ref(),
    )
    .unwrap();
    GeneratorMatrix::new(&grid, f).unwrap()
}

#[test]
fn dense_and_iterative_resolvent_norms_agree() {
    let a = overlap(60);
    let dense = parse_sigma_solver("dense-svd").unwrap();
    let iter = parse_sigma_solver("inverse-iteration").unwrap();
    for sigma in [1.7, 4.2, 9.9] {
        let g = Complex64::new(0.0, sigma);
        let (x, y) = (resolvent_norm_with(dense.as_ref(), &a, g).unwrap(), resolvent_norm_with(iter.as_ref(), &a, g).unwrap());
        assert!((x - y).abs() < 1e-8 * x, "{sigma}: {x} vs {y}");
    }
}

#[test]
fn resolvent_is_a_contraction_right_of_the_axis() {
    let a = overlap(40);
    let solver = parse_sigma_solver("dense-svd").unwrap();
    for (xi, sigma) in [(0.3, 2.0), (1.0, 7.5), (3.0, 0.0)] {
        let r = resolvent_norm_with(solver.as_ref(), &a, Complex64::new(xi, sigma)).unwrap();
        assert!(xi * r <= 1.0 + 1e-10, "{xi} {sigma}: {r}");
    }
}

#[test]
fn shift_invert_finds_the_counterexample_mode() {
    let grid = Grid1D::new(2.0 * PI, 199).unwrap();
    let a = GeneratorMatrix::new(&grid, counterexample::coefficients(&grid).unwrap()).unwrap();
    let si = parse_eigen_solver("shift-invert(5i, -5i)").unwrap().solve(&a).unwrap();
    let dense = eigenvalues(&a).unwrap();
    for p in &si {
        let nearest = dense.iter().map(|l| (l - p.value).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-8, "{} not in the dense spectrum", p.value);
        assert!((p.value.im.abs() - 5.0).abs() < 0.05 && p.value.re.abs() < 1e-3);
    }
    let fit = fit_spectral_region(&dense, tol_eig(&a)).unwrap();
    assert!(!fit.feasible);
}

#[test]
fn overlap_sweep_is_certified_and_bounded() {
    let sw = resolvent_sweep(&overlap(79), &SweepConfig::new(1.5, 12.0, 40)).unwrap();
    assert!(sw.certified);
    let c = sw.c_res.unwrap();
    for p in &sw.points {
        assert!(p.value.ln() <= c * p.gamma.im + c.ln() + 1e-9);
    }
}
