//! Derived x-moment recursions checked against expectation values computed in a
//! truncated harmonic-oscillator basis.

use nalgebra::DMatrix;

use ptboot_core::psd::{assemble_hankel, is_psd};
use ptboot_core::recursion::{derive_x_moment_recursion, evaluate_recursion, PolynomialPotential};

const BASIS: usize = 60;
const TOL: f64 = 1e-6;
/// Extra levels used while forming operator products, so the truncated
/// Hamiltonian has exact matrix elements.
const PAD: usize = 16;

/// `(x, p^2)` in the number basis of an oscillator with length scale `b`.
fn operators(n: usize, b: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut x = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let a = b * ((k + 1) as f64 / 2.0).sqrt();
        x[(k, k + 1)] = a;
        x[(k + 1, k)] = a;
    }
    // p = i (a^dag - a) / sqrt 2, so p^2 = -(a^dag - a)^2 / 2 is real.
    let mut d = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let a = ((k + 1) as f64 / 2.0).sqrt() / b;
        d[(k + 1, k)] = a;
        d[(k, k + 1)] = -a;
    }
    let p2 = -(&d * &d);
    (x, p2)
}

/// Lowest eigenvalue and `<x^k>` for `k = 0..=depth`, using the basis scale
/// with the lowest variational energy.
fn ground_moments(coeffs: &[f64], depth: usize) -> (f64, Vec<f64>) {
    [1.0, 0.9, 0.8, 0.7, 0.6]
        .into_iter()
        .map(|b| ground_moments_at(coeffs, depth, b))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

fn ground_moments_at(coeffs: &[f64], depth: usize, b: f64) -> (f64, Vec<f64>) {
    let big = BASIS + PAD;
    let (x, p2) = operators(big, b);
    let mut v = DMatrix::zeros(big, big);
    let mut xk = DMatrix::identity(big, big);
    for &c in coeffs {
        v += &xk * c;
        xk = &xk * &x;
    }
    let h = (&p2 + &v).view((0, 0), (BASIS, BASIS)).into_owned();
    let eig = h.symmetric_eigen();
    let (i0, e0) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let mut psi = nalgebra::DVector::zeros(big);
    psi.rows_mut(0, BASIS).copy_from(&eig.eigenvectors.column(i0));
    let mut moments = Vec::with_capacity(depth + 1);
    let mut phi = psi.clone();
    for _ in 0..=depth {
        moments.push(psi.dot(&phi));
        phi = &x * phi;
    }
    (e0, moments)
}

fn check(coeffs: &[f64]) {
    let v = PolynomialPotential::from_real(coeffs).unwrap();
    let rel = derive_x_moment_recursion(&v);
    let depth = 10;
    let (e, m) = ground_moments(coeffs, depth);
    let values: Vec<_> = m.iter().map(|&r| num_complex::Complex64::new(r, 0.0)).collect();
    let scale = m.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let mut rows = 0;
    for t in rel.first_row.. {
        let Some(r) = rel.residual(&values, e, t) else { break };
        assert!(r.norm() <= TOL * scale, "V = {coeffs:?}, t = {t}: residual {r}");
        rows += 1;
    }
    assert!(rows >= 4, "only {rows} rows checked");
}

#[test]
fn harmonic() {
    check(&[0.0, 0.0, 1.0]);
    check(&[0.0, 0.0, 2.0]);
}

#[test]
fn quartic() {
    check(&[0.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn mixed_even() {
    check(&[0.3, 0.0, 0.5, 0.0, 1.0]);
    check(&[0.0, 0.0, -2.0, 0.0, 1.0]);
}

#[test]
fn with_odd_terms() {
    check(&[0.0, 0.4, 1.0]);
    check(&[0.0, 0.0, 1.0, 0.3, 1.0]);
}

#[test]
fn sextic() {
    check(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn quartic_ground_state_is_feasible() {
    let (e0, m) = ground_moments(&[0.0, 0.0, 0.0, 0.0, 1.0], 8);
    assert!((e0 - 1.060_362_1).abs() < 1e-6, "{e0}");
    let rel = derive_x_moment_recursion(&PolynomialPotential::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap());
    let seq = evaluate_recursion(&rel, 1.060_362_1, &[m[1], m[2]], 8).unwrap();
    for (a, b) in seq.real_values().iter().zip(&m) {
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
    let hankel = assemble_hankel(&seq, 4, 1).unwrap();
    assert!(is_psd(&hankel, 1e-9).unwrap().feasible);
}
