//! The PT-symmetric 2x2 family `H = [[r e^{i theta}, s], [s, r e^{-i theta}]]`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::psd::BootstrapMatrix;

/// Distance from `E = r cos theta` below which the form is singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Entrywise tolerance for the V-operator checks.
pub const V_CHECK_TOL: f64 = 1e-10;

fn discriminant(r: f64, s: f64, theta: f64) -> f64 {
    s * s - (r * theta.sin()).powi(2)
}

/// Gram matrix of the quadratic form in the coefficients of `{1, sigma_x, sigma_z}`
/// under the V-norm. `E` is feasible iff the matrix is PSD.
pub fn two_by_two_form(e: f64, r: f64, s: f64, theta: f64) -> Result<BootstrapMatrix> {
    let d2 = discriminant(r, s, theta);
    if d2.is_nan() || d2 <= 0.0 {
        return Err(BootError::BrokenPt { discriminant: d2 });
    }
    let shift = e - r * theta.cos();
    if shift.abs() <= SINGULAR_TOL {
        return Err(BootError::SingularPoint { energy: e });
    }
    let rs = r * theta.sin();
    let coupling = s * (d2 + shift * shift) / (d2 * shift);
    let g11 = 1.0 + 2.0 * rs * rs / d2;
    let g01 = coupling / 2.0;
    let g12 = rs / s * coupling / 2.0;
    let rows: [&[f64]; 3] = [&[1.0, g01, 0.0], &[g01, g11, g12], &[0.0, g12, 1.0]];
    BootstrapMatrix::from_real_rows(&rows, format!("two_by_two r={r} s={s} theta={theta} E={e}"))
}

/// The metric operator `V = (1/cos a) [[1, -i sin a], [i sin a, 1]]` with `sin a = (r/s) sin theta`.
pub fn v_operator_2x2(r: f64, s: f64, theta: f64) -> Result<Matrix2<Complex64>> {
    let d2 = discriminant(r, s, theta);
    if d2.is_nan() || d2 <= 0.0 {
        return Err(BootError::BrokenPt { discriminant: d2 });
    }
    let sin_a = r / s * theta.sin();
    let cos_a = (1.0 - sin_a * sin_a).sqrt();
    let one = Complex64::new(1.0 / cos_a, 0.0);
    let off = Complex64::new(0.0, sin_a / cos_a);
    Ok(Matrix2::new(one, -off, off, one))
}

/// Outcome of the three V-operator checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VReport {
    /// `V H V^{-1} = H^dagger`.
    pub intertwines: bool,
    /// `V = V^dagger`.
    pub hermitian: bool,
    /// Both eigenvalues of `V` positive.
    pub positive: bool,
    pub max_deviation: f64,
    pub sin_alpha: f64,
    /// Row-major `V`.
    pub v: [[Complex64; 2]; 2],
    pub v_eigenvalues: [f64; 2],
}

impl VReport {
    pub fn all_pass(&self) -> bool {
        self.intertwines && self.hermitian && self.positive
    }
}

fn max_entry_diff(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Numerically checks the defining properties of the metric operator.
pub fn validate_v_2x2(r: f64, s: f64, theta: f64) -> Result<VReport> {
    let v = v_operator_2x2(r, s, theta)?;
    let h = Matrix2::new(
        Complex64::from_polar(r, theta),
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::from_polar(r, -theta),
    );
    let v_inv = v.try_inverse().ok_or(BootError::SingularPoint { energy: f64::NAN })?;
    let intertwine_dev = max_entry_diff(&(v * h * v_inv), &h.adjoint());
    let hermitian_dev = max_entry_diff(&v, &v.adjoint());

    let herm = DMatrix::from_fn(2, 2, |j, k| (v[(j, k)] + v[(k, j)].conj()) / 2.0);
    let mut eig: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);

    Ok(VReport {
        intertwines: intertwine_dev < V_CHECK_TOL,
        hermitian: hermitian_dev < V_CHECK_TOL,
        positive: eig[0] > 0.0,
        max_deviation: intertwine_dev.max(hermitian_dev),
        sin_alpha: r / s * theta.sin(),
        v: [[v[(0, 0)], v[(0, 1)]], [v[(1, 0)], v[(1, 1)]]],
        v_eigenvalues: [eig[0], eig[1]],
    })
}
