//! Bootstrap matrices and the positive-semidefiniteness test.
//!
//! A point of a search space is feasible when its bootstrap matrix is PSD.
//! The verdict carries the smallest eigenvalue as a signed margin, so callers
//! can bisect on it and report how close a point is to the boundary.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::models::MomentSequence;

/// Default relative tolerance for [`is_psd`].
pub const DEFAULT_TOL_SCALE: f64 = 1e-9;

/// Relative bound on `|a_jk - conj(a_kj)|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A square (ideally Hermitian) positivity matrix with a provenance label.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapMatrix {
    entries: DMatrix<Complex64>,
    label: String,
}

impl BootstrapMatrix {
    pub fn new(entries: DMatrix<Complex64>, label: impl Into<String>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows == 0 || rows != cols {
            return Err(BootError::BadShape { rows, cols });
        }
        Ok(Self {
            entries,
            label: label.into(),
        })
    }

    /// Builds a real matrix from row slices.
    pub fn from_real_rows(rows: &[&[f64]], label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(BootError::BadShape { rows: n, cols });
        }
        let entries = DMatrix::from_fn(n, cols, |j, k| Complex64::new(rows[j][k], 0.0));
        Self::new(entries, label)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_jk - conj(a_kj)|` over all index pairs.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for k in j..n {
                let d = (self.entries[(j, k)] - self.entries[(k, j)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs_entry().max(1.0)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    /// Leading principal submatrix of size `k`.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(BootError::BadShape { rows: k, cols: k });
        }
        Ok(Self {
            entries: self.entries.view((0, 0), (k, k)).into_owned(),
            label: self.label.clone(),
        })
    }

    /// Congruence `D M D` with `D = diag(1/sqrt(m_ii))` over positive diagonal
    /// entries. Inertia is preserved, so the PSD verdict is unchanged in exact
    /// arithmetic while the diagonal becomes 1.
    pub fn equilibrated(&self) -> Self {
        let n = self.dim();
        let scale: Vec<f64> = (0..n)
            .map(|i| {
                let d = self.entries[(i, i)].re;
                if d > f64::MIN_POSITIVE {
                    d.sqrt().recip()
                } else {
                    1.0
                }
            })
            .collect();
        let entries = DMatrix::from_fn(n, n, |j, k| self.entries[(j, k)] * (scale[j] * scale[k]));
        Self {
            entries,
            label: self.label.clone(),
        }
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let mut values: Vec<f64> = if self.is_real() {
            let sym = DMatrix::from_fn(n, n, |j, k| {
                0.5 * (self.entries[(j, k)].re + self.entries[(k, j)].re)
            });
            sym.symmetric_eigenvalues().iter().copied().collect()
        } else {
            let herm = DMatrix::from_fn(n, n, |j, k| {
                (self.entries[(j, k)] + self.entries[(k, j)].conj()) * 0.5
            });
            herm.symmetric_eigenvalues().iter().copied().collect()
        };
        values.sort_by(f64::total_cmp);
        values
    }
}

/// Outcome of a PSD test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub feasible: bool,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
}

impl PsdVerdict {
    fn from_margin(min_eigenvalue: f64, tolerance_used: f64) -> Self {
        Self {
            feasible: min_eigenvalue >= -tolerance_used,
            min_eigenvalue,
            tolerance_used,
        }
    }

    /// `min_eigenvalue + tolerance_used`; non-negative iff feasible.
    pub fn margin(&self) -> f64 {
        self.min_eigenvalue + self.tolerance_used
    }
}

/// How a matrix is conditioned before the eigenvalue test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// Test `M` directly with tolerance `tol * max(1, ||M||_inf)`.
    Raw,
    /// Test the unit-diagonal congruent matrix with tolerance `tol`.
    #[default]
    Equilibrated,
}

/// Hankel matrix `entries[j][k] = moments[stride * (j + k)]` of size `k`.
pub fn assemble_hankel(moments: &MomentSequence, k: usize, stride: usize) -> Result<BootstrapMatrix> {
    if k == 0 || stride == 0 {
        return Err(BootError::InvalidParameter {
            name: if k == 0 { "K" } else { "stride" }.into(),
            reason: "must be positive".into(),
        });
    }
    let required = stride * (2 * k - 2) + 1;
    let values = moments.values();
    if values.len() < required {
        return Err(BootError::InsufficientDepth {
            required,
            available: values.len(),
        });
    }
    let entries = DMatrix::from_fn(k, k, |i, j| values[stride * (i + j)]);
    BootstrapMatrix::new(entries, moments.seed_description())
}

fn check_tol(tol_scale: f64) -> Result<()> {
    if tol_scale.is_finite() && tol_scale > 0.0 {
        Ok(())
    } else {
        Err(BootError::InvalidParameter {
            name: "tol_scale".into(),
            reason: format!("must be a positive finite number, got {tol_scale}"),
        })
    }
}

/// PSD test with tolerance `tol_scale * max(1, ||M||_inf)`.
pub fn is_psd(m: &BootstrapMatrix, tol_scale: f64) -> Result<PsdVerdict> {
    check_tol(tol_scale)?;
    let bound = HERMITIAN_TOL * m.max_abs_entry().max(1.0);
    let deviation = m.hermitian_deviation();
    if deviation.is_nan() || deviation > bound {
        return Err(BootError::NotHermitian { deviation, bound });
    }
    let min_eigenvalue = m.eigenvalues()[0];
    Ok(PsdVerdict::from_margin(min_eigenvalue, tol_scale * m.inf_norm().max(1.0)))
}

/// PSD test after optional diagonal equilibration.
///
/// With [`Scaling::Equilibrated`] the tolerance is `tol_scale` itself, which
/// makes the verdict exactly monotone under taking leading principal
/// submatrices (Cauchy interlacing).
pub fn is_psd_scaled(m: &BootstrapMatrix, tol_scale: f64, scaling: Scaling) -> Result<PsdVerdict> {
    match scaling {
        Scaling::Raw => is_psd(m, tol_scale),
        Scaling::Equilibrated => {
            check_tol(tol_scale)?;
            let bound = HERMITIAN_TOL * m.max_abs_entry().max(1.0);
            let deviation = m.hermitian_deviation();
            if deviation.is_nan() || deviation > bound {
                return Err(BootError::NotHermitian { deviation, bound });
            }
            let scaled = m.equilibrated();
            Ok(PsdVerdict::from_margin(scaled.eigenvalues()[0], tol_scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seq(values: &[f64]) -> MomentSequence {
        MomentSequence::from_real(values.to_vec(), "test")
    }

    #[test]
    fn hankel_places_moments_by_index() {
        let m = assemble_hankel(&seq(&[1.0, 0.0, 0.5]), 2, 1).unwrap();
        assert_eq!(m.get(0, 0).re, 1.0);
        assert_eq!(m.get(0, 1).re, 0.0);
        assert_eq!(m.get(1, 0).re, 0.0);
        assert_eq!(m.get(1, 1).re, 0.5);
    }

    #[test]
    fn hankel_stride_two_skips_odd_entries() {
        let s2 = 0.3;
        let m4 = 0.2;
        let m = assemble_hankel(&seq(&[1.0, 9.0, s2, 9.0, m4]), 2, 2).unwrap();
        assert_eq!(m.get(0, 1).re, s2);
        assert_eq!(m.get(1, 0).re, s2);
        assert_eq!(m.get(1, 1).re, m4);
    }

    #[test]
    fn hankel_rejects_short_sequences() {
        let err = assemble_hankel(&seq(&[1.0, 0.0, 0.5]), 3, 1).unwrap_err();
        assert_eq!(err, BootError::InsufficientDepth { required: 5, available: 3 });
        let err = assemble_hankel(&seq(&[1.0, 0.3, 0.2]), 2, 2).unwrap_err();
        assert_eq!(err, BootError::InsufficientDepth { required: 5, available: 3 });
    }

    #[test]
    fn identity_is_feasible() {
        let m = BootstrapMatrix::from_real_rows(&[&[1., 0., 0.], &[0., 1., 0.], &[0., 0., 1.]], "I").unwrap();
        let v = is_psd(&m, 1e-9).unwrap();
        assert!(v.feasible);
        assert_abs_diff_eq!(v.min_eigenvalue, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.tolerance_used, 1e-9, epsilon = 1e-20);
    }

    #[test]
    fn indefinite_two_by_two() {
        let m = BootstrapMatrix::from_real_rows(&[&[1., 2.], &[2., 1.]], "x").unwrap();
        let v = is_psd(&m, 1e-9).unwrap();
        assert!(!v.feasible);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.tolerance_used, 3e-9, epsilon = 1e-20);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = BootstrapMatrix::from_real_rows(&[&[1., 2.], &[0., 1.]], "x").unwrap();
        assert!(matches!(is_psd(&m, 1e-9), Err(BootError::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_margin() {
        // [[1, i/2], [-i/2, 1]] has eigenvalues 1/2 and 3/2.
        let i = Complex64::new(0.0, 0.5);
        let entries = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), i, -i, Complex64::new(1.0, 0.0)]);
        let m = BootstrapMatrix::new(entries, "c").unwrap();
        let v = is_psd(&m, 1e-9).unwrap();
        assert_abs_diff_eq!(v.min_eigenvalue, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn bad_tolerance_and_shape() {
        let m = BootstrapMatrix::from_real_rows(&[&[1.0]], "x").unwrap();
        assert!(is_psd(&m, 0.0).is_err());
        assert!(is_psd(&m, f64::NAN).is_err());
        assert!(BootstrapMatrix::new(DMatrix::zeros(2, 3), "x").is_err());
        assert!(BootstrapMatrix::new(DMatrix::zeros(0, 0), "x").is_err());
    }

    #[test]
    fn equilibration_preserves_verdict_and_fixes_diagonal() {
        let m = BootstrapMatrix::from_real_rows(&[&[4., 2.], &[2., 9.]], "x").unwrap();
        let e = m.equilibrated();
        assert_abs_diff_eq!(e.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.get(1, 1).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.get(0, 1).re, 2.0 / 6.0, epsilon = 1e-15);
        assert!(is_psd_scaled(&m, 1e-9, Scaling::Equilibrated).unwrap().feasible);

        let bad = BootstrapMatrix::from_real_rows(&[&[1., 3.], &[3., 1e6]], "x").unwrap();
        assert!(is_psd_scaled(&bad, 1e-9, Scaling::Equilibrated).unwrap().feasible);
        let bad = BootstrapMatrix::from_real_rows(&[&[1., 3.], &[3., 8.]], "x").unwrap();
        assert!(!is_psd_scaled(&bad, 1e-9, Scaling::Equilibrated).unwrap().feasible);
    }

    #[test]
    fn negative_diagonal_stays_infeasible_after_scaling() {
        let m = BootstrapMatrix::from_real_rows(&[&[1., 0.], &[0., -1e-3]], "x").unwrap();
        let v = is_psd_scaled(&m, 1e-9, Scaling::Equilibrated).unwrap();
        assert!(!v.feasible);
        assert!(v.min_eigenvalue <= -1e-3 + 1e-15);
    }

    #[test]
    fn verdict_is_deterministic() {
        let m = BootstrapMatrix::from_real_rows(&[&[2., 1., 0.3], &[1., 2., 0.1], &[0.3, 0.1, 0.5]], "x").unwrap();
        let a = is_psd(&m, 1e-9).unwrap();
        let b = is_psd(&m, 1e-9).unwrap();
        assert_eq!(a.min_eigenvalue.to_bits(), b.min_eigenvalue.to_bits());
    }
}
