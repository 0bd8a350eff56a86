//! Reference spectra: closed forms where known, finite differences elsewhere.
//!
//! Nothing here is used by the bootstrap path; these values only check it.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::models::{sech_coefficients, SechRecursion};

/// Number of lowest states returned by [`fd_diagonalize`].
pub const FD_STATES: usize = 6;

/// Largest acceptable `|E_N - E_2N|` for the two lowest states.
pub const FD_CONVERGENCE: f64 = 1e-3;

/// Imaginary parts below this count as real in the dense fallback.
pub const IMAG_FILTER: f64 = 1e-6;

pub fn exact_shifted_sho(n: u32, eps: f64) -> f64 {
    (2 * n + 1) as f64 + eps * eps
}

pub fn exact_swanson(n: u32, c: f64) -> f64 {
    (2 * n + 1) as f64 * (1.0 + c * c).sqrt()
}

/// Bound states `-mu^2`, `mu = lambda..1`, ascending.
pub fn exact_poschl_teller(lambda: u32) -> Vec<f64> {
    (1..=lambda).rev().map(|mu| -f64::from(mu * mu)).collect()
}

/// `r cos theta -/+ sqrt(s^2 - r^2 sin^2 theta)`.
pub fn exact_2x2(r: f64, s: f64, theta: f64) -> Result<(f64, f64)> {
    let d2 = s * s - (r * theta.sin()).powi(2);
    if d2 < 0.0 {
        return Err(BootError::BrokenPt { discriminant: d2 });
    }
    let c = r * theta.cos();
    Ok((c - d2.sqrt(), c + d2.sqrt()))
}

/// `sqrt(1+eps) + sqrt(1-eps) + 1/(1-eps^2)`.
pub fn exact_coupled_sho_ground(eps: f64) -> f64 {
    (1.0 + eps).sqrt() + (1.0 - eps).sqrt() + 1.0 / (1.0 - eps * eps)
}

/// Ground energy of `p^2 + q^2 + x^2 + alpha y^2 + 2 eps x y` from its normal modes.
pub fn normal_mode_ground(eps: f64, alpha: f64) -> f64 {
    let mean = (1.0 + alpha) / 2.0;
    let split = (((alpha - 1.0) / 2.0).powi(2) + eps * eps).sqrt();
    (mean + split).sqrt() + (mean - split).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    ExactFormula,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub eigenvalues: Vec<f64>,
    pub method: OracleMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<Discretization>,
    /// `|E_N - E_2N|` per eigenvalue.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub error_estimate: Vec<f64>,
}

impl OracleSpectrum {
    pub fn exact(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self {
            eigenvalues,
            method: OracleMethod::ExactFormula,
            discretization: None,
            error_estimate: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }
}

/// Hamiltonians with a finite-difference discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum FdModel {
    /// `p^2 - lambda(lambda+1) sech^2 x` on `[-L, L]`.
    PoschlTellerHermitian { lambda: u32 },
    /// Momentum-space form of `p^2 - x^4`, scale `alpha`, on `p in [-L, L]`.
    QuarticPt { alpha: f64 },
    /// `p^2 + x^4`.
    QuarticDirect,
    /// `p^2 + x^2`.
    HarmonicControl,
}

impl FdModel {
    /// Box half-width that keeps boundary amplitudes negligible.
    pub fn default_half_width(&self) -> f64 {
        match self {
            FdModel::PoschlTellerHermitian { .. } => 12.0,
            FdModel::QuarticPt { .. } => 12.0,
            FdModel::QuarticDirect => 8.0,
            FdModel::HarmonicControl => 10.0,
        }
    }
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i+1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let o2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { o2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Lowest `count` eigenvalues by bisection.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let count = count.min(self.diag.len());
        (0..count)
            .map(|k| {
                let (mut a, mut b) = (glo, ghi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid == a || mid == b {
                        break;
                    }
                    if self.count_below(mid) > k {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    /// Normalized eigenvector for an isolated eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut v = vec![1.0; n];
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if denom == 0.0 {
                denom = f64::EPSILON;
            }
            c[i] = if i + 1 < n { self.off[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

fn grid(n: usize, l: f64) -> (Vec<f64>, f64) {
    let h = 2.0 * l / (n as f64 + 1.0);
    ((1..=n).map(|i| -l + i as f64 * h).collect(), h)
}

/// `-d^2/dx^2 + V(x)` with Dirichlet walls at `+-L`.
pub fn schrodinger_tridiagonal(potential: impl Fn(f64) -> f64, n: usize, l: f64) -> (Tridiagonal, Vec<f64>) {
    let (x, h) = grid(n, l);
    let k = 1.0 / (h * h);
    let diag = x.iter().map(|&xi| 2.0 * k + potential(xi)).collect();
    (Tridiagonal { diag, off: vec![-k; n - 1] }, x)
}

enum Discrete {
    Symmetric(Tridiagonal),
    General(DMatrix<f64>),
}

/// Momentum-space operator `-alpha f'' + (2 alpha - p^2) f' + (p^2 - 3p/2 - alpha) f`.
fn quartic_pt_matrix(alpha: f64, n: usize, l: f64) -> Discrete {
    let (p, h) = grid(n, l);
    let b: Vec<f64> = p.iter().map(|&q| 2.0 * alpha - q * q).collect();
    let diag: Vec<f64> = p.iter().map(|&q| 2.0 * alpha / (h * h) + q * q - 1.5 * q - alpha).collect();
    let upper: Vec<f64> = (0..n - 1).map(|i| -alpha / (h * h) + b[i] / (2.0 * h)).collect();
    let lower: Vec<f64> = (0..n - 1).map(|i| -alpha / (h * h) - b[i + 1] / (2.0 * h)).collect();
    if upper.iter().zip(&lower).all(|(u, w)| u * w > 0.0) {
        // Diagonal similarity turns the matrix into a symmetric one.
        let off = upper.iter().zip(&lower).map(|(u, w)| -(u * w).sqrt()).collect();
        Discrete::Symmetric(Tridiagonal { diag, off })
    } else {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = upper[i];
                m[(i + 1, i)] = lower[i];
            }
        }
        Discrete::General(m)
    }
}

fn discretize(model: FdModel, n: usize, l: f64) -> Discrete {
    match model {
        FdModel::PoschlTellerHermitian { lambda } => {
            let g = f64::from(lambda) * (f64::from(lambda) + 1.0);
            Discrete::Symmetric(schrodinger_tridiagonal(|x| -g / x.cosh().powi(2), n, l).0)
        }
        FdModel::QuarticDirect => Discrete::Symmetric(schrodinger_tridiagonal(|x| x.powi(4), n, l).0),
        FdModel::HarmonicControl => Discrete::Symmetric(schrodinger_tridiagonal(|x| x * x, n, l).0),
        FdModel::QuarticPt { alpha } => quartic_pt_matrix(alpha, n, l),
    }
}

fn lowest(m: &Discrete, count: usize) -> Vec<f64> {
    match m {
        Discrete::Symmetric(t) => t.lowest_eigenvalues(count),
        Discrete::General(d) => {
            let mut real: Vec<f64> = d
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < IMAG_FILTER)
                .map(|z| z.re)
                .collect();
            real.sort_by(f64::total_cmp);
            real.truncate(count);
            real
        }
    }
}

/// Lowest [`FD_STATES`] eigenvalues from runs at `N` and `2N` points,
/// Richardson-extrapolated, with `|E_N - E_2N|` as the error estimate.
pub fn fd_diagonalize(model: FdModel, n: usize, l: f64) -> Result<OracleSpectrum> {
    if n < 200 {
        return Err(BootError::InvalidParameter {
            name: "N".into(),
            reason: format!("need at least 200 grid points, got {n}"),
        });
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(BootError::InvalidParameter {
            name: "L".into(),
            reason: "box half-width must be positive".into(),
        });
    }
    if let FdModel::QuarticPt { alpha } = model {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(BootError::InvalidParameter {
                name: "alpha".into(),
                reason: "must be positive".into(),
            });
        }
    }
    let coarse = lowest(&discretize(model, n, l), FD_STATES);
    let fine = lowest(&discretize(model, 2 * n, l), FD_STATES);
    let count = coarse.len().min(fine.len());
    let eigenvalues: Vec<f64> = (0..count).map(|i| (4.0 * fine[i] - coarse[i]) / 3.0).collect();
    let error_estimate: Vec<f64> = (0..count).map(|i| (fine[i] - coarse[i]).abs()).collect();
    if let Some((state, &estimate)) = error_estimate
        .iter()
        .enumerate()
        .take(2)
        .find(|(_, e)| **e > FD_CONVERGENCE)
    {
        return Err(BootError::NotConverged { state, estimate });
    }
    Ok(OracleSpectrum {
        eigenvalues,
        method: OracleMethod::FiniteDifference,
        discretization: Some(Discretization { n, l }),
        error_estimate,
    })
}

/// Bound-state energies and `<sech^{2k} x>` for `k = 0..=depth`.
pub fn poschl_teller_sech_moments(lambda: u32, n: usize, l: f64, depth: usize) -> Vec<(f64, Vec<f64>)> {
    let g = f64::from(lambda) * (f64::from(lambda) + 1.0);
    let (t, x) = schrodinger_tridiagonal(|x| -g / x.cosh().powi(2), n, l);
    t.lowest_eigenvalues(lambda as usize)
        .into_iter()
        .map(|e| {
            let v = t.eigenvector(e);
            let moments = (0..=depth)
                .map(|k| {
                    v.iter()
                        .zip(&x)
                        .map(|(a, &xi)| a * a * (1.0 / xi.cosh()).powi(2 * k as i32))
                        .sum()
                })
                .collect();
            (e, moments)
        })
        .collect()
}

/// Result of matching the sech recursion against finite-difference eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SechCalibration {
    pub form: SechRecursion,
    /// Factor applied to the oracle energies before they enter the recursion.
    pub energy_scale: f64,
    pub residual: f64,
    /// Every candidate tried, as `(form, energy_scale, residual)`.
    pub candidates: Vec<(SechRecursion, f64, f64)>,
}

/// Picks the coefficient table and energy convention under which the bound
/// states of `p^2 - lambda(lambda+1) sech^2 x` satisfy the sech recursion.
pub fn calibrate_sech_recursion(lambda: u32, n: usize, l: f64) -> SechCalibration {
    const ROWS: usize = 4;
    let states = poschl_teller_sech_moments(lambda, n, l, ROWS + 2);
    let mut candidates = Vec::new();
    for form in [SechRecursion::Standard, SechRecursion::SwappedUpper] {
        for scale in [1.0, 0.5] {
            let mut worst: f64 = 0.0;
            for (e, m) in &states {
                for j in 0..ROWS {
                    let [a, b, c] = sech_coefficients(form, scale * e, lambda, 2 * j);
                    let r = (a * m[j] + b * m[j + 1] + c * m[j + 2]).abs();
                    let norm = (a * m[j]).abs() + (b * m[j + 1]).abs() + (c * m[j + 2]).abs();
                    worst = worst.max(r / norm.max(f64::MIN_POSITIVE));
                }
            }
            candidates.push((form, scale, worst));
        }
    }
    let &(form, energy_scale, residual) = candidates
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("candidates are non-empty");
    SechCalibration {
        form,
        energy_scale,
        residual,
        candidates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    #[test]
    fn closed_forms() {
        assert_eq!(exact_shifted_sho(0, 0.5), 1.25);
        assert_eq!(exact_shifted_sho(1, 1.0), 4.0);
        assert_eq!(exact_shifted_sho(0, 0.0), 1.0);
        assert!((exact_swanson(0, 0.5) - 1.118034).abs() < 1e-6);
        assert!((exact_swanson(1, 1.0) - 4.242641).abs() < 1e-6);
        assert_eq!(exact_swanson(0, 0.0), 1.0);
        assert_eq!(exact_poschl_teller(3), vec![-9.0, -4.0, -1.0]);
        assert_eq!(exact_poschl_teller(1), vec![-1.0]);
        assert_eq!(exact_poschl_teller(2), vec![-4.0, -1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = exact_2x2(1.0, SQRT_2, FRAC_PI_2).unwrap();
        assert!((a + 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let (a, b) = exact_2x2(1.0, 1.0, FRAC_PI_4).unwrap();
        assert!(a.abs() < 1e-15 && (b - SQRT_2).abs() < 1e-15);
        assert_eq!(exact_2x2(0.0, 2.0, 0.3).unwrap(), (-2.0, 2.0));
        assert!(exact_2x2(2.0, 1.0, FRAC_PI_2).is_err());
    }

    #[test]
    fn coupled_closed_forms() {
        assert_eq!(exact_coupled_sho_ground(0.0), 3.0);
        assert!((exact_coupled_sho_ground(0.5) - 3.265_2).abs() < 1e-4);
        assert!((exact_coupled_sho_ground(0.3) - 3.075_74).abs() < 1e-5);
        let eps: f64 = 0.4;
        let shift = 1.0 / (1.0 - eps * eps);
        assert!((normal_mode_ground(eps, 1.0) + shift - exact_coupled_sho_ground(eps)).abs() < 1e-14);
        assert!((normal_mode_ground(0.0, 4.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_control() {
        let s = fd_diagonalize(FdModel::HarmonicControl, 2000, 10.0).unwrap();
        for (i, want) in [1.0, 3.0, 5.0].iter().enumerate() {
            assert!((s.eigenvalues[i] - want).abs() < 1e-4, "{:?}", s.eigenvalues);
        }
    }

    #[test]
    fn sturm_count_matches_dense() {
        let t = Tridiagonal {
            diag: vec![2.0, -1.0, 0.5, 3.0],
            off: vec![1.0, 0.3, -0.7],
        };
        let mut dense = DMatrix::zeros(4, 4);
        for i in 0..4 {
            dense[(i, i)] = t.diag[i];
            if i < 3 {
                dense[(i, i + 1)] = t.off[i];
                dense[(i + 1, i)] = t.off[i];
            }
        }
        let mut want: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        want.sort_by(f64::total_cmp);
        let got = t.lowest_eigenvalues(4);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn small_grids_rejected() {
        assert!(fd_diagonalize(FdModel::HarmonicControl, 100, 10.0).is_err());
    }

    #[test]
    fn spectrum_json() {
        let s = OracleSpectrum::exact(exact_poschl_teller(2));
        let back: OracleSpectrum = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(s, back);
    }
}
