//! Even sech-moments for `H = p^2 - g sech^2 x`, `g = lambda (lambda + 1)`.
//!
//! Energies follow `E = -mu^2`, so `lambda = 3` has bound states at -9, -4, -1.

use serde::{Deserialize, Serialize};

use super::MomentSequence;
use crate::error::{BootError, Result};

/// Leading coefficients smaller than this make the row singular.
pub const LEADING_TOL: f64 = 1e-12;

/// Which coefficient table drives the three-term sech recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SechRecursion {
    /// The identity satisfied by the bound states of `p^2 - g sech^2 x`.
    #[default]
    Standard,
    /// `Standard` with the coefficients of `sech^{t+2}` and `sech^{t+4}` exchanged.
    /// Not satisfied by the true eigenstates; kept so the choice can be checked
    /// against the finite-difference oracle.
    SwappedUpper,
}

/// Coefficients `(a, b, c)` of `a <sech^t> + b <sech^{t+2}> + c <sech^{t+4}> = 0`.
pub fn sech_coefficients(form: SechRecursion, e: f64, lambda: u32, t: usize) -> [f64; 3] {
    let g = f64::from(lambda) * (f64::from(lambda) + 1.0);
    let t = t as f64;
    let t2 = t * t;
    let t3 = t2 * t;
    let a = 2.0 * t * e + t3 / 2.0;
    let low = -2.0 * (t + 1.0) * e + 2.0 * g * (t + 1.0) - (t3 + 3.0 * t2 + 4.0 * t + 2.0);
    let high = t3 / 2.0 + 3.0 * t2 + 5.5 * t + 3.0 - 2.0 * g * (t + 2.0);
    match form {
        SechRecursion::Standard => [a, low, high],
        SechRecursion::SwappedUpper => [a, high, low],
    }
}

/// `values[k] = <sech^{2k} x>` for `k = 0..=depth`, seeded with `values[1] = s2`.
pub fn poschl_teller_moments(
    e: f64,
    s2: f64,
    lambda: u32,
    depth: usize,
    form: SechRecursion,
) -> Result<MomentSequence> {
    if depth < 2 {
        return Err(BootError::InvalidParameter {
            name: "depth".into(),
            reason: format!("sech recursion needs depth >= 2, got {depth}"),
        });
    }
    let mut m = vec![0.0; depth + 1];
    m[0] = 1.0;
    m[1] = s2;
    for j in 0..=depth - 2 {
        let t = 2 * j;
        let [a, b, c] = sech_coefficients(form, e, lambda, t);
        if c.abs() <= LEADING_TOL {
            return Err(BootError::SingularRecursion { row: t });
        }
        m[j + 2] = -(a * m[j] + b * m[j + 1]) / c;
    }
    Ok(MomentSequence::from_real(
        m,
        format!("poschl_teller lambda={lambda} E={e} s2={s2}"),
    ))
}
