//! 5x5 bootstrap matrices for the coupled two-dimensional oscillators.
//!
//! Operator basis `(1, x, y, p, q)`; every entry is written in terms of
//! `x2 = <x^2>` and `p2 = <p^2>` after the commutator constraints.

use num_complex::Complex64;

use crate::error::{BootError, Result};
use crate::psd::BootstrapMatrix;

fn check_eps(eps: f64) -> Result<()> {
    if eps != 0.0 && eps.abs() < 1.0 {
        Ok(())
    } else {
        Err(BootError::InvalidParameter {
            name: "eps".into(),
            reason: format!("coupled models need 0 < |eps| < 1, got {eps}"),
        })
    }
}

pub(crate) fn coupled_sho_energy(p2: f64, eps: f64) -> f64 {
    4.0 * p2 + 1.0 / (1.0 - eps * eps)
}

pub(crate) fn coupled_swanson_energy(x2: f64, p2: f64, c: f64) -> f64 {
    4.0 * p2 + 2.0 * c * c * x2
}

struct Entries {
    xx: f64,
    xy: f64,
    yy: f64,
    pp: f64,
    pq: f64,
    qq: f64,
}

fn assemble(en: Entries, label: String) -> Result<BootstrapMatrix> {
    let r = |v: f64| Complex64::new(v, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    let z = Complex64::new(0.0, 0.0);
    let rows = [
        [r(1.0), z, z, z, z],
        [z, r(en.xx), r(en.xy), half_i, z],
        [z, r(en.xy), r(en.yy), z, half_i],
        [z, -half_i, z, r(en.pp), r(en.pq)],
        [z, z, -half_i, r(en.pq), r(en.qq)],
    ];
    let m = nalgebra::DMatrix::from_fn(5, 5, |j, k| rows[j][k]);
    BootstrapMatrix::new(m, label)
}

/// Matrix and energy for `H = p^2 + x^2 + q^2 + y^2 + 2 eps x y + 1/(1 - eps^2)`.
pub fn coupled_sho_matrix(x2: f64, p2: f64, eps: f64) -> Result<(BootstrapMatrix, f64)> {
    check_eps(eps)?;
    let en = Entries {
        xx: x2,
        xy: (p2 - x2) / eps,
        yy: x2,
        pp: p2,
        pq: (p2 + (eps * eps - 1.0) * x2) / eps,
        qq: p2,
    };
    let m = assemble(en, format!("coupled_sho eps={eps} x2={x2} p2={p2}"))?;
    Ok((m, coupled_sho_energy(p2, eps)))
}

/// Matrix and energy for `H = p^2 + x^2 + q1^2 + (1 + c^2) y^2 + 2 eps x y`.
pub fn coupled_swanson_matrix(x2: f64, p2: f64, eps: f64, c: f64) -> Result<(BootstrapMatrix, f64)> {
    check_eps(eps)?;
    let a = 1.0 + c * c;
    let e2 = eps * eps;
    let qq_coef = 1.0 - a * (a - 1.0) / e2;
    let en = Entries {
        xx: x2,
        xy: (p2 - x2) / eps,
        yy: p2 * (a - 1.0) / e2 + x2 * (1.0 - (a - 1.0) / e2),
        pp: p2,
        pq: p2 * a / eps + x2 * (eps - a / eps),
        qq: p2 * qq_coef + x2 * (a - qq_coef),
    };
    let m = assemble(en, format!("coupled_swanson eps={eps} c={c} x2={x2} p2={p2}"))?;
    Ok((m, coupled_swanson_energy(x2, p2, c)))
}
