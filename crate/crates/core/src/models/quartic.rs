//! p-moments of the momentum-space form of `p^2 - x^4`.

use super::MomentSequence;
use crate::error::{BootError, Result};

/// `<p^t>` for `t = 0..=depth` with `m1`, `m2` as free seeds.
///
/// `m_{t+3} = [4 alpha t E m_{t-1} + (2t+1) alpha m_t + alpha^2 t(t-1)(t-2) m_{t-3}] / (t+2)`.
pub fn quartic_pt_moments(e: f64, m1: f64, m2: f64, alpha: f64, depth: usize) -> Result<MomentSequence> {
    if depth < 3 {
        return Err(BootError::InvalidParameter {
            name: "depth".into(),
            reason: format!("quartic recursion needs depth >= 3, got {depth}"),
        });
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(BootError::InvalidParameter {
            name: "alpha".into(),
            reason: format!("must be positive, got {alpha}"),
        });
    }
    let mut m = vec![0.0; depth + 1];
    m[0] = 1.0;
    m[1] = m1;
    m[2] = m2;
    for t in 0..=depth - 3 {
        let tf = t as f64;
        let mut acc = (2.0 * tf + 1.0) * alpha * m[t];
        if t >= 1 {
            acc += 4.0 * alpha * tf * e * m[t - 1];
        }
        if t >= 3 {
            acc += alpha * alpha * tf * (tf - 1.0) * (tf - 2.0) * m[t - 3];
        }
        m[t + 3] = acc / (tf + 2.0);
    }
    Ok(MomentSequence::from_real(
        m,
        format!("quartic_pt alpha={alpha} E={e} m1={m1} m2={m2}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_moment_is_half_alpha() {
        for (e, m1, m2, alpha) in [(0.3, 0.1, 2.0, 16.0), (-4.0, 0.0, 7.0, 16.0), (1.0, -2.0, 0.5, 3.0)] {
            let m = quartic_pt_moments(e, m1, m2, alpha, 3).unwrap();
            assert_eq!(m.values()[3].re, alpha / 2.0);
        }
        assert_eq!(quartic_pt_moments(1.0, 0.0, 1.0, 16.0, 3).unwrap().values()[3].re, 8.0);
    }

    #[test]
    fn fourth_and_fifth() {
        let (e, m1, m2, a) = (1.5, 0.8, 4.1, 16.0);
        let m = quartic_pt_moments(e, m1, m2, a, 5).unwrap().real_values();
        assert!((m[4] - (4.0 * a * e + 3.0 * a * m1) / 3.0).abs() < 1e-12);
        assert!((m[5] - (8.0 * a * e * m1 + 5.0 * a * m2) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(quartic_pt_moments(1.0, 0.0, 1.0, 16.0, 2).is_err());
        assert!(quartic_pt_moments(1.0, 0.0, 1.0, 0.0, 6).is_err());
    }
}
