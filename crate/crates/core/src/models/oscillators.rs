//! p-moments of the shifted oscillator and x-moments of the Swanson oscillator.
//!
//! Both obey `4 t e m_{t-1} + t(t-1)(t-2) m_{t-3} = 4 kappa (t+1) m_{t+1}` and differ
//! only in the effective energy `e` and stiffness `kappa`.

use super::MomentSequence;

fn oscillator_moments(e_eff: f64, kappa: f64, depth: usize) -> Vec<f64> {
    let mut m = vec![0.0; depth + 1];
    m[0] = 1.0;
    for t in 0..depth {
        let tf = t as f64;
        let mut acc = 0.0;
        if t >= 1 {
            acc += 4.0 * tf * e_eff * m[t - 1];
        }
        if t >= 3 {
            acc += tf * (tf - 1.0) * (tf - 2.0) * m[t - 3];
        }
        m[t + 1] = acc / (4.0 * kappa * (tf + 1.0));
    }
    m
}

/// `<p^t>` for `H = p^2 + x^2 + 2 i eps x`, `t = 0..=depth`.
pub fn shifted_sho_moments(e: f64, eps: f64, depth: usize) -> MomentSequence {
    MomentSequence::from_real(
        oscillator_moments(e - eps * eps, 1.0, depth),
        format!("shifted_sho eps={eps} E={e}"),
    )
}

/// `<x^t>` for `H = p^2 + x^2 + i c (xp + px)`, `t = 0..=depth`.
pub fn swanson_moments(e: f64, c: f64, depth: usize) -> MomentSequence {
    MomentSequence::from_real(
        oscillator_moments(e, 1.0 + c * c, depth),
        format!("swanson c={c} E={e}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(seq: &MomentSequence) -> Vec<f64> {
        seq.real_values()
    }

    #[test]
    fn shifted_sho_low_orders() {
        assert_eq!(re(&shifted_sho_moments(1.25, 0.5, 2)), vec![1.0, 0.0, 0.5]);
        assert_eq!(re(&shifted_sho_moments(1.25, 0.5, 4)), vec![1.0, 0.0, 0.5, 0.0, 0.75]);
        assert_eq!(re(&shifted_sho_moments(2.0, 1.0, 2)), vec![1.0, 0.0, 0.5]);
        assert_eq!(re(&shifted_sho_moments(3.0, 0.0, 0)), vec![1.0]);
    }

    #[test]
    fn swanson_low_orders() {
        assert_eq!(re(&swanson_moments(7.3, -2.0, 1)), vec![1.0, 0.0]);
        let e = 1.25f64.sqrt();
        let m = re(&swanson_moments(e, 0.5, 2));
        assert!((m[2] - 0.447_213_6).abs() < 1e-7);
    }

    #[test]
    fn odd_moments_vanish() {
        let m = re(&swanson_moments(2.7, 0.3, 21));
        for (i, v) in m.iter().enumerate().skip(1).step_by(2) {
            assert_eq!(*v, 0.0, "m{i}");
        }
    }

    #[test]
    fn moments_are_real() {
        assert_eq!(shifted_sho_moments(1.0, 0.7, 12).max_imag(), 0.0);
    }
}
