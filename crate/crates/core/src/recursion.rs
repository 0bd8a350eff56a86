//! x-moment recursions for `H = p^2 + V(x)` with polynomial `V(x) = sum_k c_k x^k`.
//!
//! From `<[H, x^t]> = 0` and `<[H, x^{t-1} p]> = 0` one gets, for every `t >= 0`,
//!
//! `4 t E m_{t-1} + t(t-1)(t-2) m_{t-3} - sum_k (4t + 2k) c_k m_{t+k-1} = 0`.
//!
//! The top term `k = deg V` advances the recursion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::models::MomentSequence;

pub const MAX_DEGREE: usize = 8;

/// Relative size below which the advancing coefficient counts as zero.
pub const LEADING_TOL: f64 = 1e-12;

/// `V(x) = sum_k coefficients[k] x^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PolynomialPotential {
    coefficients: Vec<Complex64>,
}

impl PolynomialPotential {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let degree = coefficients.len().saturating_sub(1);
        if coefficients.len() < 2 {
            return Err(BootError::InvalidPotential("degree must be at least 1".into()));
        }
        if degree > MAX_DEGREE {
            return Err(BootError::DegreeTooHigh(degree));
        }
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(BootError::InvalidPotential("coefficients must be finite".into()));
        }
        if coefficients[degree] == Complex64::new(0.0, 0.0) {
            return Err(BootError::InvalidPotential(format!(
                "leading coefficient of x^{degree} is zero"
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

impl TryFrom<Vec<Complex64>> for PolynomialPotential {
    type Error = BootError;

    fn try_from(c: Vec<Complex64>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<PolynomialPotential> for Vec<Complex64> {
    fn from(p: PolynomialPotential) -> Self {
        p.coefficients
    }
}

/// One term `w(t, E) m_{t + offset}`. `coeff[i][j]` multiplies `t^i E^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTerm {
    pub offset: i32,
    pub coeff: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_im: Option<Vec<Vec<f64>>>,
}

fn eval_poly(c: &[Vec<f64>], t: f64, e: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, row| acc * t + row.iter().rev().fold(0.0, |a, &v| a * e + v))
}

impl RecursionTerm {
    fn from_complex(offset: i32, coeff: Vec<Vec<Complex64>>) -> Self {
        // Adding 0.0 turns -0.0 into 0.0.
        let re = coeff.iter().map(|r| r.iter().map(|z| z.re + 0.0).collect()).collect();
        let has_im = coeff.iter().flatten().any(|z| z.im != 0.0);
        let coeff_im = has_im.then(|| coeff.iter().map(|r| r.iter().map(|z| z.im + 0.0).collect()).collect());
        Self {
            offset,
            coeff: re,
            coeff_im,
        }
    }

    pub fn weight(&self, t: usize, e: f64) -> Complex64 {
        let t = t as f64;
        let im = self.coeff_im.as_deref().map_or(0.0, |c| eval_poly(c, t, e));
        Complex64::new(eval_poly(&self.coeff, t, e), im)
    }
}

/// A linear identity `sum_j w_j(t, E) m_{t + offset_j} = 0` valid for `t >= first_row`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionRelation {
    pub potential: PolynomialPotential,
    /// Sorted by offset; the last term carries `solved_offset`.
    pub terms: Vec<RecursionTerm>,
    pub solved_offset: i32,
    /// First row used to advance; earlier rows are either trivial or inconsistent with `m0 = 1`.
    pub first_row: usize,
    /// Number of moments `m1..` that must be supplied.
    pub seed_count: usize,
    /// Rows `t >= first_row` whose advancing coefficient vanishes for every E.
    pub exceptional_rows: Vec<usize>,
}

/// Builds the recursion for `H = p^2 + V(x)`.
pub fn derive_x_moment_recursion(v: &PolynomialPotential) -> RecursionRelation {
    let d = v.degree();
    let c = v.coefficients();
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut terms = vec![
        RecursionTerm::from_complex(-3, vec![vec![zero], vec![re(2.0)], vec![re(-3.0)], vec![re(1.0)]]),
        RecursionTerm::from_complex(-1, vec![vec![zero, zero], vec![-c[0] * 4.0, re(4.0)]]),
    ];
    for (k, &ck) in c.iter().enumerate().skip(1) {
        if ck == zero {
            continue;
        }
        terms.push(RecursionTerm::from_complex(
            k as i32 - 1,
            vec![vec![-ck * (2.0 * k as f64)], vec![-ck * 4.0]],
        ));
    }
    terms.sort_by_key(|t| t.offset);

    let solved_offset = d as i32 - 1;
    let first_row = (1 - solved_offset).max(0) as usize;
    let seed_count = (solved_offset - 1).max(0) as usize;

    // Advancing weight is -(2d + 4t) c_d; its only root is t = -d/2 < 0.
    let lead = -c[d];
    let exceptional_rows = if lead.norm() == 0.0 { vec![first_row] } else { Vec::new() };

    RecursionRelation {
        potential: v.clone(),
        terms,
        solved_offset,
        first_row,
        seed_count,
        exceptional_rows,
    }
}

impl RecursionRelation {
    fn leading(&self) -> &RecursionTerm {
        self.terms.last().expect("relation has terms")
    }

    /// `sum_j w_j(t, E) m_{t+offset_j}`, with negative indices contributing zero.
    /// Returns `None` if the row reaches past the end of `values`.
    pub fn residual(&self, values: &[Complex64], e: f64, t: usize) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let idx = t as i64 + i64::from(term.offset);
            if idx < 0 {
                continue;
            }
            acc += term.weight(t, e) * *values.get(idx as usize)?;
        }
        Some(acc)
    }

    /// Largest `|residual|` over all rows that fit inside `values`.
    pub fn max_residual(&self, values: &[Complex64], e: f64) -> f64 {
        (self.first_row..)
            .map_while(|t| self.residual(values, e, t))
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("relation serializes")
    }
}

/// Runs `rel` forward from `m0 = 1` and `seeds = (m1, .., m_seed_count)`.
pub fn evaluate_recursion(rel: &RecursionRelation, e: f64, seeds: &[f64], depth: usize) -> Result<MomentSequence> {
    if seeds.len() != rel.seed_count {
        return Err(BootError::SeedCountMismatch {
            expected: rel.seed_count,
            found: seeds.len(),
        });
    }
    let mut m: Vec<Complex64> = Vec::with_capacity(depth + 1);
    m.push(Complex64::new(1.0, 0.0));
    m.extend(seeds.iter().map(|&s| Complex64::new(s, 0.0)));
    let s = rel.solved_offset as i64;
    let lead = rel.leading();
    let mut t = rel.first_row;
    while m.len() <= depth {
        let target = t as i64 + s;
        debug_assert_eq!(target as usize, m.len());
        let w = lead.weight(t, e);
        let scale = rel.terms.iter().map(|tm| tm.weight(t, e).norm()).fold(1.0, f64::max);
        if w.norm() <= LEADING_TOL * scale {
            return Err(BootError::SingularRecursion { row: t });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &rel.terms[..rel.terms.len() - 1] {
            let idx = t as i64 + i64::from(term.offset);
            if idx >= 0 {
                acc += term.weight(t, e) * m[idx as usize];
            }
        }
        m.push(-acc / w);
        t += 1;
    }
    m.truncate(depth + 1);
    let desc = format!("derived degree {} E={e} seeds={seeds:?}", rel.potential.degree());
    MomentSequence::new(m, desc).ensure_finite()
}
