//! Model catalog: moment generators and closed-form bootstrap matrices.
//!
//! Every model maps a [`SearchPoint`] to a [`BootstrapMatrix`]. Moment models
//! generate expectation values from a recursion and assemble a Hankel matrix;
//! the 2x2 and coupled models write the matrix down directly.

mod coupled;
mod oscillators;
mod poschl_teller;
mod quartic;
mod two_by_two;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::psd::{assemble_hankel, BootstrapMatrix};

pub use coupled::{coupled_sho_matrix, coupled_swanson_matrix};
pub use oscillators::{shifted_sho_moments, swanson_moments};
pub use poschl_teller::{poschl_teller_moments, sech_coefficients, SechRecursion};
pub use quartic::quartic_pt_moments;
pub use two_by_two::{two_by_two_form, v_operator_2x2, validate_v_2x2, VReport};

/// Imaginary parts below this are treated as round-off.
pub const IMAG_TOL: f64 = 1e-12;

/// Expectation values `values[i]` for `i = 0..=depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    values: Vec<Complex64>,
    seed_description: String,
}

impl MomentSequence {
    pub fn new(values: Vec<Complex64>, seed_description: impl Into<String>) -> Self {
        Self {
            values,
            seed_description: seed_description.into(),
        }
    }

    pub fn from_real(values: Vec<f64>, seed_description: impl Into<String>) -> Self {
        Self::new(
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            seed_description,
        )
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn depth(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn seed_description(&self) -> &str {
        &self.seed_description
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub(crate) fn ensure_finite(self) -> Result<Self> {
        match self.values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            Some(index) => Err(BootError::NonFinite { index }),
            None => Ok(self),
        }
    }
}

/// Model identifiers as used on the command line and in output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    TwoByTwo,
    ShiftedSho,
    Swanson,
    PoschlTellerHermitian,
    PoschlTellerPt,
    QuarticPt,
    CoupledSho,
    CoupledSwanson,
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::TwoByTwo,
        ModelId::ShiftedSho,
        ModelId::Swanson,
        ModelId::PoschlTellerHermitian,
        ModelId::PoschlTellerPt,
        ModelId::QuarticPt,
        ModelId::CoupledSho,
        ModelId::CoupledSwanson,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::TwoByTwo => "two_by_two",
            ModelId::ShiftedSho => "shifted_sho",
            ModelId::Swanson => "swanson",
            ModelId::PoschlTellerHermitian => "poschl_teller_hermitian",
            ModelId::PoschlTellerPt => "poschl_teller_pt",
            ModelId::QuarticPt => "quartic_pt",
            ModelId::CoupledSho => "coupled_sho",
            ModelId::CoupledSwanson => "coupled_swanson",
        }
    }

    /// Names of the grid axes a scan over this model must provide, in order.
    pub fn search_dims(self) -> &'static [&'static str] {
        match self {
            ModelId::TwoByTwo | ModelId::ShiftedSho | ModelId::Swanson => &["E"],
            ModelId::PoschlTellerHermitian | ModelId::PoschlTellerPt => &["E", "s2"],
            ModelId::QuarticPt => &["E", "m1", "m2"],
            ModelId::CoupledSho | ModelId::CoupledSwanson => &["x2", "p2"],
        }
    }

    /// Whether the energy is a grid axis (false for the coupled models, whose
    /// energy is a function of the free moments).
    pub fn energy_is_axis(self) -> bool {
        !matches!(self, ModelId::CoupledSho | ModelId::CoupledSwanson)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = BootError;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| BootError::UnknownModel(s.to_string()))
    }
}

/// A Hamiltonian from the catalog together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub enum ModelSpec {
    /// `H = [[r e^{i theta}, s], [s, r e^{-i theta}]]`.
    TwoByTwo { r: f64, s: f64, theta: f64 },
    /// `H = p^2 + x^2 + 2 i eps x`.
    ShiftedSho { eps: f64 },
    /// `H = p^2 + x^2 + i c (xp + px)`.
    Swanson { c: f64 },
    /// `H = p^2 - lambda (lambda + 1) sech^2 x`.
    PoschlTellerHermitian { lambda: u32 },
    /// Same potential with argument `x + i eps`.
    PoschlTellerPt { lambda: u32, eps: f64 },
    /// PT form of `p^2 - x^4` with scale `alpha`.
    QuarticPt { alpha: f64 },
    CoupledSho { eps: f64 },
    CoupledSwanson { eps: f64, c: f64 },
}

/// Flat `{model, params}` form used for serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRecord {
    pub model: ModelId,
    pub params: BTreeMap<String, f64>,
}

impl TryFrom<ModelRecord> for ModelSpec {
    type Error = BootError;

    fn try_from(rec: ModelRecord) -> Result<Self> {
        ModelSpec::from_params(rec.model, &rec.params)
    }
}

impl From<ModelSpec> for ModelRecord {
    fn from(spec: ModelSpec) -> Self {
        ModelRecord {
            model: spec.id(),
            params: spec.params(),
        }
    }
}

fn param(params: &BTreeMap<String, f64>, name: &str, aliases: &[&str]) -> Option<f64> {
    std::iter::once(name)
        .chain(aliases.iter().copied())
        .find_map(|k| params.get(k).copied())
}

fn required(params: &BTreeMap<String, f64>, name: &str, aliases: &[&str]) -> Result<f64> {
    let v = param(params, name, aliases).ok_or_else(|| BootError::MissingParameter(name.to_string()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BootError::InvalidParameter {
            name: name.into(),
            reason: "must be finite".into(),
        })
    }
}

fn lambda_param(params: &BTreeMap<String, f64>) -> Result<u32> {
    let l = required(params, "lambda", &[])?;
    if l < 1.0 || l.fract() != 0.0 || l > f64::from(u16::MAX) {
        return Err(BootError::InvalidParameter {
            name: "lambda".into(),
            reason: format!("must be a positive integer, got {l}"),
        });
    }
    Ok(l as u32)
}

const EPS_ALIASES: &[&str] = &["epsilon"];

impl ModelSpec {
    /// Builds and validates a model from named parameters.
    ///
    /// Accepted names: `eps` (alias `epsilon`), `c`, `lambda`, `alpha`
    /// (default 16), `r`, `s`, `theta`.
    pub fn from_params(id: ModelId, params: &BTreeMap<String, f64>) -> Result<Self> {
        let spec = match id {
            ModelId::TwoByTwo => ModelSpec::TwoByTwo {
                r: required(params, "r", &[])?,
                s: required(params, "s", &[])?,
                theta: required(params, "theta", &[])?,
            },
            ModelId::ShiftedSho => ModelSpec::ShiftedSho {
                eps: required(params, "eps", EPS_ALIASES)?,
            },
            ModelId::Swanson => ModelSpec::Swanson {
                c: required(params, "c", &[])?,
            },
            ModelId::PoschlTellerHermitian => ModelSpec::PoschlTellerHermitian {
                lambda: lambda_param(params)?,
            },
            ModelId::PoschlTellerPt => ModelSpec::PoschlTellerPt {
                lambda: lambda_param(params)?,
                eps: required(params, "eps", EPS_ALIASES)?,
            },
            ModelId::QuarticPt => ModelSpec::QuarticPt {
                alpha: param(params, "alpha", &[]).unwrap_or(16.0),
            },
            ModelId::CoupledSho => ModelSpec::CoupledSho {
                eps: required(params, "eps", EPS_ALIASES)?,
            },
            ModelId::CoupledSwanson => ModelSpec::CoupledSwanson {
                eps: required(params, "eps", EPS_ALIASES)?,
                c: required(params, "c", &[])?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::TwoByTwo { r, s, theta } => {
                let discriminant = s * s - (r * theta.sin()).powi(2);
                if discriminant < 0.0 {
                    return Err(BootError::BrokenPt { discriminant });
                }
            }
            ModelSpec::PoschlTellerHermitian { lambda } | ModelSpec::PoschlTellerPt { lambda, .. } => {
                if lambda == 0 {
                    return Err(BootError::InvalidParameter {
                        name: "lambda".into(),
                        reason: "must be >= 1".into(),
                    });
                }
            }
            ModelSpec::QuarticPt { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(BootError::InvalidParameter {
                        name: "alpha".into(),
                        reason: format!("must be positive, got {alpha}"),
                    });
                }
            }
            ModelSpec::CoupledSho { eps } | ModelSpec::CoupledSwanson { eps, .. } => {
                if !(eps != 0.0 && eps.abs() < 1.0) {
                    return Err(BootError::InvalidParameter {
                        name: "eps".into(),
                        reason: format!("coupled models need 0 < |eps| < 1, got {eps}"),
                    });
                }
            }
            ModelSpec::ShiftedSho { .. } | ModelSpec::Swanson { .. } => {}
        }
        Ok(())
    }

    pub fn id(&self) -> ModelId {
        match self {
            ModelSpec::TwoByTwo { .. } => ModelId::TwoByTwo,
            ModelSpec::ShiftedSho { .. } => ModelId::ShiftedSho,
            ModelSpec::Swanson { .. } => ModelId::Swanson,
            ModelSpec::PoschlTellerHermitian { .. } => ModelId::PoschlTellerHermitian,
            ModelSpec::PoschlTellerPt { .. } => ModelId::PoschlTellerPt,
            ModelSpec::QuarticPt { .. } => ModelId::QuarticPt,
            ModelSpec::CoupledSho { .. } => ModelId::CoupledSho,
            ModelSpec::CoupledSwanson { .. } => ModelId::CoupledSwanson,
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            ModelSpec::TwoByTwo { r, s, theta } => vec![("r", r), ("s", s), ("theta", theta)],
            ModelSpec::ShiftedSho { eps } => vec![("eps", eps)],
            ModelSpec::Swanson { c } => vec![("c", c)],
            ModelSpec::PoschlTellerHermitian { lambda } => vec![("lambda", f64::from(lambda))],
            ModelSpec::PoschlTellerPt { lambda, eps } => vec![("lambda", f64::from(lambda)), ("eps", eps)],
            ModelSpec::QuarticPt { alpha } => vec![("alpha", alpha)],
            ModelSpec::CoupledSho { eps } => vec![("eps", eps)],
            ModelSpec::CoupledSwanson { eps, c } => vec![("eps", eps), ("c", c)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn search_dims(&self) -> &'static [&'static str] {
        self.id().search_dims()
    }

    /// Converts grid coordinates (ordered as [`Self::search_dims`]) to a point.
    pub fn point_from_coords(&self, coords: &[f64]) -> Result<SearchPoint> {
        let dims = self.search_dims();
        if coords.len() != dims.len() {
            return Err(BootError::DimensionMismatch {
                expected: dims.iter().map(|s| s.to_string()).collect(),
                found: (0..coords.len()).map(|i| format!("#{i}")).collect(),
            });
        }
        Ok(match *self {
            ModelSpec::CoupledSho { eps } => SearchPoint::new(coupled::coupled_sho_energy(coords[1], eps), coords.to_vec()),
            ModelSpec::CoupledSwanson { c, .. } => {
                SearchPoint::new(coupled::coupled_swanson_energy(coords[0], coords[1], c), coords.to_vec())
            }
            _ => SearchPoint::new(coords[0], coords[1..].to_vec()),
        })
    }

    /// Bootstrap matrix at `point`. `k` is the Hankel size for moment models
    /// and is ignored by the closed-form models.
    pub fn bootstrap_matrix(&self, point: &SearchPoint, k: usize) -> Result<PointMatrix> {
        let expected = self.search_dims().len() - usize::from(self.id().energy_is_axis());
        if point.free_moments.len() != expected {
            return Err(BootError::DimensionMismatch {
                expected: self.search_dims().iter().map(|s| s.to_string()).collect(),
                found: (0..point.free_moments.len()).map(|i| format!("free#{i}")).collect(),
            });
        }
        let depth = 2 * k.max(1) - 2;
        let e = point.e;
        let hankel = |seq: MomentSequence| -> Result<PointMatrix> {
            let max_moment = seq.max_abs();
            let matrix = assemble_hankel(&seq, k, 1)?;
            Ok(PointMatrix { matrix, max_moment })
        };
        match *self {
            ModelSpec::TwoByTwo { r, s, theta } => {
                let matrix = two_by_two_form(e, r, s, theta)?;
                Ok(PointMatrix {
                    max_moment: matrix.max_abs_entry(),
                    matrix,
                })
            }
            ModelSpec::ShiftedSho { eps } => hankel(shifted_sho_moments(e, eps, depth).ensure_finite()?),
            ModelSpec::Swanson { c } => hankel(swanson_moments(e, c, depth).ensure_finite()?),
            ModelSpec::PoschlTellerHermitian { lambda } | ModelSpec::PoschlTellerPt { lambda, .. } => hankel(
                poschl_teller_moments(e, point.free_moments[0], lambda, depth.max(2), SechRecursion::default())?
                    .ensure_finite()?,
            ),
            ModelSpec::QuarticPt { alpha } => hankel(
                quartic_pt_moments(e, point.free_moments[0], point.free_moments[1], alpha, depth.max(3))?
                    .ensure_finite()?,
            ),
            ModelSpec::CoupledSho { eps } => {
                let (matrix, _) = coupled_sho_matrix(point.free_moments[0], point.free_moments[1], eps)?;
                Ok(PointMatrix {
                    max_moment: matrix.max_abs_entry(),
                    matrix,
                })
            }
            ModelSpec::CoupledSwanson { eps, c } => {
                let (matrix, _) = coupled_swanson_matrix(point.free_moments[0], point.free_moments[1], eps, c)?;
                Ok(PointMatrix {
                    max_moment: matrix.max_abs_entry(),
                    matrix,
                })
            }
        }
    }
}

/// A bootstrap matrix plus the largest moment magnitude that went into it.
#[derive(Debug, Clone)]
pub struct PointMatrix {
    pub matrix: BootstrapMatrix,
    pub max_moment: f64,
}

/// Trial energy and the model's free moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "free", default)]
    pub free_moments: Vec<f64>,
}

impl SearchPoint {
    pub fn new(e: f64, free_moments: Vec<f64>) -> Self {
        Self { e, free_moments }
    }

    pub fn energy(e: f64) -> Self {
        Self::new(e, Vec::new())
    }
}
