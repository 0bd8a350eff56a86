//! Bootstrap eigenvalue solver for Hermitian and PT-symmetric Hamiltonians.
//!
//! Moments generated by recursion (or closed-form matrices) are tested for
//! positive semidefiniteness over a grid of trial energies and free moments.

pub mod error;
pub mod models;
pub mod oracle;
pub mod psd;
pub mod recursion;
pub mod search;

pub use error::{BootError, Result};
pub use models::{ModelId, ModelSpec, MomentSequence, SearchPoint};
pub use psd::{assemble_hankel, is_psd, is_psd_scaled, BootstrapMatrix, PsdVerdict, Scaling};
pub use recursion::{derive_x_moment_recursion, evaluate_recursion, PolynomialPotential, RecursionRelation};
pub use search::{
    minimize_energy_feasible, refine_window, scan, scan_refined, Axis, FeasibleWindow, GridSpec, MinEnergy, ScanResult,
};
