//! Benchmark fixtures: representative scans at realistic grid sizes.

use ptboot_core::{Axis, GridSpec, ModelSpec};

pub struct Fixture {
    pub name: &'static str,
    pub model: ModelSpec,
    pub grid: GridSpec,
}

/// One fixture per search geometry.
pub fn scan_fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "shifted_sho_1d_k10",
            model: ModelSpec::ShiftedSho { eps: 0.5 },
            grid: GridSpec::energy(0.0, 8.0, 0.005, 10),
        },
        Fixture {
            name: "two_by_two_probe",
            model: ModelSpec::TwoByTwo {
                r: 1.0,
                s: std::f64::consts::SQRT_2,
                theta: std::f64::consts::FRAC_PI_2,
            },
            grid: GridSpec::energy(-3.0, 3.0, 0.005, 2),
        },
        Fixture {
            name: "poschl_teller_2d_k10",
            model: ModelSpec::PoschlTellerHermitian { lambda: 3 },
            grid: GridSpec::new(vec![Axis::new("E", -12.0, 0.0, 0.05), Axis::new("s2", 0.1, 1.0, 0.01)], 10),
        },
        Fixture {
            name: "coupled_swanson_2d",
            model: ModelSpec::CoupledSwanson { eps: 0.1, c: 0.5 },
            grid: GridSpec::new(vec![Axis::new("x2", 0.2, 1.5, 0.02), Axis::new("p2", 0.2, 1.5, 0.02)], 2),
        },
    ]
}

/// Quartic PT scan over `(E, m1, m2)`; the heaviest search in the catalog.
pub fn quartic_fixture() -> Fixture {
    Fixture {
        name: "quartic_pt_3d_k6",
        model: ModelSpec::QuarticPt { alpha: 16.0 },
        grid: GridSpec::new(
            vec![
                Axis::new("E", -1.0, 4.0, 0.1),
                Axis::new("m1", -3.0, 3.0, 0.1),
                Axis::new("m2", 0.0, 12.0, 0.2),
            ],
            6,
        ),
    }
}
