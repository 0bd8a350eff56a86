use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ptboot_core::models::validate_v_2x2;
use ptboot_core::oracle::{
    exact_2x2, exact_coupled_sho_ground, exact_poschl_teller, exact_shifted_sho, exact_swanson, fd_diagonalize,
    normal_mode_ground, FdModel, OracleSpectrum, FD_STATES,
};
use ptboot_core::search::refine_window;
use ptboot_core::{
    derive_x_moment_recursion, minimize_energy_feasible, scan, scan_refined, BootError, GridSpec, ModelSpec,
    PolynomialPotential,
};
use num_complex::Complex64;

use crate::config::{Format, RawConfig, RunConfig};
use crate::error::CliError;
use crate::output::{self, MinimizeReport, MinimizeRow, ScanReport};

/// Default grid size of finite-difference oracles.
const FD_DEFAULT_POINTS: usize = 2000;

fn describe_windows(report: &ScanReport) {
    let mut err = std::io::stderr().lock();
    for w in &report.windows {
        let _ = writeln!(err, "window [{:.6}, {:.6}] width {:.3e}", w.e_lo, w.e_hi, w.width());
    }
    if let Some(m) = &report.min_energy {
        if !report.model.energy_is_axis() {
            let _ = writeln!(err, "E_min {:.6} at {:?}", m.e_min, m.coords);
        }
    }
}

pub fn cmd_scan(cfg: RunConfig) -> Result<(), CliError> {
    let result = if cfg.model.id().energy_is_axis() {
        scan_refined(&cfg.model, &cfg.grid)?
    } else {
        scan(&cfg.model, &cfg.grid)?
    };
    let report = ScanReport::new(&cfg, result);
    output::write_scan(&report, cfg.format, cfg.out.as_deref())?;
    describe_windows(&report);
    if report.is_empty() {
        return Err(BootError::NoFeasiblePoint {
            bounds: bounds_text(&cfg.grid),
        }
        .into());
    }
    Ok(())
}

fn bounds_text(grid: &GridSpec) -> String {
    grid.axes
        .iter()
        .map(|a| format!("{} in [{}, {}]", a.name, a.lo, a.hi))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `lo + i * step` without trailing rounding noise.
fn tidy(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

pub fn cmd_minimize(cfg: RunConfig) -> Result<(), CliError> {
    let values: Vec<Option<f64>> = match &cfg.sweep {
        Some(axis) => (0..axis.len()).map(|i| Some(tidy(axis.value(i)))).collect(),
        None => vec![None],
    };
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let model = match (value, &cfg.sweep) {
            (Some(v), Some(axis)) => {
                let mut params = cfg.model.params();
                params.insert(axis.name.clone(), v);
                ModelSpec::from_params(cfg.model.id(), &params)?
            }
            _ => cfg.model,
        };
        let best = minimize_energy_feasible(&model, &cfg.grid)?;
        let _ = writeln!(std::io::stderr(), "E_min {:.6} at {:?}", best.e_min, best.coords);
        rows.push(MinimizeRow {
            sweep_value: value,
            e_min: best.e_min,
            argmin: best.coords,
        });
    }
    let report = MinimizeReport {
        model: cfg.model.id(),
        params: cfg.model.params(),
        k: cfg.grid.k,
        tol: cfg.grid.tol_scale,
        dims: cfg.grid.axes.clone(),
        sweep: cfg.sweep.as_ref().map(|a| a.name.clone()),
        rows,
    };
    output::write_minimize(&report, cfg.format, cfg.out.as_deref())
}

/// Re-refines the windows of a saved scan report.
pub fn cmd_refine(input: &Path, overrides: RawConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(format!("cannot read {}", input.display()), e))?;
    let saved: ScanReport =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: not a scan report: {e}", input.display())))?;
    let base = RawConfig::from_json(&serde_json::from_str(&text).expect("parsed once already")).map_err(|e| e.in_file(input))?;
    let cfg = base.merge(overrides).resolve()?;
    let mut windows = Vec::with_capacity(saved.windows.len());
    for w in &saved.windows {
        match refine_window(&cfg.model, w, &cfg.grid) {
            Ok(r) => windows.push(r),
            Err(BootError::WitnessLost { energy }) => {
                let _ = writeln!(std::io::stderr(), "dropped window [{}, {}]: witness at {energy} infeasible", w.e_lo, w.e_hi);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let report = ScanReport {
        k: cfg.grid.k,
        tol: cfg.grid.tol_scale,
        refine_iters: cfg.grid.refine_iters,
        scaling: cfg.grid.scaling,
        windows,
        ..saved
    };
    output::write_scan(&report, cfg.format, cfg.out.as_deref())?;
    describe_windows(&report);
    if report.windows.is_empty() {
        return Err(BootError::NoFeasiblePoint {
            bounds: bounds_text(&cfg.grid),
        }
        .into());
    }
    Ok(())
}

/// Parameters of an oracle call; every one must be consumed.
struct Params(BTreeMap<String, f64>);

impl Params {
    fn take(&mut self, name: &str) -> Option<f64> {
        self.0.remove(name)
    }

    fn need(&mut self, name: &str) -> Result<f64, CliError> {
        self.take(name)
            .ok_or_else(|| CliError::config(format!("missing --param {name}=...")))
    }

    fn count(&mut self, name: &str, default: Option<u32>) -> Result<Option<u32>, CliError> {
        match self.take(name) {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) => Ok(Some(v as u32)),
            Some(v) => Err(CliError::config(format!("`{name}` must be a non-negative integer, got {v}"))),
        }
    }

    fn finish(self, model: &str) -> Result<(), CliError> {
        match self.0.keys().next() {
            Some(k) => Err(CliError::config(format!("model `{model}` takes no parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

pub const ORACLE_MODELS: &[&str] = &[
    "exact_shifted_sho",
    "exact_swanson",
    "exact_poschl_teller",
    "exact_2x2",
    "exact_coupled_sho",
    "normal_mode",
    "fd_poschl_teller",
    "fd_quartic_pt",
    "fd_quartic",
    "fd_harmonic",
];

fn levels(n: Option<u32>, f: impl Fn(u32) -> f64) -> Vec<f64> {
    match n {
        Some(n) => vec![f(n)],
        None => (0..FD_STATES as u32).map(f).collect(),
    }
}

fn oracle_spectrum(model: &str, params: BTreeMap<String, f64>) -> Result<OracleSpectrum, CliError> {
    let mut p = Params(params);
    let spectrum = match model {
        "exact_shifted_sho" => {
            let n = p.count("n", None)?;
            let eps = p.need("eps")?;
            OracleSpectrum::exact(levels(n, |n| exact_shifted_sho(n, eps)))
        }
        "exact_swanson" => {
            let n = p.count("n", None)?;
            let c = p.need("c")?;
            OracleSpectrum::exact(levels(n, |n| exact_swanson(n, c)))
        }
        "exact_poschl_teller" => {
            let lambda = p.count("lambda", None)?.filter(|&l| l >= 1);
            let lambda = lambda.ok_or_else(|| CliError::config("need --param lambda=N with N >= 1"))?;
            OracleSpectrum::exact(exact_poschl_teller(lambda))
        }
        "exact_2x2" => {
            let (a, b) = exact_2x2(p.need("r")?, p.need("s")?, p.need("theta")?)?;
            OracleSpectrum::exact(vec![a, b])
        }
        "exact_coupled_sho" => OracleSpectrum::exact(vec![exact_coupled_sho_ground(p.need("eps")?)]),
        "normal_mode" => {
            let eps = p.need("eps")?;
            let alpha = p.need("alpha")?;
            OracleSpectrum::exact(vec![normal_mode_ground(eps, alpha)])
        }
        fd if fd.starts_with("fd_") => {
            let fd_model = match fd {
                "fd_poschl_teller" => {
                    let lambda = p.count("lambda", None)?.filter(|&l| l >= 1);
                    FdModel::PoschlTellerHermitian {
                        lambda: lambda.ok_or_else(|| CliError::config("need --param lambda=N with N >= 1"))?,
                    }
                }
                "fd_quartic_pt" => FdModel::QuarticPt {
                    alpha: p.take("alpha").unwrap_or(16.0),
                },
                "fd_quartic" => FdModel::QuarticDirect,
                "fd_harmonic" => FdModel::HarmonicControl,
                other => return Err(unknown_oracle(other)),
            };
            let n = p.count("N", Some(FD_DEFAULT_POINTS as u32))?.unwrap_or_default() as usize;
            let l = p.take("L").unwrap_or_else(|| fd_model.default_half_width());
            p.finish(model)?;
            return Ok(fd_diagonalize(fd_model, n, l)?);
        }
        other => return Err(unknown_oracle(other)),
    };
    p.finish(model)?;
    Ok(spectrum)
}

fn unknown_oracle(name: &str) -> CliError {
    CliError::config(format!("unknown oracle model `{name}` (one of: {})", ORACLE_MODELS.join(", ")))
}

pub fn cmd_oracle(
    model: &str,
    params: BTreeMap<String, f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let spectrum = oracle_spectrum(model, params)?;
    match format {
        Some(Format::Json) => output::write_json(&spectrum, out.as_deref()),
        Some(Format::Csv) => Err(CliError::config("oracle output is text or json")),
        None => {
            let mut w = output::open(out.as_deref())?;
            for e in &spectrum.eigenvalues {
                writeln!(w, "{e:.6}").map_err(|e| CliError::io("writing spectrum", e))?;
            }
            w.flush().map_err(|e| CliError::io("writing spectrum", e))
        }
    }
}

pub fn cmd_validate_v(r: f64, s: f64, theta: f64, format: Option<Format>) -> Result<(), CliError> {
    let report = validate_v_2x2(r, s, theta)?;
    match format {
        Some(Format::Json) => output::write_json(&report, None)?,
        Some(Format::Csv) => return Err(CliError::config("validate-v output is text or json")),
        None => {
            let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
            println!("V H V^-1 = H^dagger  {}", verdict(report.intertwines));
            println!("V = V^dagger         {}", verdict(report.hermitian));
            println!("V positive           {}", verdict(report.positive));
            println!("max deviation        {:.3e}", report.max_deviation);
            println!("sin(alpha)           {:.6}", report.sin_alpha);
            println!("eigenvalues of V     {:.6} {:.6}", report.v_eigenvalues[0], report.v_eigenvalues[1]);
        }
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Failed("V-operator checks failed".into()))
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

pub fn cmd_derive(coeffs: &str, imag: Option<&str>, out: Option<PathBuf>) -> Result<(), CliError> {
    let re = parse_list(coeffs, "coefficient")?;
    let im = match imag {
        Some(text) => parse_list(text, "imaginary coefficient")?,
        None => Vec::new(),
    };
    if im.len() > re.len() {
        return Err(CliError::config("more imaginary parts than coefficients"));
    }
    let values = re
        .iter()
        .enumerate()
        .map(|(i, &r)| Complex64::new(r, im.get(i).copied().unwrap_or(0.0)))
        .collect();
    let relation = derive_x_moment_recursion(&PolynomialPotential::new(values)?);
    output::write_json(&relation, out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn exact_oracles() {
        let s = oracle_spectrum("exact_swanson", params(&[("n", 0.0), ("c", 1.0)])).unwrap();
        assert_eq!(format!("{:.6}", s.eigenvalues[0]), "1.414214");
        assert_eq!(oracle_spectrum("exact_shifted_sho", params(&[("eps", 0.5)])).unwrap().eigenvalues.len(), FD_STATES);
        let pt = oracle_spectrum("exact_poschl_teller", params(&[("lambda", 3.0)])).unwrap();
        assert_eq!(pt.eigenvalues, vec![-9.0, -4.0, -1.0]);
    }

    #[test]
    fn oracle_rejects_stray_params() {
        let err = oracle_spectrum("exact_coupled_sho", params(&[("eps", 0.1), ("c", 1.0)])).unwrap_err();
        assert!(err.to_string().contains("`c`"));
        assert!(oracle_spectrum("exact_nothing", BTreeMap::new()).is_err());
        assert!(oracle_spectrum("exact_swanson", params(&[("c", 1.0), ("n", 0.5)])).is_err());
    }
}
