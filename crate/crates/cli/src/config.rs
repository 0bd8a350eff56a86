//! Run configuration from flat `key = value` files, prior JSON reports and flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ptboot_core::psd::Scaling;
use ptboot_core::{Axis, GridSpec, ModelId, ModelSpec};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::config(format!("unknown format `{other}` (expected json or csv)"))),
        }
    }
}

/// Keys accepted without the `param.` prefix.
const BARE_PARAMS: &[&str] = &["eps", "epsilon", "c", "lambda", "alpha", "r", "s", "theta", "n", "N", "L"];

/// Unresolved settings. Later sources override earlier ones field by field.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub model: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub k: Option<usize>,
    pub tol: Option<f64>,
    pub dims: Vec<Axis>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub emit_points: Option<bool>,
    pub refine_iters: Option<u32>,
    pub probe: Option<bool>,
    pub scaling: Option<Scaling>,
    pub sweep: Option<Axis>,
}

/// Fully resolved scan or minimization run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub emit_points: bool,
    pub sweep: Option<Axis>,
}

/// Parses `name:lo:hi:step`.
pub fn parse_axis(text: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 || parts[0].is_empty() {
        return Err(CliError::config(format!("expected name:lo:hi:step, got `{text}`")));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("bad number `{s}` in `{text}`")))
    };
    Ok(Axis::new(parts[0].trim(), num(parts[1])?, num(parts[2])?, num(parts[3])?))
}

/// Parses `name=value`.
pub fn parse_param(text: &str) -> Result<(String, f64), CliError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("expected name=value, got `{text}`")))?;
    let v = v
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::config(format!("bad value for parameter `{}`: `{v}`", k.trim())))?;
    Ok((k.trim().to_string(), v))
}

impl RawConfig {
    /// Reads a flat config file, or a JSON report written by `scan`.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            Self::from_json(&value).map_err(|e| e.in_file(path))
        } else {
            Self::from_flat(&text).map_err(|e| e.in_file(path))
        }
    }

    pub fn from_flat(text: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at_line = |e: CliError| e.at_line(lineno + 1);
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| at_line(CliError::config(format!("expected key = value, got `{line}`"))))?;
            let raw = raw.trim();
            let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            cfg.set(key.trim(), &value).map_err(at_line)?;
        }
        Ok(cfg)
    }

    /// Settings carried by a scan report; windows and statistics are ignored.
    pub fn from_json(value: &Value) -> Result<Self, CliError> {
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::config("top-level JSON must be an object"))?;
        let mut cfg = RawConfig::default();
        for (key, v) in obj {
            match key.as_str() {
                "params" => {
                    let params = v
                        .as_object()
                        .ok_or_else(|| CliError::config("`params` must be an object"))?;
                    for (name, p) in params {
                        cfg.set(&format!("param.{name}"), p)?;
                    }
                }
                "dims" => {
                    cfg.dims = serde_json::from_value(v.clone())
                        .map_err(|e| CliError::config(format!("`dims`: {e}")))?;
                }
                "windows" | "feasible_points" | "min_energy" | "stats" | "rows" => {}
                _ => cfg.set(key, v)?,
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &Value) -> Result<(), CliError> {
        let field = |what: &str| CliError::config(format!("`{key}`: expected {what}, got {value}"));
        let number = || value.as_f64().ok_or_else(|| field("a number"));
        let text = || value.as_str().ok_or_else(|| field("a string"));
        let flag = || value.as_bool().ok_or_else(|| field("true or false"));
        match key {
            "model" => self.model = Some(text()?.to_string()),
            "K" => self.k = Some(value.as_u64().ok_or_else(|| field("a positive integer"))? as usize),
            "tol" => self.tol = Some(number()?),
            "out" => self.out = Some(PathBuf::from(text()?)),
            "format" => self.format = Some(text()?.parse()?),
            "emit_points" => self.emit_points = Some(flag()?),
            "probe" => self.probe = if value.is_null() { None } else { Some(flag()?) },
            "refine_iters" => {
                self.refine_iters = Some(value.as_u64().ok_or_else(|| field("a non-negative integer"))? as u32)
            }
            "scaling" => {
                self.scaling = Some(serde_json::from_value(value.clone()).map_err(|_| field("raw or equilibrated"))?)
            }
            "sweep" => self.sweep = Some(parse_axis(text()?)?),
            _ => {
                if let Some(axis) = key.strip_prefix("dim.") {
                    let spec = parse_axis(&format!("{axis}:{}", text()?))?;
                    self.push_dim(spec);
                } else if let Some(name) = key.strip_prefix("param.") {
                    self.params.insert(name.to_string(), number()?);
                } else if BARE_PARAMS.contains(&key) {
                    self.params.insert(key.to_string(), number()?);
                } else {
                    return Err(CliError::config(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    /// Adds an axis, replacing any earlier axis of the same name.
    pub fn push_dim(&mut self, axis: Axis) {
        match self.dims.iter_mut().find(|a| a.name == axis.name) {
            Some(slot) => *slot = axis,
            None => self.dims.push(axis),
        }
    }

    /// Applies `other` on top of `self`.
    pub fn merge(mut self, other: RawConfig) -> Self {
        if other.model.is_some() {
            self.model = other.model;
        }
        self.params.extend(other.params);
        for axis in other.dims {
            self.push_dim(axis);
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(k, tol, out, format, emit_points, refine_iters, probe, scaling, sweep);
        self
    }

    pub fn model_id(&self) -> Result<ModelId, CliError> {
        let name = self.model.as_deref().ok_or_else(|| CliError::config("no model given (use --model)"))?;
        Ok(name.parse()?)
    }

    /// Validates everything a scan needs.
    pub fn resolve(mut self) -> Result<RunConfig, CliError> {
        let id = self.model_id()?;
        if let Some(sweep) = &self.sweep {
            self.params.entry(sweep.name.clone()).or_insert(sweep.lo);
        }
        let model = ModelSpec::from_params(id, &self.params)?;
        let mut axes = Vec::new();
        for name in id.search_dims() {
            let axis = self
                .dims
                .iter()
                .find(|a| a.name == *name)
                .ok_or_else(|| CliError::config(format!("model `{id}` needs --dim {name}:lo:hi:step")))?;
            axes.push(axis.clone());
        }
        if let Some(extra) = self.dims.iter().find(|a| !id.search_dims().contains(&a.name.as_str())) {
            return Err(CliError::config(format!(
                "model `{id}` has no dimension `{}` (dimensions: {})",
                extra.name,
                id.search_dims().join(", ")
            )));
        }
        let mut grid = GridSpec::new(axes, self.k.unwrap_or(ptboot_core::search::DEFAULT_K));
        if let Some(tol) = self.tol {
            grid = grid.with_tol(tol);
        }
        if let Some(iters) = self.refine_iters {
            grid = grid.with_refine_iters(iters);
        }
        if let Some(probe) = self.probe {
            grid = grid.with_probe(probe);
        }
        if let Some(scaling) = self.scaling {
            grid = grid.with_scaling(scaling);
        }
        let emit_points = self.emit_points.unwrap_or(false);
        grid = grid.with_points(emit_points);
        grid.validate(&model)?;
        let format = match (self.format, &self.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "csv") => Format::Csv,
            _ => Format::Json,
        };
        if let Some(sweep) = &self.sweep {
            if !model.params().contains_key(&sweep.name) {
                return Err(CliError::config(format!("model `{id}` has no parameter `{}` to sweep", sweep.name)));
            }
            if !(sweep.lo <= sweep.hi && sweep.step > 0.0) {
                return Err(CliError::config(format!("bad sweep range for `{}`", sweep.name)));
            }
        }
        Ok(RunConfig {
            model,
            grid,
            out: self.out,
            format,
            emit_points,
            sweep: self.sweep,
        })
    }
}
