//! Plain-text sweep configuration.
//!
//! ```text
//! # comment
//! [run]
//! preset = fig5                 # optional starting point
//! engine = analytic             # analytic | ed | dynamics
//! selection = min-detuning      # min-detuning | max-ratio | manual:N0,M0
//!
//! [axes]
//! xi = 0, 3, 300                # min, max, count (inclusive, linear)
//! nu = [0.402, 0.68, 0.8]       # explicit values
//!
//! [fixed]
//! eta = 100
//!
//! [quantities]
//! omega, phase
//! x_mean
//! ```
//!
//! Axes listed in the file replace the preset's axes; fixed values are merged
//! over the preset's; a `[quantities]` section replaces the preset's list.

use std::collections::BTreeMap;
use std::path::Path;

use super::presets::figure_preset;
use super::spec::{is_parameter, Axis, AxisValues, Engine, SweepSpec};
use super::SweepError;
use crate::model::SelectionMode;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub preset: Option<String>,
    pub engine: Option<Engine>,
    pub selection: Option<SelectionMode>,
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
    pub quantities: Option<Vec<String>>,
}

impl SweepConfig {
    /// The configured spec; not validated.
    pub fn to_spec(&self) -> Result<SweepSpec, SweepError> {
        let mut spec = match &self.preset {
            Some(name) => figure_preset(name)?,
            None => SweepSpec::new(Vec::new()),
        };
        if !self.axes.is_empty() {
            spec.axes = self.axes.clone();
            spec.fixed.retain(|k, _| !self.axes.iter().any(|a| &a.name == k));
        }
        spec.fixed.extend(self.fixed.iter().map(|(k, v)| (k.clone(), *v)));
        if let Some(q) = &self.quantities {
            spec.quantities = q.clone();
        }
        if let Some(e) = self.engine {
            spec.engine = e;
        }
        if let Some(s) = self.selection {
            spec.selection = s;
        }
        Ok(spec)
    }
}

pub fn read_config(path: &Path) -> Result<SweepConfig, SweepError> {
    let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// `min-detuning`, `max-ratio` or `manual:N0,M0`.
pub fn parse_selection(text: &str) -> Result<SelectionMode, String> {
    let t = text.trim().to_ascii_lowercase();
    match t.as_str() {
        "min-detuning" => Ok(SelectionMode::MinDetuning),
        "max-ratio" => Ok(SelectionMode::MaxRatio),
        _ => {
            let indices = t
                .strip_prefix("manual:")
                .ok_or_else(|| format!("unknown selection '{text}' (min-detuning | max-ratio | manual:N0,M0)"))?;
            let parts: Vec<&str> = indices.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [n, m] => Ok(SelectionMode::Manual {
                    n0: n.parse().map_err(|_| format!("bad sideband index '{n}'"))?,
                    m0: m.parse().map_err(|_| format!("bad sideband index '{m}'"))?,
                }),
                _ => Err(format!("manual selection needs two indices, got '{indices}'")),
            }
        }
    }
}

fn number(text: &str) -> Result<f64, String> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{}' is not a finite number", text.trim())),
    }
}

fn axis_values(text: &str) -> Result<AxisValues, String> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or("unterminated list")?;
        let values = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(number)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(AxisValues::List(values));
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let [min, max, count] = parts.as_slice() else {
        return Err(format!("expected 'min, max, count' or '[v1, v2, ...]', got '{t}'"));
    };
    Ok(AxisValues::Linear {
        min: number(min)?,
        max: number(max)?,
        count: count
            .parse()
            .map_err(|_| format!("count '{count}' is not a non-negative integer"))?,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Run,
    Axes,
    Fixed,
    Quantities,
}

pub fn parse_config(text: &str) -> Result<SweepConfig, SweepError> {
    let mut cfg = SweepConfig::default();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| SweepError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "run" => Section::Run,
                "axes" => Section::Axes,
                "fixed" => Section::Fixed,
                "quantities" => {
                    cfg.quantities.get_or_insert_with(Vec::new);
                    Section::Quantities
                }
                other => return Err(err(format!("unknown section [{other}]"))),
            };
            continue;
        }
        if section == Section::Quantities {
            let list = cfg.quantities.get_or_insert_with(Vec::new);
            list.extend(
                line.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from),
            );
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        match section {
            Section::None => return Err(err(format!("'{key}' appears before any section header"))),
            Section::Run => match key {
                "preset" => cfg.preset = Some(value.to_string()),
                "engine" => {
                    cfg.engine = Some(match value.to_ascii_lowercase().as_str() {
                        "analytic" => Engine::Analytic,
                        "ed" => Engine::Ed,
                        "dynamics" => Engine::Dynamics,
                        _ => return Err(err(format!("unknown engine '{value}' (analytic | ed | dynamics)"))),
                    })
                }
                "selection" => cfg.selection = Some(parse_selection(value).map_err(err)?),
                _ => return Err(err(format!("unknown [run] key '{key}' (preset, engine, selection)"))),
            },
            Section::Axes => {
                if !is_parameter(key) {
                    return Err(err(format!("unknown parameter '{key}'")));
                }
                if cfg.axes.iter().any(|a| a.name == key) {
                    return Err(err(format!("axis '{key}' given twice")));
                }
                cfg.axes.push(Axis {
                    name: key.to_string(),
                    values: axis_values(value).map_err(err)?,
                });
            }
            Section::Fixed => {
                if !is_parameter(key) {
                    return Err(err(format!("unknown parameter '{key}'")));
                }
                if cfg.fixed.insert(key.to_string(), number(value).map_err(err)?).is_some() {
                    return Err(err(format!("'{key}' given twice")));
                }
            }
            Section::Quantities => unreachable!(),
        }
    }
    Ok(cfg)
}
