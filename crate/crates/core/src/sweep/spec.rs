use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SweepError;
use crate::model::SelectionMode;

/// Parameters a sweep can fix or scan. Frequencies are in units of `omega0`.
pub const PARAMETERS: &[(&str, &str)] = &[
    ("omega0", "qubit frequency (default 1)"),
    ("eta", "bare ratio omega0 / omega_c (default 100)"),
    ("omega_c", "cavity frequency; overrides eta"),
    ("g", "qubit-cavity coupling (default 0.06)"),
    ("chi", "A² coefficient (default 0)"),
    ("kappa", "cavity loss rate, used by g_c_diss (default 0)"),
    ("xi", "modulation amplitude (default 0)"),
    ("nu", "modulation frequency (default 0.68)"),
    ("lambda", "override g_r / g_c of the derived model"),
    ("mu", "override g_cr / g_c of the derived model"),
    (
        "eta_eff",
        "use a direct effective model with this ratio instead of a modulation",
    ),
    ("n_max", "Fock cutoff (ed: heuristic when unset; dynamics: 22)"),
    ("bias", "parity-breaking field bias * x in ed runs (default 0)"),
    (
        "alpha",
        "coherent amplitude of the dynamics initial state (default 0.1)",
    ),
    ("t", "time in periods 2 pi / omega0 (dynamics, default 10)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Model,
    Analytic,
    Ed,
    Dynamics,
}

/// Output columns a sweep can request.
pub const QUANTITIES: &[(&str, Family, &str)] = &[
    ("g_r", Family::Model, "effective rotating coupling"),
    ("g_cr", Family::Model, "effective counter-rotating coupling"),
    ("lambda", Family::Model, "g_r / g_c"),
    ("mu", Family::Model, "g_cr / g_c"),
    ("epsilon", Family::Model, "anisotropy g_cr / g_r"),
    ("eta_eff", Family::Model, "effective frequency ratio"),
    ("omega0_eff", Family::Model, "effective qubit frequency"),
    ("omega_c_eff", Family::Model, "effective cavity frequency"),
    ("g_c", Family::Model, "critical coupling"),
    ("g_tilde_c", Family::Model, "anisotropic phase boundary"),
    ("g_c_diss", Family::Model, "critical coupling shifted by kappa"),
    ("n0", Family::Model, "rotating sideband index"),
    ("m0", Family::Model, "counter-rotating sideband index"),
    ("a2_ratio", Family::Model, "g_A2 / (2 omega_c')"),
    ("a2_coupling_ratio", Family::Model, "g_A2 / g"),
    (
        "rwa_pass",
        Family::Model,
        "1 when every two-sideband smallness ratio is below 0.2",
    ),
    ("phase", Family::Analytic, "phase label N, SX, SP, SXPa, SXPb"),
    ("omega", Family::Analytic, "excitation energy"),
    ("omega_scaled", Family::Analytic, "excitation energy / |omega_c_eff|"),
    ("x_mean", Family::Analytic, "<x> (positive branch)"),
    ("p_mean", Family::Analytic, "<p> (positive branch)"),
    ("x_scaled", Family::Analytic, "<x> / sqrt(eta_eff)"),
    ("p_scaled", Family::Analytic, "<p> / sqrt(eta_eff)"),
    ("var_x", Family::Analytic, "x variance"),
    ("var_p", Family::Analytic, "p variance"),
    ("ground_energy", Family::Analytic, "ground-state energy"),
    ("squeeze", Family::Analytic, "squeezing parameter"),
    ("alpha", Family::Analytic, "displacement |alpha_k|"),
    ("omega_k", Family::Analytic, "rescaled qubit frequency"),
    ("de_dlambda", Family::Analytic, "dE/dlambda"),
    ("de_dmu", Family::Analytic, "dE/dmu"),
    ("d2e_dlambda2", Family::Analytic, "d²E/dlambda²"),
    ("d2e_dmu2", Family::Analytic, "d²E/dmu²"),
    ("ed_e0", Family::Ed, "ED ground energy"),
    ("ed_gap", Family::Ed, "ED gap E1 - E0"),
    ("ed_gap_scaled", Family::Ed, "ED gap / |omega_c_eff|"),
    ("ed_n_mean", Family::Ed, "ED <a^dag a>"),
    ("ed_n_scaled", Family::Ed, "ED <a^dag a> 2 / eta_eff"),
    ("ed_x_mean", Family::Ed, "ED <x>"),
    ("ed_parity", Family::Ed, "ED <sigma_z (-1)^n>"),
    ("ed_n_max", Family::Ed, "cutoff used"),
    ("fidelity", Family::Dynamics, "two-sideband fidelity F(t)"),
];

pub fn quantity_family(name: &str) -> Option<Family> {
    QUANTITIES.iter().find(|q| q.0 == name).map(|q| q.1)
}

pub fn is_parameter(name: &str) -> bool {
    PARAMETERS.iter().any(|p| p.0 == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Analytic,
    Ed,
    Dynamics,
}

impl Engine {
    pub fn allows(self, family: Family) -> bool {
        match family {
            Family::Model | Family::Analytic => true,
            Family::Ed => self == Engine::Ed,
            Family::Dynamics => self == Engine::Dynamics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisValues {
    /// `count` evenly spaced values from `min` to `max` inclusive.
    Linear {
        min: f64,
        max: f64,
        count: usize,
    },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: AxisValues,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.to_string(),
            values: AxisValues::Linear { min, max, count },
        }
    }

    pub fn list(name: &str, values: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            values: AxisValues::List(values.to_vec()),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::List(v) => v.clone(),
            AxisValues::Linear { min, max, count } => match count {
                0 => Vec::new(),
                1 => vec![*min],
                n => (0..*n)
                    .map(|i| {
                        if i + 1 == *n {
                            *max
                        } else {
                            min + (max - min) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            AxisValues::List(v) => v.len(),
            AxisValues::Linear { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// First axis outermost in the row order.
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
    pub quantities: Vec<String>,
    pub selection: SelectionMode,
    pub engine: Engine,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self {
            axes,
            fixed: BTreeMap::new(),
            quantities: Vec::new(),
            selection: SelectionMode::default(),
            engine: Engine::default(),
        }
    }

    pub fn fix(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_string(), value);
        self
    }

    pub fn quantities(mut self, names: &[&str]) -> Self {
        self.quantities = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn selection(mut self, selection: SelectionMode) -> Self {
        self.selection = selection;
        self
    }

    pub fn row_count(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::InvalidSpec(m));
        if self.axes.is_empty() || self.axes.len() > 2 {
            return bad(format!("a sweep needs one or two axes, got {}", self.axes.len()));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if !is_parameter(&axis.name) {
                return bad(format!("unknown axis parameter '{}'", axis.name));
            }
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return bad(format!("axis '{}' appears twice", axis.name));
            }
            if self.fixed.contains_key(&axis.name) {
                return bad(format!("'{}' is both swept and fixed", axis.name));
            }
            if axis.is_empty() {
                return bad(format!("axis '{}' has no points", axis.name));
            }
            if let AxisValues::Linear { min, max, count } = axis.values {
                if count == 1 && min != max {
                    return bad(format!("axis '{}' has one point but min != max", axis.name));
                }
            }
            if axis.points().iter().any(|v| !v.is_finite()) {
                return bad(format!("axis '{}' has a non-finite value", axis.name));
            }
        }
        for (name, value) in &self.fixed {
            if !is_parameter(name) {
                return bad(format!("unknown fixed parameter '{name}'"));
            }
            if !value.is_finite() {
                return bad(format!("fixed parameter '{name}' is not finite"));
            }
        }
        for (i, q) in self.quantities.iter().enumerate() {
            let Some(family) = quantity_family(q) else {
                return bad(format!("unknown quantity '{q}'"));
            };
            if !self.engine.allows(family) {
                return bad(format!("quantity '{q}' needs the {:?} engine", family));
            }
            if self.quantities[..i].contains(q) {
                return bad(format!("quantity '{q}' requested twice"));
            }
        }
        let cutoffs = self
            .fixed
            .get("n_max")
            .copied()
            .into_iter()
            .chain(self.axes.iter().filter(|a| a.name == "n_max").flat_map(|a| a.points()));
        for n in cutoffs {
            if n < 1.0 || n.fract() != 0.0 {
                return bad(format!("n_max must be a positive integer, got {n}"));
            }
        }
        if self.engine == Engine::Dynamics {
            if let Some(t) = self.axes.iter().find(|a| a.name == "t") {
                let p = t.points();
                if p.windows(2).any(|w| w[1] < w[0]) || p[0] < 0.0 {
                    return bad("the t axis must be non-negative and ascending".into());
                }
            }
        }
        Ok(())
    }

    /// Column names: axes first, then quantities.
    pub fn columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name.clone())
            .chain(self.quantities.iter().cloned())
            .collect()
    }
}
