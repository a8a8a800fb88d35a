use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::cell::Cell;
use super::export::{GridResult, Provenance};
use super::spec::SweepSpec;
use super::SweepError;
use crate::fock::{checked_fidelity_trace, default_initial_state, ed_summary, heuristic_cutoff, EdSummary, FockSpace};
use crate::model::{
    a2_amplitude, derive_model, g_c_dissipative, rwa_validity, EffectiveModel, ModelError, ModulationParams,
    SelectionMode, SystemParams, DEFAULT_RWA_THRESHOLD,
};
use crate::phase::{
    classify_phase, displacement_and_qubit_freq, energy_derivative, excitation_energy, ground_energy, order_parameters,
    reduced_couplings, squeezing_parameter, DerivativeOrder, Direction, OrderParameters, PhaseError, ReducedCouplings,
    DEFAULT_TOL,
};

/// Values used for parameters a sweep neither fixes nor scans.
pub const DEFAULTS: &[(&str, f64)] = &[
    ("omega0", 1.0),
    ("eta", 100.0),
    ("g", 0.06),
    ("chi", 0.0),
    ("kappa", 0.0),
    ("xi", 0.0),
    ("nu", 0.68),
    ("bias", 0.0),
    ("alpha", 0.1),
    ("t", 10.0),
];

/// Fock cutoff of dynamics runs when `n_max` is not given.
pub const DYNAMICS_CUTOFF: usize = 22;

/// Defaults overlaid with the sweep's fixed values; swept names are left out.
pub fn resolved_parameters(spec: &SweepSpec) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    out.extend(spec.fixed.iter().map(|(k, v)| (k.clone(), *v)));
    for axis in &spec.axes {
        out.remove(&axis.name);
    }
    out
}

pub fn run_sweep(spec: &SweepSpec) -> Result<GridResult, SweepError> {
    run_sweep_with_jobs(spec, None)
}

/// `jobs` caps the worker count; `None` uses the global pool.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: Option<usize>) -> Result<GridResult, SweepError> {
    spec.validate()?;
    let resolved = resolved_parameters(spec);
    let rows = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(|| evaluate_grid(spec, &resolved)),
        None => evaluate_grid(spec, &resolved),
    };
    Ok(GridResult {
        columns: spec.columns(),
        rows,
        provenance: Provenance::new(spec, resolved)?,
        spec: spec.clone(),
    })
}

struct Grid {
    points: Vec<Vec<f64>>,
}

impl Grid {
    fn new(spec: &SweepSpec) -> Self {
        Self {
            points: spec.axes.iter().map(|a| a.points()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.points.iter().map(Vec::len).product()
    }

    /// Per-axis indices of row `row`; the first axis varies slowest.
    fn indices(&self, mut row: usize) -> Vec<usize> {
        let mut idx = vec![0; self.points.len()];
        for (k, axis) in self.points.iter().enumerate().rev() {
            idx[k] = row % axis.len();
            row /= axis.len();
        }
        idx
    }

    fn coordinates(&self, row: usize) -> Vec<f64> {
        self.indices(row)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.points[k][i])
            .collect()
    }
}

fn evaluate_grid(spec: &SweepSpec, resolved: &BTreeMap<String, f64>) -> Vec<Vec<Cell>> {
    let grid = Grid::new(spec);
    let point = |row: usize| {
        let mut p = resolved.clone();
        for (axis, v) in spec.axes.iter().zip(grid.coordinates(row)) {
            p.insert(axis.name.clone(), v);
        }
        p
    };
    let mut rows: Vec<Vec<Cell>> = (0..grid.len())
        .into_par_iter()
        .map(|row| {
            let p = point(row);
            let eval = Evaluator::new(&p, spec.selection);
            let mut cells: Vec<Cell> = grid.coordinates(row).into_iter().map(Cell::num).collect();
            cells.extend(spec.quantities.iter().map(|q| eval.quantity(q)));
            cells
        })
        .collect();

    if let Some(column) = spec.quantities.iter().position(|q| q == "fidelity") {
        let column = column + spec.axes.len();
        let t_axis = spec.axes.iter().position(|a| a.name == "t");
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for row in 0..grid.len() {
            let mut key = grid.indices(row);
            if let Some(k) = t_axis {
                key.remove(k);
            }
            groups.entry(key).or_default().push(row);
        }
        let groups: Vec<Vec<usize>> = groups.into_values().collect();
        let filled: Vec<(usize, Cell)> = groups
            .par_iter()
            .flat_map_iter(|rows| {
                let points: Vec<BTreeMap<String, f64>> = rows.iter().map(|&r| point(r)).collect();
                fidelity_group(&points, spec.selection)
                    .into_iter()
                    .zip(rows.iter().copied())
                    .map(|(c, r)| (r, c))
            })
            .collect();
        for (row, cell) in filled {
            rows[row][column] = cell;
        }
    }
    rows
}

/// Fidelity at each point of a group that differs only in `t`.
fn fidelity_group(points: &[BTreeMap<String, f64>], selection: SelectionMode) -> Vec<Cell> {
    let eval = Evaluator::new(&points[0], selection);
    let run = || -> Result<Vec<f64>, String> {
        let params = eval.system()?;
        let modulation = eval.modulation()?;
        let model = eval.model()?;
        if model.selection.is_none() {
            return Err("fidelity needs a model derived from a modulation".into());
        }
        let n_max = match points[0].get("n_max") {
            Some(&n) => n as usize,
            None => DYNAMICS_CUTOFF,
        };
        let space = FockSpace::new(n_max).map_err(|e| e.to_string())?;
        let init = default_initial_state(space, Complex64::new(eval.val("alpha"), 0.0)).map_err(|e| e.to_string())?;
        let period = 2.0 * PI / params.omega0;
        let requested: Vec<f64> = points.iter().map(|p| p["t"] * period).collect();
        let mut times = requested.clone();
        times.push(0.0);
        times.sort_by(f64::total_cmp);
        times.dedup();
        let run =
            checked_fidelity_trace(&params, &modulation, &model, &init, &times, None).map_err(|e| e.to_string())?;
        Ok(requested
            .iter()
            .map(|t| run.fidelity[times.partition_point(|x| x < t)])
            .collect())
    };
    match run() {
        Ok(f) => f.into_iter().map(Cell::num).collect(),
        Err(e) => vec![Cell::Error(e); points.len()],
    }
}

/// `p[name]`, or its default.
fn parameter(p: &BTreeMap<String, f64>, name: &str) -> f64 {
    p.get(name)
        .copied()
        .or_else(|| DEFAULTS.iter().find(|d| d.0 == name).map(|d| d.1))
        .unwrap_or(f64::NAN)
}

/// Bare system of a parameter set; `omega_c` takes precedence over `eta`.
pub fn point_system(p: &BTreeMap<String, f64>) -> Result<SystemParams, ModelError> {
    let omega0 = parameter(p, "omega0");
    let omega_c = p.get("omega_c").copied().unwrap_or(omega0 / parameter(p, "eta"));
    SystemParams::new(
        omega0,
        omega_c,
        parameter(p, "g"),
        parameter(p, "chi"),
        parameter(p, "kappa"),
    )
}

pub fn point_modulation(p: &BTreeMap<String, f64>) -> Result<ModulationParams, ModelError> {
    ModulationParams::new(parameter(p, "xi"), parameter(p, "nu"))
}

/// Effective model of a parameter set. With `eta_eff` the model is built
/// directly from `omega0`, `eta_eff`, `lambda` and `mu` (missing couplings are
/// zero). Otherwise it is derived from the modulation, and `lambda` or `mu`,
/// when present, replace the derived reduced couplings.
pub fn point_model(p: &BTreeMap<String, f64>, selection: SelectionMode) -> Result<EffectiveModel, ModelError> {
    let lambda = p.get("lambda").copied();
    let mu = p.get("mu").copied();
    if let Some(&eta_eff) = p.get("eta_eff") {
        return EffectiveModel::from_reduced(
            parameter(p, "omega0"),
            eta_eff,
            lambda.unwrap_or(0.0),
            mu.unwrap_or(0.0),
        );
    }
    let model = derive_model(&point_system(p)?, &point_modulation(p)?, selection)?;
    if lambda.is_none() && mu.is_none() {
        return Ok(model);
    }
    let reduced = |g: f64| if model.g_c > 0.0 { g / model.g_c } else { 0.0 };
    Ok(model.with_reduced(lambda.unwrap_or(reduced(model.g_r)), mu.unwrap_or(reduced(model.g_cr))))
}

fn phase_error(e: PhaseError) -> Cell {
    match e {
        PhaseError::AmbiguousBoundary { .. } | PhaseError::BoundaryTooClose { .. } => Cell::Boundary,
        other => Cell::Error(other.to_string()),
    }
}

fn phase_cell(r: Result<f64, PhaseError>) -> Cell {
    r.map_or_else(phase_error, Cell::num)
}

/// Lazily evaluated quantities at one grid point.
struct Evaluator<'a> {
    p: &'a BTreeMap<String, f64>,
    selection: SelectionMode,
    model: OnceCell<Result<EffectiveModel, String>>,
    orders: OnceCell<Result<OrderParameters, PhaseError>>,
    ed: OnceCell<Result<EdSummary, String>>,
}

impl<'a> Evaluator<'a> {
    fn new(p: &'a BTreeMap<String, f64>, selection: SelectionMode) -> Self {
        Self {
            p,
            selection,
            model: OnceCell::new(),
            orders: OnceCell::new(),
            ed: OnceCell::new(),
        }
    }

    fn val(&self, name: &str) -> f64 {
        parameter(self.p, name)
    }

    fn system(&self) -> Result<SystemParams, String> {
        point_system(self.p).map_err(|e| e.to_string())
    }

    fn modulation(&self) -> Result<ModulationParams, String> {
        point_modulation(self.p).map_err(|e| e.to_string())
    }

    fn model(&self) -> Result<EffectiveModel, String> {
        self.model
            .get_or_init(|| point_model(self.p, self.selection).map_err(|e| e.to_string()))
            .clone()
    }

    fn couplings(&self) -> Result<(EffectiveModel, ReducedCouplings), Cell> {
        let model = self.model().map_err(Cell::Error)?;
        let rc = reduced_couplings(&model).map_err(phase_error)?;
        Ok((model, rc))
    }

    fn orders(&self) -> Result<OrderParameters, Cell> {
        let (model, rc) = self.couplings()?;
        self.orders
            .get_or_init(|| order_parameters(&rc, &model))
            .clone()
            .map_err(phase_error)
    }

    fn ed(&self) -> Result<EdSummary, Cell> {
        let model = self.model().map_err(Cell::Error)?;
        self.ed
            .get_or_init(|| {
                let n_max = match self.p.get("n_max") {
                    Some(&n) => n as usize,
                    None => heuristic_cutoff(&model),
                };
                let space = FockSpace::new(n_max).map_err(|e| e.to_string())?;
                ed_summary(&model, space, self.val("bias")).map_err(|e| e.to_string())
            })
            .clone()
            .map_err(Cell::Error)
    }

    fn quantity(&self, name: &str) -> Cell {
        self.try_quantity(name).unwrap_or_else(|c| c)
    }

    fn try_quantity(&self, name: &str) -> Result<Cell, Cell> {
        let model = || self.model().map_err(Cell::Error);
        let derivative = |order, direction| -> Result<Cell, Cell> {
            let (m, rc) = self.couplings()?;
            Ok(phase_cell(energy_derivative(&rc, &m, order, direction)))
        };
        Ok(match name {
            "g_r" => Cell::num(model()?.g_r),
            "g_cr" => Cell::num(model()?.g_cr),
            "lambda" => Cell::num(self.couplings()?.1.lambda),
            "mu" => Cell::num(self.couplings()?.1.mu),
            "epsilon" => model()?.epsilon.into(),
            "eta_eff" => Cell::num(model()?.eta_eff),
            "omega0_eff" => Cell::num(model()?.omega0_eff),
            "omega_c_eff" => Cell::num(model()?.omega_c_eff),
            "g_c" => Cell::num(model()?.g_c),
            "g_tilde_c" => Cell::num(model()?.g_tilde_c),
            "g_c_diss" => match g_c_dissipative(&model()?, self.val("kappa")) {
                Ok(v) => Cell::num(v),
                Err(e) => Cell::Error(e.to_string()),
            },
            "n0" | "m0" => match model()?.selection {
                Some(s) => Cell::num(if name == "n0" { s.n0 } else { s.m0 } as f64),
                None => Cell::Error("model was not derived from a modulation".into()),
            },
            "a2_ratio" | "a2_coupling_ratio" => {
                let params = self.system().map_err(Cell::Error)?;
                let (g_a2, wc) = a2_amplitude(&params);
                Cell::num(match name {
                    "a2_ratio" => g_a2 / (2.0 * wc),
                    _ if params.g > 0.0 => g_a2 / params.g,
                    _ => 0.0,
                })
            }
            "rwa_pass" => {
                let params = self.system().map_err(Cell::Error)?;
                let modulation = self.modulation().map_err(Cell::Error)?;
                match rwa_validity(&params, &modulation, &model()?, DEFAULT_RWA_THRESHOLD) {
                    Ok(r) => Cell::Num(if r.pass { 1.0 } else { 0.0 }),
                    Err(e) => Cell::Error(e.to_string()),
                }
            }
            "phase" => {
                let (_, rc) = self.couplings()?;
                classify_phase(&rc, DEFAULT_TOL).map_or_else(phase_error, |l| Cell::Text(l.as_str().into()))
            }
            "omega" | "omega_scaled" => {
                let (m, rc) = self.couplings()?;
                let scale = if name == "omega" { 1.0 } else { m.omega_c_eff.abs() };
                phase_cell(excitation_energy(&rc, &m).map(|w| w / scale))
            }
            "x_mean" => Cell::num(self.orders()?.x_mean),
            "p_mean" => Cell::num(self.orders()?.p_mean),
            "x_scaled" => Cell::num(self.orders()?.x_mean / model()?.eta_eff.abs().sqrt()),
            "p_scaled" => Cell::num(self.orders()?.p_mean / model()?.eta_eff.abs().sqrt()),
            "var_x" => self.orders()?.var_x.into(),
            "var_p" => self.orders()?.var_p.into(),
            "ground_energy" => {
                let (m, rc) = self.couplings()?;
                phase_cell(ground_energy(&rc, &m))
            }
            "squeeze" => {
                let (m, rc) = self.couplings()?;
                squeezing_parameter(&rc, &m).map_or_else(phase_error, Cell::from)
            }
            "alpha" | "omega_k" => {
                let (m, rc) = self.couplings()?;
                let label = classify_phase(&rc, DEFAULT_TOL).map_err(phase_error)?;
                let (alpha, omega_k) = if label.is_superradiant() {
                    let f = displacement_and_qubit_freq(&rc, &m).map_err(phase_error)?;
                    (f.alpha, f.omega_k)
                } else {
                    (0.0, m.omega0_eff.abs())
                };
                Cell::num(if name == "alpha" { alpha } else { omega_k })
            }
            "de_dlambda" => derivative(DerivativeOrder::First, Direction::Lambda)?,
            "de_dmu" => derivative(DerivativeOrder::First, Direction::Mu)?,
            "d2e_dlambda2" => derivative(DerivativeOrder::Second, Direction::Lambda)?,
            "d2e_dmu2" => derivative(DerivativeOrder::Second, Direction::Mu)?,
            "ed_e0" => Cell::num(self.ed()?.e0),
            "ed_gap" => Cell::num(self.ed()?.gap),
            "ed_gap_scaled" => Cell::num(self.ed()?.gap / model()?.omega_c_eff.abs()),
            "ed_n_mean" => Cell::num(self.ed()?.n_mean),
            "ed_n_scaled" => Cell::num(self.ed()?.n_mean * 2.0 / model()?.eta_eff.abs()),
            "ed_x_mean" => Cell::num(self.ed()?.x_mean),
            "ed_parity" => Cell::num(self.ed()?.parity),
            "ed_n_max" => Cell::num(self.ed()?.n_max as f64),
            // Filled per time series by `fidelity_group`.
            "fidelity" => Cell::Error("not evaluated".into()),
            other => Cell::Error(format!("unknown quantity '{other}'")),
        })
    }
}
