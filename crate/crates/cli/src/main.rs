mod report;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rabiqpt::fock::{
    checked_fidelity_trace, cutoff_convergence, default_initial_state, ground_state_ed, heuristic_cutoff, FockError,
    FockSpace, CONVERGENCE_STEP,
};
use rabiqpt::model::{g_c_dissipative, rwa_validity, ModelError, SelectionMode, DEFAULT_RWA_THRESHOLD};
use rabiqpt::phase::{evaluate_point, excitation_energy, reduced_couplings, PhaseError, DEFAULT_TOL};
use rabiqpt::sweep::{
    export_table, parse_config, parse_selection, point_model, point_modulation, point_system, read_config,
    run_sweep_with_jobs, Axis, Cell, Engine, ExportFormat, GridResult, SweepConfig, SweepError, DEFAULTS,
    DYNAMICS_CUTOFF, PARAMETERS, PRESETS, QUANTITIES,
};
use report::{num, value, Report};
use serde_json::json;

const UNITS: &str = "All frequencies, couplings and rates are in units of the qubit frequency omega0 \
(omega0 = 1 unless --omega0 is given). To use absolute units, divide every frequency by omega0 first. \
Times are in periods 2 pi / omega0.";

#[derive(Parser)]
#[command(name = "rabiqpt", version, about = "Effective-model, phase-theory and Fock-space tools for a modulated quantum Rabi model", after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file with [run], [axes], [fixed] and [quantities] sections; flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the result to PATH (.json selects JSON; tables default to CSV, reports to key = value text)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true, env = "RABIQPT_JOBS", value_name = "N")]
    jobs: Option<usize>,

    /// Print JSON on stdout instead of text or CSV
    #[arg(long, global = true)]
    json: bool,

    /// Echo resolved parameters and provenance on stderr
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Args, Default)]
struct ModelArgs {
    /// Qubit frequency omega0 [sets the unit; default 1]
    #[arg(long)]
    omega0: Option<f64>,
    /// Bare ratio omega0 / omega_c [dimensionless; default 100]
    #[arg(long)]
    eta: Option<f64>,
    /// Cavity frequency omega_c [units of omega0]; overrides --eta
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Qubit-cavity coupling g [units of omega0; default 0.06]
    #[arg(long)]
    g: Option<f64>,
    /// A² coefficient chi [dimensionless; default 0]
    #[arg(long)]
    chi: Option<f64>,
    /// Cavity loss rate kappa [units of omega0; default 0]
    #[arg(long)]
    kappa: Option<f64>,
    /// Modulation amplitude xi [dimensionless; default 0]
    #[arg(long)]
    xi: Option<f64>,
    /// Modulation frequency nu [units of omega0; default 0.68]
    #[arg(long)]
    nu: Option<f64>,
    /// Sideband selection: min-detuning, max-ratio or manual:N0,M0 [default min-detuning]
    #[arg(long, value_parser = parse_selection)]
    selection: Option<SelectionMode>,
}

impl ModelArgs {
    fn overrides(&self) -> Vec<(&'static str, f64)> {
        [
            ("omega0", self.omega0),
            ("eta", self.eta),
            ("omega_c", self.omega_c),
            ("g", self.g),
            ("chi", self.chi),
            ("kappa", self.kappa),
            ("xi", self.xi),
            ("nu", self.nu),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Args, Default)]
struct CouplingArgs {
    /// Reduced rotating coupling g_r / g_c [dimensionless]; replaces the derived value
    #[arg(long)]
    lambda: Option<f64>,
    /// Reduced counter-rotating coupling g_cr / g_c [dimensionless]; replaces the derived value
    #[arg(long)]
    mu: Option<f64>,
    /// Use a direct effective model with ratio omega0_eff / omega_c_eff [dimensionless] instead of a modulation
    #[arg(long = "eta-eff")]
    eta_eff: Option<f64>,
}

impl CouplingArgs {
    fn overrides(&self) -> Vec<(&'static str, f64)> {
        [("lambda", self.lambda), ("mu", self.mu), ("eta_eff", self.eta_eff)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Ed,
    Dynamics,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the effective model and the two-sideband validity report
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Effective {
        #[command(flatten)]
        model: ModelArgs,
        /// Pass threshold for every smallness ratio [dimensionless]
        #[arg(long, default_value_t = DEFAULT_RWA_THRESHOLD)]
        threshold: f64,
    },
    /// Phase label, excitation energy and order parameters at one point
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Phase {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
    },
    /// Run a parameter sweep from a preset, the config file and flags
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Sweep {
        /// Start from a named preset (see --list)
        #[arg(long)]
        preset: Option<String>,
        /// Swept parameter, 'name=min,max,count' or 'name=[v1,v2,...]'; repeat for a second axis
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        /// Fix any parameter, 'name=value' [units of omega0 for frequencies]
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
        /// Output quantities, comma separated (see --list)
        #[arg(long, value_delimiter = ',')]
        quantities: Option<Vec<String>>,
        /// Evaluation engine
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// List presets, parameters and quantities and exit
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
    },
    /// Exact diagonalization of the effective model in a truncated Fock space
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Ed {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        couplings: CouplingArgs,
        /// Fock cutoff [photons; default from the analytic displacement]
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        /// Raise the cutoff in steps of 25 until E0 and the gap settle
        #[arg(long)]
        converge: bool,
        /// Symmetry-breaking field coupling to x [units of omega0; default 0]
        #[arg(long)]
        bias: Option<f64>,
        /// Number of eigenvalues to report
        #[arg(long, default_value_t = 2)]
        count: usize,
    },
    /// Fidelity between the full sideband and the two-sideband evolution
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Fidelity {
        #[command(flatten)]
        model: ModelArgs,
        /// Coherent amplitude of the initial state (|g> + |e>)|alpha>/sqrt2 [dimensionless; default 0.1]
        #[arg(long)]
        alpha: Option<f64>,
        /// Final time [periods 2 pi / omega0]
        #[arg(long = "t-max", default_value_t = 10.0)]
        t_max: f64,
        /// Number of output times from 0 to t-max
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Fock cutoff [photons]
        #[arg(long = "n-max", default_value_t = DYNAMICS_CUTOFF)]
        n_max: usize,
        /// Largest RK4 step [units of 1/omega0; default from the Hamiltonian norm]
        #[arg(long = "max-step")]
        max_step: Option<f64>,
    },
    /// Table of g_A2 / (2 omega_c') and g_A2 / g
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    A2 {
        /// Swept parameter, 'name=min,max,count' or 'name=[v1,...]' [default: the single point --g]
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Table of g_c, the anisotropic boundary and the dissipative critical coupling
    #[command(allow_negative_numbers = true, after_help = UNITS)]
    Boundary {
        /// Swept parameter, 'name=min,max,count' or 'name=[v1,...]' [default: xi=0,12,300]
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        #[command(flatten)]
        model: ModelArgs,
    },
}

enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<PhaseError> for CliError {
    fn from(e: PhaseError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::InvalidCutoff(_) | FockError::InvalidControl(_) | FockError::InvalidTimeGrid => {
                CliError::Usage(e.to_string())
            }
            FockError::Model(m) => m.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => read_config(path)?,
        None => SweepConfig::default(),
    };
    match &cli.command {
        Command::Effective { model, threshold } => effective(cli, &config, model, *threshold),
        Command::Phase { model, couplings } => phase(cli, &config, model, couplings),
        Command::Sweep {
            preset,
            axes,
            sets,
            quantities,
            engine,
            list,
            model,
            couplings,
        } => {
            if *list {
                return print_catalogue();
            }
            let mut cfg = config.clone();
            if preset.is_some() {
                cfg.preset = preset.clone();
            }
            let parsed = parse_axes(axes)?;
            if !parsed.is_empty() {
                cfg.axes = parsed;
            }
            let mut spec = cfg.to_spec()?;
            for s in sets {
                let fixed = parse_config(&format!("[fixed]\n{s}"))
                    .map_err(|e| CliError::Usage(format!("--set '{s}': {}", strip_line(e))))?;
                spec.fixed.extend(fixed.fixed);
            }
            for (k, v) in model.overrides().into_iter().chain(couplings.overrides()) {
                spec.fixed.insert(k.to_string(), v);
            }
            if let Some(s) = model.selection {
                spec.selection = s;
            }
            if let Some(q) = quantities {
                spec.quantities = q
                    .iter()
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            if let Some(e) = engine {
                spec.engine = match e {
                    EngineArg::Analytic => Engine::Analytic,
                    EngineArg::Ed => Engine::Ed,
                    EngineArg::Dynamics => Engine::Dynamics,
                };
            }
            let result = run_sweep_with_jobs(&spec, cli.jobs)?;
            emit_table(cli, &result)
        }
        Command::Ed {
            model,
            couplings,
            n_max,
            converge,
            bias,
            count,
        } => ed(cli, &config, model, couplings, *n_max, *converge, *bias, *count),
        Command::Fidelity {
            model,
            alpha,
            t_max,
            points,
            n_max,
            max_step,
        } => fidelity(cli, &config, model, *alpha, *t_max, *points, *n_max, *max_step),
        Command::A2 { axes, model } => table(
            cli,
            &config,
            model,
            axes,
            ("g", None),
            &["a2_ratio", "a2_coupling_ratio"],
        ),
        Command::Boundary { axes, model } => table(
            cli,
            &config,
            model,
            axes,
            ("xi", Some(Axis::linear("xi", 0.0, 12.0, 300))),
            &["g_c", "g_tilde_c", "g_c_diss", "lambda", "mu"],
        ),
    }
}

fn strip_line(e: SweepError) -> String {
    match e {
        SweepError::Parse { message, .. } => message,
        other => other.to_string(),
    }
}

fn parse_axes(specs: &[String]) -> Result<Vec<Axis>, CliError> {
    let mut axes = Vec::new();
    for s in specs {
        let cfg = parse_config(&format!("[axes]\n{s}"))
            .map_err(|e| CliError::Usage(format!("--axis '{s}': {}", strip_line(e))))?;
        axes.extend(cfg.axes);
    }
    Ok(axes)
}

const MODEL_KEYS: &[&str] = &["omega0", "eta", "omega_c", "g", "chi", "kappa", "xi", "nu"];
const COUPLING_KEYS: &[&str] = &["lambda", "mu", "eta_eff"];

/// Defaults, then the config file's fixed values, then flags, restricted to
/// the parameters a command reads.
fn resolve(config: &SweepConfig, overrides: &[(&'static str, f64)], keys: &[&[&str]]) -> BTreeMap<String, f64> {
    let mut p: BTreeMap<String, f64> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    p.extend(config.fixed.iter().map(|(k, v)| (k.clone(), *v)));
    p.extend(overrides.iter().map(|(k, v)| (k.to_string(), *v)));
    p.retain(|k, _| keys.iter().any(|set| set.contains(&k.as_str())));
    p
}

fn selection(config: &SweepConfig, model: &ModelArgs) -> SelectionMode {
    model.selection.or(config.selection).unwrap_or_default()
}

fn selection_text(s: SelectionMode) -> String {
    match s {
        SelectionMode::MinDetuning => "min-detuning".into(),
        SelectionMode::MaxRatio => "max-ratio".into(),
        SelectionMode::Manual { n0, m0 } => format!("manual:{n0},{m0}"),
    }
}

fn emit_report(cli: &Cli, report: &Report) -> Result<(), CliError> {
    if cli.verbose > 0 {
        eprint!("{}", Report::new(report.parameters.clone()).to_text());
    }
    match &cli.out {
        Some(path) => report.write(path).map_err(|e| io_error(path, e)),
        None if cli.json => {
            stdout(&(serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n"))
        }
        None => stdout(&report.to_text()),
    }
}

fn emit_table(cli: &Cli, result: &GridResult) -> Result<(), CliError> {
    if cli.verbose > 0 {
        eprintln!(
            "{}",
            serde_json::to_string_pretty(&result.provenance).expect("provenance serializes")
        );
    }
    match &cli.out {
        Some(path) => Ok(export_table(result, ExportFormat::from_path(path), path)?),
        None if cli.json => stdout(&(result.to_json()? + "\n")),
        None => stdout(&result.to_csv()),
    }
}

fn effective(cli: &Cli, config: &SweepConfig, args: &ModelArgs, threshold: f64) -> Result<(), CliError> {
    let p = resolve(config, &args.overrides(), &[MODEL_KEYS]);
    let mode = selection(config, args);
    let params = point_system(&p)?;
    let modulation = point_modulation(&p)?;
    let model = point_model(&p, mode)?;
    let rwa = rwa_validity(&params, &modulation, &model, threshold)?;
    let choice = model.selection.expect("derived models carry their sidebands");
    let reduced = |g: f64| if model.g_c > 0.0 { g / model.g_c } else { 0.0 };

    let mut r = Report::new(p);
    r.selection = Some(selection_text(mode));
    r.push("n0", json!(choice.n0))
        .push("m0", json!(choice.m0))
        .push("omega0_eff", num(model.omega0_eff))
        .push("omega_c_eff", num(model.omega_c_eff))
        .push("eta_eff", num(model.eta_eff))
        .push("g_r", num(model.g_r))
        .push("g_cr", num(model.g_cr))
        .push("epsilon", value(model.epsilon))
        .push("g_c", num(model.g_c))
        .push("g_tilde_c", num(model.g_tilde_c))
        .push("g_c_diss", num(g_c_dissipative(&model, params.kappa)?))
        .push("lambda", num(reduced(model.g_r)))
        .push("mu", num(reduced(model.g_cr)))
        .push("omega_c_prime", num(model.omega_c_prime))
        .push("g_a2", num(model.g_a2))
        .push("rwa_coupling", num(rwa.ratios.coupling))
        .push("rwa_sideband_coupling", num(rwa.ratios.sideband_coupling))
        .push("rwa_rotating_detuning", num(rwa.ratios.rotating_detuning))
        .push(
            "rwa_counter_rotating_detuning",
            num(rwa.ratios.counter_rotating_detuning),
        )
        .push("a2_to_cavity", num(rwa.a2_ratios.to_cavity))
        .push("a2_to_coupling", num(rwa.a2_ratios.to_coupling))
        .push("rwa_threshold", num(rwa.threshold))
        .push("rwa_pass", json!(rwa.pass));
    emit_report(cli, &r)
}

fn phase(cli: &Cli, config: &SweepConfig, args: &ModelArgs, couplings: &CouplingArgs) -> Result<(), CliError> {
    let overrides: Vec<_> = args.overrides().into_iter().chain(couplings.overrides()).collect();
    let p = resolve(config, &overrides, &[MODEL_KEYS, COUPLING_KEYS]);
    let mode = selection(config, args);
    let model = point_model(&p, mode)?;
    let rc = reduced_couplings(&model)?;
    let point = evaluate_point(&rc, &model, DEFAULT_TOL)?;

    let mut r = Report::new(p);
    r.selection = Some(selection_text(mode));
    r.push("phase", json!(point.label.as_str()))
        .push("lambda", num(rc.lambda))
        .push("mu", num(rc.mu))
        .push("epsilon", value(rc.epsilon()))
        .push("eta_eff", num(model.eta_eff))
        .push("g_c", num(model.g_c))
        .push("omega", num(point.excitation))
        .push("x_mean", num(point.x_mean))
        .push("p_mean", num(point.p_mean))
        .push("x_scaled", num(point.x_scaled(&model)))
        .push("p_scaled", num(point.p_scaled(&model)))
        .push("var_x", value(point.var_x))
        .push("var_p", value(point.var_p))
        .push("ground_energy", num(point.ground_energy))
        .push("squeeze", value(point.squeeze))
        .push("alpha", num(point.alpha))
        .push("omega_k", num(point.omega_k));
    emit_report(cli, &r)
}

#[allow(clippy::too_many_arguments)]
fn ed(
    cli: &Cli,
    config: &SweepConfig,
    args: &ModelArgs,
    couplings: &CouplingArgs,
    n_max: Option<usize>,
    converge: bool,
    bias: Option<f64>,
    count: usize,
) -> Result<(), CliError> {
    let mut overrides: Vec<_> = args.overrides().into_iter().chain(couplings.overrides()).collect();
    if let Some(b) = bias {
        overrides.push(("bias", b));
    }
    let mut p = resolve(config, &overrides, &[MODEL_KEYS, COUPLING_KEYS, &["bias", "n_max"]]);
    let mode = selection(config, args);
    let model = point_model(&p, mode)?;
    let start = n_max
        .or(p.get("n_max").map(|&n| n as usize))
        .unwrap_or_else(|| heuristic_cutoff(&model));
    let cutoff = if converge {
        let ladder: Vec<usize> = (0..12).map(|k| start + k * CONVERGENCE_STEP).collect();
        cutoff_convergence(&model, &ladder)?
    } else {
        start
    };
    p.insert("n_max".into(), cutoff as f64);
    let result = ground_state_ed(&model, FockSpace::new(cutoff)?, p["bias"], count)?;
    let obs = result.ground_state().observables();
    let wc = model.omega_c_eff.abs();

    let mut r = Report::new(p);
    r.selection = Some(selection_text(mode));
    r.push(
        "energies",
        json!(result.energies.iter().map(|&e| num(e)).collect::<Vec<_>>()),
    )
    .push("e0", num(result.ground_energy()));
    if let Some(gap) = result.gap() {
        r.push("gap", num(gap)).push("gap_scaled", num(gap / wc));
    }
    r.push("n_mean", num(obs.n_mean))
        .push("n_scaled", num(obs.n_mean * 2.0 / model.eta_eff.abs()))
        .push("x_mean", num(obs.x_mean))
        .push("p_mean", num(obs.p_mean))
        .push("var_x", num(obs.var_x))
        .push("var_p", num(obs.var_p))
        .push("parity", num(obs.parity))
        .push("residual", num(result.residual));
    if let Ok(w) = reduced_couplings(&model).and_then(|rc| excitation_energy(&rc, &model)) {
        r.push("analytic_omega", num(w))
            .push("analytic_omega_scaled", num(w / wc));
    }
    emit_report(cli, &r)
}

#[allow(clippy::too_many_arguments)]
fn fidelity(
    cli: &Cli,
    config: &SweepConfig,
    args: &ModelArgs,
    alpha: Option<f64>,
    t_max: f64,
    points: usize,
    n_max: usize,
    max_step: Option<f64>,
) -> Result<(), CliError> {
    if points < 2 || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Usage(
            "--points must be at least 2 and --t-max positive".into(),
        ));
    }
    let mut overrides = args.overrides();
    if let Some(a) = alpha {
        overrides.push(("alpha", a));
    }
    let mut p = resolve(config, &overrides, &[MODEL_KEYS, &["alpha"]]);
    p.insert("n_max".into(), n_max as f64);
    let mode = selection(config, args);
    let params = point_system(&p)?;
    let modulation = point_modulation(&p)?;
    let model = point_model(&p, mode)?;
    let init = default_initial_state(FockSpace::new(n_max)?, Complex64::new(p["alpha"], 0.0))?;
    let period = 2.0 * PI / params.omega0;
    let periods: Vec<f64> = (0..points).map(|k| t_max * k as f64 / (points - 1) as f64).collect();
    let times: Vec<f64> = periods.iter().map(|t| t * period).collect();
    let run = checked_fidelity_trace(&params, &modulation, &model, &init, &times, max_step)?;

    if cli.verbose > 0 {
        eprint!("{}", Report::new(p.clone()).to_text());
    }
    eprintln!("step = {}, halving deviation = {:.3e}", run.step, run.halving_deviation);
    let json_out = cli
        .out
        .as_ref()
        .is_some_and(|o| ExportFormat::from_path(o) == ExportFormat::Json);
    let text = if json_out || (cli.out.is_none() && cli.json) {
        let mut r = Report::new(p);
        r.selection = Some(selection_text(mode));
        r.push("t", json!(periods.iter().map(|&t| num(t)).collect::<Vec<_>>()))
            .push(
                "fidelity",
                json!(run.fidelity.iter().map(|&f| num(f)).collect::<Vec<_>>()),
            )
            .push("step", num(run.step))
            .push("halving_deviation", num(run.halving_deviation));
        serde_json::to_string_pretty(&r.to_json()).expect("report serializes") + "\n"
    } else {
        let mut csv = String::from("t,fidelity\n");
        for (t, f) in periods.iter().zip(&run.fidelity) {
            csv.push_str(&format!("{},{}\n", Cell::num(*t).to_csv(), Cell::num(*f).to_csv()));
        }
        csv
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => stdout(&text),
    }
}

/// Sweep with a fixed quantity list; the default axis is `fallback.1`, or the
/// single current value of `fallback.0`.
fn table(
    cli: &Cli,
    config: &SweepConfig,
    args: &ModelArgs,
    axes: &[String],
    fallback: (&str, Option<Axis>),
    quantities: &[&str],
) -> Result<(), CliError> {
    let mut axes = parse_axes(axes)?;
    let p = resolve(config, &args.overrides(), &[MODEL_KEYS]);
    if axes.is_empty() {
        axes.push(match fallback.1 {
            Some(axis) => axis,
            None => Axis::list(fallback.0, &[p[fallback.0]]),
        });
    }
    let mut spec = rabiqpt::sweep::SweepSpec::new(axes)
        .quantities(quantities)
        .selection(selection(config, args));
    spec.fixed = config.fixed.clone();
    spec.fixed
        .extend(args.overrides().into_iter().map(|(k, v)| (k.to_string(), v)));
    let swept: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    spec.fixed.retain(|k, _| !swept.contains(k));
    let result = run_sweep_with_jobs(&spec, cli.jobs)?;
    emit_table(cli, &result)
}

fn print_catalogue() -> Result<(), CliError> {
    let mut text = String::from("presets:\n");
    for (name, about) in PRESETS {
        text.push_str(&format!("  {name:<8} {about}\n"));
    }
    text.push_str("\nparameters (units of omega0 for frequencies):\n");
    for (name, about) in PARAMETERS {
        text.push_str(&format!("  {name:<8} {about}\n"));
    }
    text.push_str("\nquantities:\n");
    for (name, family, about) in QUANTITIES {
        let engine = match family {
            rabiqpt::sweep::Family::Ed => " [ed]",
            rabiqpt::sweep::Family::Dynamics => " [dynamics]",
            _ => "",
        };
        text.push_str(&format!("  {name:<18} {about}{engine}\n"));
    }
    stdout(&text)
}

/// Write to stdout; a closed pipe (`rabiqpt ... | head`) is not an error.
fn stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("writing stdout: {e}"))),
        _ => Ok(()),
    }
}
