//! `njc`: command-line front end. Every subcommand delegates to `njc_core`;
//! nothing here computes physics.
//!
//! Exit codes: 0 success, 1 physics/validation/IO failure, 2 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use njc_core::experiments::{
    bundle_csv, bundle_json, export_sweep, format_number, preset, run_scenario, run_sweep,
    validate, write_with_sidecar, Axis, ExportFormat, InitialState, Scenario, ScenarioBundle,
    Solvers, SweepGrid, ValidationOptions, DEFAULT_OUTPUT_DT, DEFAULT_T_END,
};
use njc_core::linalg::C64;
use njc_core::model::eigenstructure;
use njc_core::oracle::DEFAULT_STEP;
use njc_core::spectral::eigenoperators;
use njc_core::{ModelParams, Result};

/// Write to stdout, treating a closed pipe (`njc ... | head`) as a normal end
/// of output rather than a panic.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: writing to stdout: {e}");
        }
    }
}

macro_rules! emitln {
    ($($arg:tt)*) => {
        emit(&format!("{}\n", format_args!($($arg)*)))
    };
}

#[derive(Parser)]
#[command(
    name = "njc",
    version,
    about = "Dissipative nonlinear Jaynes-Cummings simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dressed energies, Omega, theta and the nine Liouvillian eigenvalues.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Reproduce one of the four figure presets as figN.csv + figN.json.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Both)]
        solvers: SolverArg,
    },
    /// Run a scenario from a JSON config file or inline flags.
    Simulate(SimulateArgs),
    /// Evaluate summary metrics over a parameter grid.
    Sweep(SweepArgs),
    /// Run the self-consistency suite; exit 0 iff every check passes.
    Validate {
        #[command(flatten)]
        params: ParamArgs,
        /// Horizon of the solver comparison.
        #[arg(long, default_value_t = DEFAULT_T_END)]
        t_end: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
        /// Shift the imaginary part of lambda_6 (negative control).
        #[arg(long, hide = true, allow_negative_numbers = true)]
        corrupt_lambda: Option<f64>,
    },
}

/// Model parameters, either from a preset or given explicitly.
#[derive(Args)]
struct ParamArgs {
    /// Take parameters from a figure preset.
    #[arg(long, value_parser = ["fig1", "fig2", "fig3", "fig4"],
          conflicts_with_all = ["omega", "g", "chi", "gamma_plus", "gamma_minus"])]
    preset: Option<String>,
    /// Resonant frequency, the unit of every other quantity.
    #[arg(long)]
    omega: Option<f64>,
    /// Qubit-resonator coupling.
    #[arg(long, required_unless_present = "preset")]
    g: Option<f64>,
    /// Resonator nonlinearity.
    #[arg(long, required_unless_present = "preset")]
    chi: Option<f64>,
    /// Decay rate of |E1+>.
    #[arg(long, required_unless_present = "preset")]
    gamma_plus: Option<f64>,
    /// Decay rate of |E1->.
    #[arg(long, required_unless_present = "preset")]
    gamma_minus: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<ModelParams> {
        if let Some(name) = &self.preset {
            return Ok(preset(name)?.params);
        }
        let need = |v: Option<f64>| v.expect("clap enforces presence without --preset");
        ModelParams::new(
            self.omega.unwrap_or(1.0),
            need(self.g),
            need(self.chi),
            need(self.gamma_plus),
            need(self.gamma_minus),
        )
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file; excludes the inline flags.
    #[arg(long, conflicts_with_all = ["preset", "omega", "g", "chi", "gamma_plus", "gamma_minus",
                                      "t_end", "dt", "integrator_step", "solvers", "initial", "label"])]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: OptionalParams,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    integrator_step: Option<f64>,
    #[arg(long, value_enum)]
    solvers: Option<SolverArg>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long)]
    label: Option<String>,
    /// Output file; CSV output also writes a `.json` metadata sidecar.
    /// Prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

/// Inline parameters for `simulate`, required only without `--config`.
#[derive(Args)]
struct OptionalParams {
    #[arg(long, value_parser = ["fig1", "fig2", "fig3", "fig4"],
          conflicts_with_all = ["omega", "g", "chi", "gamma_plus", "gamma_minus"])]
    preset: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, required_unless_present_any = ["preset", "config"])]
    g: Option<f64>,
    #[arg(long, required_unless_present_any = ["preset", "config"])]
    chi: Option<f64>,
    #[arg(long, required_unless_present_any = ["preset", "config"])]
    gamma_plus: Option<f64>,
    #[arg(long, required_unless_present_any = ["preset", "config"])]
    gamma_minus: Option<f64>,
}

impl SimulateArgs {
    fn scenario(&self) -> Result<Scenario> {
        if let Some(path) = &self.config {
            return Scenario::from_json(&fs::read_to_string(path)?);
        }
        let p = &self.params;
        let mut s = match &p.preset {
            Some(name) => preset(name)?,
            None => {
                let need = |v: Option<f64>| v.expect("clap enforces presence without --preset");
                let params = ModelParams::new(
                    p.omega.unwrap_or(1.0),
                    need(p.g),
                    need(p.chi),
                    need(p.gamma_plus),
                    need(p.gamma_minus),
                )?;
                Scenario::new("simulate", params)
            }
        };
        s.t_end = self.t_end.unwrap_or(DEFAULT_T_END);
        s.dt = self.dt.unwrap_or(DEFAULT_OUTPUT_DT);
        s.integrator_step = self.integrator_step.unwrap_or(DEFAULT_STEP);
        if let Some(solvers) = self.solvers {
            s.solvers = solvers.into();
        }
        if let Some(initial) = self.initial {
            s.initial_state = initial.into();
        }
        if let Some(label) = &self.label {
            s.label = label.clone();
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Swept parameter as `name=start:stop:count`; repeat for a grid.
    #[arg(long = "axis", value_parser = parse_axis)]
    axes: Vec<Axis>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "NJC_THREADS")]
    threads: Option<usize>,
    /// Output file; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    s.parse().map_err(|e: njc_core::NjcError| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Both,
    Analytic,
    Numeric,
}

impl From<SolverArg> for Solvers {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Both => Solvers::Both,
            SolverArg::Analytic => Solvers::Analytic,
            SolverArg::Numeric => Solvers::Numeric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialArg {
    Excited,
    Ground,
    DressedPlus,
    DressedMinus,
}

impl From<InitialArg> for InitialState {
    fn from(s: InitialArg) -> Self {
        match s {
            InitialArg::Excited => InitialState::Excited,
            InitialArg::Ground => InitialState::Ground,
            InitialArg::DressedPlus => InitialState::DressedPlus,
            InitialArg::DressedMinus => InitialState::DressedMinus,
        }
    }
}

fn warn_regime(params: &ModelParams) {
    if params.exceeds_weak_nonlinearity() {
        eprintln!(
            "warning: chi = {} exceeds g/2 = {}; the single-excitation truncation assumes weak nonlinearity",
            params.chi(),
            params.g() / 2.0
        );
    }
}

fn num(x: f64) -> String {
    format_number(x).unwrap_or_else(|_| x.to_string())
}

fn cmd_spectrum(args: &ParamArgs, format: TextOrJson) -> Result<ExitCode> {
    let params = args.resolve()?;
    warn_regime(&params);
    let es = eigenstructure(&params);
    let basis = eigenoperators(&params);
    match format {
        TextOrJson::Json => {
            let eigenvalues: Vec<_> = basis
                .modes()
                .iter()
                .map(|m| json!({"k": m.index, "re": m.lambda.re, "im": m.lambda.im}))
                .collect();
            let doc = json!({
                "params": params,
                "e0": es.e0,
                "e1_plus": es.e1_plus,
                "e1_minus": es.e1_minus,
                "rabi_frequency": es.rabi_frequency,
                "theta": es.theta,
                "eigenvalues": eigenvalues,
            });
            emitln!("{}", serde_json::to_string_pretty(&doc)?);
        }
        TextOrJson::Text => {
            emitln!("E0      = {}", num(es.e0));
            emitln!("E1+     = {}", num(es.e1_plus));
            emitln!("E1-     = {}", num(es.e1_minus));
            emitln!("Omega   = {}", num(es.rabi_frequency));
            emitln!("theta   = {}", num(es.theta));
            for m in basis.modes() {
                let im = num(m.lambda.im);
                let sign = if im.starts_with('-') { "" } else { "+" };
                emitln!("lambda{} = {} {sign}{im}i", m.index, num(m.lambda.re));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn deviation_summary(bundle: &ScenarioBundle) -> ExitCode {
    match bundle.deviation {
        Some(d) if bundle.deviation_ok() => {
            emitln!("max |analytic - numeric| = {} (within tolerance)", num(d));
            ExitCode::SUCCESS
        }
        Some(d) => {
            eprintln!(
                "error: max |analytic - numeric| = {} exceeds tolerance",
                num(d)
            );
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}

fn cmd_figure(n: u8, out: &Path, solvers: SolverArg) -> Result<ExitCode> {
    let mut scenario = preset(&format!("fig{n}"))?;
    scenario.solvers = solvers.into();
    let bundle = run_scenario(&scenario)?;
    fs::create_dir_all(out)?;
    let (csv, meta) = write_with_sidecar(&bundle, &out.join(format!("fig{n}.csv")))?;
    emitln!("wrote {} and {}", csv.display(), meta.display());
    Ok(deviation_summary(&bundle))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let scenario = args.scenario()?;
    warn_regime(&scenario.params);
    let bundle = run_scenario(&scenario)?;
    match (&args.out, args.format) {
        (Some(path), FormatArg::Csv) => {
            let (csv, meta) = write_with_sidecar(&bundle, path)?;
            eprintln!("wrote {} and {}", csv.display(), meta.display());
        }
        (Some(path), FormatArg::Json) => {
            fs::write(path, bundle_json(&bundle)?)?;
            eprintln!("wrote {}", path.display());
        }
        (None, FormatArg::Csv) => emit(&bundle_csv(&bundle)?),
        (None, FormatArg::Json) => emit(&bundle_json(&bundle)?),
    }
    // Keep stdout clean for piping; the summary goes to stderr.
    Ok(match bundle.deviation {
        Some(d) if !bundle.deviation_ok() => {
            eprintln!(
                "error: max |analytic - numeric| = {} exceeds tolerance",
                num(d)
            );
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let base = args.params.resolve()?;
    let grid = SweepGrid::new(base, args.axes.clone());
    let rows = run_sweep(&grid, args.threads)?;
    let format = ExportFormat::from(args.format);
    match &args.out {
        Some(path) => export_sweep(&rows, format, path)?,
        None => {
            let text = match format {
                ExportFormat::Csv => njc_core::experiments::sweep_csv(&rows)?,
                ExportFormat::Json => njc_core::experiments::sweep_json(&rows)?,
            };
            emit(&text);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(
    args: &ParamArgs,
    t_end: f64,
    step: f64,
    format: TextOrJson,
    corrupt: Option<f64>,
) -> Result<ExitCode> {
    let params = args.resolve()?;
    warn_regime(&params);
    let options = ValidationOptions {
        t_end,
        step,
        lambda6_shift: C64::new(0.0, corrupt.unwrap_or(0.0)),
    };
    let report = validate(&params, &options)?;
    match format {
        TextOrJson::Json => emitln!("{}", serde_json::to_string_pretty(&report)?),
        TextOrJson::Text => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                emitln!(
                    "{tag} {:<26} {:>10.3e} <= {:.0e}",
                    c.name,
                    c.value,
                    c.threshold
                );
            }
        }
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Spectrum { params, format } => cmd_spectrum(&params, format),
        Command::Figure { n, out, solvers } => cmd_figure(n, &out, solvers),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Validate {
            params,
            t_end,
            step,
            format,
            corrupt_lambda,
        } => cmd_validate(&params, t_end, step, format, corrupt_lambda),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
