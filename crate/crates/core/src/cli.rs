//! `dimer` command-line front end. Physical inputs are ratios to `j`.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage or
//! parameter error. Data goes to stdout or `--out`; messages to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eig;
use crate::measures::{classify_phase, Phase, ResourceReport, PHASE_TOL};
use crate::model::{analytic_spectrum, build_hamiltonian, ModelParams};
use crate::sweep::{
    render_table, run_sweep_with, AxisSpec, GridSpec, Quantity, SweepOptions, TableFormat,
};
use crate::thermal::{Temperature, ThermalState};
use crate::verify::{run_verification, DEFAULT_SAMPLES, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dimer",
    version,
    about = "Spin-1 Heisenberg dimer: thermal quantum resources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate all quantifiers at one point and print JSON.
    Eval(EvalArgs),
    /// Compare the analytic spectrum with numeric diagonalization.
    Spectrum(SpectrumArgs),
    /// Sweep two parameters over a grid and write a CSV or JSON table.
    Sweep(SweepArgs),
    /// Zero-temperature negativity phase map.
    Phase(PhaseArgs),
    /// Cross-check closed forms against numeric oracles on random draws.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Single-ion anisotropy D.
    #[arg(
        long = "d",
        visible_alias = "d-ani",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub d_ani: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub h: f64,
}

impl ModelArgs {
    /// Inputs are ratios to `j`; the Hamiltonian is built in absolute units.
    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.j,
            self.delta * self.j,
            self.d_ani * self.j,
            self.h * self.j,
        )
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Use the generic (eigenvalue/projector) quantifiers instead of the
    /// closed forms.
    #[arg(long)]
    pub generic: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `name:min:max:steps` with name in h, d, delta, t.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// JSON grid specification; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long = "d", visible_alias = "d-ani", allow_negative_numbers = true)]
    pub d_ani: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Comma-separated subset of c_l1, c_r, negativity, steering, phase.
    #[arg(long, value_delimiter = ',')]
    pub quantities: Option<Vec<String>>,
    #[arg(long)]
    pub zero_t_plane: bool,
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long)]
    pub oracle_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json; defaults to the `--out` extension, else csv.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value = "h:0:6:201", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "d:-6:6:201", allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, default_value_t = PHASE_TOL)]
    pub phase_tol: f64,
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub n: usize,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Unsupported(_) => EXIT_USAGE,
        Error::Numeric(_) | Error::Io { .. } | Error::Serde(_) => EXIT_FAILURE,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Spectrum(a) => cmd_spectrum(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Phase(a) => cmd_phase(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    schema_version: u32,
    j: f64,
    delta: f64,
    d_ani: f64,
    h: f64,
    t: f64,
    c_l1: f64,
    c_r: f64,
    negativity: f64,
    steering_s: f64,
    steerable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<Phase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_rank: Option<usize>,
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let p = a.model.params()?;
    let t = Temperature::new(a.t * p.j)?;
    let state = ThermalState::at(&p, t)?;
    let report = if a.generic {
        ResourceReport::evaluate(&state)?
    } else {
        ResourceReport::evaluate_thermal(&state)?
    };
    let doc = EvalOutput {
        schema_version: crate::SCHEMA_VERSION,
        j: p.j,
        delta: a.model.delta,
        d_ani: a.model.d_ani,
        h: a.model.h,
        t: a.t,
        c_l1: report.c_l1,
        c_r: report.c_r,
        negativity: report.negativity,
        steering_s: report.steering_s,
        steerable: report.steerable,
        phase: t
            .is_zero()
            .then(|| classify_phase(report.negativity, PHASE_TOL)),
        ground_rank: state.ground_rank,
    };
    let text = serde_json::to_string_pretty(&doc)?;
    writeln!(out, "{text}").map_err(stdout_err)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    /// 1-based index of the analytic eigenpair.
    pub index: usize,
    pub analytic: f64,
    /// Numeric eigenvalue paired by rank with the analytic one.
    pub numeric: f64,
    /// `‖Ĥψᵢ − Eᵢψᵢ‖`.
    pub residual: f64,
}

pub fn spectrum_rows(p: &ModelParams) -> Result<Vec<SpectrumRow>> {
    let spec = analytic_spectrum(p)?;
    let h = build_hamiltonian(p)?;
    let numeric = symmetric_eig(&h)?.values;
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&a, &b| {
        spec.energies[a]
            .total_cmp(&spec.energies[b])
            .then(a.cmp(&b))
    });
    let mut paired = [0.0; 9];
    for (rank, &i) in order.iter().enumerate() {
        paired[i] = numeric[rank];
    }
    Ok((0..9)
        .map(|i| {
            let psi = &spec.eigenvectors[i];
            let hv = h.mat_vec(psi);
            let residual = hv
                .iter()
                .zip(psi)
                .map(|(x, y)| (x - spec.energies[i] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            SpectrumRow {
                index: i + 1,
                analytic: spec.energies[i],
                numeric: paired[i],
                residual,
            }
        })
        .collect())
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<i32> {
    let p = a.model.params()?;
    let rows = spectrum_rows(&p)?;
    if a.json {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            params: ModelParams,
            rows: &'a [SpectrumRow],
        }
        let text = serde_json::to_string_pretty(&Doc {
            schema_version: crate::SCHEMA_VERSION,
            params: p,
            rows: &rows,
        })?;
        writeln!(out, "{text}").map_err(stdout_err)?;
    } else {
        let min = rows
            .iter()
            .map(|r| r.analytic)
            .fold(f64::INFINITY, f64::min);
        writeln!(
            out,
            "{:>5} {:>22} {:>22} {:>10}",
            "index", "analytic", "numeric", "residual"
        )
        .map_err(stdout_err)?;
        for r in &rows {
            writeln!(
                out,
                "{:>5} {:>22.15} {:>22.15} {:>10.2e}{}",
                format!("psi{}", r.index),
                r.analytic,
                r.numeric,
                r.residual,
                if r.analytic == min { "  ground" } else { "" }
            )
            .map_err(stdout_err)?;
        }
    }
    Ok(EXIT_OK)
}

fn resolve_format(format: Option<&str>, out: Option<&PathBuf>) -> Result<TableFormat> {
    match (format, out) {
        (Some(f), _) => f.parse(),
        (None, Some(path)) => Ok(TableFormat::from_path(path)),
        (None, None) => Ok(TableFormat::Csv),
    }
}

fn emit_table(
    result: &crate::sweep::GridResult,
    format: TableFormat,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    match path {
        Some(path) => crate::sweep::write_table(result, format, path),
        None => out
            .write_all(render_table(result, format)?.as_bytes())
            .map_err(stdout_err),
    }
}

pub fn sweep_spec(a: &SweepArgs) -> Result<GridSpec> {
    let mut spec = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str::<GridSpec>(&text)
                .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?
        }
        None => {
            let (Some(x), Some(y)) = (&a.x, &a.y) else {
                return Err(Error::invalid("sweep needs --x and --y, or --config"));
            };
            GridSpec::new(x.parse()?, y.parse()?, Default::default())
        }
    };
    if a.config.is_some() {
        if let Some(x) = &a.x {
            spec.axis_x = x.parse::<AxisSpec>()?;
        }
        if let Some(y) = &a.y {
            spec.axis_y = y.parse::<AxisSpec>()?;
        }
    }
    let f = &mut spec.fixed;
    for (slot, v) in [
        (&mut f.j, a.j),
        (&mut f.delta, a.delta),
        (&mut f.d_ani, a.d_ani),
        (&mut f.h, a.h),
        (&mut f.t, a.t),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if let Some(q) = &a.quantities {
        spec.quantities = q
            .iter()
            .map(|s| s.parse::<Quantity>())
            .collect::<Result<_>>()?;
    }
    if a.zero_t_plane {
        spec.zero_t_plane = true;
    }
    if a.degeneracy_tol.is_some() {
        spec.degeneracy_tol = a.degeneracy_tol;
    }
    if let Some(s) = a.oracle_seed {
        spec.oracle_seed = s;
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let spec = sweep_spec(a)?;
    let format = resolve_format(a.format.as_deref(), a.out.as_ref())?;
    let result = run_sweep_with(&spec, SweepOptions { workers: a.workers })?;
    emit_table(&result, format, a.out.as_ref(), out)?;
    let m = &result.metadata;
    let _ = writeln!(
        err,
        "sweep: {} points, {} oracle-checked (max deviation {:.2e}), {:.2}s",
        m.points,
        m.oracle_checked,
        m.oracle_max_deviation,
        m.finished_unix_s - m.started_unix_s
    );
    Ok(EXIT_OK)
}

fn cmd_phase(a: &PhaseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let x: AxisSpec = a.x.parse()?;
    let y: AxisSpec = a.y.parse()?;
    if x.name == crate::sweep::AxisName::T || y.name == crate::sweep::AxisName::T {
        return Err(Error::invalid(
            "phase maps are at t = 0; sweep h, d or delta",
        ));
    }
    let mut spec = GridSpec::new(x, y, Default::default());
    spec.fixed.j = a.j;
    spec.fixed.delta = a.delta;
    spec.quantities = vec![Quantity::Negativity, Quantity::Phase];
    spec.phase_tol = a.phase_tol;
    spec.degeneracy_tol = a.degeneracy_tol;
    spec.validate()?;
    let format = resolve_format(a.format.as_deref(), a.out.as_ref())?;
    let result = run_sweep_with(&spec, SweepOptions { workers: a.workers })?;
    emit_table(&result, format, a.out.as_ref(), out)?;

    let mut counts = [0usize; 4];
    let mut crossings = 0usize;
    for r in &result.rows {
        let k = match r.phase {
            Some(Phase::RegionI) => 0,
            Some(Phase::RegionII) => 1,
            Some(Phase::RegionIII) => 2,
            _ => 3,
        };
        counts[k] += 1;
        if r.ground_rank.unwrap_or(1) > 1 {
            crossings += 1;
        }
    }
    let _ = writeln!(
        err,
        "phase map delta={}: region_i={} region_ii={} region_iii={} unclassified={} level_crossings={}",
        a.delta, counts[0], counts[1], counts[2], counts[3], crossings
    );
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let report = run_verification(a.seed, a.n)?;
    if a.json {
        let text = serde_json::to_string_pretty(&report)?;
        writeln!(out, "{text}").map_err(stdout_err)?;
    } else {
        writeln!(out, "{report}").map_err(stdout_err)?;
    }
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        for c in report.checks.iter().filter(|c| !c.passed()) {
            if let Some(d) = &c.worst {
                let _ = writeln!(err, "verification failed: {} at {d}", c.name);
            }
        }
        Ok(EXIT_FAILURE)
    }
}
