//! Two-dimensional parameter sweeps and their tabular output.
//!
//! Grid points are independent, so they are evaluated in parallel and then
//! reassembled x-major (y ascending within each x). Output never depends on
//! the worker count.
//!
//! Finite-temperature points use the closed-form thermal state and the
//! block-structure quantifiers. A deterministic random subsample (at least 1%
//! of the grid) is recomputed through the spectral oracle and the generic
//! quantifier definitions; a deviation above [`ORACLE_TOL`] aborts the sweep.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{classify_phase, Phase, ResourceReport, PHASE_TOL};
use crate::model::ModelParams;
use crate::thermal::{gibbs_closed_form, gibbs_oracle, ground_state, Temperature, ThermalState};

/// Maximum closed-form vs. oracle deviation tolerated on the subsample.
pub const ORACLE_TOL: f64 = 1e-9;
/// Significant digits of floats in CSV output.
pub const CSV_DIGITS: usize = 12;
const DEFAULT_ORACLE_SEED: u64 = 0x5eed_d1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "d_ani", alias = "d", alias = "D")]
    DAni,
    #[serde(rename = "delta", alias = "Delta")]
    Delta,
    #[serde(rename = "t")]
    T,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::H => "h",
            AxisName::DAni => "d_ani",
            AxisName::Delta => "delta",
            AxisName::T => "t",
        }
    }
}

impl FromStr for AxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(AxisName::H),
            "d" | "D" | "d_ani" => Ok(AxisName::DAni),
            "delta" | "Delta" => Ok(AxisName::Delta),
            "t" | "T" => Ok(AxisName::T),
            other => Err(Error::invalid(format!(
                "unknown axis '{other}' (expected h, d_ani, delta or t)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// `name:min:max:steps`, e.g. `h:-6:6:201`.
impl FromStr for AxisSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::invalid(format!(
                "axis '{s}' must look like name:min:max:steps"
            )));
        }
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("axis '{s}': '{x}' is not a number")))
        };
        Ok(AxisSpec {
            name: parts[0].trim().parse()?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            steps: parts[3]
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("axis '{s}': bad step count")))?,
        })
    }
}

/// Values of the parameters that are not swept. Axis and fixed values of
/// `delta`, `d_ani`, `h` and `t` are ratios to `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub d_ani: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub t: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            j: 1.0,
            delta: 0.0,
            d_ani: 0.0,
            h: 0.0,
            t: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    CL1,
    CR,
    Negativity,
    Steering,
    Phase,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::CL1,
        Quantity::CR,
        Quantity::Negativity,
        Quantity::Steering,
        Quantity::Phase,
    ];
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "c_l1" => Ok(Quantity::CL1),
            "c_r" => Ok(Quantity::CR),
            "negativity" => Ok(Quantity::Negativity),
            "steering" | "steering_s" => Ok(Quantity::Steering),
            "phase" => Ok(Quantity::Phase),
            other => Err(Error::invalid(format!("unknown quantity '{other}'"))),
        }
    }
}

fn all_quantities() -> Vec<Quantity> {
    Quantity::ALL.to_vec()
}

fn default_phase_tol() -> f64 {
    PHASE_TOL
}

fn default_seed() -> u64 {
    DEFAULT_ORACLE_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axis_x: AxisSpec,
    pub axis_y: AxisSpec,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default = "all_quantities")]
    pub quantities: Vec<Quantity>,
    /// Ground-manifold tolerance at `t = 0`; defaults to `1e-9 · j`.
    #[serde(default)]
    pub degeneracy_tol: Option<f64>,
    /// Allows a swept `t` axis to start at exactly zero.
    #[serde(default)]
    pub zero_t_plane: bool,
    #[serde(default = "default_phase_tol")]
    pub phase_tol: f64,
    /// Seed selecting the oracle-checked subsample.
    #[serde(default = "default_seed")]
    pub oracle_seed: u64,
}

impl GridSpec {
    pub fn new(axis_x: AxisSpec, axis_y: AxisSpec, fixed: FixedParams) -> Self {
        GridSpec {
            axis_x,
            axis_y,
            fixed,
            quantities: all_quantities(),
            degeneracy_tol: None,
            zero_t_plane: false,
            phase_tol: PHASE_TOL,
            oracle_seed: DEFAULT_ORACLE_SEED,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GridSpec =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("grid spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn wants(&self, q: Quantity) -> bool {
        self.quantities.contains(&q)
    }

    pub fn point_count(&self) -> usize {
        self.axis_x.steps * self.axis_y.steps
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol.unwrap_or(1e-9 * self.fixed.j)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in [&self.axis_x, &self.axis_y] {
            let name = axis.name.as_str();
            if axis.steps < 2 {
                return Err(Error::invalid(format!(
                    "axis {name} needs at least 2 steps"
                )));
            }
            if !axis.min.is_finite() || !axis.max.is_finite() || axis.min >= axis.max {
                return Err(Error::invalid(format!(
                    "axis {name} needs finite min < max, got [{}, {}]",
                    axis.min, axis.max
                )));
            }
            if axis.name == AxisName::T {
                if axis.min < 0.0 {
                    return Err(Error::invalid("temperature axis must be non-negative"));
                }
                if axis.min == 0.0 && !self.zero_t_plane {
                    return Err(Error::invalid(
                        "temperature axis starts at 0; set zero_t_plane to allow it",
                    ));
                }
            }
        }
        if self.axis_x.name == self.axis_y.name {
            return Err(Error::invalid("swept parameters must be distinct"));
        }
        if self.phase_tol.is_nan() || self.phase_tol <= 0.0 {
            return Err(Error::invalid("phase_tol must be positive"));
        }
        if self.degeneracy_tol().is_nan() || self.degeneracy_tol() <= 0.0 {
            return Err(Error::invalid("degeneracy_tol must be positive"));
        }
        Temperature::new(self.fixed.t)?;
        ModelParams::new(
            self.fixed.j,
            self.fixed.delta,
            self.fixed.d_ani,
            self.fixed.h,
        )?;
        Ok(())
    }

    fn point(&self, x: f64, y: f64) -> Result<(ModelParams, Temperature)> {
        let mut f = self.fixed;
        for (axis, v) in [(self.axis_x.name, x), (self.axis_y.name, y)] {
            match axis {
                AxisName::H => f.h = v,
                AxisName::DAni => f.d_ani = v,
                AxisName::Delta => f.delta = v,
                AxisName::T => f.t = v,
            }
        }
        Ok((
            ModelParams::new(f.j, f.delta * f.j, f.d_ani * f.j, f.h * f.j)?,
            Temperature::new(f.t * f.j)?,
        ))
    }
}

/// One grid point. Quantities not requested are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub c_l1: Option<f64>,
    pub c_r: Option<f64>,
    pub negativity: Option<f64>,
    pub steering_s: Option<f64>,
    pub steerable: Option<bool>,
    pub phase: Option<Phase>,
    /// Ground-manifold dimension at `t = 0`; above 1 marks a level crossing.
    pub ground_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub artifact_version: String,
    pub schema_version: u32,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub points: usize,
    pub oracle_checked: usize,
    pub oracle_max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub rows: Vec<GridRow>,
    pub metadata: SweepMetadata,
}

impl GridResult {
    /// Row at grid indices (ix, iy).
    pub fn row(&self, ix: usize, iy: usize) -> &GridRow {
        &self.rows[ix * self.spec.axis_y.steps + iy]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Size of a dedicated thread pool; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

pub fn run_sweep(spec: &GridSpec) -> Result<GridResult> {
    run_sweep_with(spec, SweepOptions::default())
}

pub fn run_sweep_with(spec: &GridSpec, opts: SweepOptions) -> Result<GridResult> {
    spec.validate()?;
    let started = unix_now();
    let xs = spec.axis_x.values();
    let ys = spec.axis_y.values();
    let points: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();
    let checked = oracle_subsample(points.len(), spec.oracle_seed);

    let evaluate = || {
        points
            .par_iter()
            .enumerate()
            .map(|(k, &(x, y))| evaluate_point(spec, x, y, checked.contains(&k)))
            .collect::<Result<Vec<_>>>()
    };
    let evaluated = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::numeric(format!("thread pool: {e}")))?
            .install(evaluate)?,
        None => evaluate()?,
    };

    let oracle_max_deviation = evaluated.iter().filter_map(|(_, d)| *d).fold(0.0, f64::max);
    let rows: Vec<GridRow> = evaluated.into_iter().map(|(r, _)| r).collect();
    Ok(GridResult {
        spec: spec.clone(),
        metadata: SweepMetadata {
            artifact_version: crate::VERSION.to_string(),
            schema_version: crate::SCHEMA_VERSION,
            started_unix_s: started,
            finished_unix_s: unix_now(),
            points: rows.len(),
            oracle_checked: checked.len(),
            oracle_max_deviation,
        },
        rows,
    })
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// At least 1% of `n` point indices, chosen reproducibly from `seed`.
pub fn oracle_subsample(n: usize, seed: u64) -> HashSet<usize> {
    if n == 0 {
        return HashSet::new();
    }
    let amount = n.div_ceil(100).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, n, amount)
        .into_iter()
        .collect()
}

fn evaluate_point(
    spec: &GridSpec,
    x: f64,
    y: f64,
    oracle_check: bool,
) -> Result<(GridRow, Option<f64>)> {
    let (p, t) = spec.point(x, y)?;
    let at = |e: Error| {
        Error::numeric(format!(
            "grid point j={} delta={} d_ani={} h={} t={}: {e}",
            p.j,
            p.delta,
            p.d_ani,
            p.h,
            t.value()
        ))
    };
    let state = if t.is_zero() {
        ground_state(&p, spec.degeneracy_tol())
    } else {
        gibbs_closed_form(&p, t)
    }
    .map_err(at)?;
    let report = ResourceReport::evaluate_thermal(&state).map_err(at)?;

    let deviation = if oracle_check {
        let reference_state: ThermalState = if t.is_zero() {
            state.clone()
        } else {
            gibbs_oracle(&p, t).map_err(at)?
        };
        let reference = ResourceReport::evaluate(&reference_state).map_err(at)?;
        let dev = report
            .max_deviation(&reference)
            .max(state.rho.max_abs_diff(&reference_state.rho));
        if dev.is_nan() || dev > ORACLE_TOL {
            return Err(at(Error::numeric(format!(
                "closed form deviates from oracle by {dev:e}"
            ))));
        }
        Some(dev)
    } else {
        None
    };

    let phase = if t.is_zero() && spec.wants(Quantity::Phase) {
        Some(classify_phase(report.negativity, spec.phase_tol))
    } else {
        None
    };
    let steering = spec.wants(Quantity::Steering);
    Ok((
        GridRow {
            x,
            y,
            c_l1: spec.wants(Quantity::CL1).then_some(report.c_l1),
            c_r: spec.wants(Quantity::CR).then_some(report.c_r),
            negativity: spec
                .wants(Quantity::Negativity)
                .then_some(report.negativity),
            steering_s: steering.then_some(report.steering_s),
            steerable: steering.then_some(report.steerable),
            phase,
            ground_rank: state.ground_rank,
        },
        deviation,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::invalid(format!("unknown table format '{other}'"))),
        }
    }
}

impl TableFormat {
    /// `.json` → JSON, anything else → CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TableFormat::Json,
            _ => TableFormat::Csv,
        }
    }
}

pub fn write_table(result: &GridResult, format: TableFormat, path: &Path) -> Result<()> {
    let text = render_table(result, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn render_table(result: &GridResult, format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => Ok(to_csv(result)),
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(result)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn csv_header(result: &GridResult) -> String {
    format!(
        "{},{},c_l1,c_r,negativity,steering_s,steerable,phase",
        result.spec.axis_x.name.as_str(),
        result.spec.axis_y.name.as_str()
    )
}

pub fn to_csv(result: &GridResult) -> String {
    let mut out = String::with_capacity(result.rows.len() * 96);
    out.push_str(&csv_header(result));
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, CSV_DIGITS)).unwrap_or_default();
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig(r.x, CSV_DIGITS),
            format_sig(r.y, CSV_DIGITS),
            opt(r.c_l1),
            opt(r.c_r),
            opt(r.negativity),
            opt(r.steering_s),
            r.steerable.map(|b| b.to_string()).unwrap_or_default(),
            r.phase.map(|p| p.as_str()).unwrap_or_default(),
        );
    }
    out
}

/// A CSV table read back from [`to_csv`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub x_name: String,
    pub y_name: String,
    pub rows: Vec<GridRow>,
}

pub fn parse_csv(text: &str) -> Result<ParsedTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::invalid("empty table"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() != 8
        || cols[2..]
            != [
                "c_l1",
                "c_r",
                "negativity",
                "steering_s",
                "steerable",
                "phase",
            ]
    {
        return Err(Error::invalid(format!("unexpected header '{header}'")));
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| Error::invalid(format!("bad number '{s}'")))
        }
    };
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::invalid(format!("row {}: expected 8 fields", k + 1)));
        }
        rows.push(GridRow {
            x: num(f[0])?.ok_or_else(|| Error::invalid("missing x"))?,
            y: num(f[1])?.ok_or_else(|| Error::invalid("missing y"))?,
            c_l1: num(f[2])?,
            c_r: num(f[3])?,
            negativity: num(f[4])?,
            steering_s: num(f[5])?,
            steerable: match f[6] {
                "" => None,
                "true" => Some(true),
                "false" => Some(false),
                other => return Err(Error::invalid(format!("bad flag '{other}'"))),
            },
            phase: match f[7] {
                "" => None,
                s => Some(
                    Phase::parse(s).ok_or_else(|| Error::invalid(format!("bad phase '{s}'")))?,
                ),
            },
            ground_rank: None,
        });
    }
    Ok(ParsedTable {
        x_name: cols[0].to_string(),
        y_name: cols[1].to_string(),
        rows,
    })
}

/// `%.{sig}g`-style formatting: shortest of fixed/scientific, trailing zeros
/// trimmed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to `sig` significant digits through the CSV formatter.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    format_sig(x, sig).parse().unwrap_or(x)
}
