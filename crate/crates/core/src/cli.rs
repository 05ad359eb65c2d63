//! Command-line front end: `simulate`, `verify`, `sweep`.
//!
//! Configuration lives in a TOML file; every numeric flag overrides the
//! corresponding config value. Exit codes: 0 success, 1 validation error,
//! 2 verification failure, 3 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::aux_solutions::{analytic_basis, numeric_basis, AuxiliaryBasis, BasisInitialConditions};
use crate::driving::{driving_integrals, DrivingIntegrals};
use crate::oracle::{init_squeezed_wavefunction, GridWavefunction, SpatialGrid};
use crate::phase_space::{
    covariance, expect_xp_alpha_z, expect_xp_from_initial, expect_xp_z_alpha,
    solve_alpha_given_z, uncertainty_product, InitialPhasePoint, Representation,
    SqueezeParameters,
};
use crate::systems::{make_system, SystemKind, SystemParams, SystemSpec};
use crate::verify::{run_suite, suite_passed, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_VERIFICATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Verification,
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid input: {msg}"),
            CliError::Verification => write!(f, "verification failed"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Verification => EXIT_VERIFICATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn numerical(err: impl std::fmt::Display) -> CliError {
    CliError::Numerical(err.to_string())
}

// ---------------------------------------------------------------------------
// configuration

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemBlock,
    pub initial: InitialBlock,
    pub time: TimeBlock,
    pub oracle: OracleBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemBlock {
    pub kind: Option<String>,
    pub omega: Option<f64>,
    #[serde(rename = "Omega")]
    pub big_omega: Option<f64>,
    pub kappa: Option<f64>,
    /// Custom coefficient expressions in the variable `t`.
    pub g2: Option<String>,
    pub g1: Option<String>,
    pub g0: Option<String>,
    /// Integration-constant overrides for custom systems.
    pub c1_0: Option<f64>,
    pub c2_0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialBlock {
    pub rep: Option<String>,
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeBlock {
    pub tau_max: f64,
    pub dt_out: f64,
}

impl Default for TimeBlock {
    fn default() -> Self {
        TimeBlock {
            tau_max: std::f64::consts::TAU,
            dt_out: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleBlock {
    pub enabled: bool,
    pub grid_n: usize,
    pub domain: f64,
    pub dt: f64,
}

impl Default for OracleBlock {
    fn default() -> Self {
        OracleBlock {
            enabled: false,
            grid_n: 4096,
            domain: 30.0,
            dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub plot: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| validation(format!("config parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "sqdyn",
    about = "Squeezed-state dynamics in time-dependent quadratic potentials",
    version
)]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a squeezed state and emit its trajectory and moments.
    Simulate(SimulateArgs),
    /// Run the invariant suite and print a pass/fail matrix.
    Verify(VerifyArgs),
    /// Tabulate uncertainty products over one or two parameters.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct OverrideArgs {
    /// harmonic | free | linear | driven | repulsive | custom
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long = "Omega")]
    pub big_omega: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Coherent amplitude |alpha| for the alpha-z representation.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// xp | alpha-z | z-alpha
    #[arg(long)]
    pub rep: Option<String>,
    #[arg(long = "tau-max")]
    pub tau_max: Option<f64>,
    #[arg(long = "dt-out")]
    pub dt_out: Option<f64>,
    /// Also propagate on the grid and write `<out>.oracle.csv`.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    #[arg(long = "grid-domain")]
    pub grid_domain: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Write SVG line plots next to the data file.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Skip the grid-oracle comparison.
    #[arg(long = "skip-oracle")]
    pub skip_oracle: bool,
    /// Tolerance for algebraic identities.
    #[arg(long = "engine-tol", default_value_t = 1e-9)]
    pub engine_tol: f64,
    /// Absolute tolerance on oracle first moments.
    #[arg(long = "oracle-mean-tol", default_value_t = 1e-5)]
    pub oracle_mean_tol: f64,
    /// Relative tolerance on oracle variances.
    #[arg(long = "oracle-var-tol", default_value_t = 1e-4)]
    pub oracle_var_tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub overrides: OverrideArgs,
    /// First sweep parameter: r | theta | omega | Omega | kappa
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated values for --param.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Optional second sweep parameter.
    #[arg(long)]
    pub param2: Option<String>,
    /// Comma-separated values for --param2.
    #[arg(long, allow_hyphen_values = true)]
    pub values2: Option<String>,
}

impl OverrideArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.system;
        if self.system.is_some() {
            s.kind = self.system.clone();
        }
        if self.omega.is_some() {
            s.omega = self.omega;
        }
        if self.big_omega.is_some() {
            s.big_omega = self.big_omega;
        }
        if self.kappa.is_some() {
            s.kappa = self.kappa;
        }
        let i = &mut cfg.initial;
        if self.rep.is_some() {
            i.rep = self.rep.clone();
        }
        if self.x0.is_some() {
            i.x0 = self.x0;
        }
        if self.p0.is_some() {
            i.p0 = self.p0;
        }
        if self.r.is_some() {
            i.r = self.r;
        }
        if self.theta.is_some() {
            i.theta = self.theta;
        }
        if self.alpha.is_some() {
            i.alpha = self.alpha;
        }
        if self.delta.is_some() {
            i.delta = self.delta;
        }
        if let Some(t) = self.tau_max {
            cfg.time.tau_max = t;
        }
        if let Some(d) = self.dt_out {
            cfg.time.dt_out = d;
        }
        if self.oracle {
            cfg.oracle.enabled = true;
        }
        if let Some(n) = self.grid_n {
            cfg.oracle.grid_n = n;
        }
        if let Some(d) = self.grid_domain {
            cfg.oracle.domain = d;
        }
        if self.out.is_some() {
            cfg.output.out = self.out.clone();
        }
        if self.format.is_some() {
            cfg.output.format = self.format.clone();
        }
        if self.plot {
            cfg.output.plot = true;
        }
    }
}

// ---------------------------------------------------------------------------
// simulation assembly

struct Simulation {
    system: SystemSpec,
    basis: Arc<AuxiliaryBasis>,
    driving: DrivingIntegrals,
    route: Route,
    r: f64,
    theta: f64,
}

enum Route {
    Xp(InitialPhasePoint),
    AlphaZ(SqueezeParameters),
    ZAlpha(SqueezeParameters),
}

fn parse_kind(name: &str) -> Result<SystemKind, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "harmonic" | "ho" => Ok(SystemKind::Harmonic),
        "free" | "fp" => Ok(SystemKind::Free),
        "linear" | "lp" => Ok(SystemKind::Linear),
        "driven" | "dho" => Ok(SystemKind::Driven),
        "repulsive" | "ro" => Ok(SystemKind::Repulsive),
        "custom" => Ok(SystemKind::Custom),
        other => Err(validation(format!(
            "unknown system `{other}` (expected harmonic|free|linear|driven|repulsive|custom)"
        ))),
    }
}

fn build_system(cfg: &RunConfig) -> Result<SystemSpec, CliError> {
    let block = &cfg.system;
    let kind_name = block
        .kind
        .as_deref()
        .ok_or_else(|| validation("no system selected (use --system or the config file)"))?;
    let kind = parse_kind(kind_name)?;
    if kind == SystemKind::Custom {
        let g2_src = block
            .g2
            .as_deref()
            .ok_or_else(|| validation("custom system requires a g2 expression"))?;
        let g2 = crate::expr::parse(g2_src)
            .map_err(|e| validation(format!("g2 expression: {e}")))?;
        let parse_opt = |name: &str, src: &Option<String>| match src {
            Some(s) => crate::expr::parse(s)
                .map_err(|e| validation(format!("{name} expression: {e}"))),
            None => Ok(crate::expr::CoefficientFn::zero()),
        };
        let g1 = parse_opt("g1", &block.g1)?;
        let g0 = parse_opt("g0", &block.g0)?;
        return Ok(SystemSpec::custom(g2, g1, g0));
    }
    for (name, value) in [("g2", &block.g2), ("g1", &block.g1), ("g0", &block.g0)] {
        if value.is_some() {
            return Err(validation(format!(
                "{name} expression is only valid for custom systems"
            )));
        }
    }
    make_system(
        kind,
        SystemParams {
            omega: block.omega,
            big_omega: block.big_omega,
            kappa: block.kappa,
            ..SystemParams::default()
        },
    )
    .map_err(|e| validation(e.to_string()))
}

fn build_simulation(cfg: &RunConfig) -> Result<Simulation, CliError> {
    if !(cfg.time.tau_max > 0.0) {
        return Err(validation(format!(
            "tau_max must be positive, got {}",
            cfg.time.tau_max
        )));
    }
    if !(cfg.time.dt_out > 0.0) {
        return Err(validation(format!(
            "dt_out must be positive, got {}",
            cfg.time.dt_out
        )));
    }
    let system = build_system(cfg)?;
    let (basis, driving) = if system.kind() == SystemKind::Custom {
        let span = cfg.time.tau_max + cfg.time.dt_out;
        let basis = Arc::new(
            numeric_basis(
                system.g2(),
                BasisInitialConditions::natural(),
                span,
                1e-11,
            )
            .map_err(numerical)?,
        );
        let d = DrivingIntegrals::with_constants(
            basis.clone(),
            system.g1(),
            1e-10,
            cfg.system.c1_0.unwrap_or(0.0),
            cfg.system.c2_0.unwrap_or(0.0),
        );
        (basis, d)
    } else {
        if cfg.system.c1_0.is_some() || cfg.system.c2_0.is_some() {
            return Err(validation(
                "integration-constant overrides are only valid for custom systems",
            ));
        }
        let basis = Arc::new(analytic_basis(&system).map_err(numerical)?);
        let d = driving_integrals(basis.clone(), system.g1(), &system, 1e-10)
            .map_err(numerical)?;
        (basis, d)
    };

    let i = &cfg.initial;
    let r = i.r.unwrap_or(0.0);
    let theta = i.theta.unwrap_or(0.0);
    let rep = i.rep.as_deref().unwrap_or("xp");
    let require = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| validation(format!("representation `{rep}` requires `{name}`")))
    };
    let forbid = |name: &str, v: Option<f64>| {
        if v.is_some() {
            Err(validation(format!(
                "`{name}` is not meaningful in the `{rep}` representation"
            )))
        } else {
            Ok(())
        }
    };
    let route = match rep {
        "xp" => {
            forbid("alpha", i.alpha)?;
            forbid("delta", i.delta)?;
            Route::Xp(InitialPhasePoint::new(
                i.x0.unwrap_or(0.0),
                i.p0.unwrap_or(0.0),
            ))
        }
        "alpha-z" => {
            forbid("x0", i.x0)?;
            forbid("p0", i.p0)?;
            let params = SqueezeParameters::new(
                require("alpha", i.alpha)?,
                i.delta.unwrap_or(0.0),
                r,
                theta,
                Representation::AlphaZ,
            )
            .map_err(|e| validation(e.to_string()))?;
            Route::AlphaZ(params)
        }
        "z-alpha" => {
            forbid("alpha", i.alpha)?;
            forbid("delta", i.delta)?;
            let point =
                InitialPhasePoint::new(i.x0.unwrap_or(0.0), i.p0.unwrap_or(0.0));
            let params = solve_alpha_given_z(point, r, theta, &basis, &driving)
                .map_err(numerical)?;
            Route::ZAlpha(params)
        }
        other => {
            return Err(validation(format!(
                "unknown representation `{other}` (expected xp|alpha-z|z-alpha)"
            )))
        }
    };
    Ok(Simulation {
        system,
        basis,
        driving,
        route,
        r,
        theta,
    })
}

// ---------------------------------------------------------------------------
// trajectory emission

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TrajectoryRow {
    pub tau: f64,
    pub x: f64,
    pub p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
    pub product: f64,
}

pub const CSV_HEADER: &str = "tau,x,p,var_x,var_p,cov_xp,product";

impl Simulation {
    fn row(&self, tau: f64) -> Result<TrajectoryRow, CliError> {
        let (x, p) = match &self.route {
            Route::Xp(point) => {
                expect_xp_from_initial(&self.basis, &self.driving, *point, tau)
            }
            Route::AlphaZ(params) => {
                expect_xp_alpha_z(params, &self.basis, &self.driving, tau)
            }
            Route::ZAlpha(params) => {
                expect_xp_z_alpha(params, &self.basis, &self.driving, tau)
            }
        }
        .map_err(numerical)?;
        let cov = covariance(&self.basis, self.r, self.theta, tau).map_err(numerical)?;
        Ok(TrajectoryRow {
            tau,
            x,
            p,
            var_x: cov.var_x,
            var_p: cov.var_p,
            cov_xp: cov.cov_xp,
            product: uncertainty_product(&cov),
        })
    }

    fn output_times(&self, time: &TimeBlock) -> Vec<f64> {
        let steps = (time.tau_max / time.dt_out).round() as usize;
        let mut times: Vec<f64> = (0..=steps.max(1))
            .map(|i| (i as f64 * time.dt_out).min(time.tau_max))
            .collect();
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        times
    }

    fn initial_point(&self) -> Result<InitialPhasePoint, CliError> {
        let row = self.row(0.0)?;
        Ok(InitialPhasePoint::new(row.x, row.p))
    }
}

fn format_value(v: f64) -> String {
    // 17 significant digits: enough for exact f64 round-trips
    format!("{v:.16e}")
}

pub fn rows_to_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [r.tau, r.x, r.p, r.var_x, r.var_p, r.cov_xp, r.product];
        let line: Vec<String> = fields.iter().map(|v| format_value(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[TrajectoryRow]) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("serializable rows");
    text.push('\n');
    text
}

pub fn parse_csv(text: &str) -> Result<Vec<TrajectoryRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(validation(format!(
                "unexpected CSV header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| validation(format!("bad CSV field: {e}")))?;
        if fields.len() != 7 {
            return Err(validation(format!(
                "expected 7 CSV fields, got {}",
                fields.len()
            )));
        }
        rows.push(TrajectoryRow {
            tau: fields[0],
            x: fields[1],
            p: fields[2],
            var_x: fields[3],
            var_p: fields[4],
            cov_xp: fields[5],
            product: fields[6],
        });
    }
    Ok(rows)
}

/// Minimal self-contained SVG line plot of one (x, y) series.
pub fn render_svg(title: &str, xs: &[f64], ys: &[f64]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let (x_min, x_max) = bounds(xs);
    let (y_min, y_max) = bounds(ys);
    let sx = |x: f64| M + (x - x_min) / (x_max - x_min).max(f64::MIN_POSITIVE) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y_min) / (y_max - y_min).max(f64::MIN_POSITIVE) * (H - 2.0 * M);
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
        .collect();
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" "#,
            r#"viewBox="0 0 {w} {h}">"#,
            r#"<rect width="{w}" height="{h}" fill="white"/>"#,
            r#"<text x="{tx}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
            r#"<line x1="{m}" y1="{ybase}" x2="{xend}" y2="{ybase}" stroke="black"/>"#,
            r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{ybase}" stroke="black"/>"#,
            r#"<text x="{m}" y="{lbl_y}" font-family="sans-serif" font-size="11">{x0:.3} .. {x1:.3}</text>"#,
            r#"<text x="5" y="{m}" font-family="sans-serif" font-size="11">{y1:.3}</text>"#,
            r#"<text x="5" y="{ybase}" font-family="sans-serif" font-size="11">{y0:.3}</text>"#,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>"#,
            "</svg>\n"
        ),
        w = W,
        h = H,
        m = M,
        tx = W / 2.0,
        xend = W - M,
        ybase = H - M,
        lbl_y = H - M + 20.0,
        title = title,
        x0 = x_min,
        x1 = x_max,
        y0 = y_min,
        y1 = y_max,
        pts = points.join(" ")
    )
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    (lo, hi)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let sim = build_simulation(cfg)?;
    let times = sim.output_times(&cfg.time);
    let rows: Vec<TrajectoryRow> = times
        .iter()
        .map(|&tau| sim.row(tau))
        .collect::<Result<_, _>>()?;

    let format = cfg.output.format.as_deref().unwrap_or("csv");
    let body = match format {
        "csv" => rows_to_csv(&rows),
        "json" => rows_to_json(&rows),
        other => {
            return Err(validation(format!(
                "unknown format `{other}` (expected csv|json)"
            )))
        }
    };
    match &cfg.output.out {
        Some(path) => write_file(path, &body)?,
        None => {
            if cfg.output.plot || cfg.oracle.enabled {
                return Err(validation(
                    "--plot and --oracle require an output path (--out)",
                ));
            }
            print!("{body}");
            return Ok(());
        }
    }

    if cfg.output.plot {
        let out = cfg.output.out.as_ref().unwrap();
        let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
        let products: Vec<f64> = rows.iter().map(|r| r.product).collect();
        write_file(&with_suffix(out, ".x.svg"), &render_svg("<x>(tau)", &taus, &xs))?;
        write_file(
            &with_suffix(out, ".product.svg"),
            &render_svg("uncertainty product", &taus, &products),
        )?;
    }

    if cfg.oracle.enabled {
        let out = cfg.output.out.as_ref().unwrap();
        let oracle_rows = run_oracle(&sim, cfg, &times)?;
        write_file(&with_suffix(out, ".oracle.csv"), &rows_to_csv(&oracle_rows))?;
    }
    Ok(())
}

fn run_oracle(
    sim: &Simulation,
    cfg: &RunConfig,
    times: &[f64],
) -> Result<Vec<TrajectoryRow>, CliError> {
    let grid = SpatialGrid::new(cfg.oracle.grid_n, cfg.oracle.domain).map_err(numerical)?;
    let cov0 = covariance(&sim.basis, sim.r, sim.theta, 0.0).map_err(numerical)?;
    let point = sim.initial_point()?;
    let mut wf: GridWavefunction =
        init_squeezed_wavefunction(grid, point, &cov0).map_err(numerical)?;
    let mut rows = Vec::with_capacity(times.len());
    let mut current = 0.0;
    for &tau in times {
        if tau > current {
            wf.propagate(&sim.system, current, tau, cfg.oracle.dt)
                .map_err(numerical)?;
            current = tau;
        }
        let m = wf.moments();
        rows.push(TrajectoryRow {
            tau,
            x: m.mean_x,
            p: m.mean_p,
            var_x: m.var_x,
            var_p: m.var_p,
            cov_xp: m.cov_xp,
            product: m.var_x * m.var_p,
        });
    }
    Ok(rows)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let opts = VerifyOptions {
        engine_tol: args.engine_tol,
        oracle_mean_tol: args.oracle_mean_tol,
        oracle_var_tol: args.oracle_var_tol,
        with_oracle: !args.skip_oracle,
    };
    let results = run_suite(&opts);
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status}  {:<28} {}", r.name, r.detail)
            .map_err(|e| validation(e.to_string()))?;
    }
    if suite_passed(&results) {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    R,
    Theta,
    Omega,
    BigOmega,
    Kappa,
}

impl SweepParam {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "r" => Ok(SweepParam::R),
            "theta" => Ok(SweepParam::Theta),
            "omega" => Ok(SweepParam::Omega),
            "Omega" => Ok(SweepParam::BigOmega),
            "kappa" => Ok(SweepParam::Kappa),
            other => Err(validation(format!(
                "invalid sweep parameter `{other}` (expected r|theta|omega|Omega|kappa)"
            ))),
        }
    }

    fn set(self, cfg: &mut RunConfig, value: f64) {
        match self {
            SweepParam::R => cfg.initial.r = Some(value),
            SweepParam::Theta => cfg.initial.theta = Some(value),
            SweepParam::Omega => cfg.system.omega = Some(value),
            SweepParam::BigOmega => cfg.system.big_omega = Some(value),
            SweepParam::Kappa => cfg.system.kappa = Some(value),
        }
    }
}

fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| validation(format!("bad sweep value `{v}`: {e}")))
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "param1,param2,product_max,product_final";

fn cmd_sweep(args: &SweepArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let axis1 = match (&args.param, &args.values) {
        (Some(p), Some(v)) => Some((SweepParam::parse(p)?, parse_values(v)?)),
        (None, None) => None,
        _ => return Err(validation("--param and --values must be given together")),
    };
    let axis2 = match (&args.param2, &args.values2) {
        (Some(p), Some(v)) => Some((SweepParam::parse(p)?, parse_values(v)?)),
        (None, None) => None,
        _ => return Err(validation("--param2 and --values2 must be given together")),
    };
    if axis1.is_none() && axis2.is_some() {
        return Err(validation("--param2 requires --param"));
    }

    let ones = vec![f64::NAN];
    let (p1, v1) = match &axis1 {
        Some((p, v)) => (Some(*p), v),
        None => (None, &ones),
    };
    let (p2, v2) = match &axis2 {
        Some((p, v)) => (Some(*p), v),
        None => (None, &ones),
    };

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for &a in v1 {
        for &b in v2 {
            let mut c = cfg.clone();
            if let Some(p) = p1 {
                p.set(&mut c, a);
            }
            if let Some(p) = p2 {
                p.set(&mut c, b);
            }
            let sim = build_simulation(&c)?;
            let times = sim.output_times(&c.time);
            let mut product_max = f64::NEG_INFINITY;
            let mut product_final = f64::NAN;
            for &tau in &times {
                let row = sim.row(tau)?;
                product_max = product_max.max(row.product);
                product_final = row.product;
            }
            let col1 = if p1.is_some() { format_value(a) } else { String::new() };
            let col2 = if p2.is_some() { format_value(b) } else { String::new() };
            out.push_str(&format!(
                "{col1},{col2},{},{}\n",
                format_value(product_max),
                format_value(product_final)
            ));
        }
    }
    match &cfg.output.out {
        Some(path) => write_file(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// entry point

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate(args) => {
            args.overrides.apply(&mut cfg);
            cmd_simulate(&cfg)
        }
        Command::Verify(args) => cmd_verify(&args, &mut std::io::stdout()),
        Command::Sweep(args) => {
            args.overrides.apply(&mut cfg);
            cmd_sweep(&args, &cfg)
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path as well
            let is_usage = e.use_stderr();
            let _ = e.print();
            return if is_usage { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
