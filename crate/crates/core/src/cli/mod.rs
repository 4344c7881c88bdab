//! The `lineuler` command line.

pub mod figures;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Error;
use crate::field::{FieldEvaluator, SpatialGrid};
use crate::model::{GasParameters, Scenario, Support};
use crate::phase_spaces::{
    compute_M, compute_delta, compute_m, compute_m_prime, default_growth_grid, default_growth_schedule,
    growth_rate_estimate, Inverter,
};
use crate::solutions::{ForcedField, InitialDataField, InstantField, QuadratureSpec};
use crate::spectral::{
    log_radii, multiplier_probe, propagate, propagate_forced, resonance_locus, SpectralCoefficients,
};
use crate::verify::{curl_components, pde_residual_convergence, smooth_points, Forcing};

use figures::{figure_csv, figure_series, figure_table, FigureId, FigureSpec};
use output::{emit, render_svg, CsvWriter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Lib(e) => e.kind(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lineuler", version, about = "Linearized 3D Euler perturbations about a uniform flow")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output file (a directory for `figures`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Grid points per axis, `nx,ny,nz`.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<[usize; 3]>,
    /// Interval `a,b` used for every axis of the grid (or the ξ-range of `invert`).
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    /// Final time in seconds.
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Time step in seconds.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Seed for randomized sample points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write an SVG next to the CSV.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Instant,
    Forced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectralAction {
    Propagate,
    Forced,
    Probe,
    Resonance,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the solution on a grid or at given points.
    Simulate {
        #[arg(long, value_enum, default_value = "instant")]
        mode: Mode,
        /// Sample point `x,y,z`, repeatable; replaces the grid.
        #[arg(long = "point", value_parser = parse_triple, allow_hyphen_values = true)]
        points: Vec<[f64; 3]>,
    },
    /// Reproduce the data of one figure.
    Figures {
        /// 1a, 1b, 1c, 2a, 2b, 2c, 3a, 3b, 4a or 4b.
        #[arg(long)]
        id: FigureId,
        /// x-spacing of the axis figures.
        #[arg(long)]
        dx: Option<f64>,
    },
    /// Representation constants of the scenario modes.
    Bounds,
    /// Exponential growth rate estimate.
    Growth {
        #[arg(long, value_enum, default_value = "instant")]
        mode: Mode,
        /// Points in the geometric time schedule.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Finite-difference residual and curl of the solution.
    Verify {
        #[arg(long, value_enum, default_value = "instant")]
        mode: Mode,
        /// Spatial step; the check reruns at `h/2`.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 0.01)]
        t: f64,
        /// Number of random points when `--seed` is given.
        #[arg(long, default_value_t = 27)]
        points: usize,
        /// Where the curl is estimated.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        curl_point: Option<[f64; 3]>,
    },
    /// Recover the four profiles from the scenario's initial data.
    Invert {
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Fourier-side propagators and probes.
    Spectral {
        #[arg(long, value_enum, default_value = "propagate")]
        action: SpectralAction,
        /// Wavenumber `k,l,m`.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        alpha: Option<[f64; 3]>,
        /// Four real values or four `re,im` pairs.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Forcing frequency; defaults to the scenario's.
        #[arg(long, allow_hyphen_values = true)]
        omega_f: Option<f64>,
        /// Unit direction, repeatable.
        #[arg(long = "ray", value_parser = parse_triple, allow_hyphen_values = true)]
        rays: Vec<[f64; 3]>,
    },
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| if v.iter().all(|x| x.is_finite()) { Ok(v) } else { Err("values must be finite".into()) })
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_list(s)?.try_into().map_err(|v: Vec<f64>| format!("expected 3 values, got {}", v.len()))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        [_, _] => Err("expected a < b".into()),
        v => Err(format!("expected 2 values, got {}", v.len())),
    }
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> =
        s.split(',').map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"))).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c] if *a > 0 && *b > 0 && *c > 0 => Ok([*a, *b, *c]),
        [_, _, _] => Err("grid sizes must be positive".into()),
        _ => Err(format!("expected nx,ny,nz, got {} values", v.len())),
    }
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite (got {v})")))
    }
}

fn load_scenario(g: &GlobalArgs) -> CliResult<Scenario> {
    let path = g.scenario.as_deref().ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
    Ok(Scenario::load(path)?)
}

fn grid_from(g: &GlobalArgs, default_n: [usize; 3], default_domain: (f64, f64)) -> SpatialGrid {
    let (a, b) = g.domain.unwrap_or(default_domain);
    SpatialGrid::cube(g.grid.unwrap_or(default_n), a, b)
}

fn field_for(s: &Scenario, mode: Mode) -> CliResult<Box<dyn FieldEvaluator>> {
    Ok(match mode {
        Mode::Instant => Box::new(InstantField::new(s.clone())),
        Mode::Forced => Box::new(ForcedField::new(s.clone(), QuadratureSpec::default())?),
    })
}

fn json_text(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_simulate(g: &GlobalArgs, mode: Mode, points: &[[f64; 3]]) -> CliResult<()> {
    let s = load_scenario(g)?;
    let field = field_for(&s, mode)?;
    let t_max = g.tmax.unwrap_or(1.0);
    let dt = positive("dt", g.dt.unwrap_or(0.1))?;
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(CliError::Usage(format!("--tmax must be non-negative (got {t_max})")));
    }
    let grid = if points.is_empty() {
        grid_from(g, [3, 3, 3], (-1.0, 1.0))
    } else {
        SpatialGrid::from_points(points.to_vec())
    };
    let n = (t_max / dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let rows = times
        .par_iter()
        .map(|&t| {
            grid.points()
                .iter()
                .map(|&[x, y, z]| Ok([t, x, y, z].into_iter().chain(field.eval(x, y, z, t)?.components()).collect()))
                .collect::<crate::Result<Vec<Vec<f64>>>>()
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut w = CsvWriter::new(&["t", "x", "y", "z", "vx", "vy", "vz", "p"]);
    for r in rows.iter().flatten() {
        w.row(r);
    }
    emit(g.out.as_deref(), &w.finish())
}

fn cmd_figures(g: &GlobalArgs, id: FigureId, dx: Option<f64>) -> CliResult<()> {
    let mut spec = FigureSpec::new(id);
    if let Some(t) = g.tmax {
        spec.t_max = positive("tmax", t)?;
    }
    if let Some(dt) = g.dt {
        spec.dt = positive("dt", dt)?;
    }
    if let Some(dx) = dx {
        spec.dx = positive("dx", dx)?;
    }
    if !id.is_point_series() {
        if let Some(d) = g.domain {
            spec.x_range = d;
        }
    }
    let (header, rows) = figure_table(&spec)?;
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let stem = format!("figure_{}", id.name());
    emit(Some(&dir.join(format!("{stem}.csv"))), &figure_csv(&header, &rows))?;
    if g.svg {
        let x_label = "t [s]";
        let svg = render_svg(&format!("Figure {}", id.name()), x_label, &figure_series(&spec, &rows));
        emit(Some(&dir.join(format!("{stem}.svg"))), &svg)?;
    }
    Ok(())
}

fn unavailable(e: &Error) -> Value {
    json!({ "available": false, "reason": e.to_string() })
}

fn cmd_bounds(g: &GlobalArgs) -> CliResult<()> {
    let s = load_scenario(g)?;
    let (modes, gas) = (s.modes(), s.gas());
    let mut report = serde_json::Map::new();
    report.insert("delta".into(), json!(compute_delta(modes, gas)?));
    report.insert("m".into(), json!(compute_m(modes, gas)?));
    report.insert(
        "M".into(),
        match compute_M(modes, gas) {
            Ok(v) => json!(v),
            Err(e @ Error::Degenerate { .. }) => unavailable(&e),
            Err(e) => return Err(e.into()),
        },
    );
    let hull = s.active_branches().map(|b| s.profile(b).support()).reduce(|a, b| a.hull(&b));
    if let Some(Support::Interval { lo, hi }) = hull {
        report.insert(
            "m_prime".into(),
            match compute_m_prime(modes, gas, lo, hi) {
                Ok(v) => json!(v),
                Err(e @ Error::ResonantMode { .. }) => unavailable(&e),
                Err(e) => return Err(e.into()),
            },
        );
        report.insert("support".into(), json!([lo, hi]));
    }
    emit(g.out.as_deref(), &json_text(&report))
}

fn cmd_growth(g: &GlobalArgs, mode: Mode, samples: usize) -> CliResult<()> {
    let s = load_scenario(g)?;
    let t_max = positive("tmax", g.tmax.unwrap_or(20.0))?;
    let schedule = default_growth_schedule(t_max, samples)?;
    let grid = match g.grid {
        Some(_) => grid_from(g, [21, 21, 21], (-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI)),
        None => default_growth_grid(&s, t_max),
    };
    let field = field_for(&s, mode)?;
    let r = growth_rate_estimate(field.as_ref(), &grid, &schedule)?;
    emit(g.out.as_deref(), &json_text(&r))
}

fn random_points(seed: u64, n: usize, (a, b): (f64, f64)) -> SpatialGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpatialGrid::from_points((0..n).map(|_| [0; 3].map(|_| rng.gen_range(a..=b))).collect())
}

fn cmd_verify(
    g: &GlobalArgs,
    mode: Mode,
    h: f64,
    t: f64,
    points: usize,
    curl_point: Option<[f64; 3]>,
) -> CliResult<()> {
    let s = load_scenario(g)?;
    let h = positive("h", h)?;
    let domain = g.domain.unwrap_or((-0.5, 0.5));
    let raw = match g.seed {
        Some(seed) => random_points(seed, points.max(1), domain),
        None => grid_from(g, [3, 3, 3], domain),
    };
    let grid = smooth_points(&s, &raw, t, h, mode == Mode::Forced);
    if grid.is_empty() {
        return Err(CliError::Usage("every grid point is within a stencil of a profile kink".into()));
    }
    let field = field_for(&s, mode)?;
    let amplitude = InitialDataField::new(s.clone());
    let forcing = match mode {
        Mode::Forced => Some(Forcing { amplitude: &amplitude, omega_f: s.omega_f()? }),
        Mode::Instant => None,
    };
    let residual = pde_residual_convergence(field.as_ref(), s.gas(), &grid, t, h, forcing)?;
    let point = curl_point.unwrap_or([0.0; 3]);
    let curl = curl_components(field.as_ref(), point, t, 1e-4)?;
    let report = json!({
        "mode": format!("{mode:?}").to_lowercase(),
        "residual": residual,
        "curl": { "point": point, "t": t, "h": 1e-4, "components": curl },
    });
    emit(g.out.as_deref(), &json_text(&report))
}

fn cmd_invert(g: &GlobalArgs, samples: usize) -> CliResult<()> {
    let s = load_scenario(g)?;
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let inv = Inverter::new(s.modes(), s.gas())?;
    let data = InitialDataField::new(s.clone());
    let (a, b) = g.domain.unwrap_or((-2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI));
    let mut w = CsvWriter::new(&["xi", "f1", "f2", "f3", "f4", "err1", "err2", "err3", "err4"]);
    for i in 0..samples {
        let xi = a + (b - a) * i as f64 / (samples - 1) as f64;
        let f = inv.profiles_at(&data, xi)?;
        let truth = s.profiles().clone().map(|p| p.value(xi));
        let mut row = vec![xi];
        row.extend(f);
        row.extend((0..4).map(|k| (f[k] - truth[k]).abs()));
        w.row(&row);
    }
    emit(g.out.as_deref(), &w.finish())
}

fn coefficient_values(raw: &[f64]) -> CliResult<[Complex64; 4]> {
    match raw.len() {
        4 => Ok([0, 1, 2, 3].map(|i| Complex64::new(raw[i], 0.0))),
        8 => Ok([0, 1, 2, 3].map(|i| Complex64::new(raw[2 * i], raw[2 * i + 1]))),
        n => Err(CliError::Usage(format!("--coeffs takes 4 reals or 4 re,im pairs (got {n} values)"))),
    }
}

fn default_rays() -> Vec<[f64; 3]> {
    let d = 1.0 / 3f64.sqrt();
    vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [d, d, d]]
}

fn cmd_spectral(
    g: &GlobalArgs,
    action: SpectralAction,
    alpha: Option<[f64; 3]>,
    coeffs: &[f64],
    t: f64,
    omega_f: Option<f64>,
    rays: &[[f64; 3]],
) -> CliResult<()> {
    let scenario = match &g.scenario {
        Some(p) => Some(Scenario::load(Path::new(p))?),
        None => None,
    };
    let gas = scenario.as_ref().map(|s| *s.gas()).unwrap_or_else(GasParameters::reference_air);
    let omega = || -> CliResult<f64> {
        omega_f
            .or_else(|| scenario.as_ref().and_then(|s| s.forcing()).map(|f| f.omega_f))
            .ok_or_else(|| CliError::Usage("--omega-f is required (or a forced --scenario)".into()))
    };
    let rays = if rays.is_empty() { default_rays() } else { rays.to_vec() };
    let report = match action {
        SpectralAction::Propagate | SpectralAction::Forced => {
            let alpha = alpha.ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
            let values = coefficient_values(if coeffs.is_empty() { &[1.0, 0.0, 0.0, 0.0] } else { coeffs })?;
            let c = SpectralCoefficients::new(alpha, values);
            let (out, w) = if action == SpectralAction::Propagate {
                (propagate(&c, &gas, t)?, None)
            } else {
                let w = omega()?;
                (propagate_forced(&c, &gas, w, t)?, Some(w))
            };
            json!({ "alpha": alpha, "t": t, "omega_f": w, "input": values, "output": out })
        }
        SpectralAction::Probe => {
            let radii = log_radii(-12, 3, 1);
            serde_json::to_value(multiplier_probe(&gas, t, &rays, &radii)?).expect("report serializes")
        }
        SpectralAction::Resonance => {
            let w = omega()?;
            let loci = rays.iter().map(|d| resonance_locus(&gas, w, *d)).collect::<crate::Result<Vec<_>>>()?;
            serde_json::to_value(loci).expect("report serializes")
        }
    };
    emit(g.out.as_deref(), &json_text(&report))
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate { mode, points } => cmd_simulate(g, *mode, points),
        Command::Figures { id, dx } => cmd_figures(g, *id, *dx),
        Command::Bounds => cmd_bounds(g),
        Command::Growth { mode, samples } => cmd_growth(g, *mode, *samples),
        Command::Verify { mode, h, t, points, curl_point } => cmd_verify(g, *mode, *h, *t, *points, *curl_point),
        Command::Invert { samples } => cmd_invert(g, *samples),
        Command::Spectral { action, alpha, coeffs, t, omega_f, rays } => {
            cmd_spectral(g, *action, *alpha, coeffs, *t, *omega_f, rays)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code. Errors
/// go to stderr as one JSON object.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
