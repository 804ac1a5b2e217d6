//! The six commands. Each one reads a validated [`RunConfig`], writes its
//! artifacts under the output directory and returns their paths.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use sectorcav::cavity::{solve_modes, DrivenField, Mode};
use sectorcav::metrics::{argmax, axial_ratio, directivity, MetricsReport};
use sectorcav::radiator::{embedded_pattern, load_pattern, to_csv_string, PatternGrid};
use sectorcav::synthesis::{port_patterns, superpose};

use crate::config::{AutoMode, ExcitationConfig, RunConfig, SweepConfig, SweepParameter};
use crate::error::CliError;

/// Radial and azimuthal sample counts of the `field` map.
pub const FIELD_RHO_NODES: usize = 41;
pub const FIELD_PHI_NODES: usize = 41;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        detail: e.to_string(),
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Everything a command needs besides the config itself.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub quiet: bool,
}

impl Context {
    pub fn new(config: RunConfig, out_dir: PathBuf, quiet: bool) -> Result<Self, CliError> {
        config.validate()?;
        Ok(Context {
            config,
            out_dir,
            quiet,
        })
    }

    /// Hash of the effective config, ignoring where the output goes.
    pub fn config_hash(&self) -> String {
        let mut c = self.config.clone();
        c.output_dir = None;
        c.hash()
    }

    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

/// Modes of the truncation box, sorted by resonant frequency.
pub fn mode_table(config: &RunConfig) -> Result<Vec<Mode<f64>>, CliError> {
    let g = config.geometry()?;
    let t = config.truncation;
    Ok(solve_modes(&g, t.n_max, t.m_max, &config.solver())?)
}

fn find_mode(modes: &[Mode<f64>], want: AutoMode) -> Result<Mode<f64>, CliError> {
    modes
        .iter()
        .find(|m| m.m == want.m && m.n == want.n)
        .copied()
        .ok_or_else(|| CliError::Config {
            field: "auto_mode".into(),
            detail: format!(
                "mode (m = {}, n = {}) not in the mode table",
                want.m, want.n
            ),
        })
}

/// Analysis frequency: the configured value or the chosen mode's resonance.
pub fn analysis_frequency(config: &RunConfig, modes: &[Mode<f64>]) -> Result<f64, CliError> {
    match (config.frequency_hz, config.auto_mode) {
        (Some(f), _) => Ok(f),
        (None, Some(m)) => Ok(find_mode(modes, m)?.frequency),
        (None, None) => Err(CliError::Config {
            field: "frequency_hz".into(),
            detail: "one of frequency_hz or auto_mode is required".into(),
        }),
    }
}

pub fn modes_csv(modes: &[Mode<f64>]) -> String {
    let mut s = String::from("n,m,v,x_mv,f_res_hz\n");
    for m in modes {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            m.n,
            m.m,
            num(m.order),
            num(m.x),
            num(m.frequency)
        );
    }
    s
}

#[derive(Serialize)]
struct ModeRow {
    n: usize,
    m: usize,
    v: f64,
    x_mv: f64,
    f_res_hz: f64,
}

#[derive(Serialize)]
struct ModeTable {
    config_sha256: String,
    modes: Vec<ModeRow>,
}

pub fn cmd_modes(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let modes = mode_table(&ctx.config)?;
    let table = ModeTable {
        config_sha256: ctx.config_hash(),
        modes: modes
            .iter()
            .map(|m| ModeRow {
                n: m.n,
                m: m.m,
                v: m.order,
                x_mv: m.x,
                f_res_hz: m.frequency,
            })
            .collect(),
    };
    Ok(vec![
        write_file(&ctx.out_dir, "modes.csv", &modes_csv(&modes))?,
        write_file(&ctx.out_dir, "modes.json", &json(&table))?,
    ])
}

/// Driven cavity field of port 1 at the analysis frequency.
pub fn port1_field(config: &RunConfig) -> Result<DrivenField<f64>, CliError> {
    let g = config.geometry()?;
    let feed = config.feed_point(&g)?;
    let modes = mode_table(config)?;
    let f = analysis_frequency(config, &modes)?;
    let solver = config.solver();
    Ok(DrivenField::from_modes(
        &g,
        feed,
        f,
        config.q_factor,
        &modes,
        solver.effective_radius(&g),
    )?)
}

fn warn_thickness(ctx: &Context, field: &DrivenField<f64>) {
    if let Some(w) = field.geometry().thickness_warning(field.frequency()) {
        ctx.note(&format!("warning: {w}"));
    }
}

pub fn cmd_field(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let field = port1_field(&ctx.config)?;
    warn_thickness(ctx, &field);
    let g = *field.geometry();
    let mut s = String::new();
    let _ = writeln!(s, "# frequency_hz={}", num(field.frequency()));
    let _ = writeln!(s, "# config_sha256={}", ctx.config_hash());
    s.push_str("rho_m,phi_local_deg,x_m,y_m,re_Ez,im_Ez\n");
    for i in 0..FIELD_RHO_NODES {
        let rho = g.inner_radius
            + (g.outer_radius - g.inner_radius) * i as f64 / (FIELD_RHO_NODES - 1) as f64;
        for j in 0..FIELD_PHI_NODES {
            let phi = g.sector_angle * j as f64 / (FIELD_PHI_NODES - 1) as f64;
            let ez = field.eval(rho, phi)?;
            let ga = g.global_angle(phi);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                num(rho),
                num(phi.to_degrees()),
                num(rho * ga.cos()),
                num(rho * ga.sin()),
                num(ez.re),
                num(ez.im)
            );
        }
    }
    Ok(vec![write_file(&ctx.out_dir, "field.csv", &s)?])
}

/// Embedded pattern of port 1.
pub fn port1_pattern(ctx: &Context) -> Result<PatternGrid<f64>, CliError> {
    let field = port1_field(&ctx.config)?;
    warn_thickness(ctx, &field);
    let grid = (ctx.config.grid.theta_step_deg, ctx.config.grid.phi_step_deg);
    let p = embedded_pattern(&field, grid, &ctx.config.perimeter()?)?;
    Ok(p.with_metadata("config_sha256", ctx.config_hash()))
}

pub fn cmd_pattern(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let p = port1_pattern(ctx)?;
    Ok(vec![write_file(
        &ctx.out_dir,
        "pattern_p1.csv",
        &to_csv_string(&p),
    )?])
}

fn excitation_label(e: &ExcitationConfig) -> String {
    match e {
        ExcitationConfig::Preset(name) => name.clone(),
        ExcitationConfig::Coefficients(_) => "custom".into(),
    }
}

/// Combined pattern for the configured excitation.
pub fn synthesize(ctx: &Context) -> Result<(PatternGrid<f64>, String), CliError> {
    let exc_cfg = ctx
        .config
        .excitation
        .as_ref()
        .ok_or_else(|| CliError::Config {
            field: "excitation".into(),
            detail: "synth needs an excitation (config `excitation` or --preset)".into(),
        })?;
    let exc = ctx.config.excitation_set(exc_cfg)?;
    let p1 = port1_pattern(ctx)?;
    let ports = port_patterns(&p1, ctx.config.port_count)?;
    let label = excitation_label(exc_cfg);
    let p = superpose(&ports, &exc)?.with_metadata("excitation", label.clone());
    Ok((p, label))
}

pub fn cmd_synth(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let (p, label) = synthesize(ctx)?;
    let report = MetricsReport::evaluate(&p, &ctx.config.metrics_request())?;
    if report.exceeds_harrington {
        ctx.note("warning: realized gain exceeds the Harrington bound by more than 0.5 dB");
    }
    Ok(vec![
        write_file(
            &ctx.out_dir,
            &format!("synth_{label}.csv"),
            &to_csv_string(&p),
        )?,
        write_file(&ctx.out_dir, &format!("synth_{label}.json"), &json(&report))?,
    ])
}

/// Metrics of a pattern file, or of the configured synthesis when no file
/// is given.
pub fn cmd_metrics(ctx: &Context, pattern: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let (p, label) = match pattern {
        Some(path) => {
            let p: PatternGrid<f64> = load_pattern(path)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "pattern".into());
            (p, stem)
        }
        None => synthesize(ctx)?,
    };
    let report = MetricsReport::evaluate(&p, &ctx.config.metrics_request())?;
    Ok(vec![write_file(
        &ctx.out_dir,
        &format!("metrics_{label}.json"),
        &json(&report),
    )?])
}

pub const SWEEP_HEADER: &str = "parameter,value,unit,n,m,v,x_mv,f_res_hz,\
directivity_dBi,peak_theta_deg,peak_phi_deg,ar0_dB,status";

/// Config for one sweep point.
fn sweep_point(base: &RunConfig, param: SweepParameter, value: f64) -> RunConfig {
    let mut c = base.clone();
    match param {
        SweepParameter::RI => c.geometry.r_i = value,
        SweepParameter::RE => {
            // scale the whole layout so r_i / r_e stays fixed
            let s = value / base.geometry.r_e;
            c.geometry.r_e = value;
            c.geometry.r_i = base.geometry.r_i * s;
            c.feed.x = base.feed.x * s;
            c.feed.y = base.feed.y * s;
        }
        SweepParameter::Alpha => c.geometry.alpha_deg = value,
        SweepParameter::EpsR => c.geometry.eps_r = value,
        SweepParameter::Frequency => {
            c.frequency_hz = Some(value);
            c.auto_mode = None;
        }
    }
    c
}

fn sweep_row(base: &RunConfig, sweep: &SweepConfig, param: SweepParameter, value: f64) -> String {
    let prefix = format!("{},{},{}", param.name(), num(value), param.unit());
    let tracked = base.auto_mode.unwrap_or(AutoMode { m: 1, n: 1 });
    let result = (|| -> Result<String, CliError> {
        let c = sweep_point(base, param, value);
        c.validate()?;
        let modes = mode_table(&c)?;
        let m = find_mode(&modes, tracked)?;
        let mut cols = format!(
            "{},{},{},{},{}",
            m.n,
            m.m,
            num(m.order),
            num(m.x),
            num(m.frequency)
        );
        if sweep.metrics {
            let ctx = Context {
                config: c,
                out_dir: PathBuf::new(),
                quiet: true,
            };
            let p = port1_pattern(&ctx)?;
            let (i, j) = argmax(&p, None)?;
            let (t, f) = (p.theta_deg(i), p.phi_deg(j));
            let s = p.sample(0, 0);
            let ar = axial_ratio(s.e_theta, s.e_phi)?;
            let _ = write!(
                cols,
                ",{},{},{},{}",
                num(directivity(&p, (t, f))?),
                num(t),
                num(f),
                if ar.is_finite() {
                    num(ar)
                } else {
                    "inf".into()
                }
            );
        } else {
            cols.push_str(",,,,");
        }
        Ok(cols)
    })();
    match result {
        Ok(cols) => format!("{prefix},{cols},ok"),
        Err(e) => {
            let msg = e.to_string().replace('"', "'");
            format!("{prefix},,,,,,,,,,\"{msg}\"")
        }
    }
}

/// Long-form sweep CSV; points run in parallel, rows keep sweep order.
pub fn sweep_csv(ctx: &Context, sweep: &SweepConfig) -> Result<String, CliError> {
    let param = SweepParameter::parse(&sweep.parameter).ok_or_else(|| CliError::Config {
        field: "sweep".into(),
        detail: format!("unknown parameter `{}`", sweep.parameter),
    })?;
    let rows: Vec<String> = sweep
        .values()
        .par_iter()
        .map(|&v| sweep_row(&ctx.config, sweep, param, v))
        .collect();
    let mut s = format!("# config_sha256={}\n{SWEEP_HEADER}\n", ctx.config_hash());
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s)
}

pub fn cmd_sweep(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let sweep = ctx.config.sweep.as_ref().ok_or_else(|| CliError::Config {
        field: "sweep".into(),
        detail: "sweep needs a `sweep` section or --param/--start/--stop/--points".into(),
    })?;
    let csv = sweep_csv(ctx, sweep)?;
    Ok(vec![write_file(
        &ctx.out_dir,
        &format!("sweep_{}.csv", sweep.parameter),
        &csv,
    )?])
}
