//! Run configuration: one JSON document, lengths in metres, angles in
//! degrees. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sectorcav::cavity::{FeedPoint, ModeSolverConfig, SectorGeometry};
use sectorcav::metrics::MetricsRequest;
use sectorcav::radiator::AperturePerimeter;
use sectorcav::synthesis::ExcitationSet;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub r_i: f64,
    pub r_e: f64,
    pub alpha_deg: f64,
    /// Bisector of the port-1 sector.
    #[serde(default = "default_phi_0")]
    pub phi_0_deg: f64,
    pub t: f64,
    pub eps_r: f64,
    #[serde(default)]
    pub tan_delta: f64,
}

fn default_phi_0() -> f64 {
    135.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutoMode {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub n_max: usize,
    pub m_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { n_max: 4, m_max: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub theta_step_deg: f64,
    pub phi_step_deg: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            theta_step_deg: 1.0,
            phi_step_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub arc_nodes: usize,
    pub edge_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            arc_nodes: sectorcav::radiator::DEFAULT_ARC_NODES,
            edge_nodes: sectorcav::radiator::DEFAULT_EDGE_NODES,
        }
    }
}

/// Port-1 feed as a global point (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedConfig {
    pub x: f64,
    pub y: f64,
}

impl Default for FeedConfig {
    fn default() -> Self {
        FeedConfig {
            x: -6.5e-3,
            y: 2.3e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortCoefficient {
    pub amplitude: f64,
    pub phase_deg: f64,
    #[serde(default = "yes")]
    pub active: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ExcitationConfig {
    Preset(String),
    Coefficients(Vec<PortCoefficient>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_ceiling")]
    pub x_ceiling: f64,
    #[serde(default = "default_scan")]
    pub scan_step: f64,
    #[serde(default)]
    pub radius_factor: Option<f64>,
}

fn default_ceiling() -> f64 {
    40.0
}

fn default_scan() -> f64 {
    1e-3
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            x_ceiling: default_ceiling(),
            scan_step: default_scan(),
            radius_factor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    #[serde(default = "default_cuts")]
    pub hpbw_cuts_deg: Vec<f64>,
    #[serde(default = "default_ripple")]
    pub ripple_theta_deg: Option<f64>,
    #[serde(default = "default_ar")]
    pub ar_directions_deg: Vec<(f64, f64)>,
}

fn default_cuts() -> Vec<f64> {
    vec![0.0, 90.0]
}

fn default_ripple() -> Option<f64> {
    Some(90.0)
}

fn default_ar() -> Vec<(f64, f64)> {
    vec![(0.0, 0.0)]
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            hpbw_cuts_deg: default_cuts(),
            ripple_theta_deg: default_ripple(),
            ar_directions_deg: default_ar(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    #[serde(rename = "r_i")]
    RI,
    #[serde(rename = "r_e")]
    RE,
    Alpha,
    EpsR,
    Frequency,
}

impl SweepParameter {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "r_i" => SweepParameter::RI,
            "r_e" => SweepParameter::RE,
            "alpha" => SweepParameter::Alpha,
            "eps_r" => SweepParameter::EpsR,
            "frequency" => SweepParameter::Frequency,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::RI => "r_i",
            SweepParameter::RE => "r_e",
            SweepParameter::Alpha => "alpha",
            SweepParameter::EpsR => "eps_r",
            SweepParameter::Frequency => "frequency",
        }
    }

    /// Unit of the swept value as written to the sweep CSV.
    pub fn unit(&self) -> &'static str {
        match self {
            SweepParameter::RI | SweepParameter::RE => "m",
            SweepParameter::Alpha => "deg",
            SweepParameter::EpsR => "1",
            SweepParameter::Frequency => "Hz",
        }
    }
}

/// Linearly spaced sweep; `points = 0` is an empty sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Also synthesize a pattern per point and report metrics columns.
    #[serde(default)]
    pub metrics: bool,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub frequency_hz: Option<f64>,
    #[serde(default)]
    pub auto_mode: Option<AutoMode>,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default = "default_q")]
    pub q_factor: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub feed: FeedConfig,
    #[serde(default = "default_ports")]
    pub port_count: usize,
    #[serde(default)]
    pub excitation: Option<ExcitationConfig>,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    /// Radius of the enclosing sphere for ka; defaults to `r_e`.
    #[serde(default)]
    pub enclosing_radius: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_q() -> f64 {
    200.0
}

fn default_ports() -> usize {
    4
}

fn default_efficiency() -> f64 {
    1.0
}

fn bad(field: &'static str, detail: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        detail: detail.into(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config {
            field: "json".into(),
            detail: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        RunConfig::from_json(&text)
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`RunConfig::canonical_json`], lowercase hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks everything that does not need the mode solver.
    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry()?;
        match (self.frequency_hz, self.auto_mode) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "frequency_hz",
                    "give either frequency_hz or auto_mode, not both",
                ))
            }
            (None, None) => {
                return Err(bad(
                    "frequency_hz",
                    "one of frequency_hz or auto_mode is required",
                ))
            }
            (Some(f), None) if !(f > 0.0 && f.is_finite()) => {
                return Err(bad("frequency_hz", format!("must be positive, got {f}")))
            }
            (None, Some(m))
                if m.m == 0 || m.m > self.truncation.m_max || m.n > self.truncation.n_max =>
            {
                return Err(bad(
                    "auto_mode",
                    format!(
                        "mode (m = {}, n = {}) is outside the truncation box m = 1..={}, n = 0..={}",
                        m.m, m.n, self.truncation.m_max, self.truncation.n_max
                    ),
                ));
            }
            _ => {}
        }
        if self.truncation.m_max == 0 {
            return Err(bad("truncation", "m_max must be at least 1"));
        }
        if !(self.q_factor > 0.0 && self.q_factor.is_finite()) {
            return Err(bad(
                "q_factor",
                format!("must be positive, got {}", self.q_factor),
            ));
        }
        for (name, v) in [
            ("grid", self.grid.theta_step_deg),
            ("grid", self.grid.phi_step_deg),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(name, format!("grid steps must be positive, got {v}")));
            }
        }
        self.perimeter()?;
        if self.port_count == 0 {
            return Err(bad("port_count", "must be at least 1"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(bad(
                "efficiency",
                format!("must lie in (0, 1], got {}", self.efficiency),
            ));
        }
        if let Some(a) = self.enclosing_radius {
            if !(a > 0.0 && a.is_finite()) {
                return Err(bad(
                    "enclosing_radius",
                    format!("must be positive, got {a}"),
                ));
            }
        }
        let s = &self.solver;
        if !(s.x_ceiling > 0.0 && s.scan_step > 0.0 && s.scan_step < s.x_ceiling) {
            return Err(bad("solver", "need 0 < scan_step < x_ceiling"));
        }
        if let Some(k) = s.radius_factor {
            if !(k > 0.0 && k.is_finite()) {
                return Err(bad(
                    "solver",
                    format!("radius_factor must be positive, got {k}"),
                ));
            }
        }
        if let Some(e) = &self.excitation {
            self.excitation_set(e)?;
        }
        if let Some(sw) = &self.sweep {
            if SweepParameter::parse(&sw.parameter).is_none() {
                return Err(bad(
                    "sweep",
                    format!(
                        "unknown parameter `{}`; expected r_i, r_e, alpha, eps_r or frequency",
                        sw.parameter
                    ),
                ));
            }
            if !sw.start.is_finite() || !sw.stop.is_finite() {
                return Err(bad("sweep", "range must be finite"));
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<SectorGeometry<f64>, CliError> {
        let g = &self.geometry;
        SectorGeometry::new(
            g.r_i,
            g.r_e,
            g.alpha_deg.to_radians(),
            g.phi_0_deg.to_radians(),
            g.t,
            g.eps_r,
            g.tan_delta,
        )
        .map_err(CliError::from)
    }

    /// Port-1 feed in sector-local coordinates.
    pub fn feed_point(&self, geom: &SectorGeometry<f64>) -> Result<FeedPoint<f64>, CliError> {
        let (x, y) = (self.feed.x, self.feed.y);
        let rho = x.hypot(y);
        let start = geom.bisector - geom.sector_angle / 2.0;
        let local = (y.atan2(x) - start).rem_euclid(std::f64::consts::TAU);
        FeedPoint::new(geom, rho, local).map_err(|e| {
            bad(
                "feed",
                format!("feed ({x} m, {y} m) is not inside the port-1 sector: {e}"),
            )
        })
    }

    pub fn solver(&self) -> ModeSolverConfig<f64> {
        ModeSolverConfig {
            x_ceiling: self.solver.x_ceiling,
            scan_step: self.solver.scan_step,
            radius_factor: self.solver.radius_factor,
            ..ModeSolverConfig::default()
        }
    }

    pub fn perimeter(&self) -> Result<AperturePerimeter, CliError> {
        AperturePerimeter::new(self.quadrature.arc_nodes, self.quadrature.edge_nodes)
            .map_err(CliError::from)
    }

    pub fn excitation_set(&self, e: &ExcitationConfig) -> Result<ExcitationSet<f64>, CliError> {
        let set = match e {
            ExcitationConfig::Preset(name) => {
                ExcitationSet::preset(name).map_err(|err| bad("excitation", err.to_string()))?
            }
            ExcitationConfig::Coefficients(list) => {
                let polar: Vec<(f64, f64)> =
                    list.iter().map(|c| (c.amplitude, c.phase_deg)).collect();
                let mut set = ExcitationSet::from_polar(&polar)
                    .map_err(|err| bad("excitation", err.to_string()))?;
                set.active = list.iter().map(|c| c.active).collect();
                for (l, c) in list.iter().enumerate() {
                    if !c.active {
                        set.coefficients[l] = Complex::new(0.0, 0.0);
                    }
                }
                set
            }
        };
        if set.len() != self.port_count {
            return Err(bad(
                "excitation",
                format!(
                    "{} coefficients given for {} ports",
                    set.len(),
                    self.port_count
                ),
            ));
        }
        Ok(set)
    }

    pub fn metrics_request(&self) -> MetricsRequest {
        MetricsRequest {
            efficiency: self.efficiency,
            enclosing_radius: self.enclosing_radius.unwrap_or(self.geometry.r_e),
            hpbw_cuts: self.metrics.hpbw_cuts_deg.clone(),
            ripple_theta: self.metrics.ripple_theta_deg,
            ar_directions: self.metrics.ar_directions_deg.clone(),
        }
    }
}
