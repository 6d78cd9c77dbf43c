//! Experiment runner: families of flows described by a TOML config, with
//! per-run diagnostics, metric-chain distances and trend verdicts.

mod report;
mod run;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientMetric, Perturbation, Warp};
use crate::diagnostics::{DiagnosticsOptions, Scenario};
use crate::error::{Error, Result};
use crate::flow::{ClassBounds, FlowConfig, FlowMode, InitialSurface, ViolationPolicy};

pub use report::{emit_report, per_time_table, summary_table, write_outputs, Table};
pub use run::{run_member, Check, RunOutput, RunSummary};

/// Version of the CSV column layout, written as the first column of every row.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "IMCF_OUTPUT_DIR";

/// Minimum gap between the initial surface and the horizon, relative to s₀.
pub const CHART_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    PmtStability,
    RpiStability,
    SingleRun,
    IdentitySuite,
}

impl ScenarioKind {
    pub fn is_stability(self) -> bool {
        matches!(self, ScenarioKind::PmtStability | ScenarioKind::RpiStability)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyAmbient {
    Euclidean,
    Schwarzschild,
    PerturbedSchwarzschild,
    Bump,
}

/// Which parameter the member index halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Fixed,
    Mass,
    AmbientAmplitude,
    SurfaceAmplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub ambient: FamilyAmbient,
    pub schedule: Schedule,
    /// Member i of a stability family uses base/2^i.
    pub base: f64,
    pub members: usize,
    pub mass: f64,
    /// Conformal perturbation amplitude of the ambient.
    pub amplitude: f64,
    /// Y_lm amplitude of the initial surface.
    pub surface_amplitude: f64,
    pub l: usize,
    pub m: i32,
    pub s_in: f64,
    pub s_out: f64,
    pub bump_amplitude: f64,
    pub bump_center: f64,
    pub bump_width: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            ambient: FamilyAmbient::Euclidean,
            schedule: Schedule::Fixed,
            base: 0.0,
            members: 1,
            mass: 0.0,
            amplitude: 0.0,
            surface_amplitude: 0.0,
            l: 2,
            m: 0,
            s_in: 0.5,
            s_out: 3.0,
            bump_amplitude: 0.2,
            bump_center: 1.5,
            bump_width: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub area: f64,
    pub lemma22: f64,
    pub crucial: f64,
    pub weak_ricci: f64,
    pub slack: f64,
    pub geroch: f64,
    pub bounds: f64,
    pub chain: f64,
}

impl Tolerances {
    pub fn for_mode(mode: FlowMode) -> Self {
        match mode {
            FlowMode::Ode => Self {
                area: 1e-8,
                lemma22: 1e-6,
                crucial: 1e-6,
                weak_ricci: 1e-6,
                slack: 1e-6,
                geroch: 1e-8,
                bounds: 1e-6,
                chain: 1e-8,
            },
            FlowMode::Pde => Self {
                area: 1e-4,
                lemma22: 1e-3,
                crucial: 1e-3,
                weak_ricci: 1e-3,
                slack: 1e-3,
                geroch: 1e-3,
                bounds: 1e-3,
                chain: 1e-8,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub area: Option<f64>,
    pub lemma22: Option<f64>,
    pub crucial: Option<f64>,
    pub weak_ricci: Option<f64>,
    pub slack: Option<f64>,
    pub geroch: Option<f64>,
    pub bounds: Option<f64>,
    pub chain: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: Tolerances) -> Tolerances {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut t.area, self.area);
        set(&mut t.lemma22, self.lemma22);
        set(&mut t.crucial, self.crucial);
        set(&mut t.weak_ricci, self.weak_ricci);
        set(&mut t.slack, self.slack);
        set(&mut t.geroch, self.geroch);
        set(&mut t.bounds, self.bounds);
        set(&mut t.chain, self.chain);
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub scenario: ScenarioKind,
    pub family: FamilyConfig,
    pub s0: f64,
    /// Model radius for the chain; defaults to the area radius of the initial surface.
    pub r0: Option<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub output_dt: f64,
    pub mode: FlowMode,
    pub n_theta: usize,
    pub n_phi: usize,
    pub output_dir: Option<PathBuf>,
    pub tolerances: ToleranceOverrides,
    pub diagnostics: DiagnosticsOptions,
    pub bounds: ClassBounds,
    pub policy: ViolationPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            scenario: ScenarioKind::SingleRun,
            family: FamilyConfig::default(),
            s0: 1.0,
            r0: None,
            t_final: 1.0,
            dt: 0.01,
            output_dt: 0.02,
            mode: FlowMode::Ode,
            n_theta: 16,
            n_phi: 32,
            output_dir: None,
            tolerances: ToleranceOverrides::default(),
            diagnostics: DiagnosticsOptions::default(),
            bounds: ClassBounds::default(),
            policy: ViolationPolicy::Record,
        }
    }
}

/// One family member: its index, scheduled parameter and flow setup.
#[derive(Debug, Clone)]
pub struct Member {
    pub index: usize,
    pub parameter: f64,
    pub mass: f64,
    pub flow: FlowConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.apply(Tolerances::for_mode(self.mode))
    }

    /// Chain scenario: the stability scenario itself, otherwise decided by the mass.
    pub fn chain_scenario(&self, mass: f64) -> Scenario {
        match self.scenario {
            ScenarioKind::PmtStability => Scenario::Pmt,
            ScenarioKind::RpiStability => Scenario::Rpi,
            _ if mass > 0.0 => Scenario::Rpi,
            _ => Scenario::Pmt,
        }
    }

    /// `IMCF_OUTPUT_DIR` if set, otherwise `output_dir`.
    pub fn effective_output_dir(&self) -> Option<PathBuf> {
        self.output_dir_with(std::env::var_os(OUTPUT_DIR_ENV))
    }

    fn output_dir_with(&self, env: Option<std::ffi::OsString>) -> Option<PathBuf> {
        match env {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.output_dir.clone(),
        }
    }

    fn parameters(&self) -> Vec<(usize, f64)> {
        if self.scenario.is_stability() {
            (1..=self.family.members)
                .map(|i| (i, self.family.base / 2f64.powi(i as i32)))
                .collect()
        } else {
            vec![(0, self.family.base)]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let f = &self.family;
        if self.scenario.is_stability() {
            if f.members < 3 {
                return bad(format!("stability families need at least 3 members, got {}", f.members));
            }
            if f.schedule == Schedule::Fixed {
                return bad("stability families need a mass or amplitude schedule".into());
            }
        }
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return bad(format!("s0 must be positive, got {}", self.s0));
        }
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0) {
                return bad(format!("r0 must be positive, got {r0}"));
            }
        }
        match (f.ambient, f.schedule) {
            (FamilyAmbient::Euclidean | FamilyAmbient::Bump, Schedule::Mass) => {
                return bad("mass schedule needs a Schwarzschild ambient".into())
            }
            (FamilyAmbient::Euclidean | FamilyAmbient::Schwarzschild, Schedule::AmbientAmplitude) => {
                return bad("ambient amplitude schedule needs a perturbed or bump ambient".into())
            }
            _ => {}
        }
        self.members().map(|_| ())
    }

    pub fn members(&self) -> Result<Vec<Member>> {
        self.parameters()
            .into_iter()
            .map(|(index, p)| self.member(index, p))
            .collect()
    }

    fn member(&self, index: usize, p: f64) -> Result<Member> {
        let f = &self.family;
        let pick = |s: Schedule, fixed: f64| if f.schedule == s { p } else { fixed };
        let mass = match f.ambient {
            FamilyAmbient::Schwarzschild | FamilyAmbient::PerturbedSchwarzschild => pick(Schedule::Mass, f.mass),
            _ => 0.0,
        };
        let amplitude = pick(Schedule::AmbientAmplitude, f.amplitude);
        let surface = pick(Schedule::SurfaceAmplitude, f.surface_amplitude);
        let config_err = |e: Error| Error::Config(format!("member {index}: {e}"));
        let ambient = match f.ambient {
            FamilyAmbient::Euclidean => AmbientMetric::euclidean(),
            FamilyAmbient::Schwarzschild => AmbientMetric::schwarzschild(mass).map_err(config_err)?,
            FamilyAmbient::PerturbedSchwarzschild => AmbientMetric::perturbed(
                Warp::Schwarzschild { mass },
                Perturbation {
                    amplitude,
                    l: f.l,
                    m: f.m,
                    s_in: f.s_in,
                    s_out: f.s_out,
                },
            )
            .map_err(config_err)?,
            FamilyAmbient::Bump => AmbientMetric::rotsym(Warp::Bump {
                amplitude: pick(Schedule::AmbientAmplitude, f.bump_amplitude),
                center: f.bump_center,
                width: f.bump_width,
            })
            .map_err(config_err)?,
        };
        let initial = if surface != 0.0 {
            InitialSurface::Perturbed {
                s0: self.s0,
                amplitude: surface,
                l: f.l,
                m: f.m,
            }
        } else {
            InitialSurface::Sphere { s0: self.s0 }
        };
        // sup |Y_lm| ≤ √((2l+1)/4π)
        let y_max = ((2 * f.l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
        let s_min = self.s0 * (1.0 - surface.abs() * y_max);
        if !(s_min - 2.0 * mass > CHART_MARGIN * self.s0) {
            return Err(Error::Config(format!(
                "member {index}: initial surface (min radius {s_min}) too close to the horizon 2m = {}",
                2.0 * mass
            )));
        }
        let flow = FlowConfig {
            ambient,
            initial,
            t_final: self.t_final,
            dt: self.dt,
            output_dt: self.output_dt,
            mode: self.mode,
            bounds: self.bounds,
            policy: self.policy,
            n_theta: self.n_theta,
            n_phi: self.n_phi,
            diagnostics: self.diagnostics,
        };
        flow.validate().map_err(config_err)?;
        Ok(Member {
            index,
            parameter: p,
            mass,
            flow,
        })
    }
}

/// Monotone-decrease verdict for one quantity across a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendVerdict {
    pub quantity: String,
    pub values: Vec<f64>,
    pub strictly_decreasing: bool,
    /// Last value over first value.
    pub ratio: f64,
}

impl TrendVerdict {
    pub fn new(quantity: &str, values: Vec<f64>) -> Self {
        let strictly_decreasing =
            values.len() >= 2 && values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| w[1] < w[0]);
        let ratio = match (values.first(), values.last()) {
            (Some(a), Some(b)) => b / a,
            _ => f64::NAN,
        };
        Self {
            quantity: quantity.to_string(),
            values,
            strictly_decreasing,
            ratio,
        }
    }

    pub fn passed(&self) -> bool {
        self.strictly_decreasing
    }
}

pub fn trend_verdicts(scenario: ScenarioKind, summaries: &[RunSummary]) -> Vec<TrendVerdict> {
    let col = |f: fn(&RunSummary) -> f64| summaries.iter().map(f).collect::<Vec<_>>();
    match scenario {
        ScenarioKind::PmtStability => vec![TrendVerdict::new("hat_g~delta", col(|s| s.d_hat_g_target))],
        ScenarioKind::RpiStability => vec![
            TrendVerdict::new("hat_g~g_s", col(|s| s.d_hat_g_target)),
            TrendVerdict::new("h_concentration_mid", col(|s| s.h_concentration_mid)),
        ],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub summaries: Vec<RunSummary>,
    pub trends: Vec<TrendVerdict>,
    /// Per-time tables in member order.
    pub tables: Vec<Table>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutcome {
    /// Every run and every trend assertion passed.
    pub fn passed(&self) -> bool {
        !self.summaries.is_empty()
            && self.summaries.iter().all(|s| s.passed)
            && self.trends.iter().all(TrendVerdict::passed)
    }

    pub fn report(&self) -> String {
        emit_report(&self.config.name, &self.summaries, &self.trends)
    }
}

/// Runs every member (in parallel), then writes CSVs and the report if an
/// output directory is configured. Per-run failures are recorded in the
/// summaries; only config and I/O problems are errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let members = cfg.members()?;
    log::info!("{}: {} member(s), {:?}", cfg.name, members.len(), cfg.scenario);
    let outputs: Vec<RunOutput> = members.par_iter().map(|m| run_member(cfg, m)).collect();
    let (summaries, tables): (Vec<_>, Vec<_>) = outputs.into_iter().map(|o| (o.summary, o.table)).unzip();
    let trends = trend_verdicts(cfg.scenario, &summaries);
    let mut outcome = ExperimentOutcome {
        config: cfg.clone(),
        summaries,
        trends,
        tables,
        files: Vec::new(),
    };
    if let Some(dir) = cfg.effective_output_dir() {
        outcome.files = write_outputs(&dir, &outcome)?;
    }
    Ok(outcome)
}

/// Built-in identity suites on the exact model flows.
pub fn builtin_suites() -> Vec<ExperimentConfig> {
    let base = ExperimentConfig {
        scenario: ScenarioKind::IdentitySuite,
        diagnostics: DiagnosticsOptions::minimal(),
        ..ExperimentConfig::default()
    };
    vec![
        ExperimentConfig {
            name: "euclidean_ode".into(),
            ..base.clone()
        },
        ExperimentConfig {
            name: "schwarzschild_ode".into(),
            s0: 3.0,
            family: FamilyConfig {
                ambient: FamilyAmbient::Schwarzschild,
                mass: 1.0,
                ..FamilyConfig::default()
            },
            ..base.clone()
        },
        ExperimentConfig {
            name: "schwarzschild_pde".into(),
            s0: 3.0,
            t_final: 0.4,
            mode: FlowMode::Pde,
            family: FamilyConfig {
                ambient: FamilyAmbient::Schwarzschild,
                mass: 1.0,
                ..FamilyConfig::default()
            },
            ..base
        },
    ]
}

#[cfg(test)]
mod tests;
