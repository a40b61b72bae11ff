//! Run configuration: one self-describing JSON document per experiment, with
//! a handful of flag overrides (seed, tolerance, output dir, format,
//! parallel) so archived configs stay authoritative.

use hyperspin_core::{Error, LatticeSpec, ReferenceFamily, Result, ScanPoint, ScanSchedule, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Verify,
    Decompose,
    Simulate,
    Scan,
}

impl std::fmt::Display for CommandKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CommandKind::Verify => "verify",
            CommandKind::Decompose => "decompose",
            CommandKind::Simulate => "simulate",
            CommandKind::Scan => "scan",
        };
        f.write_str(s)
    }
}

/// Spin parameters: exactly one of `s` or `nu` must be present.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl SpinCfg {
    pub fn nu(&self) -> Result<f64> {
        match (self.s, self.nu) {
            (Some(s), None) => hyperspin_core::spin_length(s),
            (None, Some(nu)) if nu > 0.0 && nu.is_finite() => Ok(nu),
            (None, Some(nu)) => Err(Error::Config(format!("nu must be positive, got {nu}"))),
            (Some(_), Some(_)) => {
                Err(Error::Config("spin: give either s or nu, not both".into()))
            }
            (None, None) => Err(Error::Config("spin: one of s or nu is required".into())),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, Default, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum GaugeCfg {
    #[default]
    Canonical,
    Random {
        seed: u64,
    },
}

/// Initial state family.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitCfg {
    Random,
    Ferro { axis: [f64; 3] },
    Neel { axis: [f64; 3] },
    Tri120 { e1: [f64; 3], e2: [f64; 3] },
    Columnar { axis: [f64; 3] },
    Twist { axis: [f64; 3], kappa: f64 },
}

impl InitCfg {
    /// The reference family, or None for a random start.
    pub fn family(&self) -> Option<ReferenceFamily> {
        match self {
            InitCfg::Random => None,
            InitCfg::Ferro { axis } => Some(ReferenceFamily::Ferro { axis: Vec3(*axis) }),
            InitCfg::Neel { axis } => Some(ReferenceFamily::Neel { axis: Vec3(*axis) }),
            InitCfg::Tri120 { e1, e2 } => {
                Some(ReferenceFamily::Tri120 { e1: Vec3(*e1), e2: Vec3(*e2) })
            }
            InitCfg::Columnar { axis } => Some(ReferenceFamily::Columnar { axis: Vec3(*axis) }),
            InitCfg::Twist { axis, kappa } => {
                Some(ReferenceFamily::Twist { axis: Vec3(*axis), kappa: *kappa })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeCfg {
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_energy_tol")]
    pub energy_tol: f64,
    /// Independent random restarts; the best final energy wins.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_max_sweeps() -> usize {
    50_000
}

fn default_energy_tol() -> f64 {
    1e-12
}

fn default_restarts() -> usize {
    1
}

impl Default for MinimizeCfg {
    fn default() -> Self {
        MinimizeCfg {
            max_sweeps: default_max_sweeps(),
            energy_tol: default_energy_tol(),
            restarts: default_restarts(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetropolisCfg {
    pub beta: f64,
    pub sweeps: usize,
    #[serde(default = "default_proposal_angle")]
    pub proposal_angle: f64,
}

fn default_proposal_angle() -> f64 {
    0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanCfg {
    pub kind: hyperspin_core::LatticeKind,
    pub extent: Vec<usize>,
    pub kappa: f64,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    /// Explicit (step, s) pairs; alternative to `halving`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<ScanPoint>>,
    /// Shortcut: k points with step 2^-k and s 2^k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halving: Option<usize>,
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl ScanCfg {
    pub fn schedule(&self) -> Result<ScanSchedule> {
        let schedule = match (&self.points, self.halving) {
            (Some(points), None) => {
                ScanSchedule { points: points.clone(), kappa: self.kappa, axis: Vec3(self.axis) }
            }
            (None, Some(count)) => ScanSchedule::halving(count, self.kappa, Vec3(self.axis)),
            (None, None) => ScanSchedule::halving(6, self.kappa, Vec3(self.axis)),
            (Some(_), Some(_)) => {
                return Err(Error::Config("scan: give either points or halving, not both".into()))
            }
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// The experiment configuration document.
#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinCfg>,
    /// Exchange coupling J > 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Random hyper-sites per kind for verify.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimize: Option<MinimizeCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metropolis: Option<MetropolisCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputCfg>,
}

/// Flag-level overrides applied on top of the config document.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub out_dir: Option<String>,
    pub format: Option<OutputFormat>,
    pub samples: Option<usize>,
    pub parallel: bool,
}

/// Fully resolved settings a command runs with.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub out_dir: std::path::PathBuf,
    pub format: OutputFormat,
    pub parallel: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(self, expected: CommandKind, overrides: &Overrides) -> Result<Resolved> {
        if let Some(declared) = self.command {
            if declared != expected {
                return Err(Error::Config(format!(
                    "config declares command {declared}, but {expected} was invoked"
                )));
            }
        }
        let tolerance = overrides.tolerance.or(self.tolerance).unwrap_or(1e-10);
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::Config(format!("tolerance must be positive, got {tolerance}")));
        }
        let out_dir = overrides
            .out_dir
            .clone()
            .or_else(|| self.output.as_ref().and_then(|o| o.dir.clone()))
            .unwrap_or_else(|| "out".to_string());
        let format = overrides
            .format
            .or_else(|| self.output.as_ref().and_then(|o| o.format))
            .unwrap_or_default();
        Ok(Resolved {
            seed: overrides.seed.or(self.seed).unwrap_or(42),
            tolerance,
            samples: overrides.samples.or(self.samples).unwrap_or(10_000),
            out_dir: std::path::PathBuf::from(out_dir),
            format,
            parallel: overrides.parallel,
            config: self,
        })
    }
}
