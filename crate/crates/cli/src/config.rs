//! TOML experiment configuration. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use polarconv::analysis::{circle_grid, oscillating_sequence, Oscillation, TestFamily};
use polarconv::asymptotic::{SequenceOracle, SolverConfig, TailWindow};
use polarconv::convergence::{l1_fixture, linf_fixture, nonunique_strong_delta_demo, InconclusivePolicy, Mode, Status};
use polarconv::extraction::ExtractionSchedule;
use polarconv::fixedpoint::{MapDescriptor, PipelineConfig};
use polarconv::rotund::SrConfig;
use polarconv::spaces::{Point, ProbeStrategy, SpaceDescriptor, SpaceKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    /// Treat the space as rotund even when its kind does not imply it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub force_sr: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Vec<f64>>,
    #[serde(default)]
    pub window: TailWindow,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub extract: ExtractionSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr: Option<SrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSection>,
    #[serde(default)]
    pub fixedpoint: PipelineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualitySection>,
    #[serde(default)]
    pub weak: TestFamily,
}

/// Where the sequence comes from: inline points in the configured space, or
/// one of the built-in generators (which fix their own space).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    Inline {
        points: Vec<Vec<f64>>,
        #[serde(default = "yes")]
        bounded: bool,
    },
    /// k·e_k under the 1-norm.
    L1 { dim: usize, horizon: usize },
    /// e_k under the sup norm.
    Linf { dim: usize, horizon: usize },
    /// e_k in Euclidean space.
    UnitVectors { dim: usize, horizon: usize },
    /// Nested indicators on a grid of `grid` cells, `depth` terms.
    Indicator { grid: usize, depth: usize },
    /// base + b(sin(nt) + κ cos(2nt)) on a circle grid with the p-norm.
    Oscillating {
        grid: usize,
        p: f64,
        #[serde(default)]
        base: Option<Vec<f64>>,
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "one")]
        b: f64,
        #[serde(default)]
        kappa: f64,
        #[serde(default = "one_usize")]
        first_frequency: usize,
        horizon: usize,
    },
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSpec {
    /// Random probes around the candidate. Ball-uniform when nothing else
    /// is configured.
    pub strategy: Option<ProbeStrategy>,
    pub count: usize,
    pub radius_scale: f64,
    pub support: Option<usize>,
    /// Explicit probe points, always included.
    pub points: Vec<Vec<f64>>,
    /// Smooth trigonometric probes of this maximal degree (grid spaces only).
    pub smooth_degree: Option<usize>,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { strategy: None, count: 32, radius_scale: 1.0, support: None, points: Vec::new(), smooth_degree: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub delta: f64,
    pub strong_delta: f64,
    pub weak: f64,
    pub deficit: f64,
    pub residual: f64,
    /// Largest acceptable optimality gap of a computed center.
    pub gap: f64,
    pub duality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { delta: 1e-6, strong_delta: 1e-6, weak: 0.05, deficit: 1e-6, residual: 1e-6, gap: 1e-3, duality: 1e-9 }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("delta", self.delta),
            ("strong_delta", self.strong_delta),
            ("weak", self.weak),
            ("deficit", self.deficit),
            ("residual", self.residual),
            ("gap", self.gap),
            ("duality", self.duality),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySection {
    pub modes: Vec<Mode>,
    pub subsamples: usize,
    pub policy: InconclusivePolicy,
    /// Status every mode is expected to reach; the run fails otherwise.
    pub expect: Status,
}

impl Default for ClassifySection {
    fn default() -> Self {
        ClassifySection {
            modes: vec![Mode::Delta, Mode::StrongDelta, Mode::Polar],
            subsamples: 8,
            policy: InconclusivePolicy::Keep,
            expect: Status::Certified,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrSection {
    pub r: f64,
    pub d_bar: f64,
    #[serde(default)]
    pub estimate: SrConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub map: MapDescriptor,
    pub base: SpaceKind,
    pub radius: f64,
    pub x0: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualitySection {
    pub p: f64,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// A GridFunction CSV (index,weight,value), relative to the config file.
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

impl ExperimentConfig {
    /// All defaults; used when a subcommand runs without a config file.
    pub fn with_seed(seed: u64) -> Self {
        ExperimentConfig {
            seed,
            output: None,
            space: None,
            force_sr: false,
            sequence: None,
            candidate: None,
            window: TailWindow::default(),
            probes: ProbeSpec::default(),
            tolerances: Tolerances::default(),
            solver: SolverConfig::default(),
            classify: ClassifySection::default(),
            extract: ExtractionSchedule::default(),
            sr: None,
            map: None,
            fixedpoint: PipelineConfig::default(),
            duality: None,
            weak: TestFamily::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(DualitySection { csv: Some(p), .. }) = cfg.duality.as_mut() {
            if p.is_relative() {
                *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.tolerances.validate()?;
        self.window.validate().map_err(|e| format!("window: {e}"))?;
        if !(self.probes.radius_scale.is_finite() && self.probes.radius_scale > 0.0) {
            return Err("probes.radius_scale must be positive".into());
        }
        if self.classify.subsamples == 0 {
            return Err("classify.subsamples must be at least 1".into());
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpaceDescriptor, String> {
        let kind = self.space.clone().ok_or("missing [space] section")?;
        let d = SpaceDescriptor::new(kind).map_err(|e| format!("space: {e}"))?;
        Ok(if self.force_sr { d.with_forced_sr() } else { d })
    }

    /// The sequence and its space. Generators fix the space themselves, so
    /// a [space] section next to one is rejected.
    pub fn oracle(&self) -> Result<SequenceOracle, String> {
        let spec = self.sequence.as_ref().ok_or("missing [sequence] section")?;
        if !matches!(spec, SequenceSpec::Inline { .. }) && self.space.is_some() {
            return Err("[space] must be omitted for generated sequences".into());
        }
        let wrap = |r: polarconv::Result<SequenceOracle>| r.map_err(|e| format!("sequence: {e}"));
        match spec {
            SequenceSpec::Inline { points, bounded } => {
                let space = self.space()?;
                let pts = points.iter().map(|p| Point::Vector(p.clone())).collect();
                wrap(SequenceOracle::from_points(space, pts, *bounded))
            }
            SequenceSpec::L1 { dim, horizon } => wrap(l1_fixture(*dim, *horizon)),
            SequenceSpec::Linf { dim, horizon } => wrap(linf_fixture(*dim, *horizon)),
            SequenceSpec::UnitVectors { dim, horizon } => {
                let (dim, horizon) = (*dim, *horizon);
                if horizon > dim {
                    return Err(format!("sequence: horizon {horizon} exceeds dimension {dim}"));
                }
                wrap(SequenceOracle::from_fn(SpaceDescriptor::euclidean(dim), horizon, true, |k| {
                    let mut v = vec![0.0; dim];
                    v[k] = 1.0;
                    Point::Vector(v)
                }))
            }
            SequenceSpec::Indicator { grid, depth } => {
                nonunique_strong_delta_demo(*grid, *depth).map(|d| d.oracle).map_err(|e| format!("sequence: {e}"))
            }
            SequenceSpec::Oscillating { grid, p, base, a, b, kappa, first_frequency, horizon } => {
                let space = circle_grid(*grid, *p).map_err(|e| format!("sequence: {e}"))?;
                let base = base.clone().unwrap_or_else(|| vec![*a; *grid]);
                if base.len() != *grid {
                    return Err(format!("sequence: base has {} values for a grid of {grid}", base.len()));
                }
                let osc = Oscillation { amplitude: *b, kappa: *kappa, first_frequency: *first_frequency, horizon: *horizon };
                wrap(oscillating_sequence(&space, &base, &osc))
            }
        }
    }

    /// The configured candidate, or the weak-limit base of an oscillating
    /// generator.
    pub fn candidate(&self) -> Option<Point> {
        if let Some(c) = &self.candidate {
            return Some(Point::Vector(c.clone()));
        }
        match &self.sequence {
            Some(SequenceSpec::Oscillating { grid, base, a, .. }) => {
                Some(Point::Vector(base.clone().unwrap_or_else(|| vec![*a; *grid])))
            }
            _ => None,
        }
    }
}
