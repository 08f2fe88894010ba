//! Scenario and sweep configuration files (JSON, `"schema": 1`).

use std::path::Path;

use duality_core::{
    random_aligned_coherence, random_coherence, CoherenceJson, CoherenceMatrix, Complex64,
    Envelope, ModeDecomposition, PhaseModel, PolarizationSet, ScreenGeometry, SlitArray,
};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    pub slits: SlitsConfig,
    pub coherence: CoherenceConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitsConfig {
    pub n: usize,
    /// Slit spacing in meters.
    pub spacing: f64,
    pub intensities: Vec<f64>,
    /// Intrinsic per-slit phases in radians; zero when omitted.
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoherenceConfig {
    Identity,
    FullyCoherent,
    Uniform {
        g: f64,
    },
    Explicit {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
    Modes {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
        /// Linear polarization angles in radians.
        #[serde(default)]
        polarization_angles: Option<Vec<f64>>,
        /// Jones vectors as `[[re_x, im_x], [re_y, im_y]]`.
        #[serde(default)]
        polarizations: Option<Vec<[[f64; 2]; 2]>>,
    },
    Random {
        rank: usize,
        seed: u64,
    },
    /// Random coherence with real nonnegative entries.
    AlignedRandom {
        rank: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub wavelength: f64,
    pub distance: f64,
    /// Explicit window in meters; overrides `half_width_w`.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_half_width")]
    pub half_width_w: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_envelope")]
    pub envelope: Envelope,
    #[serde(default)]
    pub phase_model: PhaseModel,
}

fn default_half_width() -> f64 {
    duality_core::engine::DEFAULT_HALF_WIDTH_W
}

fn default_samples() -> usize {
    duality_core::engine::DEFAULT_SAMPLES
}

fn default_envelope() -> Envelope {
    Envelope::Uniform
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_realizations() -> usize {
    10_000
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            realizations: default_realizations(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "names::pattern")]
    pub pattern: String,
    #[serde(default = "names::report")]
    pub report: String,
    #[serde(default = "names::analysis")]
    pub analysis: String,
    #[serde(default = "names::mc_pattern")]
    pub mc_pattern: String,
    #[serde(default = "names::convergence")]
    pub convergence: String,
    #[serde(default)]
    pub scale_w: bool,
}

mod names {
    pub fn pattern() -> String {
        "pattern.csv".into()
    }
    pub fn report() -> String {
        "report.json".into()
    }
    pub fn analysis() -> String {
        "analysis.json".into()
    }
    pub fn mc_pattern() -> String {
        "mc_pattern.csv".into()
    }
    pub fn convergence() -> String {
        "convergence.json".into()
    }
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            pattern: names::pattern(),
            report: names::report(),
            analysis: names::analysis(),
            mc_pattern: names::mc_pattern(),
            convergence: names::convergence(),
            scale_w: false,
        }
    }
}

/// A scenario resolved into validated domain objects.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub slits: SlitArray,
    pub coherence: CoherenceMatrix,
    pub geometry: ScreenGeometry,
    pub oracle: OracleConfig,
    pub outputs: OutputsConfig,
}

/// 1-based line of the first occurrence of `"key"` in the source.
fn line_of(source: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    source
        .lines()
        .position(|l| l.contains(&quoted))
        .map(|i| i + 1)
}

fn invalid(source: &str, key: &str, path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config {
        line: line_of(source, key),
        message: format!("{path}: {msg}"),
    }
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(source: &str) -> Result<T, CliError> {
    serde_json::from_str(source).map_err(|e| CliError::Config {
        line: Some(e.line()).filter(|&l| l > 0),
        message: e.to_string(),
    })
}

pub(crate) fn read_source(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn check_schema(source: &str, schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA_VERSION {
        return Err(invalid(
            source,
            "schema",
            "schema",
            format!("unsupported schema version {schema}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

impl Scenario {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self, CliError> {
        Self::parse(&read_source(path)?, seed_override)
    }

    pub fn parse(source: &str, seed_override: Option<u64>) -> Result<Self, CliError> {
        let file: ScenarioFile = parse_json(source)?;
        check_schema(source, file.schema)?;

        let s = &file.slits;
        if s.n < 2 {
            return Err(invalid(
                source,
                "n",
                "slits.n",
                format!("slit count must be n >= 2, got {}", s.n),
            ));
        }
        if s.intensities.len() != s.n {
            return Err(invalid(
                source,
                "intensities",
                "slits.intensities",
                format!("expected {} values, got {}", s.n, s.intensities.len()),
            ));
        }
        let phases = s.phases.clone().unwrap_or_else(|| vec![0.0; s.n]);
        let slits = SlitArray::new(s.intensities.clone(), phases, s.spacing)
            .map_err(|e| invalid(source, "slits", "slits", e))?;

        let mut coherence_cfg = file.coherence.clone();
        if let Some(seed) = seed_override {
            match &mut coherence_cfg {
                CoherenceConfig::Random { seed: s, .. }
                | CoherenceConfig::AlignedRandom { seed: s, .. } => *s = seed,
                _ => {}
            }
        }
        let coherence = build_coherence(&coherence_cfg, s.n)
            .map_err(|e| invalid(source, "coherence", "coherence", e))?;

        let g = &file.geometry;
        let geometry = match g.window {
            Some([lo, hi]) => ScreenGeometry::new(
                g.wavelength,
                g.distance,
                lo,
                hi,
                g.samples,
                g.envelope,
                g.phase_model,
            ),
            None => ScreenGeometry::centered(
                g.wavelength,
                g.distance,
                s.spacing,
                g.half_width_w,
                g.samples,
                g.envelope,
            )
            .map(|geo| geo.with_phase_model(g.phase_model)),
        }
        .map_err(|e| invalid(source, "geometry", "geometry", e))?;

        let mut oracle = file.oracle.clone();
        if let Some(seed) = seed_override {
            oracle.seed = seed;
        }
        if oracle.enabled && oracle.realizations < duality_core::oracle::MIN_REALIZATIONS {
            return Err(invalid(
                source,
                "realizations",
                "oracle.realizations",
                format!(
                    "need at least {} realizations",
                    duality_core::oracle::MIN_REALIZATIONS
                ),
            ));
        }

        Ok(Self {
            slits,
            coherence,
            geometry,
            oracle,
            outputs: file.outputs,
        })
    }
}

fn complex_rows(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<Vec<Vec<Complex64>>, String> {
    if let Some(im) = im {
        if im.len() != re.len() || im.iter().zip(re).any(|(a, b)| a.len() != b.len()) {
            return Err("`re` and `im` must have the same shape".into());
        }
    }
    Ok(re
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &x)| Complex64::new(x, im.map_or(0.0, |m| m[i][k])))
                .collect()
        })
        .collect())
}

fn build_coherence(cfg: &CoherenceConfig, n: usize) -> Result<CoherenceMatrix, String> {
    let m = match cfg {
        CoherenceConfig::Identity => CoherenceMatrix::identity(n),
        CoherenceConfig::FullyCoherent => CoherenceMatrix::fully_coherent(n),
        CoherenceConfig::Uniform { g } => CoherenceMatrix::uniform(n, *g),
        CoherenceConfig::Explicit { re, im } => {
            let zeros;
            let im = match im {
                Some(im) => im,
                None => {
                    zeros = re.iter().map(|r| vec![0.0; r.len()]).collect();
                    &zeros
                }
            };
            CoherenceMatrix::from_json(&CoherenceJson {
                n,
                re: re.clone(),
                im: im.clone(),
            })
        }
        CoherenceConfig::Modes {
            re,
            im,
            polarization_angles,
            polarizations,
        } => {
            if re.len() != n {
                return Err(format!("expected {n} mode rows, got {}", re.len()));
            }
            let decomp = ModeDecomposition::new(complex_rows(re, im.as_ref())?)
                .map_err(|e| e.to_string())?;
            let pols = match (polarization_angles, polarizations) {
                (Some(_), Some(_)) => {
                    return Err("give either polarization_angles or polarizations".into())
                }
                (Some(a), None) => Some(PolarizationSet::linear(a)),
                (None, Some(p)) => Some(
                    PolarizationSet::new(
                        p.iter()
                            .map(|[x, y]| [Complex64::new(x[0], x[1]), Complex64::new(y[0], y[1])])
                            .collect(),
                    )
                    .map_err(|e| e.to_string())?,
                ),
                (None, None) => None,
            };
            CoherenceMatrix::from_modes(&decomp, pols.as_ref())
        }
        CoherenceConfig::Random { rank, seed } => random_coherence(n, *rank, *seed),
        CoherenceConfig::AlignedRandom { rank, seed } => random_aligned_coherence(n, *rank, *seed),
    };
    m.map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPolicy {
    /// rank = n
    Full,
    /// rank = 1, fully coherent
    One,
    Fixed(usize),
    /// uniform in 1..=n per instance
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema: u32,
    pub n_min: usize,
    pub n_max: usize,
    /// Instances per slit count.
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    pub rank: RankPolicy,
}

impl SweepConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self, CliError> {
        Self::parse(&read_source(path)?, seed_override)
    }

    pub fn parse(source: &str, seed_override: Option<u64>) -> Result<Self, CliError> {
        let mut cfg: SweepConfig = parse_json(source)?;
        check_schema(source, cfg.schema)?;
        if cfg.n_min < 2 {
            return Err(invalid(
                source,
                "n_min",
                "n_min",
                format!("slit count must be n >= 2, got {}", cfg.n_min),
            ));
        }
        if cfg.n_max < cfg.n_min {
            return Err(invalid(source, "n_max", "n_max", "must be >= n_min"));
        }
        if cfg.seeds == 0 {
            return Err(invalid(source, "seeds", "seeds", "must be positive"));
        }
        if cfg.rank == RankPolicy::Fixed(0) {
            return Err(invalid(source, "rank", "rank", "fixed rank must be positive"));
        }
        if let Some(seed) = seed_override {
            cfg.base_seed = seed;
        }
        Ok(cfg)
    }
}
