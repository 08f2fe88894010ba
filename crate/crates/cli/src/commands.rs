use std::path::{Path, PathBuf};

use duality_core::analysis::{extract_vc_at, incoherent_at};
use duality_core::{
    extract_michelson, find_primary_max, mc_validate, pattern_with, visibility_analytic,
    CoherenceMatrix, DualityReport, Execution, InterferencePattern, PatternMeta,
};
use serde::Serialize;

use crate::config::{parse_json, read_source, Scenario, SweepConfig};
use crate::error::CliError;
use crate::sweep::{run_sweep, SweepResult};

/// Operational and analytic visibilities agree when closer than this.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub scale_w: bool,
    pub seed: Option<u64>,
    pub exec: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            out: PathBuf::from("."),
            scale_w: false,
            seed: None,
            exec: Execution::default(),
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Operational read-out of a sampled pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub x_star: f64,
    pub i_max: f64,
    pub i_inc: f64,
    pub v_c_operational: f64,
    pub v_c_analytic: f64,
    pub abs_diff: f64,
    /// False when the phases do not line up all interference terms at one
    /// point, or the pattern is too coarse.
    pub agree: bool,
    /// `None` when no full fringe period fits in the window.
    pub michelson: Option<f64>,
}

pub fn analyze_pattern(
    pattern: &InterferencePattern,
    intensities: &[f64],
    coh: &CoherenceMatrix,
) -> Result<AnalysisReport, CliError> {
    let peak = find_primary_max(pattern, None)?;
    let v_op = extract_vc_at(pattern, &peak)?;
    let v_an = visibility_analytic(intensities, coh)?;
    let abs_diff = (v_op - v_an).abs();
    Ok(AnalysisReport {
        n: pattern.meta.n,
        x_star: peak.x_star,
        i_max: peak.i_max,
        i_inc: incoherent_at(pattern, peak.x_star),
        v_c_operational: v_op,
        v_c_analytic: v_an,
        abs_diff,
        agree: abs_diff <= AGREEMENT_TOL,
        michelson: extract_michelson(pattern).ok(),
    })
}

fn check_relations(report: &DualityReport) -> Result<(), CliError> {
    if report.relations_hold() {
        Ok(())
    } else {
        Err(CliError::Violation(format!(
            "pyth_lhs = {}, lin_lhs = {}",
            report.pyth_lhs, report.lin_lhs
        )))
    }
}

fn scenario_report(s: &Scenario) -> Result<DualityReport, CliError> {
    Ok(DualityReport::compute(s.slits.intensities(), &s.coherence)?)
}

/// Every artifact of a scenario: pattern CSV, duality report, analysis and,
/// when the oracle is enabled, the Monte-Carlo pattern and its convergence
/// report. Artifacts are written before the relation check so that a
/// violating run can be inspected.
pub fn run_scenario(config: &Path, opts: &Options) -> Result<DualityReport, CliError> {
    let s = Scenario::load(config, opts.seed)?;
    let scale_w = opts.scale_w || s.outputs.scale_w;
    let pat = pattern_with(&s.slits, &s.coherence, &s.geometry, opts.exec)?;
    write(&opts.out.join(&s.outputs.pattern), &pat.to_csv(scale_w))?;

    let report = scenario_report(&s)?;
    write(&opts.out.join(&s.outputs.report), &to_json(&report))?;

    let analysis = analyze_pattern(&pat, s.slits.intensities(), &s.coherence)?;
    write(&opts.out.join(&s.outputs.analysis), &to_json(&analysis))?;

    if s.oracle.enabled {
        write_oracle(&s, opts, scale_w)?;
    }
    check_relations(&report)?;
    Ok(report)
}

fn write_oracle(s: &Scenario, opts: &Options, scale_w: bool) -> Result<(), CliError> {
    let (mc, conv) = mc_validate(
        &s.slits,
        &s.coherence,
        &s.geometry,
        s.oracle.realizations,
        s.oracle.seed,
        opts.exec,
    )?;
    write(&opts.out.join(&s.outputs.mc_pattern), &mc.to_csv(scale_w))?;
    write(&opts.out.join(&s.outputs.convergence), &to_json(&conv))
}

pub fn cmd_pattern(config: &Path, opts: &Options) -> Result<(), CliError> {
    let s = Scenario::load(config, opts.seed)?;
    let pat = pattern_with(&s.slits, &s.coherence, &s.geometry, opts.exec)?;
    write(
        &opts.out.join(&s.outputs.pattern),
        &pat.to_csv(opts.scale_w || s.outputs.scale_w),
    )
}

pub fn cmd_measures(config: &Path, opts: &Options) -> Result<DualityReport, CliError> {
    let s = Scenario::load(config, opts.seed)?;
    let report = scenario_report(&s)?;
    write(&opts.out.join(&s.outputs.report), &to_json(&report))?;
    check_relations(&report)?;
    Ok(report)
}

/// Re-imports a pattern CSV; slit count and geometry come from the scenario.
pub fn cmd_analyze(config: &Path, input: &Path, opts: &Options) -> Result<AnalysisReport, CliError> {
    let s = Scenario::load(config, opts.seed)?;
    let text = read_source(input)?;
    let meta = PatternMeta::of(&s.slits, &s.geometry);
    let pat = InterferencePattern::from_csv(&text, meta, opts.scale_w || s.outputs.scale_w)?;
    let analysis = analyze_pattern(&pat, s.slits.intensities(), &s.coherence)?;
    write(&opts.out.join(&s.outputs.analysis), &to_json(&analysis))?;
    Ok(analysis)
}

pub fn cmd_mc_validate(config: &Path, opts: &Options) -> Result<(), CliError> {
    let s = Scenario::load(config, opts.seed)?;
    write_oracle(&s, opts, opts.scale_w || s.outputs.scale_w)
}

pub fn cmd_sweep(config: &Path, opts: &Options) -> Result<SweepResult, CliError> {
    let cfg = SweepConfig::load(config, opts.seed)?;
    let result = run_sweep(&cfg, opts.exec)?;
    write(&opts.out.join("sweep.csv"), &result.to_csv())?;
    if result.summary.violations > 0 {
        return Err(CliError::Violation(format!(
            "{} of {} instances",
            result.summary.violations, result.summary.instances
        )));
    }
    Ok(result)
}

/// Accepts either a bare coherence matrix (`{"n", "re", "im"}`) or a
/// scenario file.
pub fn cmd_gamma_n(config: &Path, opts: &Options) -> Result<f64, CliError> {
    let source = read_source(config)?;
    let value: serde_json::Value = parse_json(&source)?;
    let coh = if value.get("re").is_some() {
        CoherenceMatrix::from_json(&parse_json(&source)?)?
    } else {
        Scenario::parse(&source, opts.seed)?.coherence
    };
    Ok(coh.gamma_n())
}
