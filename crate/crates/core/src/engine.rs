//! Analytic n-slit interference patterns for partially coherent light.
//!
//! At each screen position the intensity is
//!
//! ```text
//! I(x) = sum_i I_i(x) + sum_{i != j} sqrt(I_i(x) I_j(x)) |gamma_ij| cos(omega tau_ij + phi_ij)
//! ```
//!
//! with `I_i(x) = I_i * envelope(x)` and `phi_ij = alpha_i - alpha_j + arg(gamma_ij)`.
//! The propagation factor of each slit contributes only a common phase and a
//! magnitude, both of which are absorbed into the on-screen intensities.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coherence::CoherenceMatrix;
use crate::error::{Error, Result};
use crate::exec::Execution;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default screen window half-width, in fringe widths.
pub const DEFAULT_HALF_WIDTH_W: f64 = 4.0;
pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SlitArray {
    intensities: Vec<f64>,
    phases: Vec<f64>,
    spacing: f64,
}

impl SlitArray {
    pub fn new(intensities: Vec<f64>, phases: Vec<f64>, spacing: f64) -> Result<Self> {
        let n = intensities.len();
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phases.len(),
            });
        }
        check_intensities(&intensities)?;
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGeometry("slit phases must be finite"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGeometry("slit spacing must be positive"));
        }
        Ok(Self {
            intensities,
            phases,
            spacing,
        })
    }

    /// All intrinsic phases zero.
    pub fn in_phase(intensities: Vec<f64>, spacing: f64) -> Result<Self> {
        let n = intensities.len();
        Self::new(intensities, vec![0.0; n], spacing)
    }

    pub fn n(&self) -> usize {
        self.intensities.len()
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensities.iter().sum()
    }

    /// Transverse position of slit `i`; the array is centered on the axis.
    pub fn position(&self, i: usize) -> f64 {
        ((self.n() as f64 - 1.0) / 2.0 - i as f64) * self.spacing
    }

    /// Same array with every intensity multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.intensities.iter().map(|i| i * c).collect(),
            self.phases.clone(),
            self.spacing,
        )
    }
}

pub(crate) fn check_intensities(intensities: &[f64]) -> Result<f64> {
    for (index, &value) in intensities.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidIntensity { index, value });
        }
    }
    let total: f64 = intensities.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalIntensity);
    }
    Ok(total)
}

/// Per-slit intensity profile on the screen, shared by all slits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Uniform,
    /// `exp(-x^2 / (2 sigma^2))`, centered on the axis.
    Gaussian { sigma: f64 },
}

impl Envelope {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Envelope::Uniform => 1.0,
            Envelope::Gaussian { sigma } => (-0.5 * (x / sigma).powi(2)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Fraunhofer phase, linear in screen position.
    #[default]
    SmallAngle,
    /// Phase from the exact slit-to-screen path lengths.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenGeometry {
    wavelength: f64,
    distance: f64,
    x_min: f64,
    x_max: f64,
    samples: usize,
    envelope: Envelope,
    phase_model: PhaseModel,
}

impl ScreenGeometry {
    pub fn new(
        wavelength: f64,
        distance: f64,
        x_min: f64,
        x_max: f64,
        samples: usize,
        envelope: Envelope,
        phase_model: PhaseModel,
    ) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidGeometry("wavelength must be positive"));
        }
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::InvalidGeometry("screen distance must be positive"));
        }
        if !(x_min < x_max && x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGeometry("screen window needs x_min < x_max"));
        }
        if samples < 2 {
            return Err(Error::InvalidGeometry("need at least 2 samples"));
        }
        if let Envelope::Gaussian { sigma } = envelope {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidGeometry("gaussian envelope needs sigma > 0"));
            }
        }
        Ok(Self {
            wavelength,
            distance,
            x_min,
            x_max,
            samples,
            envelope,
            phase_model,
        })
    }

    /// Window `[-half_width_w * w, +half_width_w * w]` for slits of the given
    /// spacing, small-angle phase.
    pub fn centered(
        wavelength: f64,
        distance: f64,
        spacing: f64,
        half_width_w: f64,
        samples: usize,
        envelope: Envelope,
    ) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidGeometry("slit spacing must be positive"));
        }
        let half = half_width_w * wavelength * distance / spacing;
        Self::new(
            wavelength,
            distance,
            -half,
            half,
            samples,
            envelope,
            PhaseModel::SmallAngle,
        )
    }

    /// 4096 samples over +-4 fringe widths, uniform envelope.
    pub fn default_for(wavelength: f64, distance: f64, spacing: f64) -> Result<Self> {
        Self::centered(
            wavelength,
            distance,
            spacing,
            DEFAULT_HALF_WIDTH_W,
            DEFAULT_SAMPLES,
            Envelope::Uniform,
        )
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Result<Self> {
        self.envelope = envelope;
        Self::new(
            self.wavelength,
            self.distance,
            self.x_min,
            self.x_max,
            self.samples,
            envelope,
            self.phase_model,
        )
    }

    pub fn with_phase_model(mut self, phase_model: PhaseModel) -> Self {
        self.phase_model = phase_model;
        self
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn window(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn phase_model(&self) -> PhaseModel {
        self.phase_model
    }

    /// Angular frequency `2 pi c / lambda`.
    pub fn omega(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    /// Primary fringe width `lambda L / d`.
    pub fn fringe_width(&self, spacing: f64) -> f64 {
        self.wavelength * self.distance / spacing
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.samples - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        if k + 1 == self.samples {
            self.x_max
        } else {
            self.x_min + k as f64 * self.step()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.x(k)).collect()
    }
}

/// Propagation phase `omega t_i(x)` of slit `i` at screen position `x`,
/// relative to a common reference that cancels in every difference.
pub fn slit_phase(geometry: &ScreenGeometry, slits: &SlitArray, i: usize, x: f64) -> f64 {
    let lambda = geometry.wavelength;
    let l = geometry.distance;
    match geometry.phase_model {
        PhaseModel::SmallAngle => 2.0 * PI * i as f64 * slits.spacing * x / (lambda * l),
        PhaseModel::Exact => {
            let dx = x - slits.position(i);
            // r_i - L, written to avoid cancellation.
            let excess = dx * dx / (l.hypot(dx) + l);
            2.0 * PI * excess / lambda
        }
    }
}

/// Relative delay `tau_ij = t_i - t_j` in seconds.
pub fn delay(
    geometry: &ScreenGeometry,
    slits: &SlitArray,
    i: usize,
    j: usize,
    x: f64,
) -> Result<f64> {
    let n = slits.n();
    for index in [i, j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    let dphi = slit_phase(geometry, slits, i, x) - slit_phase(geometry, slits, j, x);
    Ok(dphi / geometry.omega())
}

/// Sampled intensity with its incoherent reference.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferencePattern {
    pub grid: Vec<f64>,
    pub total: Vec<f64>,
    pub incoherent: Vec<f64>,
    pub meta: PatternMeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMeta {
    pub n: usize,
    pub wavelength: f64,
    pub distance: f64,
    pub spacing: f64,
    pub envelope: Envelope,
}

impl PatternMeta {
    pub fn of(slits: &SlitArray, geometry: &ScreenGeometry) -> Self {
        Self {
            n: slits.n(),
            wavelength: geometry.wavelength,
            distance: geometry.distance,
            spacing: slits.spacing,
            envelope: geometry.envelope,
        }
    }

    pub fn fringe_width(&self) -> f64 {
        self.wavelength * self.distance / self.spacing
    }
}

impl InterferencePattern {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn fringe_width(&self) -> f64 {
        self.meta.fringe_width()
    }

    /// Pattern with both intensity channels multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            total: self.total.iter().map(|v| v * c).collect(),
            incoherent: self.incoherent.iter().map(|v| v * c).collect(),
            meta: self.meta,
        }
    }

    /// CSV with header `x,total,incoherent`. With `scale_w` positions are
    /// written in units of the fringe width.
    pub fn to_csv(&self, scale_w: bool) -> String {
        let w = if scale_w { self.fringe_width() } else { 1.0 };
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("x,total,incoherent\n");
        for k in 0..self.len() {
            let x = if scale_w { self.grid[k] / w } else { self.grid[k] };
            // Writing to a String is infallible.
            let _ = writeln!(out, "{},{},{}", x, self.total[k], self.incoherent[k]);
        }
        out
    }

    /// Parses the CSV written by [`to_csv`](Self::to_csv). The metadata is
    /// not part of the file and has to be supplied.
    pub fn from_csv(text: &str, meta: PatternMeta, scaled_w: bool) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedPattern("empty file".into()))?;
        if header.trim() != "x,total,incoherent" {
            return Err(Error::MalformedPattern(format!(
                "unexpected header {header:?}"
            )));
        }
        let w = if scaled_w { meta.fringe_width() } else { 1.0 };
        let (mut grid, mut total, mut incoherent) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::MalformedPattern(format!(
                    "line {}: expected 3 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::MalformedPattern(format!("line {}: {s:?}: {e}", lineno + 2))
                })
            };
            let x = parse(fields[0])?;
            grid.push(if scaled_w { x * w } else { x });
            total.push(parse(fields[1])?);
            incoherent.push(parse(fields[2])?);
        }
        if grid.len() < 2 {
            return Err(Error::MalformedPattern("need at least 2 samples".into()));
        }
        if grid.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::MalformedPattern("positions must increase".into()));
        }
        Ok(Self {
            grid,
            total,
            incoherent,
            meta,
        })
    }
}

/// Precomputed per-pair coefficients for fast pointwise evaluation.
struct PairTerms {
    /// (i, j, sqrt(I_i I_j) |gamma_ij|, alpha_i - alpha_j + arg gamma_ij)
    terms: Vec<(usize, usize, f64, f64)>,
    incoherent: f64,
}

impl PairTerms {
    fn new(slits: &SlitArray, coh: &CoherenceMatrix) -> Result<Self> {
        let n = slits.n();
        if coh.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coh.n(),
            });
        }
        let intens = slits.intensities();
        let mut terms = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let g = coh.get(i, j);
                let amp = (intens[i] * intens[j]).sqrt() * g.norm();
                let phase = slits.phases[i] - slits.phases[j] + g.arg();
                terms.push((i, j, amp, phase));
            }
        }
        Ok(Self {
            terms,
            incoherent: slits.total_intensity(),
        })
    }

    fn eval(&self, slits: &SlitArray, geometry: &ScreenGeometry, x: f64) -> (f64, f64) {
        let env = geometry.envelope.value(x);
        let n = slits.n();
        let psi: Vec<f64> = (0..n).map(|i| slit_phase(geometry, slits, i, x)).collect();
        let coherent: f64 = self
            .terms
            .iter()
            .map(|&(i, j, amp, phase)| amp * (psi[i] - psi[j] + phase).cos())
            .sum();
        let inc = self.incoherent * env;
        ((inc + env * coherent).max(0.0), inc)
    }
}

/// Analytic pattern on the geometry's grid.
pub fn pattern(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
) -> Result<InterferencePattern> {
    pattern_with(slits, coh, geometry, Execution::default())
}

pub fn pattern_with(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
    exec: Execution,
) -> Result<InterferencePattern> {
    let terms = PairTerms::new(slits, coh)?;
    let grid = geometry.grid();
    let values = exec.map_indexed(grid.len(), |k| terms.eval(slits, geometry, grid[k]));
    let (total, incoherent) = values.into_iter().unzip();
    Ok(InterferencePattern {
        grid,
        total,
        incoherent,
        meta: PatternMeta::of(slits, geometry),
    })
}

/// Analytic intensity at a single screen position.
pub fn intensity_at(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
    x: f64,
) -> Result<f64> {
    Ok(PairTerms::new(slits, coh)?.eval(slits, geometry, x).0)
}

/// Incoherent reference `sum_i I_i(x)` at a single screen position.
pub fn incoherent_at(slits: &SlitArray, geometry: &ScreenGeometry, x: f64) -> f64 {
    slits.total_intensity() * geometry.envelope.value(x)
}
