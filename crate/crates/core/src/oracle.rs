//! Monte-Carlo field ensembles.
//!
//! Each realization draws complex slit fields `E` with second moments
//! `<E_i E_j*> = J_ij = sqrt(I_i I_j) gamma_ij` by expanding in the
//! eigenmodes of `J` with independent circular Gaussian coefficients. The
//! screen intensity `|sum_i E_i sqrt(env(x)) exp(i psi_i(x))|^2` averaged over
//! realizations converges to the analytic pattern.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coherence::{CoherenceMatrix, PSD_TOL};
use crate::engine::{incoherent_at, pattern_with, slit_phase, InterferencePattern, PatternMeta, ScreenGeometry, SlitArray};
use crate::error::{Error, Result};
use crate::exec::Execution;

pub const MIN_REALIZATIONS: usize = 100;

/// Modes with eigenvalue below this fraction of `tr J` are dropped.
const MODE_FLOOR: f64 = 1e-13;

/// Fixed work-unit size bounds; chunking depends only on `N`, so results do
/// not depend on the thread count.
const MIN_CHUNK: usize = 256;
const MAX_CHUNKS: usize = 64;

#[derive(Debug, Clone)]
struct Mode {
    /// `sqrt(lambda_m)`
    amplitude: f64,
    vector: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    realizations: usize,
    seed: u64,
    n: usize,
    modes: Vec<Mode>,
}

impl EnsembleSpec {
    pub fn new(
        intensities: &[f64],
        coh: &CoherenceMatrix,
        realizations: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = intensities.len();
        if coh.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coh.n(),
            });
        }
        if realizations == 0 {
            return Err(Error::TooFewRealizations {
                required: 1,
                found: 0,
            });
        }
        let total = crate::engine::check_intensities(intensities)?;
        let j = mutual_intensity(intensities, coh);
        let eig = SymmetricEigen::new(j);
        let mut modes = Vec::new();
        for m in 0..n {
            let lambda = eig.eigenvalues[m];
            if lambda < -PSD_TOL * total {
                return Err(Error::NegativeEigenvalue(lambda));
            }
            if lambda <= MODE_FLOOR * total {
                continue;
            }
            modes.push(Mode {
                amplitude: lambda.sqrt(),
                vector: eig.eigenvectors.column(m).iter().copied().collect(),
            });
        }
        Ok(Self {
            realizations,
            seed,
            n,
            modes,
        })
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of retained eigenmodes.
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn fill_fields(&self, k: u64, out: &mut [Complex64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);
        out.fill(Complex64::new(0.0, 0.0));
        for mode in &self.modes {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let c = Complex64::new(re, im) * (mode.amplitude * std::f64::consts::FRAC_1_SQRT_2);
            for (e, u) in out.iter_mut().zip(&mode.vector) {
                *e += u * c;
            }
        }
    }
}

/// `J_ij = sqrt(I_i I_j) gamma_ij`
pub fn mutual_intensity(intensities: &[f64], coh: &CoherenceMatrix) -> DMatrix<Complex64> {
    let n = intensities.len();
    DMatrix::from_fn(n, n, |i, j| {
        coh.get(i, j) * (intensities[i] * intensities[j]).sqrt()
    })
}

/// Slit fields of realization `k`. Deterministic in `(seed, k)`.
pub fn realize_fields(spec: &EnsembleSpec, k: u64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); spec.n];
    spec.fill_fields(k, &mut out);
    out
}

/// Ensemble-averaged screen intensity over `realizations` fields.
pub fn mc_pattern(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
    realizations: usize,
    seed: u64,
) -> Result<InterferencePattern> {
    mc_pattern_with(slits, coh, geometry, realizations, seed, Execution::default())
}

pub fn mc_pattern_with(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
    realizations: usize,
    seed: u64,
    exec: Execution,
) -> Result<InterferencePattern> {
    if realizations < MIN_REALIZATIONS {
        return Err(Error::TooFewRealizations {
            required: MIN_REALIZATIONS,
            found: realizations,
        });
    }
    let spec = EnsembleSpec::new(slits.intensities(), coh, realizations, seed)?;
    let n = slits.n();
    let grid = geometry.grid();

    // phasors[k * n + i] = sqrt(env(x_k)) exp(i (psi_i(x_k) + alpha_i))
    let mut phasors = Vec::with_capacity(grid.len() * n);
    for &x in &grid {
        let amp = geometry.envelope().value(x).sqrt();
        for i in 0..n {
            let phase = slit_phase(geometry, slits, i, x) + slits.phases()[i];
            phasors.push(Complex64::from_polar(amp, phase));
        }
    }

    let chunk = MIN_CHUNK.max(realizations.div_ceil(MAX_CHUNKS));
    let chunks = realizations.div_ceil(chunk);
    let partial = exec.map_indexed(chunks, |c| {
        let start = c * chunk;
        let end = realizations.min(start + chunk);
        let mut acc = vec![0.0; grid.len()];
        let mut fields = vec![Complex64::new(0.0, 0.0); n];
        for k in start..end {
            spec.fill_fields(k as u64, &mut fields);
            for (a, row) in acc.iter_mut().zip(phasors.chunks_exact(n)) {
                let mut sum = Complex64::new(0.0, 0.0);
                for (e, p) in fields.iter().zip(row) {
                    sum += e * p;
                }
                *a += sum.norm_sqr();
            }
        }
        acc
    });

    let sums = pairwise_sum(&partial);
    let scale = 1.0 / realizations as f64;
    let total = sums.into_iter().map(|s| s * scale).collect();
    let incoherent = grid.iter().map(|&x| incoherent_at(slits, geometry, x)).collect();
    Ok(InterferencePattern {
        grid,
        total,
        incoherent,
        meta: PatternMeta::of(slits, geometry),
    })
}

/// Elementwise sum of equal-length vectors, combined as a balanced tree.
fn pairwise_sum(parts: &[Vec<f64>]) -> Vec<f64> {
    match parts.len() {
        0 => Vec::new(),
        1 => parts[0].clone(),
        len => {
            let (a, b) = parts.split_at(len / 2);
            let mut left = pairwise_sum(a);
            for (l, r) in left.iter_mut().zip(pairwise_sum(b)) {
                *l += r;
            }
            left
        }
    }
}

/// Largest deviation between two patterns on the same grid, relative to the
/// incoherent reference at each sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    #[serde(rename = "N")]
    pub realizations: usize,
    pub max_rel_dev: f64,
    pub at_x: f64,
}

impl ConvergenceReport {
    pub fn compare(
        mc: &InterferencePattern,
        analytic: &InterferencePattern,
        realizations: usize,
    ) -> Result<Self> {
        if mc.len() != analytic.len() {
            return Err(Error::DimensionMismatch {
                expected: analytic.len(),
                found: mc.len(),
            });
        }
        let mut worst = (0.0, analytic.grid.first().copied().unwrap_or(0.0));
        for k in 0..mc.len() {
            let reference = analytic.incoherent[k];
            if reference <= 0.0 {
                continue;
            }
            let dev = (mc.total[k] - analytic.total[k]).abs() / reference;
            if dev > worst.0 {
                worst = (dev, analytic.grid[k]);
            }
        }
        Ok(Self {
            realizations,
            max_rel_dev: worst.0,
            at_x: worst.1,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Relative deviation `|mc - analytic| / analytic` at grid index `k`.
pub fn relative_deviation_at(mc: &InterferencePattern, analytic: &InterferencePattern, k: usize) -> f64 {
    (mc.total[k] - analytic.total[k]).abs() / analytic.total[k]
}

/// Runs the oracle and compares it with the analytic pattern.
pub fn mc_validate(
    slits: &SlitArray,
    coh: &CoherenceMatrix,
    geometry: &ScreenGeometry,
    realizations: usize,
    seed: u64,
    exec: Execution,
) -> Result<(InterferencePattern, ConvergenceReport)> {
    let mc = mc_pattern_with(slits, coh, geometry, realizations, seed, exec)?;
    let analytic = pattern_with(slits, coh, geometry, exec)?;
    let report = ConvergenceReport::compare(&mc, &analytic, realizations)?;
    Ok((mc, report))
}
