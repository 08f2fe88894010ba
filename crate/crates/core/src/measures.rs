//! Closed-form visibility and path-distinguishability measures and the two
//! duality relations they satisfy.
//!
//! All pair sums run over ordered pairs `i != j`. With weights
//! `w_ij = sqrt(I_i I_j) / sum_k I_k`:
//!
//! * `V_C = 1/(n-1) sum w_ij |gamma_ij|`
//! * `s   = 1/(n-1) sum w_ij`, `D = sqrt(1 - s^2)`, `D' = 1 - s`
//! * `D^2 + V_C^2 <= 1` and `D' + V_C <= 1`, both saturated by full coherence.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherence::CoherenceMatrix;
use crate::engine::check_intensities;
use crate::error::{Error, Result};

/// Slack allowed on `lhs <= 1` before an inequality counts as violated.
pub const INEQUALITY_TOL: f64 = 1e-12;

fn check(intensities: &[f64]) -> Result<f64> {
    if intensities.len() < 2 {
        return Err(Error::TooSmall(intensities.len()));
    }
    check_intensities(intensities)
}

fn check_pair(intensities: &[f64], coh: &CoherenceMatrix) -> Result<f64> {
    let total = check(intensities)?;
    if coh.n() != intensities.len() {
        return Err(Error::DimensionMismatch {
            expected: intensities.len(),
            found: coh.n(),
        });
    }
    Ok(total)
}

/// `sum_{i != j} sqrt(I_i I_j) / sum_k I_k * f(i, j)`, divided by `n - 1`.
fn weighted_pair_mean(intensities: &[f64], total: f64, f: impl Fn(usize, usize) -> f64) -> f64 {
    let n = intensities.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += (intensities[i] * intensities[j]).sqrt() / total * f(i, j);
            }
        }
    }
    sum / (n - 1) as f64
}

/// The overlap `s` summed pair by pair.
fn pair_overlap(intensities: &[f64], total: f64) -> f64 {
    weighted_pair_mean(intensities, total, |_, _| 1.0)
}

/// `1 - s`, evaluated as `sum_{i<j} (sqrt I_i - sqrt I_j)^2 / sum_{i<j} (I_i + I_j)`.
/// The denominator equals `(n-1) sum I`; summing it pairwise makes both limits
/// exact: zero for equal intensities, one when a single slit is open (a pair
/// with a dark slit contributes the identical term above and below).
fn one_minus_overlap(intensities: &[f64]) -> f64 {
    let n = intensities.len();
    let roots: Vec<f64> = intensities.iter().map(|i| i.sqrt()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (intensities[i], intensities[j]);
            num += if a == 0.0 || b == 0.0 {
                a + b
            } else {
                let diff = roots[i] - roots[j];
                diff * diff
            };
            den += a + b;
        }
    }
    (num / den).clamp(0.0, 1.0)
}

/// Generalized visibility `V_C` from the intensities and coherence matrix.
pub fn visibility_analytic(intensities: &[f64], coh: &CoherenceMatrix) -> Result<f64> {
    let total = check_pair(intensities, coh)?;
    Ok(weighted_pair_mean(intensities, total, |i, j| coh.modulus(i, j)))
}

/// `D = sqrt(1 - s^2)`.
pub fn distinguishability(intensities: &[f64]) -> Result<f64> {
    let d_prime = distinguishability_prime(intensities)?;
    // 1 - s^2 = (1 - s)(1 + s)
    Ok((d_prime * (2.0 - d_prime)).sqrt())
}

/// `D' = 1 - s`.
pub fn distinguishability_prime(intensities: &[f64]) -> Result<f64> {
    check(intensities)?;
    Ok(one_minus_overlap(intensities))
}

/// Michelson fringe contrast `(I_max - I_min) / (I_max + I_min)`.
pub fn michelson(i_max: f64, i_min: f64) -> Result<f64> {
    if !(i_max >= i_min && i_min >= 0.0 && i_max > 0.0 && i_max.is_finite()) {
        return Err(Error::InvalidExtrema { i_max, i_min });
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Left side built from the measure functions.
    pub lhs: f64,
    /// Right side evaluated from the pair sums.
    pub rhs: f64,
    pub residual: f64,
    /// `lhs <= 1 + INEQUALITY_TOL`
    pub holds: bool,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            holds: lhs <= 1.0 + INEQUALITY_TOL,
        }
    }
}

/// `D^2 + V_C^2` against `1 - s^2 + (sum w_ij |gamma_ij| / (n-1))^2`.
pub fn pythagorean_identity(intensities: &[f64], coh: &CoherenceMatrix) -> Result<IdentityCheck> {
    let total = check_pair(intensities, coh)?;
    let d = distinguishability(intensities)?;
    let v = visibility_analytic(intensities, coh)?;
    let s = pair_overlap(intensities, total);
    let g = weighted_pair_mean(intensities, total, |i, j| coh.modulus(i, j));
    Ok(IdentityCheck::new(d * d + v * v, 1.0 - s * s + g * g))
}

/// `D' + V_C` against `1 - sum w_ij (1 - |gamma_ij|) / (n-1)`.
pub fn linear_identity(intensities: &[f64], coh: &CoherenceMatrix) -> Result<IdentityCheck> {
    let total = check_pair(intensities, coh)?;
    let d_prime = distinguishability_prime(intensities)?;
    let v = visibility_analytic(intensities, coh)?;
    let deficit = weighted_pair_mean(intensities, total, |i, j| 1.0 - coh.modulus(i, j));
    Ok(IdentityCheck::new(d_prime + v, 1.0 - deficit))
}

/// Density matrix induced by the beams in the path basis,
/// `rho_ij = sqrt(I_i I_j) gamma_ij / sum_k I_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDensityMatrix {
    rho: DMatrix<Complex64>,
}

impl BeamDensityMatrix {
    pub fn n(&self) -> usize {
        self.rho.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
    }
}

pub fn density_from_beams(intensities: &[f64], coh: &CoherenceMatrix) -> Result<BeamDensityMatrix> {
    let total = check_pair(intensities, coh)?;
    let n = intensities.len();
    let rho = DMatrix::from_fn(n, n, |i, j| {
        coh.get(i, j) * ((intensities[i] * intensities[j]).sqrt() / total)
    });
    Ok(BeamDensityMatrix { rho })
}

/// l1 coherence normalized by `n - 1`: `C = 1/(n-1) sum_{i != j} |rho_ij|`.
pub fn quantum_coherence(rho: &BeamDensityMatrix) -> f64 {
    let n = rho.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += rho.rho[(i, j)].norm();
            }
        }
    }
    sum / (n - 1) as f64
}

/// All measures for one `(I, gamma)` instance. Field names are the JSON keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub v_c: f64,
    pub d: f64,
    pub d_prime: f64,
    pub gamma_n: f64,
    pub c: f64,
    pub pyth_lhs: f64,
    pub lin_lhs: f64,
    pub pyth_residual: f64,
    pub lin_residual: f64,
    pub pyth_holds: bool,
    pub lin_holds: bool,
}

impl DualityReport {
    pub fn compute(intensities: &[f64], coh: &CoherenceMatrix) -> Result<Self> {
        let pyth = pythagorean_identity(intensities, coh)?;
        let lin = linear_identity(intensities, coh)?;
        Ok(Self {
            n: intensities.len(),
            v_c: visibility_analytic(intensities, coh)?,
            d: distinguishability(intensities)?,
            d_prime: distinguishability_prime(intensities)?,
            gamma_n: coh.gamma_n(),
            c: quantum_coherence(&density_from_beams(intensities, coh)?),
            pyth_lhs: pyth.lhs,
            lin_lhs: lin.lhs,
            pyth_residual: pyth.residual,
            lin_residual: lin.residual,
            pyth_holds: pyth.holds,
            lin_holds: lin.holds,
        })
    }

    pub fn relations_hold(&self) -> bool {
        self.pyth_holds && self.lin_holds
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
