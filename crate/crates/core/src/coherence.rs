//! Normalized mutual-coherence matrices.
//!
//! A [`CoherenceMatrix`] holds the pairwise normalized coherences `gamma_ij`
//! between the fields at `n` slits. It is always Hermitian, has a unit
//! diagonal and is positive semidefinite, so that it can be realized by a
//! random field ensemble. Polarization overlap is folded into the entries at
//! construction time; downstream code sees a single scalar matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for the unit diagonal and Hermitian symmetry.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-10;
/// Polarization vectors must have unit norm within this tolerance.
pub const POLARIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceMatrix {
    entries: DMatrix<Complex64>,
}

impl CoherenceMatrix {
    /// Checks a raw matrix for the coherence-matrix invariants.
    ///
    /// Checks run in order: size, finiteness, unit diagonal, Hermitian
    /// symmetry, positive semidefiniteness, then `|gamma_ij| <= 1`.
    pub fn validate(raw: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = raw.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::TooSmall(rows));
        }
        let n = rows;
        for i in 0..n {
            for j in 0..n {
                let z = raw[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
            }
        }
        for i in 0..n {
            let d = raw[(i, i)];
            if (d - Complex64::new(1.0, 0.0)).norm() > STRUCTURE_TOL {
                return Err(Error::DiagonalNotUnit {
                    index: i,
                    re: d.re,
                    im: d.im,
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (raw[(i, j)] - raw[(j, i)].conj()).norm() > STRUCTURE_TOL {
                    return Err(Error::NotHermitian(i, j));
                }
            }
        }
        let min_eig = smallest_hermitian_eigenvalue(&raw);
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        for i in 0..n {
            for j in 0..n {
                if raw[(i, j)].norm() > 1.0 + STRUCTURE_TOL {
                    return Err(Error::ModulusExceedsOne(i, j));
                }
            }
        }
        Ok(Self { entries: raw })
    }

    /// Fully incoherent light: `gamma = I`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::validate(DMatrix::identity(n, n))
    }

    /// Fully coherent, phase-aligned light: every entry is 1.
    pub fn fully_coherent(n: usize) -> Result<Self> {
        Self::validate(DMatrix::from_element(n, n, Complex64::new(1.0, 0.0)))
    }

    /// Equal real coherence `g` between every pair of slits.
    pub fn uniform(n: usize, g: f64) -> Result<Self> {
        let mut m = DMatrix::from_element(n, n, Complex64::new(g, 0.0));
        m.fill_diagonal(Complex64::new(1.0, 0.0));
        Self::validate(m)
    }

    /// Builds `gamma_ij = <s_i, s_j> <v_i, v_j> / (|v_i| |v_j|)`.
    ///
    /// Without polarizations the overlap factor is 1.
    pub fn from_modes(
        decomp: &ModeDecomposition,
        pols: Option<&PolarizationSet>,
    ) -> Result<Self> {
        let n = decomp.n();
        if let Some(p) = pols {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.len(),
                });
            }
        }
        let v = &decomp.vectors;
        let norms: Vec<f64> = (0..n).map(|i| v.row(i).norm()).collect();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
            for j in (i + 1)..n {
                let mut inner = Complex64::new(0.0, 0.0);
                for k in 0..decomp.rank() {
                    inner += v[(i, k)] * v[(j, k)].conj();
                }
                let mut g = inner / (norms[i] * norms[j]);
                if let Some(p) = pols {
                    g *= p.overlap(i, j);
                }
                m[(i, j)] = g;
                m[(j, i)] = g.conj();
            }
        }
        Self::validate(m)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// `|gamma_ij|`.
    pub fn modulus(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)].norm()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        smallest_hermitian_eigenvalue(&self.entries)
    }

    /// n-point degree of coherence: the mean of `|gamma_ij|` over ordered
    /// pairs `i != j`.
    pub fn gamma_n(&self) -> f64 {
        let n = self.n();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += self.modulus(i, j);
                }
            }
        }
        sum / (n * (n - 1)) as f64
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        if let Some(&bad) = perm.iter().find(|&&p| p >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let m = DMatrix::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]);
        Self::validate(m)
    }

    pub fn to_json(&self) -> CoherenceJson {
        let n = self.n();
        CoherenceJson {
            n,
            re: (0..n)
                .map(|i| (0..n).map(|j| self.entries[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| self.entries[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &CoherenceJson) -> Result<Self> {
        let n = json.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&json.re) || !shape_ok(&json.im) {
            let found = json.re.len().max(json.im.len());
            return Err(Error::DimensionMismatch { expected: n, found });
        }
        Self::validate(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(json.re[i][j], json.im[i][j])
        }))
    }

    pub fn to_json_string(&self) -> String {
        // Serializing plain numbers and vectors cannot fail.
        serde_json::to_string(&self.to_json()).expect("coherence matrix serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: CoherenceJson = serde_json::from_str(s)?;
        Self::from_json(&json)
    }
}

/// Wire format: `{"n": int, "re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Per-slit complex mode amplitudes; row `i` describes the field at slit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    vectors: DMatrix<Complex64>,
}

impl ModeDecomposition {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let r = rows[0].len();
        if r == 0 {
            return Err(Error::ZeroNormRow(0));
        }
        for row in &rows {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: row.len(),
                });
            }
        }
        let vectors = DMatrix::from_fn(n, r, |i, k| rows[i][k]);
        for i in 0..n {
            let norm = vectors.row(i).norm();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::ZeroNormRow(i));
            }
        }
        Ok(Self { vectors })
    }

    /// Real-valued modes, convenient for phase-aligned coherence.
    pub fn from_real(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn rank(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        self.vectors.row(i).iter().copied().collect()
    }
}

/// Pure polarization state (Jones vector) per slit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationSet {
    states: Vec<[Complex64; 2]>,
}

impl PolarizationSet {
    pub fn new(states: Vec<[Complex64; 2]>) -> Result<Self> {
        for (i, s) in states.iter().enumerate() {
            let norm = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > POLARIZATION_TOL {
                return Err(Error::NotUnitPolarization(i));
            }
        }
        Ok(Self { states })
    }

    /// Linear polarizations at the given angles (radians from the x axis).
    pub fn linear(angles: &[f64]) -> Self {
        let states = angles
            .iter()
            .map(|a| [Complex64::new(a.cos(), 0.0), Complex64::new(a.sin(), 0.0)])
            .collect();
        Self { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> [Complex64; 2] {
        self.states[i]
    }

    /// `<s_i, s_j> = s_i . conj(s_j)`
    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        let (a, b) = (self.states[i], self.states[j]);
        a[0] * b[0].conj() + a[1] * b[1].conj()
    }
}

/// Gram matrix of `n` random complex unit vectors of dimension `rank`.
///
/// Components are independent complex Gaussians, so the vectors are uniform
/// on the unit sphere. Deterministic in `seed`.
pub fn random_coherence(n: usize, rank: usize, seed: u64) -> Result<CoherenceMatrix> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if rank == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..rank)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    CoherenceMatrix::from_modes(&ModeDecomposition::new(rows)?, None)
}

/// Like [`random_coherence`] but with real, nonnegative entries, so every
/// interference term peaks at zero path difference.
pub fn random_aligned_coherence(n: usize, rank: usize, seed: u64) -> Result<CoherenceMatrix> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if rank == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..rank)
                .map(|_| {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    x.abs()
                })
                .collect()
        })
        .collect();
    CoherenceMatrix::from_modes(&ModeDecomposition::from_real(rows)?, None)
}

fn smallest_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    // Symmetrize first so that tolerated asymmetry does not bias the solver.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.min()
}
