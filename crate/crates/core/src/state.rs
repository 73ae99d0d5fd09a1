//! Density matrices, pure states, and the logical entropy `h(rho) = 1 - tr(rho^2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix, HermitianEigen};

/// Default validation tolerance for densities.
pub const DENSITY_TOL: f64 = 1e-9;

/// Pure-state norms further than this from 1 are rejected rather than
/// renormalized.
pub const NORM_REJECT_TOL: f64 = 1e-6;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with the default tolerance.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        validate_density(mat, DENSITY_TOL)
    }

    /// Wraps a matrix that is a density by construction (products of valid
    /// operations). Skips the eigenvalue check.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn logical_entropy(&self) -> f64 {
        logical_entropy(self)
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn eigen(&self) -> HermitianEigen {
        linalg::hermitian_eigen(&self.mat).expect("density matrices are Hermitian")
    }

    /// Eigenvalues, ascending, with tiny negatives clamped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigen().values.into_iter().map(|x| x.max(0.0)).collect()
    }

    /// Whether purity is 1 within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        (1.0 - self.purity()).abs() <= tol
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().values.iter().filter(|&&x| x > tol).count()
    }

    /// `U rho U^dag`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let out = u.matmul(&self.mat)?.matmul(&u.dagger())?;
        Ok(Self::from_trusted(out))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Diagonal density from a probability vector. Caller guarantees the
    /// vector is a distribution.
    pub fn from_probabilities(p: &[f64]) -> Self {
        Self::from_trusted(ComplexMatrix::from_real_diagonal(p))
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mat = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(mat).map_err(serde::de::Error::custom)
    }
}

/// A unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex>,
}

impl PureState {
    /// Accepts amplitudes whose norm is within [`NORM_REJECT_TOL`] of 1 and
    /// renormalizes them exactly.
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        let norm = linalg::vec_norm(&amps);
        if amps.is_empty() || !norm.is_finite() || (norm - 1.0).abs() > NORM_REJECT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self::normalized(amps).expect("nonzero norm"))
    }

    /// Scales any nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex>) -> Result<Self> {
        let norm = linalg::vec_norm(&amps);
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![linalg::ZERO; dim];
        amps[index] = linalg::ONE;
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `|self> (x) |other>`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { amps }
    }

    pub fn density(&self) -> DensityMatrix {
        density_from_pure(self)
    }
}

/// `|psi><psi|`.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_trusted(ComplexMatrix::outer(&psi.amps, &psi.amps))
}

/// Checks hermiticity, unit trace, then positivity, each against `tol`.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    m.require_square()?;
    let deviation = m.hermiticity_deviation()?;
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let tr = linalg::trace(&m)?;
    let deviation = (tr - linalg::ONE).norm();
    if deviation > tol {
        return Err(Error::BadTrace {
            trace: tr.re,
            deviation,
        });
    }
    let ev = linalg::hermitian_eigenvalues(&m)?;
    let min_eigenvalue = ev[0];
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { mat: m })
}

/// `1 - tr(rho^2)`, with `tr(rho^2)` taken as the Frobenius self-inner product.
pub fn logical_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

/// `tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    linalg::frobenius_inner(&rho.mat, &rho.mat)
        .expect("same shape")
        .re
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded random generators. The `*_with` variants draw from a caller-owned
/// RNG so one seed can drive several draws.
pub mod sample {
    use super::*;

    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Matrix of i.i.d. standard complex normal entries.
    pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
        ComplexMatrix::new(rows, cols, data).expect("positive dims")
    }

    /// `G G^dag / tr(G G^dag)` with `G` of shape `dim x rank`.
    pub fn density_with_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
        assert!(dim >= 1 && rank >= 1 && rank <= dim);
        let g = ginibre(rng, dim, rank);
        let w = g.matmul(&g.dagger()).expect("conformable");
        let tr = linalg::trace(&w).expect("square").re;
        let w = w.scale_real(1.0 / tr).hermitian_part().expect("square");
        DensityMatrix::from_trusted(w)
    }

    pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
        density_with_rank(rng, dim, dim)
    }

    /// Haar unitary: Gram-Schmidt on Ginibre columns, which yields the QR
    /// factor with a positive real `R` diagonal.
    pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
        assert!(dim >= 1);
        loop {
            let g = ginibre(rng, dim, dim);
            let cols: Vec<Vec<Complex>> = (0..dim).map(|j| g.col(j)).collect();
            if let Some(q) = linalg::orthonormal_columns(&cols, dim) {
                return q;
            }
        }
    }

    /// Uniformly distributed pure state.
    pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
        loop {
            let amps: Vec<Complex> = (0..dim).map(|_| gaussian(rng)).collect();
            if let Ok(psi) = PureState::normalized(amps) {
                return psi;
            }
        }
    }
}

/// Ginibre random density, deterministic in `seed`.
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    sample::density(&mut rng(seed), dim)
}

/// Haar random unitary, deterministic in `seed`.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    sample::unitary(&mut rng(seed), dim)
}

pub fn random_pure_state(dim: usize, seed: u64) -> PureState {
    sample::pure_state(&mut rng(seed), dim)
}
