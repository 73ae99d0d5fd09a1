//! Entropy of mixtures, purifications, and the Schmidt symmetry of pure
//! bipartite states.
//!
//! For `rho = sum p_i rho_i` the mixing inequality reads
//! `h(rho) <= h(p) + sum p_i^2 h(rho_i)`, with equality when the `rho_i` have
//! mutually orthogonal supports.

use serde::{Deserialize, Serialize};

use crate::classical::{self, Distribution, Partition};
use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix, Subsystem};
use crate::measurement::{self, INEQUALITY_TOL};
use crate::state::{DensityMatrix, PureState, DENSITY_TOL};

/// Pairs with `tr(rho_i rho_j)` below this count as orthogonally supported.
pub const ORTHOGONAL_TOL: f64 = 1e-10;

/// Weighted family of states on a common space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        Distribution::new(weights.clone()).map_err(|e| Error::InvalidEnsemble(e.to_string()))?;
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                op: "Ensemble",
                left: (dim, dim),
                right: (bad.dim(), bad.dim()),
            });
        }
        Ok(Self { weights, states })
    }

    /// Ensemble of pure states.
    pub fn from_pure(weights: Vec<f64>, states: &[PureState]) -> Result<Self> {
        Self::new(weights, states.iter().map(PureState::density).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Unit vectors for each member, failing on any mixed member. Phases
    /// are fixed so the largest-weight component is real and positive.
    pub fn pure_members(&self) -> Result<Vec<PureState>> {
        self.states.iter().map(pure_vector).collect()
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            weights: Vec<f64>,
            states: Vec<DensityMatrix>,
        }
        let raw = Raw::deserialize(d)?;
        Ensemble::new(raw.weights, raw.states).map_err(serde::de::Error::custom)
    }
}

/// Recovers `|psi>` from a rank-one density by normalizing its heaviest
/// column: `rho e_k / sqrt(rho_kk) = psi * conj(psi_k) / |psi_k|`.
pub fn pure_vector(rho: &DensityMatrix) -> Result<PureState> {
    let purity = rho.purity();
    if (1.0 - purity).abs() > DENSITY_TOL {
        return Err(Error::NotPure { purity });
    }
    let m = rho.matrix();
    let k = (0..rho.dim())
        .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
        .expect("nonempty");
    PureState::normalized(m.col(k))
}

/// `sum p_i rho_i`.
pub fn mix(e: &Ensemble) -> DensityMatrix {
    let dim = e.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (p, rho) in e.weights.iter().zip(&e.states) {
        out = out.add(&rho.matrix().scale_real(*p)).expect("same shape");
    }
    DensityMatrix::from_trusted(out)
}

/// Both sides of the mixing inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixReport {
    /// `h(sum p_i rho_i)`
    pub lhs: f64,
    /// `h(p) + sum p_i^2 h(rho_i)`
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    /// Every pair satisfies `tr(rho_i rho_j) < ORTHOGONAL_TOL`.
    pub orthogonal_support: bool,
    pub holds: bool,
}

pub fn proposition2_check(e: &Ensemble) -> MixReport {
    let lhs = mix(e).logical_entropy();
    let sum_sq: f64 = e.weights.iter().map(|p| p * p).sum();
    let weight_entropy = 1.0 - sum_sq;
    let member_term: f64 = e
        .weights
        .iter()
        .zip(&e.states)
        .map(|(p, rho)| p * p * rho.logical_entropy())
        .sum();
    let rhs = weight_entropy + member_term;
    let slack = rhs - lhs;

    let mut orthogonal_support = true;
    'outer: for i in 0..e.len() {
        for j in i + 1..e.len() {
            let overlap = linalg::frobenius_inner(e.states[i].matrix(), e.states[j].matrix())
                .expect("same shape")
                .re;
            if overlap >= ORTHOGONAL_TOL {
                orthogonal_support = false;
                break 'outer;
            }
        }
    }
    let holds = slack >= -INEQUALITY_TOL && (!orthogonal_support || slack.abs() < INEQUALITY_TOL);
    MixReport {
        lhs,
        rhs,
        slack,
        orthogonal_support,
        holds,
    }
}

/// Rewrites each member in its eigenbasis, giving the pure ensemble
/// `{p_i lambda_ij, |lambda_ij>}`.
pub fn spectral_ensemble(e: &Ensemble) -> Result<Ensemble> {
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for (p, rho) in e.weights.iter().zip(&e.states) {
        let eig = rho.eigen();
        for (k, lambda) in eig.values.iter().enumerate() {
            weights.push(p * lambda.max(0.0));
            states.push(PureState::normalized(eig.vectors.col(k))?.density());
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ensemble::new(weights, states)
}

/// The refined mixing bound from member spectra, in flat and grouped form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBound {
    /// `1 - sum_ij (p_i lambda_ij)^2`
    pub flat: f64,
    /// `(1 - sum_i p_i^2) + sum_i p_i^2 (1 - sum_j lambda_ij^2)`
    pub grouped: f64,
}

pub fn spectral_bound(e: &Ensemble) -> SpectralBound {
    let spectra: Vec<Vec<f64>> = e.states.iter().map(DensityMatrix::spectrum).collect();
    let flat = 1.0
        - e.weights
            .iter()
            .zip(&spectra)
            .flat_map(|(p, lam)| lam.iter().map(move |l| (p * l).powi(2)))
            .sum::<f64>();
    let grouped = (1.0 - e.weights.iter().map(|p| p * p).sum::<f64>())
        + e.weights
            .iter()
            .zip(&spectra)
            .map(|(p, lam)| p * p * (1.0 - lam.iter().map(|l| l * l).sum::<f64>()))
            .sum::<f64>();
    SpectralBound { flat, grouped }
}

/// `sum_i sqrt(lambda_i) |v_i>|i>` on `S (x) B` with `dim B = dim S`.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let d = rho.dim();
    let eig = rho.eigen();
    let mut amps = vec![Complex::new(0.0, 0.0); d * d];
    for (i, lambda) in eig.values.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        for s in 0..d {
            amps[s * d + i] = eig.vectors[(s, i)] * w;
        }
    }
    PureState::normalized(amps).expect("unit trace")
}

/// Purification with a reference only as large as the rank of `rho`
/// (eigenvalues above `tol`). Returns the state on `S (x) R` and `dim R`.
pub fn purify_minimal(rho: &DensityMatrix, tol: f64) -> Result<(PureState, usize)> {
    let d = rho.dim();
    let eig = rho.eigen();
    let kept: Vec<usize> = (0..d).filter(|&i| eig.values[i] > tol).collect();
    let r = kept.len().max(1);
    let mut amps = vec![Complex::new(0.0, 0.0); d * r];
    for (slot, &i) in kept.iter().enumerate() {
        let w = eig.values[i].sqrt();
        for s in 0..d {
            amps[s * r + slot] = eig.vectors[(s, i)] * w;
        }
    }
    Ok((PureState::normalized(amps)?, r))
}

/// `|SB> = sum_i sqrt(p_i) |psi_i>|i>` with the register indexing members.
pub fn purify_ensemble(e: &Ensemble) -> Result<PureState> {
    let members = e.pure_members()?;
    let d = e.dim();
    let n = e.len();
    let mut amps = vec![Complex::new(0.0, 0.0); d * n];
    for (i, (p, psi)) in e.weights.iter().zip(&members).enumerate() {
        let w = p.sqrt();
        for (s, a) in psi.amplitudes().iter().enumerate() {
            amps[s * n + i] = a * w;
        }
    }
    PureState::new(amps)
}

/// Register state written entrywise, `(rho_B)_ij = sqrt(p_i p_j) <psi_j|psi_i>`.
pub fn register_state(e: &Ensemble) -> Result<DensityMatrix> {
    let members = e.pure_members()?;
    let n = e.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let overlap = linalg::inner(members[j].amplitudes(), members[i].amplitudes());
            m[(i, j)] = overlap * (e.weights[i] * e.weights[j]).sqrt();
        }
    }
    Ok(DensityMatrix::from_trusted(m))
}

fn reduced_states(psi: &PureState, dim_a: usize, dim_b: usize) -> Result<(DensityMatrix, DensityMatrix)> {
    if psi.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            op: "schmidt_entropy_symmetry",
            left: (psi.dim(), 1),
            right: (dim_a, dim_b),
        });
    }
    let full = psi.density();
    let a = linalg::partial_trace(full.matrix(), dim_a, dim_b, Subsystem::A)?;
    let b = linalg::partial_trace(full.matrix(), dim_a, dim_b, Subsystem::B)?;
    Ok((DensityMatrix::from_trusted(a), DensityMatrix::from_trusted(b)))
}

/// `(h(tr_B psi), h(tr_A psi))`.
pub fn schmidt_entropy_symmetry(psi: &PureState, dim_a: usize, dim_b: usize) -> Result<(f64, f64)> {
    let (a, b) = reduced_states(psi, dim_a, dim_b)?;
    Ok((a.logical_entropy(), b.logical_entropy()))
}

/// The chain `h(mix) = h(rho_B) <= h(measured rho_B) = h(p)` for an ensemble
/// of pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurificationChain {
    pub mixture_entropy: f64,
    pub register_entropy: f64,
    pub measured_register_entropy: f64,
    pub weights_entropy: f64,
}

impl PurificationChain {
    pub fn holds(&self) -> bool {
        (self.mixture_entropy - self.register_entropy).abs() <= INEQUALITY_TOL
            && self.register_entropy <= self.measured_register_entropy + INEQUALITY_TOL
            && (self.measured_register_entropy - self.weights_entropy).abs() <= INEQUALITY_TOL
    }
}

pub fn purification_chain(e: &Ensemble) -> Result<PurificationChain> {
    let sb = purify_ensemble(e)?;
    let (_, register) = reduced_states(&sb, e.dim(), e.len())?;
    let ps = measurement::projectors_from_partition(&Partition::discrete(e.len()), e.len())?;
    let measured = measurement::project(&register, &ps)?;
    let weights = Distribution::new(e.weights.clone())?;
    Ok(PurificationChain {
        mixture_entropy: mix(e).logical_entropy(),
        register_entropy: register.logical_entropy(),
        measured_register_entropy: measured.logical_entropy(),
        weights_entropy: classical::logical_entropy_dist(&weights),
    })
}

pub fn proof_step_b_check(e: &Ensemble) -> Result<bool> {
    Ok(purification_chain(e)?.holds())
}
