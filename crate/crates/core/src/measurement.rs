//! Projective measurements built from partitions of a basis, and the
//! entropy bookkeeping for the post-measurement state `sum P_i rho P_i`.

use serde::Serialize;

use crate::classical::Partition;
use crate::error::{Error, Result};
use crate::linalg::{self, Complex, ComplexMatrix};
use crate::state::DensityMatrix;

/// Tolerance on projector idempotence, hermiticity, completeness and
/// mutual orthogonality.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Maximum imaginary residue tolerated in the off-block pair sum.
pub const IMAGINARY_TOL: f64 = 1e-12;

/// Slack granted to entropy inequalities.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Orthogonal projectors summing to the identity.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    projectors: Vec<ComplexMatrix>,
    /// Block label of each basis index when every projector is a 0/1
    /// diagonal matrix.
    labels: Option<Vec<usize>>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidProjectors("empty set".into()))?;
        let dim = first.require_square()?;
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    op: "ProjectorSet",
                    left: (dim, dim),
                    right: p.shape(),
                });
            }
            let herm = p.hermiticity_deviation()?;
            let idem = p.matmul(p)?.max_abs_diff(p)?;
            if herm > PROJECTOR_TOL || idem > PROJECTOR_TOL {
                return Err(Error::InvalidProjectors(format!(
                    "projector {i}: hermiticity {herm:e}, idempotence {idem:e}"
                )));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let overlap = p.matmul(q)?.max_abs_diff(&ComplexMatrix::zeros(dim, dim))?;
                if overlap > PROJECTOR_TOL {
                    return Err(Error::InvalidProjectors(format!(
                        "projectors {i} and {j} overlap by {overlap:e}"
                    )));
                }
            }
            total = total.add(p)?;
        }
        let gap = total.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if gap > PROJECTOR_TOL {
            return Err(Error::InvalidProjectors(format!(
                "projectors sum to identity only within {gap:e}"
            )));
        }
        let labels = basis_labels(&projectors);
        Ok(Self { projectors, labels })
    }

    /// `P_i = sum_{k in group i} |v_k><v_k|` for the columns `v_k` of a
    /// unitary `basis`. With a non-identity basis the result is not aligned
    /// with the computational basis.
    pub fn from_basis_groups(basis: &ComplexMatrix, groups: &Partition) -> Result<Self> {
        let dim = basis.require_square()?;
        if groups.len() != dim {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} elements, basis has {dim}",
                groups.len()
            )));
        }
        let projectors = groups
            .blocks()
            .iter()
            .map(|block| {
                let mut p = ComplexMatrix::zeros(dim, dim);
                for &k in block {
                    let v = basis.col(k);
                    p = p.add(&ComplexMatrix::outer(&v, &v))?;
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(projectors)
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn is_basis_aligned(&self) -> bool {
        self.labels.is_some()
    }

    /// The partition of basis indices, when basis-aligned.
    pub fn basis_labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }
}

fn basis_labels(projectors: &[ComplexMatrix]) -> Option<Vec<usize>> {
    let dim = projectors[0].rows();
    let mut labels = vec![usize::MAX; dim];
    for (b, p) in projectors.iter().enumerate() {
        for i in 0..dim {
            for j in 0..dim {
                let z = p[(i, j)];
                if i != j {
                    if z.norm() > PROJECTOR_TOL {
                        return None;
                    }
                } else if (z - linalg::ONE).norm() <= PROJECTOR_TOL {
                    labels[i] = b;
                } else if z.norm() > PROJECTOR_TOL {
                    return None;
                }
            }
        }
    }
    // Completeness guarantees every index was claimed exactly once.
    Some(labels)
}

/// Computational-basis projectors `P_i = sum_{k in B_i} |k><k|`.
pub fn projectors_from_partition(partition: &Partition, dim: usize) -> Result<ProjectorSet> {
    if partition.len() != dim {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} indices, dimension is {dim}",
            partition.len()
        )));
    }
    let projectors = partition
        .blocks()
        .iter()
        .map(|block| {
            let mut p = ComplexMatrix::zeros(dim, dim);
            for &k in block {
                p[(k, k)] = linalg::ONE;
            }
            p
        })
        .collect();
    Ok(ProjectorSet {
        projectors,
        labels: Some(partition.labels().to_vec()),
    })
}

/// `sum P_i rho P_i`.
pub fn project(rho: &DensityMatrix, ps: &ProjectorSet) -> Result<DensityMatrix> {
    let m = rho.matrix();
    if m.rows() != ps.dim() {
        return Err(Error::DimensionMismatch {
            op: "project",
            left: m.shape(),
            right: (ps.dim(), ps.dim()),
        });
    }
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for p in &ps.projectors {
        out = out.add(&p.matmul(m)?.matmul(p)?)?;
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Sum of `x_kl x_lk` over index pairs in different blocks, which for a
/// Hermitian matrix is the off-block squared mass `sum |x_kl|^2`. Errors if
/// the pair sum carries an imaginary part above [`IMAGINARY_TOL`].
pub fn off_block_mass(m: &ComplexMatrix, labels: &[usize]) -> Result<f64> {
    let n = m.require_square()?;
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            op: "off_block_mass",
            left: m.shape(),
            right: (labels.len(), labels.len()),
        });
    }
    let mut pair_sum = Complex::new(0.0, 0.0);
    let mut mass = 0.0;
    for k in 0..n {
        for l in 0..n {
            if labels[k] != labels[l] {
                pair_sum += m[(k, l)] * m[(l, k)];
                mass += m[(k, l)].norm_sqr();
            }
        }
    }
    if pair_sum.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue(pair_sum.im.abs()));
    }
    Ok(mass)
}

/// The two pieces of `tr(rho^2)` under a basis-aligned measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityDecomposition {
    /// `tr(rho^2)`
    pub purity: f64,
    /// `tr(rho_hat^2)`
    pub projected_purity: f64,
    /// Off-block pair sum.
    pub off_block_mass: f64,
}

impl PurityDecomposition {
    /// `|tr(rho^2) - tr(rho_hat^2) - off_block_mass|`.
    pub fn residual(&self) -> f64 {
        (self.purity - self.projected_purity - self.off_block_mass).abs()
    }
}

pub fn proposition1_decomposition(
    rho: &DensityMatrix,
    ps: &ProjectorSet,
) -> Result<PurityDecomposition> {
    let labels = ps.basis_labels().ok_or(Error::NotBasisAligned)?;
    let projected = project(rho, ps)?;
    Ok(PurityDecomposition {
        purity: rho.purity(),
        projected_purity: projected.purity(),
        off_block_mass: off_block_mass(rho.matrix(), labels)?,
    })
}

/// `h(rho_hat) - h(rho)`; equals the off-block mass.
pub fn corollary1_check(rho: &DensityMatrix, ps: &ProjectorSet) -> Result<f64> {
    if !ps.is_basis_aligned() {
        return Err(Error::NotBasisAligned);
    }
    let projected = project(rho, ps)?;
    Ok(projected.logical_entropy() - rho.logical_entropy())
}

/// `h(rho) <= h(rho_hat)` within [`INEQUALITY_TOL`]; any projector set.
pub fn corollary2_check(rho: &DensityMatrix, ps: &ProjectorSet) -> Result<bool> {
    let projected = project(rho, ps)?;
    Ok(rho.logical_entropy() <= projected.logical_entropy() + INEQUALITY_TOL)
}
