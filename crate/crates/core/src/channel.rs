//! Noise from a system-environment coupling unitary.
//!
//! The joint space is ordered environment-major: the composite index of
//! environment state `e` and system state `s` is `e * dim_s + s`, i.e. joint
//! operators live on `E (x) S` with the environment as the slow factor. In
//! this ordering the environment-indexed blocks of a joint matrix are
//! contiguous `dim_s x dim_s` tiles, and
//!
//! * `E_i = <i|U|env_init>` is the `(i, env_init)` tile of `U`,
//! * `B_ij = <i| U (|env_init><env_init| (x) rho) U^dag |j>` is the `(i, j)`
//!   tile of the coupled state,
//! * `tr_E` of the coupled state is `sum_i B_ii = sum_i E_i rho E_i^dag`.
//!
//! The logical entropy of the reduced state is bounded above by the total
//! squared mass of the off-diagonal tiles whenever the input is pure.

use serde::{Deserialize, Serialize};

use crate::classical::Partition;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Subsystem};
use crate::measurement::{self, INEQUALITY_TOL};
use crate::mixing;
use crate::state::{DensityMatrix, PureState, DENSITY_TOL};

/// Unitarity tolerance for coupling models.
pub const UNITARY_TOL: f64 = 1e-9;
/// Completeness tolerance for Kraus sets supplied directly.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Completeness deviation beyond which extraction from a dilation fails.
pub const EXTRACTION_TOL: f64 = 1e-6;
/// Eigenvalues at or below this are dropped when purifying for the exchange
/// entropy.
pub const RANK_TOL: f64 = 1e-12;

/// A unitary on `E (x) S` together with the environment's initial basis state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingModel {
    unitary: ComplexMatrix,
    dim_s: usize,
    dim_e: usize,
    env_init: usize,
}

impl CouplingModel {
    pub fn new(unitary: ComplexMatrix, dim_s: usize, dim_e: usize, env_init: usize) -> Result<Self> {
        let side = unitary.require_square()?;
        if dim_s == 0 || dim_e == 0 || side != dim_s * dim_e {
            return Err(Error::InvalidModel(format!(
                "unitary side {side} is not dim_s * dim_e = {dim_s} * {dim_e}"
            )));
        }
        if env_init >= dim_e {
            return Err(Error::InvalidModel(format!(
                "env_init {env_init} out of range for dim_e {dim_e}"
            )));
        }
        let deviation = unitary.unitarity_deviation()?;
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            unitary,
            dim_s,
            dim_e,
            env_init,
        })
    }

    /// No coupling at all.
    pub fn identity(dim_s: usize, dim_e: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim_s * dim_e), dim_s, dim_e, 0).expect("identity is unitary")
    }

    /// `U_S` acting on the system alone, environment untouched.
    pub fn system_only(u_s: &ComplexMatrix, dim_e: usize) -> Result<Self> {
        let dim_s = u_s.require_square()?;
        Self::new(linalg::kron(&ComplexMatrix::identity(dim_e), u_s), dim_s, dim_e, 0)
    }

    /// Starts the environment in an arbitrary pure state by folding a unitary
    /// `W` with `W|0> = env_state` into the coupling: `U <- U (W (x) I_S)`.
    pub fn with_initial_environment(
        unitary: ComplexMatrix,
        dim_s: usize,
        env_state: &PureState,
    ) -> Result<Self> {
        let dim_e = env_state.dim();
        let mut candidates = vec![env_state.amplitudes().to_vec()];
        candidates.extend((0..dim_e).map(|k| PureState::basis(dim_e, k).amplitudes().to_vec()));
        let w = linalg::orthonormal_columns(&candidates, dim_e)
            .ok_or_else(|| Error::InvalidModel("cannot complete environment basis".into()))?;
        let folded = unitary.matmul(&linalg::kron(&w, &ComplexMatrix::identity(dim_s)))?;
        Self::new(folded, dim_s, dim_e, 0)
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn env_init(&self) -> usize {
        self.env_init
    }

    fn require_system_dim(&self, dim: usize, op: &'static str) -> Result<()> {
        if dim != self.dim_s {
            return Err(Error::DimensionMismatch {
                op,
                left: (dim, dim),
                right: (self.dim_s, self.dim_s),
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for CouplingModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            unitary: ComplexMatrix,
            dim_s: usize,
            dim_e: usize,
            #[serde(default)]
            env_init: usize,
        }
        let raw = Raw::deserialize(d)?;
        CouplingModel::new(raw.unitary, raw.dim_s, raw.dim_e, raw.env_init)
            .map_err(serde::de::Error::custom)
    }
}

/// Operators `E_i` with `sum E_i^dag E_i = I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::unchecked(ops)?;
        let deviation = set.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Incomplete { deviation });
        }
        Ok(set)
    }

    fn unchecked(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidModel("empty Kraus set".into()))?;
        let dim = first.require_square()?;
        if let Some(bad) = ops.iter().find(|e| e.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch {
                op: "KrausSet",
                left: (dim, dim),
                right: bad.shape(),
            });
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `max |(sum E_i^dag E_i - I)_kl|`.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for e in &self.ops {
            total = total
                .add(&e.dagger().matmul(e).expect("square"))
                .expect("same shape");
        }
        total
            .max_abs_diff(&ComplexMatrix::identity(dim))
            .expect("same shape")
    }
}

impl<'de> Deserialize<'de> for KrausSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            ops: Vec<ComplexMatrix>,
        }
        KrausSet::new(Raw::deserialize(d)?.ops).map_err(serde::de::Error::custom)
    }
}

/// The joint state cut into `dim_e x dim_e` tiles of size `dim_s x dim_s`.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    blocks: Vec<Vec<ComplexMatrix>>,
    dim_s: usize,
    dim_e: usize,
    source: DensityMatrix,
}

impl BlockMatrix {
    /// Tile `B_ij`.
    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i][j]
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn source(&self) -> &DensityMatrix {
        &self.source
    }

    /// Stitches the tiles back into the joint matrix.
    pub fn reassemble(&self) -> ComplexMatrix {
        let n = self.dim_s * self.dim_e;
        let mut out = ComplexMatrix::zeros(n, n);
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                for r in 0..self.dim_s {
                    for c in 0..self.dim_s {
                        out[(i * self.dim_s + r, j * self.dim_s + c)] = b[(r, c)];
                    }
                }
            }
        }
        out
    }

    /// `sum_i B_ii`, the system state with the environment traced out.
    pub fn diagonal_sum(&self) -> DensityMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_s, self.dim_s);
        for i in 0..self.dim_e {
            out = out.add(&self.blocks[i][i]).expect("same shape");
        }
        DensityMatrix::from_trusted(out)
    }
}

/// Partition of joint indices into environment blocks
/// `{e * dim_s, ..., e * dim_s + dim_s - 1}`.
pub fn environment_partition(dim_s: usize, dim_e: usize) -> Partition {
    Partition::contiguous(dim_e, dim_s)
}

/// `U (|env_init><env_init| (x) rho) U^dag`.
pub fn couple(rho: &DensityMatrix, model: &CouplingModel) -> Result<DensityMatrix> {
    model.require_system_dim(rho.dim(), "couple")?;
    let env = PureState::basis(model.dim_e, model.env_init);
    let env = ComplexMatrix::outer(env.amplitudes(), env.amplitudes());
    let product = DensityMatrix::from_trusted(linalg::kron(&env, rho.matrix()));
    product.conjugate_by(&model.unitary)
}

/// `E_i = <i|U|env_init>`.
pub fn extract_kraus(model: &CouplingModel) -> Result<KrausSet> {
    let ds = model.dim_s;
    let ops = (0..model.dim_e)
        .map(|i| model.unitary.submatrix(i * ds, model.env_init * ds, ds, ds))
        .collect::<Result<Vec<_>>>()?;
    let set = KrausSet::unchecked(ops)?;
    let deviation = set.completeness_deviation();
    if deviation > EXTRACTION_TOL {
        return Err(Error::Incomplete { deviation });
    }
    Ok(set)
}

/// `sum E_i rho E_i^dag`.
pub fn apply_channel(rho: &DensityMatrix, kraus: &KrausSet) -> Result<DensityMatrix> {
    if rho.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch {
            op: "apply_channel",
            left: rho.matrix().shape(),
            right: (kraus.dim(), kraus.dim()),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for e in &kraus.ops {
        out = out.add(&e.matmul(rho.matrix())?.matmul(&e.dagger())?)?;
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// `tr_E` of a joint state on `E (x) S`.
pub fn trace_out_environment(joint: &DensityMatrix, dim_s: usize, dim_e: usize) -> Result<DensityMatrix> {
    let reduced = linalg::partial_trace(joint.matrix(), dim_e, dim_s, Subsystem::B)?;
    Ok(DensityMatrix::from_trusted(reduced))
}

pub fn block_decompose(joint: &DensityMatrix, dim_s: usize, dim_e: usize) -> Result<BlockMatrix> {
    let m = joint.matrix();
    if dim_s == 0 || dim_e == 0 || m.rows() != dim_s * dim_e {
        return Err(Error::DimensionMismatch {
            op: "block_decompose",
            left: m.shape(),
            right: (dim_s * dim_e, dim_s * dim_e),
        });
    }
    let blocks = (0..dim_e)
        .map(|i| {
            (0..dim_e)
                .map(|j| m.submatrix(i * dim_s, j * dim_s, dim_s, dim_s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockMatrix {
        blocks,
        dim_s,
        dim_e,
        source: joint.clone(),
    })
}

/// `sum_{i != j} tr(B_ij B_ij^dag)`.
pub fn off_block_bound(blocks: &BlockMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..blocks.dim_e {
        for j in 0..blocks.dim_e {
            if i != j {
                let b = &blocks.blocks[i][j];
                total += linalg::frobenius_inner(b, b).expect("same shape").re;
            }
        }
    }
    total
}

/// Both sides of the off-block bound and the two intermediate claims:
/// the environment-block measurement of the joint state has entropy equal
/// to the bound (pure input), and tracing out the environment gives no more
/// entropy than that measurement (any input).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremReport {
    pub entropy: f64,
    pub bound: f64,
    pub slack: f64,
    pub projected_entropy: f64,
    pub hypothesis_pure: bool,
    pub projection_matches_bound: bool,
    pub trace_below_projection: bool,
    pub bound_holds: bool,
}

impl TheoremReport {
    /// Whether every claim that applies to this input held. For mixed
    /// inputs only the trace-versus-projection inequality is claimed.
    pub fn holds(&self) -> bool {
        if self.hypothesis_pure {
            self.bound_holds && self.projection_matches_bound && self.trace_below_projection
        } else {
            self.trace_below_projection
        }
    }
}

pub fn verify_theorem(rho: &DensityMatrix, model: &CouplingModel) -> Result<TheoremReport> {
    let joint = couple(rho, model)?;
    let blocks = block_decompose(&joint, model.dim_s, model.dim_e)?;
    let bound = off_block_bound(&blocks);
    let reduced = apply_channel(rho, &extract_kraus(model)?)?;
    let entropy = reduced.logical_entropy();

    let env_blocks = measurement::projectors_from_partition(
        &environment_partition(model.dim_s, model.dim_e),
        model.dim_s * model.dim_e,
    )?;
    let projected_entropy = measurement::project(&joint, &env_blocks)?.logical_entropy();

    let slack = bound - entropy;
    Ok(TheoremReport {
        entropy,
        bound,
        slack,
        projected_entropy,
        hypothesis_pure: rho.is_pure(DENSITY_TOL),
        projection_matches_bound: (projected_entropy - bound).abs() <= INEQUALITY_TOL,
        trace_below_projection: entropy <= projected_entropy + INEQUALITY_TOL,
        bound_holds: slack >= -INEQUALITY_TOL,
    })
}

/// Entropy of the purified system after noise, with its off-block bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeReport {
    /// `h(tr_E(U (|0><0| (x) |SR><SR|) U^dag))`, via the partial trace.
    pub exchange_entropy: f64,
    /// Same quantity via the Kraus operators of the enlarged coupling.
    pub kraus_entropy: f64,
    pub bound: f64,
    pub slack: f64,
    /// Dimension of the purifying reference, the rank of the input.
    pub dim_r: usize,
    pub bound_holds: bool,
}

/// Purifies `rho` with a reference `R` of dimension `rank(rho)` and runs the
/// noise on `S (x) R` (system slow, reference fast). A model whose system
/// side is `dim_S` acts on `S` alone (identity on `R`); one whose system side
/// is `dim_S * dim_R` acts on the pair directly.
pub fn exchange_entropy(rho: &DensityMatrix, model: &CouplingModel) -> Result<ExchangeReport> {
    let (psi, dim_r) = mixing::purify_minimal(rho, RANK_TOL)?;
    let dim_s = rho.dim();
    let enlarged = if model.dim_s == dim_s * dim_r {
        model.clone()
    } else if model.dim_s == dim_s {
        let u = linalg::kron(&model.unitary, &ComplexMatrix::identity(dim_r));
        CouplingModel::new(u, dim_s * dim_r, model.dim_e, model.env_init)?
    } else {
        return Err(Error::DimensionMismatch {
            op: "exchange_entropy",
            left: (model.dim_s, model.dim_s),
            right: (dim_s * dim_r, dim_s * dim_r),
        });
    };

    let rs = psi.density();
    let joint = couple(&rs, &enlarged)?;
    let exchange = trace_out_environment(&joint, enlarged.dim_s, enlarged.dim_e)?.logical_entropy();
    let kraus_entropy = apply_channel(&rs, &extract_kraus(&enlarged)?)?.logical_entropy();
    let bound = off_block_bound(&block_decompose(&joint, enlarged.dim_s, enlarged.dim_e)?);
    let slack = bound - exchange;
    Ok(ExchangeReport {
        exchange_entropy: exchange,
        kraus_entropy,
        bound,
        slack,
        dim_r,
        bound_holds: slack >= -INEQUALITY_TOL,
    })
}
