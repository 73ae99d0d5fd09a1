//! Logical entropy of classical distributions and partitions.
//!
//! The logical entropy of a distribution is the probability that two
//! independent draws differ. For a partition of the outcome set it is the
//! probability that two draws land in different blocks, i.e. the total mass
//! of the partition's distinctions ("dits").

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement;
use crate::linalg::Complex;
use crate::state::{DensityMatrix, PureState};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Tolerance for the classical/quantum bridge identity.
pub const BRIDGE_TOL: f64 = 1e-10;

/// Probability vector, non-negative and summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Distribution::new(raw.probs).map_err(serde::de::Error::custom)
    }
}

/// Disjoint blocks covering `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    labels: Vec<usize>,
}

impl Partition {
    /// The ground set size is the total number of listed indices.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::InvalidPartition("no elements".into()));
        }
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &k in block {
                if k >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {k} outside 0..{n} (gap in cover)"
                    )));
                }
                if labels[k] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("index {k} appears twice")));
                }
                labels[k] = b;
            }
        }
        Ok(Self { blocks, labels })
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Self::new((0..n).map(|k| vec![k]).collect()).expect("valid")
    }

    /// One block holding everything.
    pub fn indiscrete(n: usize) -> Self {
        Self::new(vec![(0..n).collect()]).expect("valid")
    }

    /// Contiguous blocks of `block_size` consecutive indices.
    pub fn contiguous(num_blocks: usize, block_size: usize) -> Self {
        Self::new(
            (0..num_blocks)
                .map(|b| (b * block_size..(b + 1) * block_size).collect())
                .collect(),
        )
        .expect("valid")
    }

    /// Builds a partition from a label per element. Labels are renumbered in
    /// order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (k, &l) in labels.iter().enumerate() {
            match order.iter().position(|&o| o == l) {
                Some(b) => blocks[b].push(k),
                None => {
                    order.push(l);
                    blocks.push(vec![k]);
                }
            }
        }
        Self::new(blocks)
    }

    /// Splits block `block` into the elements at `positions` and the rest.
    pub fn split_block(&self, block: usize, positions: &[usize]) -> Result<Self> {
        let src = self
            .blocks
            .get(block)
            .ok_or_else(|| Error::InvalidPartition(format!("no block {block}")))?;
        let (moved, kept): (Vec<_>, Vec<_>) = src
            .iter()
            .enumerate()
            .partition(|(pos, _)| positions.contains(pos));
        if moved.is_empty() || kept.is_empty() {
            return Ok(self.clone());
        }
        let mut blocks = self.blocks.clone();
        blocks[block] = kept.into_iter().map(|(_, &k)| k).collect();
        blocks.push(moved.into_iter().map(|(_, &k)| k).collect());
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the ground set.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Block index of element `k`.
    pub fn label(&self, k: usize) -> usize {
        self.labels[k]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            blocks: Vec<Vec<usize>>,
        }
        let raw = Raw::deserialize(d)?;
        Partition::new(raw.blocks).map_err(serde::de::Error::custom)
    }
}

fn require_same_ground(p: &Distribution, part: &Partition) -> Result<()> {
    if p.len() != part.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} elements, distribution has {}",
            part.len(),
            p.len()
        )));
    }
    Ok(())
}

/// `1 - sum p_i^2`.
pub fn logical_entropy_dist(p: &Distribution) -> f64 {
    1.0 - p.probs.iter().map(|x| x * x).sum::<f64>()
}

/// `sum_{i != j} p_i p_j`, the direct count of distinct ordered pairs.
pub fn distinction_mass(p: &Distribution) -> f64 {
    let mut total = 0.0;
    for (i, pi) in p.probs.iter().enumerate() {
        for (j, pj) in p.probs.iter().enumerate() {
            if i != j {
                total += pi * pj;
            }
        }
    }
    total
}

/// `1 - sum_B (sum_{i in B} p_i)^2`.
pub fn partition_entropy(p: &Distribution, part: &Partition) -> Result<f64> {
    require_same_ground(p, part)?;
    let same_block: f64 = part
        .blocks
        .iter()
        .map(|b| b.iter().map(|&k| p.probs[k]).sum::<f64>().powi(2))
        .sum();
    Ok(1.0 - same_block)
}

/// Sum of `p_i p_j` over ordered pairs `(i, j)` lying in different blocks.
pub fn dit_count(p: &Distribution, part: &Partition) -> Result<f64> {
    require_same_ground(p, part)?;
    let mut total = 0.0;
    for (i, pi) in p.probs.iter().enumerate() {
        for (j, pj) in p.probs.iter().enumerate() {
            if part.labels[i] != part.labels[j] {
                total += pi * pj;
            }
        }
    }
    Ok(total)
}

/// Both sides of the classical/quantum bridge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeReport {
    pub classical: f64,
    pub quantum: f64,
    pub difference: f64,
    pub holds: bool,
}

/// The pure state `|psi><psi|` with `psi_k = sqrt(p_k)`. Its diagonal is `p`
/// and its coherences `sqrt(p_i p_j)` carry the within-block mass that a
/// block measurement keeps, so the measured state has logical entropy
/// `1 - sum_B p(B)^2`.
pub fn bridge_state(p: &Distribution) -> DensityMatrix {
    let amps: Vec<Complex> = p.probs.iter().map(|&x| Complex::new(x.sqrt(), 0.0)).collect();
    PureState::normalized(amps)
        .expect("sqrt of a distribution is a unit vector")
        .density()
}

/// Measures [`bridge_state`] with the projectors built from `part` and
/// compares its logical entropy with the partition entropy.
pub fn bridge_report(p: &Distribution, part: &Partition) -> Result<BridgeReport> {
    let classical = partition_entropy(p, part)?;
    let rho = bridge_state(p);
    let ps = measurement::projectors_from_partition(part, p.len())?;
    let quantum = measurement::project(&rho, &ps)?.logical_entropy();
    let difference = (classical - quantum).abs();
    Ok(BridgeReport {
        classical,
        quantum,
        difference,
        holds: difference <= BRIDGE_TOL,
    })
}

pub fn bridge_check(p: &Distribution, part: &Partition) -> Result<bool> {
    Ok(bridge_report(p, part)?.holds)
}
