//! Seeded randomized campaigns over the entropy identities and inequalities.
//!
//! Trial `k` of a campaign with root seed `s` draws everything from its own
//! RNG seeded with `s + k`, so trials are independent of scheduling and a
//! failing trial can be replayed alone. Aggregation keeps only counts, the
//! minimum slack, and the lowest-indexed failure.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{self, CouplingModel};
use crate::classical::{self, Distribution, Partition};
use crate::linalg::ComplexMatrix;
use crate::measurement::{self, ProjectorSet, INEQUALITY_TOL};
use crate::mixing::{self, Ensemble};
use crate::state::{self, sample, DensityMatrix, PureState};

/// Tolerance for checks that are exact identities.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem,
    Prop1,
    Prop2,
    Schmidt,
    Bridge,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Theorem,
        Suite::Prop1,
        Suite::Prop2,
        Suite::Schmidt,
        Suite::Bridge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem => "theorem",
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Schmidt => "schmidt",
            Suite::Bridge => "bridge",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Dimension ranges per suite. `max_dim_s`/`max_dim_e` drive the theorem
/// suite; the rest have their own caps.
#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_dim_s: usize,
    pub max_dim_e: usize,
    pub max_dim_prop1: usize,
    pub max_members: usize,
    pub max_dim_prop2: usize,
    pub max_dim_a: usize,
    pub max_dim_b: usize,
    pub max_outcomes: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 42,
            max_dim_s: 6,
            max_dim_e: 4,
            max_dim_prop1: 16,
            max_members: 6,
            max_dim_prop2: 8,
            max_dim_a: 4,
            max_dim_b: 5,
            max_outcomes: 16,
        }
    }
}

/// Inputs of a failing trial, enough to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzFailure {
    pub trial: usize,
    pub trial_seed: u64,
    pub slack: f64,
    pub inputs: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzSummary {
    pub suite: Suite,
    pub trials: usize,
    pub failures: usize,
    pub worst_slack: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FuzzFailure>,
}

struct Outcome {
    slack: f64,
    passed: bool,
    inputs: Option<Value>,
}

impl Outcome {
    fn new(slack: f64, passed: bool, inputs: impl FnOnce() -> Value) -> Self {
        Self {
            slack,
            passed,
            inputs: (!passed).then(inputs),
        }
    }
}

/// Per-trial seed.
pub fn trial_seed(root: u64, trial: usize) -> u64 {
    root.wrapping_add(trial as u64)
}

/// Runs one suite, trials in parallel.
pub fn run_suite(suite: Suite, cfg: &FuzzConfig) -> FuzzSummary {
    let outcomes: Vec<(usize, Outcome)> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| (k, run_trial(suite, cfg, trial_seed(cfg.seed, k))))
        .collect();
    summarize(suite, cfg, outcomes)
}

/// Same as [`run_suite`] on the calling thread only.
pub fn run_suite_serial(suite: Suite, cfg: &FuzzConfig) -> FuzzSummary {
    let outcomes = (0..cfg.trials)
        .map(|k| (k, run_trial(suite, cfg, trial_seed(cfg.seed, k))))
        .collect();
    summarize(suite, cfg, outcomes)
}

fn summarize(suite: Suite, cfg: &FuzzConfig, outcomes: Vec<(usize, Outcome)>) -> FuzzSummary {
    let failures = outcomes.iter().filter(|(_, o)| !o.passed).count();
    let worst_slack = outcomes
        .iter()
        .map(|(_, o)| o.slack)
        .fold(f64::INFINITY, f64::min);
    let first_failure = outcomes
        .into_iter()
        .filter(|(_, o)| !o.passed)
        .min_by_key(|(k, _)| *k)
        .map(|(k, o)| FuzzFailure {
            trial: k,
            trial_seed: trial_seed(cfg.seed, k),
            slack: o.slack,
            inputs: o.inputs.unwrap_or(Value::Null),
        });
    FuzzSummary {
        suite,
        trials: cfg.trials,
        failures,
        worst_slack,
        seed: cfg.seed,
        first_failure,
    }
}

fn run_trial(suite: Suite, cfg: &FuzzConfig, seed: u64) -> Outcome {
    let mut rng = state::rng(seed);
    match suite {
        Suite::Theorem => theorem_trial(&mut rng, cfg),
        Suite::Prop1 => prop1_trial(&mut rng, cfg),
        Suite::Prop2 => prop2_trial(&mut rng, cfg, seed),
        Suite::Schmidt => schmidt_trial(&mut rng, cfg),
        Suite::Bridge => bridge_trial(&mut rng, cfg),
    }
}

fn dim_in<R: Rng + ?Sized>(rng: &mut R, max: usize) -> usize {
    let max = max.max(1);
    rng.random_range(max.min(2)..=max)
}

fn mat_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(m).expect("serializable")
}

fn theorem_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig) -> Outcome {
    let ds = dim_in(rng, cfg.max_dim_s);
    let de = dim_in(rng, cfg.max_dim_e);
    let psi = sample::pure_state(rng, ds);
    let u = sample::unitary(rng, ds * de);
    let rho = psi.density();
    let model = CouplingModel::new(u, ds, de, 0).expect("Haar unitary");
    match channel::verify_theorem(&rho, &model) {
        Ok(r) => Outcome::new(r.slack, r.holds(), || {
            json!({"dim_s": ds, "dim_e": de, "state": mat_json(rho.matrix()),
                   "unitary": mat_json(model.unitary()), "report": r})
        }),
        Err(e) => Outcome::new(f64::NEG_INFINITY, false, || json!({"error": e.to_string()})),
    }
}

/// Density of random rank in `1..=dim`.
pub fn random_density_any_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=dim);
    sample::density_with_rank(rng, dim, rank)
}

/// Partition of `0..n` into a random number of blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels).expect("labels cover 0..n")
}

/// Random distribution on `n` outcomes; roughly one in four entries is
/// zeroed to exercise sparse support.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random::<f64>() + 1e-3
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            if let Ok(d) = Distribution::new(probs) {
                return d;
            }
        }
    }
}

/// Projectors onto groups of columns of a Haar unitary.
pub fn random_rotated_projectors<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProjectorSet {
    let groups = random_partition(rng, dim);
    let basis = sample::unitary(rng, dim);
    ProjectorSet::from_basis_groups(&basis, &groups).expect("valid groups")
}

fn prop1_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig) -> Outcome {
    let d = rng.random_range(1..=cfg.max_dim_prop1.max(1));
    let rho = random_density_any_rank(rng, d);
    let part = random_partition(rng, d);
    let ps = measurement::projectors_from_partition(&part, d).expect("same size");
    let rotated = random_rotated_projectors(rng, d);

    let result = (|| -> crate::Result<(f64, bool)> {
        let dec = measurement::proposition1_decomposition(&rho, &ps)?;
        let gain = measurement::corollary1_check(&rho, &ps)?;
        let gain_err = (gain - dec.off_block_mass).abs();
        let rotated_gain = measurement::project(&rho, &rotated)?.logical_entropy() - rho.logical_entropy();
        let aligned_gain = gain;
        let slack = (-dec.residual())
            .min(-gain_err)
            .min(rotated_gain)
            .min(aligned_gain);
        let passed = dec.residual() <= IDENTITY_TOL
            && gain_err <= IDENTITY_TOL
            && rotated_gain >= -INEQUALITY_TOL
            && aligned_gain >= -INEQUALITY_TOL;
        Ok((slack, passed))
    })();
    match result {
        Ok((slack, passed)) => Outcome::new(slack, passed, || {
            json!({"state": mat_json(rho.matrix()), "partition": part,
                   "rotated_projectors": rotated.projectors().iter().map(mat_json).collect::<Vec<_>>()})
        }),
        Err(e) => Outcome::new(f64::NEG_INFINITY, false, || {
            json!({"error": e.to_string(), "state": mat_json(rho.matrix()), "partition": part})
        }),
    }
}

/// Ensemble whose members live on disjoint groups of columns of a Haar
/// unitary, so every pair has orthogonal support. Needs `n <= dim`.
pub fn random_orthogonal_ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> Ensemble {
    assert!(n >= 1 && n <= dim);
    let basis = sample::unitary(rng, dim);
    let mut cols: Vec<usize> = (0..dim).collect();
    cols.shuffle(rng);
    // Every member gets at least one column; leftovers are dealt at random.
    let mut groups: Vec<Vec<usize>> = cols[..n].iter().map(|&c| vec![c]).collect();
    for &c in &cols[n..] {
        let g = rng.random_range(0..n);
        groups[g].push(c);
    }
    let states = groups
        .iter()
        .map(|g| {
            let inner = sample::density(rng, g.len());
            let mut v = ComplexMatrix::zeros(dim, g.len());
            for (j, &c) in g.iter().enumerate() {
                for i in 0..dim {
                    v[(i, j)] = basis[(i, c)];
                }
            }
            let m = v
                .matmul(inner.matrix())
                .and_then(|x| x.matmul(&v.dagger()))
                .expect("conformable");
            DensityMatrix::new(m.hermitian_part().expect("square")).expect("isometric image of a density")
        })
        .collect();
    let weights = random_distribution_dense(rng, n);
    Ensemble::new(weights, states).expect("valid ensemble")
}

/// Random weights, all strictly positive.
pub fn random_distribution_dense<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// General random ensemble; members have random rank.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> Ensemble {
    let states = (0..n).map(|_| random_density_any_rank(rng, dim)).collect();
    Ensemble::new(random_distribution_dense(rng, n), states).expect("valid ensemble")
}

pub fn random_pure_ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> Ensemble {
    let states: Vec<PureState> = (0..n).map(|_| sample::pure_state(rng, dim)).collect();
    Ensemble::from_pure(random_distribution_dense(rng, n), &states).expect("valid ensemble")
}

fn prop2_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig, seed: u64) -> Outcome {
    let n = rng.random_range(2..=cfg.max_members.max(2));
    let d = rng.random_range(1..=cfg.max_dim_prop2.max(1));
    let ensemble = match seed % 3 {
        0 if n <= d => random_orthogonal_ensemble(rng, n, d),
        1 => random_pure_ensemble(rng, n, d),
        _ => random_ensemble(rng, n, d),
    };
    let report = mixing::proposition2_check(&ensemble);
    let spectral = mixing::spectral_bound(&ensemble);
    let spectral_err = (spectral.grouped - report.rhs).abs().max((spectral.flat - spectral.grouped).abs());
    let chain = if seed % 3 == 1 {
        mixing::purification_chain(&ensemble).ok()
    } else {
        None
    };
    let chain_ok = chain.is_none_or(|c| c.holds());
    let slack = if report.orthogonal_support {
        -report.slack.abs()
    } else {
        report.slack
    }
    .min(-spectral_err);
    let passed = report.holds && spectral_err <= IDENTITY_TOL && chain_ok;
    Outcome::new(slack, passed, || {
        json!({"ensemble": ensemble, "report": report, "spectral": spectral, "chain": chain})
    })
}

fn schmidt_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig) -> Outcome {
    let da = dim_in(rng, cfg.max_dim_a);
    let db = dim_in(rng, cfg.max_dim_b);
    let psi = sample::pure_state(rng, da * db);
    match mixing::schmidt_entropy_symmetry(&psi, da, db) {
        Ok((ha, hb)) => {
            let diff = (ha - hb).abs();
            Outcome::new(-diff, diff <= IDENTITY_TOL, || {
                json!({"dim_a": da, "dim_b": db, "state": mat_json(psi.density().matrix()), "h_a": ha, "h_b": hb})
            })
        }
        Err(e) => Outcome::new(f64::NEG_INFINITY, false, || json!({"error": e.to_string()})),
    }
}

fn bridge_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig) -> Outcome {
    let n = rng.random_range(1..=cfg.max_outcomes.max(1));
    let p = random_distribution(rng, n);
    let part = random_partition(rng, n);
    match classical::bridge_report(&p, &part) {
        Ok(r) => Outcome::new(-r.difference, r.holds, || {
            json!({"distribution": p, "partition": part, "report": r})
        }),
        Err(e) => Outcome::new(f64::NEG_INFINITY, false, || json!({"error": e.to_string()})),
    }
}
