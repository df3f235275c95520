//! Graph sampling from the null model and the parametric bootstrap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_alignment, CommunityAssignment, Graph, SelfLoopPolicy};
use crate::null::family::EdgeModel;
use crate::null::{estimate_pi, PiVector};
use crate::significance::{modularity_hat, test_statistics};

/// Derives the generator seed for one replicate from the user seed, so
/// replicate streams are independent and a replicate's draw does not depend
/// on how many replicates run or in what order. splitmix64 finalizer over
/// `seed + (replicate + 1) * golden-ratio increment`.
pub fn mix_seed(seed: u64, replicate: u64) -> u64 {
    let mut z = seed.wrapping_add(replicate.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws one graph from the null model: independent edge weights with mean
/// structure `pi_i pi_j`, visiting pairs in row-major order `i < j` from a
/// ChaCha8 stream seeded with `seed`. Node labels are the indices as
/// strings; nodes that draw no edges stay in the graph with degree zero.
pub fn sample_graph(p: &PiVector, m: &EdgeModel, seed: u64) -> Result<Graph> {
    m.validate()?;
    let n = p.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let pi = p.pi();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = m.sample(pi[i] * pi[j], &mut rng);
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    Graph::from_parts(labels, edges, SelfLoopPolicy::Reject)
}

/// Raw outcome of a parametric bootstrap: per-replicate statistics for the
/// replicates that produced a valid test, in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    pub replicates_requested: usize,
    pub q_values: Vec<f64>,
    pub z_values: Vec<f64>,
    pub p_values: Vec<f64>,
    /// `(#{q* >= q_obs} + 1) / (used + 1)`.
    pub bootstrap_p: f64,
    pub seed: u64,
    /// Replicates dropped because the sampled graph admitted no test
    /// (no edges, or the surviving partition lost all contrast).
    pub degenerate_count: usize,
    /// Total isolated nodes removed across all replicates.
    pub isolated_dropped: usize,
    /// More than 1% of replicates were degenerate; the bootstrap p-value
    /// should not be trusted.
    pub invalid: bool,
}

/// Serializable digest of a bootstrap run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub replicates_requested: usize,
    pub replicates_used: usize,
    pub degenerate_count: usize,
    pub isolated_dropped: usize,
    pub bootstrap_p: f64,
    pub z_mean: f64,
    pub z_std: f64,
    pub p_mean: f64,
    pub p_std: f64,
    pub seed: u64,
    pub invalid: bool,
}

impl BootstrapResult {
    /// Moment digest of the surviving replicates. Means and standard
    /// deviations are zero when nothing survived.
    pub fn summary(&self) -> BootstrapSummary {
        let (z_mean, z_std) = mean_std(&self.z_values);
        let (p_mean, p_std) = mean_std(&self.p_values);
        BootstrapSummary {
            replicates_requested: self.replicates_requested,
            replicates_used: self.q_values.len(),
            degenerate_count: self.degenerate_count,
            isolated_dropped: self.isolated_dropped,
            bootstrap_p: self.bootstrap_p,
            z_mean,
            z_std,
            p_mean,
            p_std,
            seed: self.seed,
            invalid: self.invalid,
        }
    }
}

enum Replicate {
    Kept {
        q: f64,
        z: f64,
        p: f64,
        isolated: usize,
    },
    Degenerate {
        isolated: usize,
    },
}

/// Fits the family to the graph, then runs [`bootstrap_fitted`].
pub fn bootstrap(
    g: &Graph,
    a: &CommunityAssignment,
    family: crate::null::family::Family,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    let fitted = crate::null::fit::fit_edge_model(g, family)?;
    bootstrap_fitted(g, a, &fitted.model, replicates, seed)
}

/// Parametric bootstrap of the modularity test: resamples graphs from the
/// fitted null, reruns the full test on each replicate (re-estimating the
/// degree parameters, keeping the fitted family parameters), and compares
/// the observed point estimate against the resampled ones.
///
/// Replicates whose sample admits no test are dropped and counted: graphs
/// with no edges, partitions that lose all contrast once isolated nodes are
/// removed, and non-positive variance estimates. More than 1% dropped marks
/// the result invalid. Replicate streams are seeded independently via
/// [`mix_seed`], so results do not depend on thread count or schedule.
pub fn bootstrap_fitted(
    g: &Graph,
    a: &CommunityAssignment,
    m: &EdgeModel,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    if replicates == 0 {
        return Err(Error::InvalidParameter(
            "bootstrap needs at least one replicate".into(),
        ));
    }
    m.validate()?;
    if !m.family().supports_clt_test() {
        return Err(Error::InvalidParameter(format!(
            "family {} is for model comparison only; the bootstrap resamples the test families",
            m.family().name()
        )));
    }
    check_alignment(g, a)?;
    let p_obs = estimate_pi(g)?;
    let q_obs = modularity_hat(g, a)?;

    let outcomes: Vec<Result<Replicate>> = (0..replicates)
        .into_par_iter()
        .map(|rep| run_replicate(&p_obs, m, a, mix_seed(seed, rep as u64)))
        .collect();

    let mut q_values = Vec::new();
    let mut z_values = Vec::new();
    let mut p_values = Vec::new();
    let mut degenerate_count = 0usize;
    let mut isolated_dropped = 0usize;
    let mut at_least = 0usize;
    for outcome in outcomes {
        match outcome? {
            Replicate::Kept { q, z, p, isolated } => {
                if q >= q_obs {
                    at_least += 1;
                }
                q_values.push(q);
                z_values.push(z);
                p_values.push(p);
                isolated_dropped += isolated;
            }
            Replicate::Degenerate { isolated } => {
                degenerate_count += 1;
                isolated_dropped += isolated;
            }
        }
    }
    let used = q_values.len();
    let bootstrap_p = (at_least + 1) as f64 / (used + 1) as f64;
    let invalid = degenerate_count as f64 > 0.01 * replicates as f64;
    Ok(BootstrapResult {
        replicates_requested: replicates,
        q_values,
        z_values,
        p_values,
        bootstrap_p,
        seed,
        degenerate_count,
        isolated_dropped,
        invalid,
    })
}

fn run_replicate(
    p: &PiVector,
    m: &EdgeModel,
    a: &CommunityAssignment,
    seed: u64,
) -> Result<Replicate> {
    let sampled = sample_graph(p, m, seed)?;
    let (kept, keep) = sampled.drop_isolated();
    let isolated = sampled.n() - kept.n();
    if kept.n() == 0 || kept.edge_count() == 0 {
        return Ok(Replicate::Degenerate { isolated });
    }
    let a_kept = a.restrict(&keep);
    if a_kept.is_degenerate() {
        return Ok(Replicate::Degenerate { isolated });
    }
    match test_statistics(&kept, &a_kept, m) {
        Ok(t) => Ok(Replicate::Kept {
            q: t.q_hat,
            z: t.z,
            p: t.p_normal,
            isolated,
        }),
        Err(Error::DegenerateTest(_)) | Err(Error::EdgelessGraph) | Err(Error::IsolatedNode { .. }) => {
            Ok(Replicate::Degenerate { isolated })
        }
        Err(e) => Err(e),
    }
}

/// Mean and sample standard deviation (n - 1 denominator) of p-values,
/// for checking calibration against Uniform(0, 1). Rejects values outside
/// [0, 1]; a single value has standard deviation zero.
pub fn uniformity_summary(p_values: &[f64]) -> Result<(f64, f64)> {
    if p_values.is_empty() {
        return Err(Error::InvalidParameter(
            "uniformity summary needs at least one p-value".into(),
        ));
    }
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "p-value {p} is outside [0, 1]"
            )));
        }
    }
    Ok(mean_std(p_values))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
