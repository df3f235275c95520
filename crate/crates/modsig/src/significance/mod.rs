//! Modularity point estimate, bias and variance under the null model, and
//! the normal-approximation significance test.

pub mod normal;

pub use normal::p_value;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_alignment, CommunityAssignment, Graph};
use crate::null::diagnostics::{
    check_assumptions_with, DiagnosticThresholds, DiagnosticsReport,
};
use crate::null::family::{EdgeModel, Family};
use crate::null::fit::{fit_edge_model, FittedEdgeModel};
use crate::null::{estimate_pi, PiVector};
use crate::sim::{bootstrap_fitted, BootstrapSummary};

/// Estimated modularity of the partition: within-group excess of edge weight
/// over the degree-based null, `sum_{i<j} [A_ij - d_i d_j / ||d||_1] 1{same
/// group}`. Runs in O(m + n + K).
pub fn modularity_hat(g: &Graph, a: &CommunityAssignment) -> Result<f64> {
    check_alignment(g, a)?;
    let total = g.total_degree();
    if total <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    let group = a.group_of();
    let mut within = 0.0;
    for &(i, j, w) in g.edges() {
        if group[i] == group[j] {
            within += w;
        }
    }
    // sum_{i<j in k} d_i d_j = ((sum_k d)^2 - sum_k d^2) / 2 per group.
    let mut s = vec![0.0f64; a.k()];
    let mut s2 = vec![0.0f64; a.k()];
    for (i, &gi) in group.iter().enumerate() {
        let d = g.degree()[i];
        s[gi] += d;
        s2[gi] += d * d;
    }
    let null: f64 = s
        .iter()
        .zip(&s2)
        .map(|(&sk, &s2k)| sk * sk - s2k)
        .sum::<f64>()
        / (2.0 * total);
    Ok(within - null)
}

/// Population modularity with known degree parameters: subtracts the exact
/// edge means `pi_i pi_j` instead of their plug-ins.
pub fn population_modularity(
    true_pi: &[f64],
    g: &Graph,
    a: &CommunityAssignment,
) -> Result<f64> {
    check_alignment(g, a)?;
    if true_pi.len() != g.n() {
        return Err(Error::LengthMismatch {
            what: "degree parameter vector".into(),
            expected: g.n(),
            got: true_pi.len(),
        });
    }
    if let Some(bad) = true_pi.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "degree parameters must be finite and non-negative, got {bad}"
        )));
    }
    let group = a.group_of();
    let mut within = 0.0;
    for &(i, j, w) in g.edges() {
        if group[i] == group[j] {
            within += w;
        }
    }
    let mut s = vec![0.0f64; a.k()];
    let mut s2 = vec![0.0f64; a.k()];
    for (i, &gi) in group.iter().enumerate() {
        let p = true_pi[i];
        s[gi] += p;
        s2[gi] += p * p;
    }
    let null: f64 = s
        .iter()
        .zip(&s2)
        .map(|(&sk, &s2k)| (sk * sk - s2k) / 2.0)
        .sum();
    Ok(within - null)
}

/// Node weights entering the variance of the modularity estimate.
///
/// `beta_i = (1/2) (sum_l E d_l^w / sum_l E d_l) - E d_i^w / E d_i`, with
/// expected within-group and total degrees evaluated at the plug-in
/// parameters; `alpha_i` is `beta_i + 1/2` by construction. A single group
/// gives beta identically -1/2 and all-singleton groups give 0, both exactly
/// in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaWeights {
    pub beta: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Computes the variance weights in O(n + K).
pub fn beta_weights(p: &PiVector, a: &CommunityAssignment) -> Result<BetaWeights> {
    let group_sums = p.group_power_sums(a)?;
    let s1 = p.norm1();
    let denom = p.expected_total_degree();
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(
            "expected total degree is not positive".into(),
        ));
    }
    // sum_l E d_l^w = sum_k (S_k^2 - P_k) with S_k, P_k the per-group first
    // and second power sums of pi.
    let within_total: f64 = group_sums.iter().map(|s| s[0] * s[0] - s[1]).sum();
    let ratio = within_total / denom;
    let half_ratio = 0.5 * ratio;
    let n = p.len();
    let mut beta = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    for i in 0..n {
        let pi = p.pi()[i];
        let sg = group_sums[a.group_of()[i]][0];
        // E d_i^w / E d_i = (S_{g(i)} - pi_i) / (S_1 - pi_i); the pi_i
        // factors cancel exactly.
        let b = half_ratio - (sg - pi) / (s1 - pi);
        beta.push(b);
        alpha.push(0.5 + b);
    }
    Ok(BetaWeights { beta, alpha })
}

/// Plug-in estimate of the finite-sample bias of the modularity estimate:
/// `sum_{i<j same} mu_ij (E d_i + E d_j - ||pi||_2^2) / E ||d||_1` with
/// `mu_ij = pi_i pi_j`.
///
/// Evaluated in O(n + K) by collapsing the pair sums to per-group power
/// sums: with S_k, P_k the group sums of pi and pi^2, T_k and U_k the group
/// sums of pi E d and pi^2 E d,
/// `sum_{i<j in k} mu (E d_i + E d_j) = S_k T_k - U_k` and
/// `sum_{i<j in k} mu = (S_k^2 - P_k) / 2`.
pub fn bias_hat(p: &PiVector, a: &CommunityAssignment) -> Result<f64> {
    check_pi_alignment(p, a)?;
    let s1 = p.norm1();
    let p2 = p.norm2_sq();
    let e_d1 = p.expected_total_degree();
    let k = a.k();
    let mut s = vec![0.0f64; k];
    let mut pk = vec![0.0f64; k];
    let mut t = vec![0.0f64; k];
    let mut u = vec![0.0f64; k];
    for (i, &gi) in a.group_of().iter().enumerate() {
        let pi = p.pi()[i];
        let ed = pi * (s1 - pi);
        s[gi] += pi;
        pk[gi] += pi * pi;
        t[gi] += pi * ed;
        u[gi] += pi * pi * ed;
    }
    let mut acc = 0.0;
    for g in 0..k {
        acc += s[g] * t[g] - u[g] - p2 * (s[g] * s[g] - pk[g]) / 2.0;
    }
    Ok(acc / e_d1)
}

/// Alternative bias estimate from the exact null mean of the modularity
/// plug-in: `sum_{i<j same} (mu_ij - E[d_i d_j] / E ||d||_1)` with
/// `E[d_i d_j] = E d_i E d_j + Var A_ij`. Model-dependent through Var A.
/// Agrees with [`bias_hat`] to first order; the gap shrinks relative to the
/// test's standard error as the graph grows.
pub fn bias_alternative(
    p: &PiVector,
    m: &EdgeModel,
    a: &CommunityAssignment,
) -> Result<f64> {
    check_pi_alignment(p, a)?;
    require_clt_family(m)?;
    let (c1, c2) = m.variance_coefficients();
    let s1 = p.norm1();
    let e_d1 = p.expected_total_degree();
    let k = a.k();
    // Per group: sums of pi, pi^2, pi^4, E d, (E d)^2.
    let mut s = vec![0.0f64; k];
    let mut p2 = vec![0.0f64; k];
    let mut p4 = vec![0.0f64; k];
    let mut w = vec![0.0f64; k];
    let mut w2 = vec![0.0f64; k];
    for (i, &gi) in a.group_of().iter().enumerate() {
        let pi = p.pi()[i];
        let ed = pi * (s1 - pi);
        s[gi] += pi;
        p2[gi] += pi * pi;
        p4[gi] += pi * pi * pi * pi;
        w[gi] += ed;
        w2[gi] += ed * ed;
    }
    let mut acc = 0.0;
    for g in 0..k {
        let sum_mu = (s[g] * s[g] - p2[g]) / 2.0;
        let sum_mu2 = (p2[g] * p2[g] - p4[g]) / 2.0;
        let sum_eded = (w[g] * w[g] - w2[g]) / 2.0;
        acc += sum_mu - (sum_eded + c1 * sum_mu + c2 * sum_mu2) / e_d1;
    }
    Ok(acc)
}

/// Plug-in variance of the centered modularity estimate:
/// `s^2 = sum_{i<j} (1{same group} + beta_i + beta_j)^2 Var A_ij`.
///
/// Expanding the square splits the sum into a global part, quadratic in the
/// beta weights, and a same-group part linear in them. With Var A = c1 mu +
/// c2 mu^2 both parts reduce to weighted power sums of pi (weights 1, beta,
/// beta^2), giving O(n + K) total:
///
/// global, per weight vector x in {pi, pi^2}:
///   sum_{i<j} (b_i + b_j)^2 x_i x_j
///     = (sum b^2 x)(sum x) + (sum b x)^2 - 2 sum b^2 x^2;
/// same-group, per group k:
///   sum_{i<j in k} (1 + 2 b_i + 2 b_j) x_i x_j
///     = ((S_k^2 - Q_k) / 2) + 2 (B_k S_k - C_k)
/// with S_k = sum_k x, Q_k = sum_k x^2, B_k = sum_k b x, C_k = sum_k b x^2.
///
/// Errors with a degenerate-test condition when the partition admits no
/// contrast (one group, or all singletons) or the variance fails to be
/// positive.
pub fn variance_hat(
    p: &PiVector,
    m: &EdgeModel,
    a: &CommunityAssignment,
) -> Result<f64> {
    check_pi_alignment(p, a)?;
    require_clt_family(m)?;
    if a.is_degenerate() {
        return Err(Error::DegenerateTest(
            "partition has no within/between contrast (a single group, or only singletons)"
                .into(),
        ));
    }
    let weights = beta_weights(p, a)?;
    let beta = &weights.beta;
    let (c1, c2) = m.variance_coefficients();
    let k = a.k();

    // Global sums: G[q][v] = sum_i beta_i^q pi_i^v for the needed (q, v).
    let (mut g01, mut g02, mut g11, mut g12, mut g21, mut g22, mut g24) =
        (0.0f64, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    // Group sums for x = pi: s1k, q1k = sum pi^2, b1k = sum beta pi,
    // c1k = sum beta pi^2; for x = pi^2: s2k, q2k = sum pi^4,
    // b2k = sum beta pi^2 (= c1k), c2k = sum beta pi^4.
    let mut s1k = vec![0.0f64; k];
    let mut q1k = vec![0.0f64; k];
    let mut b1k = vec![0.0f64; k];
    let mut c1k = vec![0.0f64; k];
    let mut q2k = vec![0.0f64; k];
    let mut c2k = vec![0.0f64; k];
    for (i, &b) in beta.iter().enumerate() {
        let x = p.pi()[i];
        let x2 = x * x;
        let x4 = x2 * x2;
        g01 += x;
        g02 += x2;
        g11 += b * x;
        g12 += b * x2;
        g21 += b * b * x;
        g22 += b * b * x2;
        g24 += b * b * x4;
        let gi = a.group_of()[i];
        s1k[gi] += x;
        q1k[gi] += x2;
        b1k[gi] += b * x;
        c1k[gi] += b * x2;
        q2k[gi] += x4;
        c2k[gi] += b * x4;
    }

    let global_pi = g21 * g01 + g11 * g11 - 2.0 * g22;
    let global_pi2 = g22 * g02 + g12 * g12 - 2.0 * g24;
    let mut same_pi = 0.0;
    let mut same_pi2 = 0.0;
    for g in 0..k {
        same_pi += (s1k[g] * s1k[g] - q1k[g]) / 2.0 + 2.0 * (b1k[g] * s1k[g] - c1k[g]);
        same_pi2 += (q1k[g] * q1k[g] - q2k[g]) / 2.0 + 2.0 * (c1k[g] * q1k[g] - c2k[g]);
    }
    let s2 = c1 * (global_pi + same_pi) + c2 * (global_pi2 + same_pi2);
    if !s2.is_finite() || s2 <= 0.0 {
        return Err(Error::DegenerateTest(format!(
            "estimated variance {s2} is not positive"
        )));
    }
    Ok(s2)
}

/// The four numbers of the normal-approximation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistics {
    pub q_hat: f64,
    pub b_hat: f64,
    /// Standard error (square root of the variance estimate).
    pub s_hat: f64,
    pub z: f64,
    pub p_normal: f64,
}

/// Point estimate, bias, standard error, z, and upper-tail p for one graph
/// and partition under a fitted model. The cheap core of the test: no
/// fitting, no diagnostics.
pub fn test_statistics(
    g: &Graph,
    a: &CommunityAssignment,
    m: &EdgeModel,
) -> Result<TestStatistics> {
    let p = estimate_pi(g)?;
    let q_hat = modularity_hat(g, a)?;
    let b_hat = bias_hat(&p, a)?;
    let s_hat = variance_hat(&p, m, a)?.sqrt();
    let z = (q_hat - b_hat) / s_hat;
    let p_normal = p_value(z)?;
    Ok(TestStatistics {
        q_hat,
        b_hat,
        s_hat,
        z,
        p_normal,
    })
}

/// Options for [`significance_test`].
#[derive(Debug, Clone, Default)]
pub struct TestOptions {
    /// Parametric bootstrap replicates; 0 disables the bootstrap.
    pub bootstrap_replicates: usize,
    /// Seed for the bootstrap streams.
    pub seed: u64,
    pub thresholds: DiagnosticThresholds,
}

/// Full outcome of one significance test.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityReport {
    pub n: usize,
    pub k: usize,
    pub model: EdgeModel,
    pub q_hat: f64,
    pub b_hat: f64,
    pub s_hat: f64,
    pub z: f64,
    pub p_normal: f64,
    pub p_bootstrap: Option<f64>,
    pub bootstrap: Option<BootstrapSummary>,
    pub diagnostics: DiagnosticsReport,
    pub warnings: Vec<String>,
}

/// Tests whether the partition's modularity exceeds what the degree-based
/// null explains: fits the family, screens assumptions, computes the
/// centered and scaled statistic and its upper-tail p, and optionally runs
/// a parametric bootstrap.
///
/// Only the Bernoulli, Poisson, and negative binomial families are valid
/// here; zero-inflated families are for model comparison.
pub fn significance_test(
    g: &Graph,
    a: &CommunityAssignment,
    family: Family,
    options: &TestOptions,
) -> Result<ModularityReport> {
    if !family.supports_clt_test() {
        return Err(Error::InvalidParameter(format!(
            "family {} is for model comparison only; the test supports bernoulli, poisson, negbin",
            family.name()
        )));
    }
    check_alignment(g, a)?;
    let fitted: FittedEdgeModel = fit_edge_model(g, family)?;
    let stats = test_statistics(g, a, &fitted.model)?;
    let diagnostics = check_assumptions_with(g, &fitted.model, Some(a), &options.thresholds);
    let mut warnings = fitted.warnings.clone();
    let (p_bootstrap, bootstrap) = if options.bootstrap_replicates > 0 {
        let result = bootstrap_fitted(
            g,
            a,
            &fitted.model,
            options.bootstrap_replicates,
            options.seed,
        )?;
        if result.invalid {
            warnings.push(format!(
                "bootstrap invalid: {} of {} replicates degenerate",
                result.degenerate_count, result.replicates_requested
            ));
        }
        let summary = result.summary();
        (Some(summary.bootstrap_p), Some(summary))
    } else {
        (None, None)
    };
    Ok(ModularityReport {
        n: g.n(),
        k: a.k(),
        model: fitted.model,
        q_hat: stats.q_hat,
        b_hat: stats.b_hat,
        s_hat: stats.s_hat,
        z: stats.z,
        p_normal: stats.p_normal,
        p_bootstrap,
        bootstrap,
        diagnostics,
        warnings,
    })
}

fn check_pi_alignment(p: &PiVector, a: &CommunityAssignment) -> Result<()> {
    if p.len() != a.len() {
        return Err(Error::LengthMismatch {
            what: "community assignment".into(),
            expected: p.len(),
            got: a.len(),
        });
    }
    Ok(())
}

fn require_clt_family(m: &EdgeModel) -> Result<()> {
    m.validate()?;
    if !m.family().supports_clt_test() {
        return Err(Error::InvalidParameter(format!(
            "family {} is for model comparison only; variance formulas cover bernoulli, poisson, negbin",
            m.family().name()
        )));
    }
    Ok(())
}
