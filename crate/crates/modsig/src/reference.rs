//! Direct pair-sum implementations of the test quantities.
//!
//! Everything here loops over all node pairs, costing O(n^2). The main
//! implementations collapse the same sums to per-node and per-group
//! accumulations; these versions exist so tests can check the fast paths
//! against the defining formulas on small graphs. Prefer the main
//! implementations everywhere else.

use crate::error::{Error, Result};
use crate::graph::{CommunityAssignment, Graph};
use crate::null::family::EdgeModel;
use crate::null::{DegreeMoments, PiVector};

/// Pair-sum version of [`crate::significance::modularity_hat`].
pub fn modularity_hat(g: &Graph, a: &CommunityAssignment) -> Result<f64> {
    crate::graph::check_alignment(g, a)?;
    let total = g.total_degree();
    if total <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    let w = dense_weights(g);
    let n = g.n();
    let d = g.degree();
    let group = a.group_of();
    let mut q = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if group[i] == group[j] {
                q += w[i * n + j] - d[i] * d[j] / total;
            }
        }
    }
    Ok(q)
}

/// Pair-sum version of [`crate::significance::bias_hat`].
pub fn bias_hat(p: &PiVector, a: &CommunityAssignment) -> Result<f64> {
    check_len(p, a)?;
    let n = p.len();
    let pi = p.pi();
    let s1 = p.norm1();
    let p2 = p.norm2_sq();
    let e_d1 = p.expected_total_degree();
    let group = a.group_of();
    let mut acc = 0.0;
    for i in 0..n {
        let ed_i = pi[i] * (s1 - pi[i]);
        for j in (i + 1)..n {
            if group[i] != group[j] {
                continue;
            }
            let ed_j = pi[j] * (s1 - pi[j]);
            acc += pi[i] * pi[j] * (ed_i + ed_j - p2);
        }
    }
    Ok(acc / e_d1)
}

/// Pair-sum version of [`crate::significance::bias_alternative`].
pub fn bias_alternative(
    p: &PiVector,
    m: &EdgeModel,
    a: &CommunityAssignment,
) -> Result<f64> {
    check_len(p, a)?;
    m.validate()?;
    let n = p.len();
    let pi = p.pi();
    let s1 = p.norm1();
    let e_d1 = p.expected_total_degree();
    let group = a.group_of();
    let mut acc = 0.0;
    for i in 0..n {
        let ed_i = pi[i] * (s1 - pi[i]);
        for j in (i + 1)..n {
            if group[i] != group[j] {
                continue;
            }
            let ed_j = pi[j] * (s1 - pi[j]);
            let mu = pi[i] * pi[j];
            let e_didj = ed_i * ed_j + m.variance(mu);
            acc += mu - e_didj / e_d1;
        }
    }
    Ok(acc)
}

/// Pair-sum version of [`crate::significance::variance_hat`], using
/// externally supplied weights so the weight computation is tested
/// separately.
pub fn variance_hat(
    p: &PiVector,
    m: &EdgeModel,
    a: &CommunityAssignment,
    beta: &[f64],
) -> Result<f64> {
    check_len(p, a)?;
    m.validate()?;
    if beta.len() != p.len() {
        return Err(Error::LengthMismatch {
            what: "beta weights".into(),
            expected: p.len(),
            got: beta.len(),
        });
    }
    let n = p.len();
    let pi = p.pi();
    let group = a.group_of();
    let mut s2 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = if group[i] == group[j] { 1.0 } else { 0.0 };
            let c = delta + beta[i] + beta[j];
            s2 += c * c * m.variance(pi[i] * pi[j]);
        }
    }
    Ok(s2)
}

/// Pair-sum version of [`crate::null::degree_moments`].
pub fn degree_moments(p: &PiVector, m: &EdgeModel) -> Result<DegreeMoments> {
    m.validate()?;
    let n = p.len();
    let pi = p.pi();
    let mut e_d = vec![0.0f64; n];
    let mut var_d = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mu = pi[i] * pi[j];
            e_d[i] += m.mean(mu);
            var_d[i] += m.variance(mu);
        }
    }
    let e_d1 = e_d.iter().sum();
    Ok(DegreeMoments { e_d, var_d, e_d1 })
}

/// Pair-sum version of [`crate::null::fit::log_likelihood`]: evaluates the
/// model log-density at every pair, including non-edges.
pub fn log_likelihood(g: &Graph, m: &EdgeModel) -> Result<f64> {
    m.validate()?;
    let p = crate::null::estimate_pi(g)?;
    let w = dense_weights(g);
    let n = g.n();
    let pi = p.pi();
    let mut ll = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            ll += m.log_pmf(w[i * n + j], pi[i] * pi[j]);
        }
    }
    Ok(ll)
}

fn dense_weights(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut w = vec![0.0f64; n * n];
    for &(i, j, weight) in g.edges() {
        w[i * n + j] = weight;
        w[j * n + i] = weight;
    }
    w
}

fn check_len(p: &PiVector, a: &CommunityAssignment) -> Result<()> {
    if p.len() != a.len() {
        return Err(Error::LengthMismatch {
            what: "community assignment".into(),
            expected: p.len(),
            got: a.len(),
        });
    }
    Ok(())
}
