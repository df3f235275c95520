//! Degree-based null model: degree parameters, edge means and variances,
//! moments of the degree sequence, assumption diagnostics, and likelihood
//! fitting of edge-value families.

pub mod diagnostics;
pub mod family;
pub mod fit;

pub use diagnostics::{check_assumptions, check_assumptions_with, DiagnosticThresholds, DiagnosticsReport};
pub use family::{EdgeModel, Family};
pub use fit::{compare_models, fit_edge_model, log_likelihood, FittedEdgeModel, ModelComparison, ModelComparisonRow};

use crate::error::{Error, Result};
use crate::graph::{CommunityAssignment, Graph};

/// Estimated degree parameters `pi_i = d_i / sqrt(sum_l d_l)`, with their
/// power sums `sum_i pi_i^p` for p = 1..4 precomputed in node order.
///
/// The product `pi_i * pi_j` is the plug-in expected edge value for the pair
/// (i, j). Power sums are what every downstream moment reduces to, which is
/// how quadratic pair sums are evaluated in linear time.
#[derive(Debug, Clone, PartialEq)]
pub struct PiVector {
    pi: Vec<f64>,
    sums: [f64; 4],
}

impl PiVector {
    /// Plug-in estimate from observed degrees.
    ///
    /// Errors if the graph has no edges or any node has degree zero: a
    /// zero-degree node has no identifiable degree parameter.
    pub fn from_graph(g: &Graph) -> Result<PiVector> {
        if g.n() == 0 || g.total_degree() <= 0.0 {
            return Err(Error::EdgelessGraph);
        }
        if let Some(&i) = g.isolated_nodes().first() {
            return Err(Error::IsolatedNode {
                label: g.node_label(i).to_owned(),
            });
        }
        let scale = g.total_degree().sqrt();
        let pi = g.degree().iter().map(|&d| d / scale).collect();
        Ok(PiVector::from_positive(pi))
    }

    /// Wraps explicit degree parameters (for generation and analysis).
    /// All entries must be finite and strictly positive.
    pub fn from_values(pi: Vec<f64>) -> Result<PiVector> {
        if pi.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(bad) = pi.iter().find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "degree parameters must be finite and positive, got {bad}"
            )));
        }
        Ok(PiVector::from_positive(pi))
    }

    fn from_positive(pi: Vec<f64>) -> PiVector {
        let mut sums = [0.0f64; 4];
        for &p in &pi {
            let p2 = p * p;
            sums[0] += p;
            sums[1] += p2;
            sums[2] += p2 * p;
            sums[3] += p2 * p2;
        }
        PiVector { pi, sums }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `sum_i pi_i^p` for p in 1..=4.
    pub fn power_sum(&self, p: usize) -> f64 {
        assert!((1..=4).contains(&p), "power sums cover p = 1..4");
        self.sums[p - 1]
    }

    pub fn norm1(&self) -> f64 {
        self.sums[0]
    }

    pub fn norm2_sq(&self) -> f64 {
        self.sums[1]
    }

    /// Expected total degree `E sum_l d_l = norm1^2 - norm2_sq`.
    pub fn expected_total_degree(&self) -> f64 {
        self.sums[0] * self.sums[0] - self.sums[1]
    }

    /// Expected degree of node i, `pi_i * (norm1 - pi_i)`.
    pub fn expected_degree(&self, i: usize) -> f64 {
        self.pi[i] * (self.sums[0] - self.pi[i])
    }

    /// Per-group power sums `sum_{i in group} pi_i^p`, p = 1..4, computed for
    /// the given assignment on demand.
    pub fn group_power_sums(&self, a: &CommunityAssignment) -> Result<Vec<[f64; 4]>> {
        if a.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "community assignment".into(),
                expected: self.len(),
                got: a.len(),
            });
        }
        let mut sums = vec![[0.0f64; 4]; a.k()];
        for (i, &g) in a.group_of().iter().enumerate() {
            let p = self.pi[i];
            let p2 = p * p;
            sums[g][0] += p;
            sums[g][1] += p2;
            sums[g][2] += p2 * p;
            sums[g][3] += p2 * p2;
        }
        Ok(sums)
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!(
                "node index out of range: ({i}, {j}) with n = {n}"
            )));
        }
        if i == j {
            return Err(Error::InvalidParameter(
                "pair (i, i) is not an edge: self-pairs have no edge distribution".into(),
            ));
        }
        Ok(())
    }
}

/// Plug-in estimate of the degree parameters (see [`PiVector::from_graph`]).
pub fn estimate_pi(g: &Graph) -> Result<PiVector> {
    PiVector::from_graph(g)
}

/// Plug-in expected edge value `pi_i * pi_j` for a distinct pair.
pub fn expected_edge(p: &PiVector, i: usize, j: usize) -> Result<f64> {
    p.check_pair(i, j)?;
    Ok(p.pi()[i] * p.pi()[j])
}

/// Model variance of the edge value on a distinct pair.
pub fn edge_variance(p: &PiVector, m: &EdgeModel, i: usize, j: usize) -> Result<f64> {
    p.check_pair(i, j)?;
    m.validate()?;
    Ok(m.variance(p.pi()[i] * p.pi()[j]))
}

/// First and second moments of the degree sequence under the null model.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMoments {
    /// Expected degree per node.
    pub e_d: Vec<f64>,
    /// Variance of each degree.
    pub var_d: Vec<f64>,
    /// Expected total degree.
    pub e_d1: f64,
}

/// Degree moments in O(n) via power sums.
///
/// With Var A_ij = c1 mu + c2 mu^2 and mu = pi_i pi_j,
/// Var d_i = sum_{j != i} Var A_ij
///         = c1 pi_i (norm1 - pi_i) + c2 pi_i^2 (norm2_sq - pi_i^2).
/// The expected degree scales by (1 - omega) under zero inflation, matching
/// the model's overall edge mean. Cov(d_i, d_j) = Var A_ij for i != j.
pub fn degree_moments(p: &PiVector, m: &EdgeModel) -> Result<DegreeMoments> {
    m.validate()?;
    let (c1, c2) = m.variance_coefficients();
    let mean_scale = m.mean(1.0);
    let s1 = p.norm1();
    let s2 = p.norm2_sq();
    let n = p.len();
    let mut e_d = Vec::with_capacity(n);
    let mut var_d = Vec::with_capacity(n);
    for &pi in p.pi() {
        e_d.push(mean_scale * pi * (s1 - pi));
        var_d.push(c1 * pi * (s1 - pi) + c2 * pi * pi * (s2 - pi * pi));
    }
    let e_d1 = mean_scale * (s1 * s1 - s2);
    Ok(DegreeMoments { e_d, var_d, e_d1 })
}

/// Asymptotic standard errors for the degree parameters and edge means.
#[derive(Debug, Clone)]
pub struct StandardErrors {
    pi: Vec<f64>,
    var_d: Vec<f64>,
    e_d1: f64,
}

impl StandardErrors {
    /// Standard error of `pi_i`: sqrt(Var d_i / E sum_l d_l).
    pub fn se_pi(&self, i: usize) -> f64 {
        (self.var_d[i] / self.e_d1).sqrt()
    }

    pub fn se_pi_all(&self) -> Vec<f64> {
        (0..self.pi.len()).map(|i| self.se_pi(i)).collect()
    }

    /// Standard error of the edge-mean estimate `pi_i pi_j` by the delta
    /// method: sqrt((pi_j^2 Var d_i + pi_i^2 Var d_j) / E sum_l d_l).
    pub fn se_edge(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.pi.len();
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParameter(format!(
                "se_edge requires a distinct in-range pair, got ({i}, {j}) with n = {n}"
            )));
        }
        let num = self.pi[j] * self.pi[j] * self.var_d[i] + self.pi[i] * self.pi[i] * self.var_d[j];
        Ok((num / self.e_d1).sqrt())
    }
}

/// Normal-approximation standard errors for `pi` and pairwise edge means.
pub fn clt_standard_errors(p: &PiVector, m: &EdgeModel) -> Result<StandardErrors> {
    let moments = degree_moments(p, m)?;
    Ok(StandardErrors {
        pi: p.pi().to_vec(),
        var_d: moments.var_d,
        e_d1: moments.e_d1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, SelfLoopPolicy};

    fn path3() -> Graph {
        build_graph([("a", "b", 1.0), ("b", "c", 1.0)], SelfLoopPolicy::Reject).unwrap()
    }

    #[test]
    fn pi_of_path3() {
        let p = estimate_pi(&path3()).unwrap();
        assert_eq!(p.pi(), &[0.5, 1.0, 0.5]);
        assert_eq!(p.norm1(), 2.0);
        assert_eq!(p.norm2_sq(), 1.5);
        assert_eq!(p.power_sum(3), 1.25);
        assert_eq!(p.power_sum(4), 1.125);
        assert_eq!(p.expected_total_degree(), 2.5);
        assert_eq!(p.expected_degree(0), 0.75);
        assert_eq!(p.expected_degree(1), 1.0);
    }

    #[test]
    fn pi_requires_positive_degrees() {
        let g = Graph::from_parts(
            vec!["a".into(), "b".into(), "c".into()],
            [(0, 1, 1.0)],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        match estimate_pi(&g) {
            Err(Error::IsolatedNode { label }) => assert_eq!(label, "c"),
            other => panic!("expected isolated-node error, got {other:?}"),
        }
        let empty = Graph::from_parts(vec![], [], SelfLoopPolicy::Reject).unwrap();
        assert!(estimate_pi(&empty).is_err());
    }

    #[test]
    fn pair_sum_identity() {
        // sum_{i<j} pi_i pi_j = (||d||_1 - sum d^2 / ||d||_1) / 2.
        let g = build_graph(
            [
                ("a", "b", 2.0),
                ("b", "c", 1.0),
                ("c", "d", 3.5),
                ("a", "d", 1.0),
                ("b", "d", 0.5),
            ],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        let p = estimate_pi(&g).unwrap();
        let mut lhs = 0.0;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                lhs += p.pi()[i] * p.pi()[j];
            }
        }
        let d1 = g.total_degree();
        let d2: f64 = g.degree().iter().map(|d| d * d).sum();
        let rhs = (d1 - d2 / d1) / 2.0;
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn expected_edge_guards_pairs() {
        let p = estimate_pi(&path3()).unwrap();
        assert_eq!(expected_edge(&p, 0, 1).unwrap(), 0.5);
        assert!(expected_edge(&p, 1, 1).is_err());
        assert!(expected_edge(&p, 0, 3).is_err());
    }

    #[test]
    fn degree_moments_path3_poisson() {
        let p = estimate_pi(&path3()).unwrap();
        let m = degree_moments(&p, &EdgeModel::Poisson).unwrap();
        assert_eq!(m.e_d, vec![0.75, 1.0, 0.75]);
        // Poisson: Var d_i = E d_i.
        assert_eq!(m.var_d, vec![0.75, 1.0, 0.75]);
        assert_eq!(m.e_d1, 2.5);
        let sum_e: f64 = m.e_d.iter().sum();
        assert!((sum_e - m.e_d1).abs() <= 1e-12 * m.e_d1);
    }

    #[test]
    fn degree_moments_match_pair_sums() {
        // Var d_i computed from power sums equals the explicit pair sum.
        let g = build_graph(
            [
                ("a", "b", 2.0),
                ("b", "c", 1.0),
                ("c", "d", 3.0),
                ("a", "d", 1.0),
            ],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        let p = estimate_pi(&g).unwrap();
        for m in [
            EdgeModel::Bernoulli,
            EdgeModel::Poisson,
            EdgeModel::NegBin { r: 0.7 },
            EdgeModel::ZiPoisson { omega: 0.25 },
            EdgeModel::ZiNegBin { omega: 0.25, r: 0.7 },
        ] {
            let mom = degree_moments(&p, &m).unwrap();
            for i in 0..p.len() {
                let mut var = 0.0;
                let mut mean = 0.0;
                for j in 0..p.len() {
                    if j != i {
                        let mu = p.pi()[i] * p.pi()[j];
                        var += m.variance(mu);
                        mean += m.mean(mu);
                    }
                }
                assert!(
                    (mom.var_d[i] - var).abs() <= 1e-12 * var,
                    "{m:?} var_d[{i}]"
                );
                assert!((mom.e_d[i] - mean).abs() <= 1e-12 * mean, "{m:?} e_d[{i}]");
            }
        }
    }

    #[test]
    fn standard_errors_path3() {
        let p = estimate_pi(&path3()).unwrap();
        let se = clt_standard_errors(&p, &EdgeModel::Poisson).unwrap();
        // Var d = (0.75, 1, 0.75), E||d||_1 = 2.5.
        assert!((se.se_pi(0) - (0.75f64 / 2.5).sqrt()).abs() < 1e-15);
        assert!((se.se_pi(1) - (1.0f64 / 2.5).sqrt()).abs() < 1e-15);
        let want = ((1.0 * 0.75 + 0.25 * 1.0) / 2.5f64).sqrt();
        assert!((se.se_edge(0, 1).unwrap() - want).abs() < 1e-15);
        assert!(se.se_edge(1, 1).is_err());
    }

    #[test]
    fn group_power_sums_align() {
        let p = estimate_pi(&path3()).unwrap();
        let a = CommunityAssignment::from_values(&["u", "u", "v"]);
        let s = p.group_power_sums(&a).unwrap();
        assert_eq!(s[0][0], 1.5);
        assert_eq!(s[0][1], 1.25);
        assert_eq!(s[1][0], 0.5);
        let short = CommunityAssignment::from_values(&["u", "v"]);
        assert!(p.group_power_sums(&short).is_err());
    }
}
