use serde::{Deserialize, Serialize};

use crate::graph::{degree_quartiles, CommunityAssignment, Graph};
use crate::null::family::{EdgeModel, Family};

/// Cutoffs for the modeling-assumption screens. Defaults reflect the
/// operating ranges where the normal approximation is trustworthy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticThresholds {
    /// Flag when Q3 / Q2 exceeds this (degree tail too heavy).
    pub quartile_star_max: f64,
    /// Flag when max degree / mean degree exceeds this (single dominant hub;
    /// quartiles alone cannot see one).
    pub hub_max: f64,
    /// Flag when Q1 / sqrt(Q2) falls below this (degrees too small).
    pub sparse_min: f64,
    /// Flag when Q3 / (n sqrt(Q2)) exceeds this (graph too dense).
    pub dense_max: f64,
    /// Flag when K / n exceeds this (too many groups per node).
    pub k_over_n_max: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        DiagnosticThresholds {
            quartile_star_max: 10.0,
            hub_max: 10.0,
            sparse_min: 0.5,
            dense_max: 0.1,
            k_over_n_max: 0.1,
        }
    }
}

/// Outcome of the assumption screens. Ratios are `None` when undefined for
/// the input (e.g. zero median degree); every triggered screen appends a
/// warning. Never fails: degenerate inputs yield warnings, not errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub degree_quartiles: Option<(f64, f64, f64)>,
    /// Q3 / Q2.
    pub star_ratio: Option<f64>,
    /// Max degree over mean degree.
    pub hub_ratio: Option<f64>,
    /// Q1 / sqrt(Q2).
    pub sparse_ratio: Option<f64>,
    /// Q3 / (n sqrt(Q2)).
    pub dense_ratio: Option<f64>,
    /// Model dispersion index Var/mean at the smallest and largest fitted
    /// edge means.
    pub dispersion_range: Option<(f64, f64)>,
    /// Third-central-moment/variance ratio at the smallest and largest
    /// fitted edge means.
    pub skewness_range: Option<(f64, f64)>,
    pub k_over_n: Option<f64>,
    pub warnings: Vec<String>,
}

/// Runs the assumption screens with default thresholds.
pub fn check_assumptions(
    g: &Graph,
    m: &EdgeModel,
    a: Option<&CommunityAssignment>,
) -> DiagnosticsReport {
    check_assumptions_with(g, m, a, &DiagnosticThresholds::default())
}

/// Runs the assumption screens with explicit thresholds.
pub fn check_assumptions_with(
    g: &Graph,
    m: &EdgeModel,
    a: Option<&CommunityAssignment>,
    t: &DiagnosticThresholds,
) -> DiagnosticsReport {
    let mut report = DiagnosticsReport {
        degree_quartiles: None,
        star_ratio: None,
        hub_ratio: None,
        sparse_ratio: None,
        dense_ratio: None,
        dispersion_range: None,
        skewness_range: None,
        k_over_n: None,
        warnings: Vec::new(),
    };
    let n = g.n();
    if n == 0 {
        report.warnings.push("graph has no nodes".into());
        return report;
    }
    let (q1, q2, q3) = degree_quartiles(g).expect("non-empty graph");
    report.degree_quartiles = Some((q1, q2, q3));

    if q2 > 0.0 {
        let star = q3 / q2;
        report.star_ratio = Some(star);
        if star > t.quartile_star_max {
            report.warnings.push(format!(
                "degree quartile ratio Q3/Q2 = {star:.3} exceeds {}: heavy degree tail, normal approximation may be unreliable",
                t.quartile_star_max
            ));
        }
        let sparse = q1 / q2.sqrt();
        report.sparse_ratio = Some(sparse);
        if sparse < t.sparse_min {
            report.warnings.push(format!(
                "sparsity ratio Q1/sqrt(Q2) = {sparse:.3} is below {}: degrees may be too small for the normal approximation",
                t.sparse_min
            ));
        }
        let dense = q3 / (n as f64 * q2.sqrt());
        report.dense_ratio = Some(dense);
        if dense > t.dense_max {
            report.warnings.push(format!(
                "density ratio Q3/(n sqrt(Q2)) = {dense:.3} exceeds {}: graph too dense for the sparse-regime approximation",
                t.dense_max
            ));
        }
    } else {
        report
            .warnings
            .push("median degree is zero: quartile screens skipped".into());
    }

    let mean = g.total_degree() / n as f64;
    if mean > 0.0 {
        let max = g.degree().iter().cloned().fold(0.0, f64::max);
        let hub = max / mean;
        report.hub_ratio = Some(hub);
        if hub > t.hub_max {
            report.warnings.push(format!(
                "max/mean degree ratio {hub:.3} exceeds {}: a dominant hub may invalidate the normal approximation",
                t.hub_max
            ));
        }
    }

    if m.validate().is_ok() {
        if let Some((mu_min, mu_max)) = edge_mean_extremes(g) {
            report.dispersion_range = Some((m.dispersion(mu_min), m.dispersion(mu_max)));
            report.skewness_range =
                Some((m.skewness_ratio(mu_min), m.skewness_ratio(mu_max)));
            if m.family() == Family::Bernoulli && mu_max >= 1.0 {
                report.warnings.push(format!(
                    "largest fitted edge mean {mu_max:.3} is at or above 1: bernoulli model infeasible at the extreme degree pair"
                ));
            }
        }
    } else {
        report
            .warnings
            .push("model parameters invalid: moment screens skipped".into());
    }

    if let Some(a) = a {
        if a.len() == n {
            let share = a.k() as f64 / n as f64;
            report.k_over_n = Some(share);
            if share > t.k_over_n_max {
                report.warnings.push(format!(
                    "groups per node K/n = {share:.3} exceeds {}: too many groups for stable estimates",
                    t.k_over_n_max
                ));
            }
        } else {
            report.warnings.push(format!(
                "assignment covers {} nodes but the graph has {n}: group screen skipped",
                a.len()
            ));
        }
    }
    report
}

/// Smallest and largest pairwise products of the plug-in degree parameters,
/// over nodes with positive degree. None when fewer than two such nodes.
fn edge_mean_extremes(g: &Graph) -> Option<(f64, f64)> {
    let total = g.total_degree();
    if total <= 0.0 {
        return None;
    }
    let scale = total.sqrt();
    let (mut lo1, mut lo2) = (f64::INFINITY, f64::INFINITY);
    let (mut hi1, mut hi2) = (0.0f64, 0.0f64);
    let mut count = 0usize;
    for &d in g.degree() {
        if d <= 0.0 {
            continue;
        }
        count += 1;
        let p = d / scale;
        if p < lo1 {
            lo2 = lo1;
            lo1 = p;
        } else if p < lo2 {
            lo2 = p;
        }
        if p > hi1 {
            hi2 = hi1;
            hi1 = p;
        } else if p > hi2 {
            hi2 = p;
        }
    }
    if count < 2 {
        return None;
    }
    Some((lo1 * lo2, hi1 * hi2))
}
