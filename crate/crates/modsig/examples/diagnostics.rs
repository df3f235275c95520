//! Screens a dataset against the assumptions behind the normal
//! approximation: degree balance, sparsity, dispersion, and group count.

use modsig::{
    build_graph, check_assumptions, CommunityAssignment, EdgeModel, SelfLoopPolicy,
};

pub fn main() {
    // A star-heavy network: one hub touches everyone, plus a sparse ring.
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let n = 60;
    for i in 1..n {
        edges.push(("hub".into(), format!("v{i}"), 1.0));
    }
    for i in 1..n {
        let j = if i + 1 < n { i + 1 } else { 1 };
        edges.push((format!("v{i}"), format!("v{j}"), 1.0));
    }
    let g = build_graph(edges, SelfLoopPolicy::Reject).unwrap();

    let values: Vec<String> = (0..g.n()).map(|i| (i % 2).to_string()).collect();
    let a = CommunityAssignment::from_values(&values);

    let report = check_assumptions(&g, &EdgeModel::Poisson, Some(&a));

    if let Some((q1, q2, q3)) = report.degree_quartiles {
        println!("degree quartiles     {q1:.1} / {q2:.1} / {q3:.1}");
    }
    let show = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            println!("{name:<20} {v:.3}");
        }
    };
    show("star ratio", report.star_ratio);
    show("hub ratio", report.hub_ratio);
    show("sparse ratio", report.sparse_ratio);
    show("dense ratio", report.dense_ratio);
    show("groups per node", report.k_over_n);
    if let Some((lo, hi)) = report.dispersion_range {
        println!("dispersion index     {lo:.3} .. {hi:.3}");
    }

    if report.warnings.is_empty() {
        println!("\nno assumption flags raised");
    } else {
        println!("\n{} flag(s):", report.warnings.len());
        for w in &report.warnings {
            println!("  - {w}");
        }
        println!("the normal approximation may be off; prefer the bootstrap here");
    }
}
