//! Significance testing for covariate-defined communities in networks.
//!
//! Given an undirected weighted graph and a node partition fixed in advance
//! (groups read off a covariate, not fitted to the graph), this crate asks
//! whether the partition's modularity exceeds what a degree-based null
//! model already explains. Edge weights are modeled as independent
//! Bernoulli, Poisson, or negative binomial draws with mean `pi_i pi_j`;
//! the modularity estimate is centered by a plug-in bias and scaled by a
//! plug-in standard error, and the upper tail of the standard normal gives
//! the p-value. A parametric bootstrap cross-checks the normal calibration,
//! and zero-inflated variants support model comparison.
//!
//! Start with [`significance_test`]; the pieces it composes are public for
//! finer control.

pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod null;
pub mod reference;
pub mod report;
pub mod significance;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{
    build_graph, degree_quartiles, within_between_degrees, CommunityAssignment,
    DegreeDecomposition, Graph, SelfLoopPolicy,
};
pub use null::diagnostics::{check_assumptions, DiagnosticThresholds, DiagnosticsReport};
pub use null::family::{EdgeModel, Family};
pub use null::fit::{
    compare_models, fit_edge_model, log_likelihood, saturated_log_likelihood, FittedEdgeModel,
    ModelComparison, ModelComparisonRow,
};
pub use null::{
    clt_standard_errors, degree_moments, edge_variance, estimate_pi, expected_edge,
    DegreeMoments, PiVector, StandardErrors,
};
pub use significance::{
    beta_weights, bias_alternative, bias_hat, modularity_hat, p_value, population_modularity,
    significance_test, test_statistics, variance_hat, BetaWeights, ModularityReport,
    TestOptions, TestStatistics,
};
pub use io::{
    parse_edge_list, parse_gml, read_covariates, read_covariates_table, read_edge_list, read_gml,
    resolve_assignment, write_edge_list, CovariateTable, GmlData, MissingPolicy,
    ResolvedAssignment,
};
pub use report::{GraphSummary, ModelBlock, PValue, ReportDocument, TestBlock};
pub use sim::{
    bootstrap, bootstrap_fitted, mix_seed, sample_graph, uniformity_summary, BootstrapResult,
    BootstrapSummary,
};
