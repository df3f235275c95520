//! File formats: tab-separated edge lists, a minimal GML subset, and CSV
//! covariate tables.

pub mod covariates;
pub mod edge_list;
pub mod gml;

pub use covariates::{
    read_covariates, read_covariates_table, resolve_assignment, CovariateTable, MissingPolicy,
    ResolvedAssignment,
};
pub use edge_list::{parse_edge_list, read_edge_list, write_edge_list};
pub use gml::{parse_gml, read_gml, GmlData};
