//! File-level input and output: edge lists, GML, covariate CSV, and the
//! interactions between them.

use std::fs;

use modsig::{
    parse_gml, read_covariates_table, read_edge_list, read_gml, resolve_assignment,
    write_edge_list, Error, MissingPolicy, SelfLoopPolicy,
};

#[test]
fn edge_list_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.tsv");
    fs::write(
        &path,
        "# comment line\n\
         a\tb\t2.5\n\
         \n\
         b\tc\r\n\
         c\ta\t0.25\n\
         a\tb\t0.5\n",
    )
    .unwrap();
    let g = read_edge_list(&path, SelfLoopPolicy::Reject).unwrap();
    assert_eq!(g.n(), 3);
    assert_eq!(g.edge_count(), 3);
    // Missing third field defaults to weight 1; duplicates are summed.
    let weight_of = |u: &str, v: &str| {
        let (i, j) = (g.node_index(u).unwrap(), g.node_index(v).unwrap());
        let (i, j) = (i.min(j), i.max(j));
        g.edges().iter().find(|&&(a, b, _)| (a, b) == (i, j)).unwrap().2
    };
    assert_eq!(weight_of("a", "b"), 3.0);
    assert_eq!(weight_of("b", "c"), 1.0);
    assert_eq!(weight_of("c", "a"), 0.25);

    let out = dir.path().join("roundtrip.tsv");
    write_edge_list(&out, &g).unwrap();
    let h = read_edge_list(&out, SelfLoopPolicy::Reject).unwrap();
    assert_eq!(g.labels(), h.labels());
    assert_eq!(g.edges(), h.edges());
}

#[test]
fn edge_list_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tsv");
    fs::write(&path, "a\tb\n# fine\nc\tc\n").unwrap();
    match read_edge_list(&path, SelfLoopPolicy::Reject) {
        Err(Error::SelfLoop { node, line }) => {
            assert_eq!(node, "c");
            assert_eq!(line, Some(3));
        }
        other => panic!("expected self-loop error, got {other:?}"),
    }
    let g = read_edge_list(&path, SelfLoopPolicy::Drop).unwrap();
    assert_eq!(g.edge_count(), 1);
    // The dropped loop's endpoint never appeared in a kept edge.
    assert_eq!(g.n(), 2);
}

#[test]
fn missing_file_error_names_the_path() {
    let err = read_edge_list("/nonexistent/net.tsv", SelfLoopPolicy::Reject).unwrap_err();
    assert!(err.to_string().contains("net.tsv"), "{err}");
}

#[test]
fn same_bytes_same_graph() {
    let text = "x\ty\t1.5\ny\tz\t2\nz\tx\n";
    let a = modsig::parse_edge_list(text, "mem", SelfLoopPolicy::Reject).unwrap();
    let b = modsig::parse_edge_list(text, "mem", SelfLoopPolicy::Reject).unwrap();
    assert_eq!(a.labels(), b.labels());
    assert_eq!(a.edges(), b.edges());
}

const GML_SAMPLE: &str = r#"
Creator "test"
graph [
  comment "three nodes"
  node [ id 1 label "alice" faction "blue" ]
  node [ id 2 label "bob" faction "blue" ]
  node [ id 3 label "carol" faction "red" extra [ nested 1 ] ]
  edge [ source 1 target 2 value 2.0 ]
  edge [ source 2 target 3 ]
]
"#;

#[test]
fn gml_nodes_edges_and_attributes() {
    let data = parse_gml(GML_SAMPLE, "sample.gml", SelfLoopPolicy::Reject).unwrap();
    let g = &data.graph;
    assert_eq!(g.n(), 3);
    assert_eq!(g.edge_count(), 2);
    assert_eq!(g.node_index("alice"), Some(0));
    assert_eq!(g.total_weight(), 3.0);

    // Scalar node attributes become covariate columns.
    assert!(data.covariates.has_column("faction"));
    assert_eq!(data.covariates.get("alice", "faction"), Some("blue"));
    assert_eq!(data.covariates.get("carol", "faction"), Some("red"));

    // The nested node block is skipped with a warning.
    assert!(
        data.warnings.iter().any(|w| w.contains("extra")),
        "warnings: {:?}",
        data.warnings
    );

    let resolved =
        resolve_assignment(g, &data.covariates, "faction", MissingPolicy::Error).unwrap();
    assert_eq!(resolved.assignment.k(), 2);
    assert!(resolved.dropped_missing.is_empty());
}

#[test]
fn gml_directed_flag_warns() {
    let text = r#"graph [ directed 1
      node [ id 1 ] node [ id 2 ]
      edge [ source 1 target 2 weight 3 ] ]"#;
    let data = parse_gml(text, "d.gml", SelfLoopPolicy::Reject).unwrap();
    assert!(data.warnings.iter().any(|w| w.contains("directed")));
    assert_eq!(data.graph.total_weight(), 3.0);
    // Without labels, ids name the nodes.
    assert!(data.graph.node_index("1").is_some());
}

#[test]
fn gml_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.gml");
    fs::write(&path, GML_SAMPLE).unwrap();
    let data = read_gml(&path, SelfLoopPolicy::Reject).unwrap();
    assert_eq!(data.graph.n(), 3);
}

#[test]
fn covariate_csv_resolution_policies() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.tsv");
    fs::write(&net, "a\tb\nb\tc\nc\td\nd\ta\na\tc\n").unwrap();
    let g = read_edge_list(&net, SelfLoopPolicy::Reject).unwrap();

    let csv = dir.path().join("cov.csv");
    fs::write(&csv, "node,dept,floor\na,sales,1\nb,sales,2\nc,eng,\nd,,2\n").unwrap();
    let table = read_covariates_table(&csv).unwrap();

    // Fully covered column resolves strictly.
    let dept = resolve_assignment(&g, &table, "dept", MissingPolicy::Error);
    match dept {
        Err(Error::MissingCovariate { node, column }) => {
            assert_eq!(node, "d");
            assert_eq!(column, "dept");
        }
        other => panic!("expected missing covariate, got {other:?}"),
    }

    // Drop policy removes the uncovered node and keeps the induced graph.
    let dept = resolve_assignment(&g, &table, "dept", MissingPolicy::Drop).unwrap();
    assert_eq!(dept.graph.n(), 3);
    assert_eq!(dept.dropped_missing, vec!["d".to_string()]);
    assert_eq!(dept.assignment.k(), 2);
    assert!(!dept.warnings.is_empty());

    // Unknown column error lists what exists.
    match resolve_assignment(&g, &table, "team", MissingPolicy::Error) {
        Err(Error::UnknownColumn { column, available }) => {
            assert_eq!(column, "team");
            assert_eq!(available, vec!["dept".to_string(), "floor".to_string()]);
        }
        other => panic!("expected unknown column, got {other:?}"),
    }
}

#[test]
fn covariates_tolerate_extra_nodes_in_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.tsv");
    fs::write(&net, "a\tb\nb\tc\na\tc\n").unwrap();
    let g = read_edge_list(&net, SelfLoopPolicy::Reject).unwrap();
    let csv = dir.path().join("cov.csv");
    fs::write(&csv, "node,g\na,0\nb,0\nc,1\nzz,1\n").unwrap();
    let table = read_covariates_table(&csv).unwrap();
    let resolved = resolve_assignment(&g, &table, "g", MissingPolicy::Error).unwrap();
    assert_eq!(resolved.graph.n(), 3);
    assert_eq!(resolved.assignment.k(), 2);
}
