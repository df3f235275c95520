use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// What to do with a record whose two endpoints are the same node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoopPolicy {
    /// Reject the input with an error naming the node. The default.
    #[default]
    Reject,
    /// Silently discard self-loop records.
    Drop,
}

/// Undirected weighted graph with string node labels.
///
/// Nodes are indexed densely in first-appearance order. Parallel records for
/// the same unordered pair are aggregated by summing weights; stored edges are
/// normalized to `i < j` and sorted. Weights are finite and non-negative;
/// records with weight zero are discarded. Isolated nodes are representable
/// (they arise from generative sampling and from node-list formats).
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    neighbors: Vec<(usize, f64)>,
    degree: Vec<f64>,
    total_degree: f64,
}

/// Builds a graph from `(u, v, weight)` records with string endpoints.
///
/// Node indices follow first appearance across the record stream (u before v
/// within a record). Duplicate pairs are summed regardless of orientation.
pub fn build_graph<I, S>(records: I, policy: SelfLoopPolicy) -> Result<Graph>
where
    I: IntoIterator<Item = (S, S, f64)>,
    S: AsRef<str>,
{
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |name: &str, labels: &mut Vec<String>| -> usize {
        match index.get(name) {
            Some(&i) => i,
            None => {
                let i = labels.len();
                labels.push(name.to_owned());
                index.insert(name.to_owned(), i);
                i
            }
        }
    };
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (u, v, w) in records {
        let (u, v) = (u.as_ref(), v.as_ref());
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight {
                u: u.to_owned(),
                v: v.to_owned(),
                weight: w,
                line: None,
            });
        }
        let ui = intern(u, &mut labels);
        let vi = intern(v, &mut labels);
        if ui == vi {
            match policy {
                SelfLoopPolicy::Reject => {
                    return Err(Error::SelfLoop {
                        node: u.to_owned(),
                        line: None,
                    })
                }
                SelfLoopPolicy::Drop => continue,
            }
        }
        pairs.push((ui, vi, w));
    }
    Graph::assemble(labels, pairs)
}

impl Graph {
    /// Builds a graph over an explicit node set, edges given by node index.
    ///
    /// Unlike [`build_graph`], nodes that appear in no edge are kept, so the
    /// result may contain isolated nodes. Labels must be distinct.
    pub fn from_parts(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        policy: SelfLoopPolicy,
    ) -> Result<Graph> {
        let n = labels.len();
        let mut pairs = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::UnknownNode {
                    label: format!("#{}", i.max(j)),
                    context: format!("edge index out of range for {n} nodes"),
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight {
                    u: labels[i].clone(),
                    v: labels[j].clone(),
                    weight: w,
                    line: None,
                });
            }
            if i == j {
                match policy {
                    SelfLoopPolicy::Reject => {
                        return Err(Error::SelfLoop {
                            node: labels[i].clone(),
                            line: None,
                        })
                    }
                    SelfLoopPolicy::Drop => continue,
                }
            }
            pairs.push((i, j, w));
        }
        Graph::assemble(labels, pairs)
    }

    fn assemble(labels: Vec<String>, pairs: Vec<(usize, usize, f64)>) -> Result<Graph> {
        let n = labels.len();
        let mut label_index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel { label: l.clone() });
            }
        }
        // BTreeMap aggregation: deterministic order, duplicates summed.
        let mut agg: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in pairs {
            let key = if i < j { (i, j) } else { (j, i) };
            *agg.entry(key).or_insert(0.0) += w;
        }
        let edges: Vec<(usize, usize, f64)> = agg
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((i, j), w)| (i, j, w))
            .collect();

        let mut degree = vec![0.0f64; n];
        let mut counts = vec![0usize; n];
        for &(i, j, w) in &edges {
            degree[i] += w;
            degree[j] += w;
            counts[i] += 1;
            counts[j] += 1;
        }
        let total_degree: f64 = degree.iter().sum();

        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![(0usize, 0.0f64); edges.len() * 2];
        // Sorted edge order yields sorted adjacency rows: for row r, partners
        // i < r arrive while scanning edges (i, r), then partners j > r while
        // scanning (r, j).
        for &(i, j, w) in &edges {
            neighbors[cursor[i]] = (j, w);
            cursor[i] += 1;
            neighbors[cursor[j]] = (i, w);
            cursor[j] += 1;
        }

        Ok(Graph {
            labels,
            label_index,
            edges,
            offsets,
            neighbors,
            degree,
            total_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Aggregated edges, normalized to `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn node_label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Weighted degree of each node.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Sum of all weighted degrees; equals twice the total edge weight.
    pub fn total_degree(&self) -> f64 {
        self.total_degree
    }

    /// Sum of edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    /// Neighbors of `i` with edge weights, ascending by neighbor index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.degree[i] == 0.0).collect()
    }

    /// Subgraph induced by the given node indices (ascending, no
    /// duplicates). Edges with either endpoint outside the set are dropped.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(keep.iter().all(|&i| i < self.n()));
        let mut remap = vec![usize::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j, _)| remap[i] != usize::MAX && remap[j] != usize::MAX)
            .map(|&(i, j, w)| (remap[i], remap[j], w));
        Graph::from_parts(labels, edges, SelfLoopPolicy::Reject)
            .expect("reduction of a valid graph is valid")
    }

    /// Drops degree-zero nodes. Returns the reduced graph and, for each kept
    /// node, its index in the original graph (ascending).
    pub fn drop_isolated(&self) -> (Graph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.n()).filter(|&i| self.degree[i] > 0.0).collect();
        (self.induced(&keep), keep)
    }
}

/// Node partition induced by a categorical covariate.
///
/// Group ids are dense `0..k` in first-appearance order; `group_label`
/// recovers the originating covariate value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    group_of: Vec<usize>,
    group_labels: Vec<String>,
}

impl CommunityAssignment {
    /// One covariate value per node, aligned with node indices.
    pub fn from_values<S: AsRef<str>>(values: &[S]) -> CommunityAssignment {
        let mut labels: Vec<String> = Vec::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let group_of = values
            .iter()
            .map(|v| {
                let v = v.as_ref();
                match ids.get(v) {
                    Some(&g) => g,
                    None => {
                        let g = labels.len();
                        labels.push(v.to_owned());
                        ids.insert(v.to_owned(), g);
                        g
                    }
                }
            })
            .collect();
        CommunityAssignment {
            group_of,
            group_labels: labels,
        }
    }

    /// Pre-encoded group ids. Ids must be dense: every group in
    /// `0..group_labels.len()` occurs at least once.
    pub fn new(group_of: Vec<usize>, group_labels: Vec<String>) -> Result<CommunityAssignment> {
        let k = group_labels.len();
        let mut seen = vec![false; k];
        for &g in &group_of {
            if g >= k {
                return Err(Error::InvalidParameter(format!(
                    "group id {g} out of range for {k} groups"
                )));
            }
            seen[g] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "group {missing} ({:?}) has no members",
                group_labels[missing]
            )));
        }
        Ok(CommunityAssignment {
            group_of,
            group_labels,
        })
    }

    pub fn len(&self) -> usize {
        self.group_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    /// Number of groups.
    pub fn k(&self) -> usize {
        self.group_labels.len()
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn group_label(&self, g: usize) -> &str {
        &self.group_labels[g]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k()];
        for &g in &self.group_of {
            sizes[g] += 1;
        }
        sizes
    }

    /// True when the partition admits no within/between contrast: a single
    /// group, or every group a singleton. Detected structurally, not by
    /// inspecting floating-point weights.
    pub fn is_degenerate(&self) -> bool {
        self.k() <= 1 || self.group_sizes().iter().all(|&s| s == 1)
    }

    /// Restriction to the subsequence of nodes in `keep` (ascending original
    /// indices). Vanished groups are dropped and ids re-densified in
    /// first-appearance order over the kept nodes.
    pub fn restrict(&self, keep: &[usize]) -> CommunityAssignment {
        let values: Vec<&str> = keep
            .iter()
            .map(|&i| self.group_labels[self.group_of[i]].as_str())
            .collect();
        CommunityAssignment::from_values(&values)
    }
}

/// Per-node split of weighted degree into within-group and between-group
/// parts. `d_within[i] + d_between[i]` reproduces the degree exactly;
/// `d_between` is defined by subtraction.
#[derive(Debug, Clone)]
pub struct DegreeDecomposition {
    pub d_within: Vec<f64>,
    pub d_between: Vec<f64>,
}

/// Splits each node's degree by whether the incident edge stays in its group.
pub fn within_between_degrees(
    g: &Graph,
    a: &CommunityAssignment,
) -> Result<DegreeDecomposition> {
    check_alignment(g, a)?;
    let mut d_within = vec![0.0f64; g.n()];
    for &(i, j, w) in g.edges() {
        if a.group_of()[i] == a.group_of()[j] {
            d_within[i] += w;
            d_within[j] += w;
        }
    }
    let d_between = g
        .degree()
        .iter()
        .zip(&d_within)
        .map(|(&d, &dw)| d - dw)
        .collect();
    Ok(DegreeDecomposition {
        d_within,
        d_between,
    })
}

/// Degree quartiles (Q1, Q2, Q3) by linear interpolation of order statistics
/// (the "type 7" convention: quantile p sits at rank (n-1)p, 0-based).
pub fn degree_quartiles(g: &Graph) -> Result<(f64, f64, f64)> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut d = g.degree().to_vec();
    d.sort_by(|a, b| a.partial_cmp(b).expect("degrees are finite"));
    let q = |p: f64| -> f64 {
        let h = (d.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        if lo + 1 < d.len() {
            d[lo] + (h - lo as f64) * (d[lo + 1] - d[lo])
        } else {
            d[lo]
        }
    };
    Ok((q(0.25), q(0.5), q(0.75)))
}

pub(crate) fn check_alignment(g: &Graph, a: &CommunityAssignment) -> Result<()> {
    if a.len() != g.n() {
        return Err(Error::LengthMismatch {
            what: "community assignment".into(),
            expected: g.n(),
            got: a.len(),
        });
    }
    Ok(())
}
