use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BucketStatus, LeafCounts, ScaledTree};
use crate::curve::Scheme;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub kind: NodeKind,
    pub axis: Option<usize>,
    pub depth: usize,
    pub children: Option<[usize; 2]>,
    pub points: Option<Vec<u64>>,
    pub status: BucketStatus,
}

/// Serializable form of a [`ScaledTree`]. Nodes are listed in pre-order and
/// leaf point lists are in curve order. The status of an internal node is
/// that of its whole subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub n: usize,
    pub s: usize,
    pub scheme: Scheme,
    pub nodes: Vec<NodeRecord>,
}

impl TreeDocument {
    pub fn from_tree(tree: &ScaledTree) -> Self {
        let nodes = tree
            .nodes()
            .map(|node| NodeRecord {
                id: node.id(),
                kind: if node.is_leaf() {
                    NodeKind::Leaf
                } else {
                    NodeKind::Internal
                },
                axis: node.axis(),
                depth: node.depth(),
                children: node.children().map(|[a, b]| [a.id(), b.id()]),
                points: node
                    .is_leaf()
                    .then(|| node.rows().iter().map(|&r| tree.id_of_row(r)).collect()),
                status: node.status(),
            })
            .collect();
        TreeDocument {
            n: tree.dim(),
            s: tree.capacity(),
            scheme: tree.scheme(),
            nodes,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDocument = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        let bad = |detail: String| Error::Malformed {
            what: "tree document",
            detail,
        };
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(bad(format!("node at position {i} has id {}", node.id)));
            }
            match node.kind {
                NodeKind::Leaf if node.points.is_none() || node.children.is_some() => {
                    return Err(bad(format!("leaf {i} needs points and no children")));
                }
                NodeKind::Internal if node.children.is_none() || node.axis.is_none() => {
                    return Err(bad(format!("internal node {i} needs children and an axis")));
                }
                _ => {}
            }
            if let Some(c) = node.children {
                if c.iter().any(|&c| c <= i || c >= self.nodes.len()) {
                    return Err(bad(format!("node {i} has invalid children {c:?}")));
                }
            }
        }
        Ok(())
    }

    /// Leaf tallies recomputed from the listed buckets.
    pub fn leaf_counts(&self) -> LeafCounts {
        let mut counts = LeafCounts {
            leaves: 0,
            non_empty: 0,
            overfilled: 0,
        };
        for points in self.nodes.iter().filter_map(|n| n.points.as_ref()) {
            counts.leaves += 1;
            counts.non_empty += usize::from(!points.is_empty());
            counts.overfilled += usize::from(points.len() > self.s);
        }
        counts
    }

    /// Point ids in curve order.
    pub fn ordered_ids(&self) -> Vec<u64> {
        self.nodes
            .iter()
            .filter_map(|n| n.points.as_deref())
            .flatten()
            .copied()
            .collect()
    }

    /// Graphviz rendering; labels carry the same fields as the JSON form.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph gray_hilbert {\n  node [shape=box];\n");
        for node in &self.nodes {
            let label = match (node.kind, node.axis, &node.points) {
                (NodeKind::Internal, Some(axis), _) => {
                    format!("axis {axis}\\ndepth {}\\n{}", node.depth, node.status)
                }
                (_, _, points) => format!(
                    "leaf\\ndepth {}\\n{} pts\\n{}",
                    node.depth,
                    points.as_ref().map_or(0, Vec::len),
                    node.status
                ),
            };
            let _ = writeln!(out, "  n{} [label=\"{label}\"];", node.id);
        }
        for node in &self.nodes {
            if let Some([a, b]) = node.children {
                let _ = writeln!(out, "  n{} -> n{a};\n  n{} -> n{b};", node.id, node.id);
            }
        }
        out.push_str("}\n");
        out
    }
}
