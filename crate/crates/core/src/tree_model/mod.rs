//! Tree-representations of stacked polytopes.
//!
//! A stacked `d`-polytope is recorded as an ordered `d`-ary tree. The root is
//! the initial copy of the base facet; stacking a vertex onto the facet of a
//! leaf turns that leaf into an interior node with `d` ordered children, child
//! `i` being the new facet that replaces the `i`-th vertex of its parent's
//! facet. Leaves correspond one-to-one to the facets other than the base.

mod balance;
mod generate;
mod graph;
mod heavy;
mod skeleton;

pub use balance::{balance_weights, WeightedTree};
pub use generate::{gen_lowerbound_graph, gen_tree, Gadget, LowerBoundKind, StackedTriangulation, TreeShape};
pub(crate) use graph::graph_from_value;
pub use graph::{default_base, tree_from_graph, tree_from_graph_labeled, PolytopeGraph};
pub use heavy::{heavy_paths, Caterpillar, CaterpillarHierarchy, HeavyPaths};
pub use skeleton::{FacetRef, Ridge, Skeleton};

use std::fmt;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("node has {found} children, expected {expected}")]
    ChildCount { expected: usize, found: usize },
    #[error("the root must be an interior node")]
    RootIsLeaf,
    #[error("size must be positive")]
    EmptySize,
    #[error("invalid size {0} for this graph family")]
    InvalidSize(usize),
    #[error("not a stacked polytope with respect to the given base: {0}")]
    NotStacked(String),
    #[error("weights are not balanced at node {node}: {reason}")]
    Unbalanced { node: usize, reason: String },
}

/// Index of a node. Nodes are numbered in pre-order, so the root is `0` and
/// every child has a larger id than its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

/// Ordered `d`-ary stacking tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeRep {
    dim: usize,
    nodes: Vec<Node>,
}

impl TreeRep {
    /// Builds a tree from child lists indexed by arbitrary ids, rooted at
    /// `root`. Returns the tree (renumbered in pre-order) and, for every new
    /// node id, the original id.
    pub fn from_children(
        dim: usize,
        children: &[Vec<usize>],
        root: usize,
    ) -> Result<(Self, Vec<usize>), TreeError> {
        if dim < 3 {
            return Err(TreeError::DimensionTooSmall(dim));
        }
        if children[root].is_empty() {
            return Err(TreeError::RootIsLeaf);
        }
        let mut nodes = Vec::with_capacity(children.len());
        let mut original = Vec::with_capacity(children.len());
        // (original id, parent in new numbering)
        let mut stack = vec![(root, None::<NodeId>)];
        while let Some((old, parent)) = stack.pop() {
            let kids = &children[old];
            if !kids.is_empty() && kids.len() != dim {
                return Err(TreeError::ChildCount {
                    expected: dim,
                    found: kids.len(),
                });
            }
            let id = NodeId(nodes.len());
            nodes.push(Node {
                parent,
                children: Vec::with_capacity(kids.len()),
            });
            original.push(old);
            if let Some(p) = parent {
                nodes[p.0].children.push(id);
            }
            for &k in kids.iter().rev() {
                stack.push((k, Some(id)));
            }
        }
        Ok((TreeRep { dim, nodes }, original))
    }

    /// The tree of a single stacking onto the base facet: a `d`-simplex.
    pub fn simplex(dim: usize) -> Result<Self, TreeError> {
        let mut children = vec![(1..=dim).collect::<Vec<_>>()];
        children.extend((0..dim).map(|_| Vec::new()));
        Ok(Self::from_children(dim, &children, 0)?.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Total number of tree nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0].children.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Interior nodes in pre-order (the stacking order).
    pub fn interior_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&v| !self.is_leaf(v))
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&v| self.is_leaf(v))
    }

    pub fn interior_count(&self) -> usize {
        self.interior_nodes().count()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Number of polytope vertices: the `d` base vertices plus one per stacking.
    pub fn vertex_count(&self) -> usize {
        self.dim + self.interior_count()
    }

    /// Number of nodes in each node's subtree.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.nodes.len()];
        for v in (0..self.nodes.len()).rev() {
            for c in &self.nodes[v].children {
                size[v] += size[c.0];
            }
        }
        size
    }

    /// Depth of every node (root = 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        for v in 1..self.nodes.len() {
            depth[v] = depth[self.nodes[v].parent.expect("non-root has parent").0] + 1;
        }
        depth
    }

    /// Serializes to `{"dim": d, "tree": node}` with `null` leaves.
    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"dim\":{},\"tree\":", self.dim);
        // Explicit stack so very deep trees do not recurse.
        enum Step {
            Open(NodeId),
            Text(&'static str),
        }
        let mut stack = vec![Step::Open(self.root())];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(t) => out.push_str(t),
                Step::Open(v) => {
                    let kids = self.children(v);
                    if kids.is_empty() {
                        out.push_str("null");
                        continue;
                    }
                    out.push('[');
                    stack.push(Step::Text("]"));
                    for (i, &k) in kids.iter().enumerate().rev() {
                        stack.push(Step::Open(k));
                        if i > 0 {
                            stack.push(Step::Text(","));
                        }
                    }
                }
            }
        }
        out.push('}');
        out
    }
}

/// Parses the tree JSON format `{"dim": d, "tree": node}` where a node is
/// `null` (a leaf) or an array of exactly `d` nodes.
pub fn parse_tree(text: &[u8]) -> Result<TreeRep, TreeError> {
    let value = parse_json(text)?;
    tree_from_value(&value)
}

pub(crate) fn parse_json(text: &[u8]) -> Result<Value, TreeError> {
    let mut de = serde_json::Deserializer::from_slice(text);
    de.disable_recursion_limit();
    let value = serde::Deserialize::deserialize(&mut de).map_err(|e: serde_json::Error| TreeError::Json(e.to_string()))?;
    de.end().map_err(|e| TreeError::Json(e.to_string()))?;
    Ok(value)
}

pub(crate) fn tree_from_value(value: &Value) -> Result<TreeRep, TreeError> {
    let obj = value
        .as_object()
        .ok_or_else(|| TreeError::Json("expected an object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| TreeError::Json("missing integer field \"dim\"".into()))? as usize;
    if dim < 3 {
        return Err(TreeError::DimensionTooSmall(dim));
    }
    let root = obj
        .get("tree")
        .ok_or_else(|| TreeError::Json("missing field \"tree\"".into()))?;
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![(root, usize::MAX)];
    while let Some((node, parent)) = stack.pop() {
        let id = children.len();
        children.push(Vec::new());
        if parent != usize::MAX {
            children[parent].push(id);
        }
        match node {
            Value::Null => {}
            Value::Array(items) => {
                if items.len() != dim {
                    return Err(TreeError::ChildCount {
                        expected: dim,
                        found: items.len(),
                    });
                }
                for item in items.iter().rev() {
                    stack.push((item, id));
                }
            }
            _ => return Err(TreeError::Json("a node must be null or an array".into())),
        }
    }
    // Children were pushed in reverse so they appear in order already.
    Ok(TreeRep::from_children(dim, &children, 0)?.0)
}
