//! Heavy path decomposition and the caterpillar hierarchy built on it.

use super::{NodeId, TreeRep};

/// A heavy path together with the light edges hanging off it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caterpillar {
    /// Nodes of the heavy path from its top node down to a leaf.
    pub path: Vec<NodeId>,
    /// Light edges `(path node, light child)`.
    pub light_edges: Vec<(NodeId, NodeId)>,
    /// Index of the caterpillar containing the parent of `path[0]`.
    pub parent: Option<usize>,
}

/// The caterpillars of a tree, arranged as a rooted tree. Index `0` is the
/// caterpillar through the root; parents precede their children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaterpillarHierarchy {
    pub caterpillars: Vec<Caterpillar>,
}

impl CaterpillarHierarchy {
    /// Number of caterpillars on the longest root-to-leaf chain of the
    /// hierarchy.
    pub fn height(&self) -> usize {
        let mut level = vec![0usize; self.caterpillars.len()];
        for (i, c) in self.caterpillars.iter().enumerate() {
            level[i] = c.parent.map_or(1, |p| level[p] + 1);
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Caterpillars with no child caterpillar.
    pub fn is_bottom(&self, index: usize) -> bool {
        !self.caterpillars.iter().any(|c| c.parent == Some(index))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavyPaths {
    /// For every interior node, the index of its heavy child.
    pub heavy_child: Vec<Option<usize>>,
    pub hierarchy: CaterpillarHierarchy,
    /// For every node that tops a caterpillar, that caterpillar's index.
    pub caterpillar_of_top: Vec<Option<usize>>,
}

impl HeavyPaths {
    pub fn is_heavy_edge(&self, tree: &TreeRep, child: NodeId) -> bool {
        match tree.parent(child) {
            None => false,
            Some(p) => tree.children(p)[self.heavy_child[p.0].expect("parent is interior")] == child,
        }
    }

    /// Largest number of light edges on any root-to-leaf path.
    pub fn light_depth(&self, tree: &TreeRep) -> usize {
        let mut light = vec![0usize; tree.len()];
        for v in tree.node_ids().skip(1) {
            let p = tree.parent(v).expect("non-root");
            light[v.0] = light[p.0] + usize::from(!self.is_heavy_edge(tree, v));
        }
        light.into_iter().max().unwrap_or(0)
    }
}

/// Heavy child = child with the most subtree nodes, ties to the lowest index.
pub fn heavy_paths(tree: &TreeRep) -> HeavyPaths {
    let size = tree.subtree_sizes();
    let mut heavy_child = vec![None; tree.len()];
    for v in tree.interior_nodes() {
        let kids = tree.children(v);
        let mut best = 0;
        for (i, k) in kids.iter().enumerate() {
            if size[k.0] > size[kids[best].0] {
                best = i;
            }
        }
        heavy_child[v.0] = Some(best);
    }

    let mut caterpillars = Vec::new();
    let mut caterpillar_of_top = vec![None; tree.len()];
    let mut tops = vec![(tree.root(), None)];
    while let Some((top, parent)) = tops.pop() {
        let index = caterpillars.len();
        caterpillar_of_top[top.0] = Some(index);
        let mut path = vec![top];
        let mut light_edges = Vec::new();
        let mut v = top;
        while let Some(h) = heavy_child[v.0] {
            for (i, &k) in tree.children(v).iter().enumerate() {
                if i != h {
                    light_edges.push((v, k));
                    if !tree.is_leaf(k) {
                        tops.push((k, Some(index)));
                    }
                }
            }
            v = tree.children(v)[h];
            path.push(v);
        }
        caterpillars.push(Caterpillar {
            path,
            light_edges,
            parent,
        });
    }

    HeavyPaths {
        heavy_child,
        hierarchy: CaterpillarHierarchy { caterpillars },
        caterpillar_of_top,
    }
}
