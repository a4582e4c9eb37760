//! Vertex and facet bookkeeping derived from a tree-representation.

use std::collections::BTreeMap;
use std::fmt;

use super::{NodeId, PolytopeGraph, TreeRep};

/// A ridge as the ascending list of its `d - 1` vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ridge(pub Vec<usize>);

impl Ridge {
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        Ridge(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Ridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A facet of the final polytope: the base facet or the facet of a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FacetRef {
    Base,
    Leaf(NodeId),
}

/// Combinatorics of the polytope described by a tree.
///
/// Base vertices are `0..d`; the vertex stacked onto interior node number `i`
/// in pre-order gets id `d + i`. The root facet is `(0, 1, ..., d - 1)` and
/// child `i` of a node with facet `(w_1..w_d)` has that facet with `w_i`
/// replaced by the stacked vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub dim: usize,
    pub vertex_count: usize,
    /// Ordered facet of every node, historical ones included.
    pub node_facets: Vec<Vec<usize>>,
    /// Stacked vertex of every interior node.
    pub stacked_vertex: Vec<Option<usize>>,
    /// Interior nodes in stacking order.
    pub stackings: Vec<NodeId>,
    /// Final ridges and their two incident facets.
    pub ridges: BTreeMap<Ridge, [FacetRef; 2]>,
}

impl Skeleton {
    pub fn new(tree: &TreeRep) -> Self {
        let d = tree.dim();
        let mut node_facets = vec![Vec::new(); tree.len()];
        let mut stacked_vertex = vec![None; tree.len()];
        let mut stackings = Vec::new();
        node_facets[0] = (0..d).collect();
        let mut next = d;
        for v in tree.node_ids() {
            if tree.is_leaf(v) {
                continue;
            }
            let p = next;
            next += 1;
            stacked_vertex[v.0] = Some(p);
            stackings.push(v);
            for (i, &c) in tree.children(v).iter().enumerate() {
                let mut f = node_facets[v.0].clone();
                f[i] = p;
                node_facets[c.0] = f;
            }
        }

        let mut incident: BTreeMap<Ridge, Vec<FacetRef>> = BTreeMap::new();
        let facets = std::iter::once((FacetRef::Base, &node_facets[0]))
            .chain(tree.leaves().map(|l| (FacetRef::Leaf(l), &node_facets[l.0])));
        for (fref, f) in facets {
            for skip in 0..d {
                let r: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &x)| x)
                    .collect();
                incident.entry(Ridge::from_unsorted(r)).or_default().push(fref);
            }
        }
        let ridges = incident
            .into_iter()
            .map(|(r, fs)| {
                assert_eq!(fs.len(), 2, "ridge {r} must have two facets");
                (r, [fs[0], fs[1]])
            })
            .collect();

        Skeleton {
            dim: d,
            vertex_count: next,
            node_facets,
            stacked_vertex,
            stackings,
            ridges,
        }
    }

    pub fn base_facet(&self) -> &[usize] {
        &self.node_facets[0]
    }

    pub fn facet_vertices(&self, f: FacetRef) -> &[usize] {
        match f {
            FacetRef::Base => self.base_facet(),
            FacetRef::Leaf(l) => &self.node_facets[l.0],
        }
    }

    /// Leaf facets in node order.
    pub fn leaf_facets<'a>(&'a self, tree: &'a TreeRep) -> impl Iterator<Item = &'a [usize]> + 'a {
        tree.leaves().map(move |l| self.node_facets[l.0].as_slice())
    }

    pub fn is_base_ridge(&self, r: &Ridge) -> bool {
        self.ridges[r].contains(&FacetRef::Base)
    }

    /// The 1-skeleton: the base clique plus each stacked vertex joined to the
    /// facet it was stacked onto.
    pub fn graph(&self) -> PolytopeGraph {
        let mut g = PolytopeGraph::empty(self.vertex_count);
        let base = self.base_facet();
        for (i, &a) in base.iter().enumerate() {
            for &b in &base[i + 1..] {
                g.add_edge(a, b);
            }
        }
        for &v in &self.stackings {
            let p = self.stacked_vertex[v.0].expect("interior");
            for &u in &self.node_facets[v.0] {
                g.add_edge(p, u);
            }
        }
        g
    }
}
