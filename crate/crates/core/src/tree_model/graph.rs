//! Polytope graphs and recovery of a tree-representation from a graph.

use std::collections::{BTreeSet, HashMap};

use serde_json::Value;

use super::{parse_json, Skeleton, TreeError, TreeRep};

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl PolytopeGraph {
    pub fn empty(n: usize) -> Self {
        PolytopeGraph {
            adjacency: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(TreeError::Json(format!("invalid edge [{u},{v}]")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adjacency.push(BTreeSet::new());
        self.adjacency.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u].remove(&v);
        self.adjacency[v].remove(&u);
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Applies a vertex relabeling `label[old] = new`.
    pub fn relabel(&self, label: &[usize]) -> Self {
        let mut g = Self::empty(self.vertex_count());
        for (u, v) in self.edges() {
            g.add_edge(label[u], label[v]);
        }
        g
    }

    /// `{"n": int, "edges": [[u, v], ...]}`.
    pub fn to_json(&self) -> String {
        let edges: Vec<[usize; 2]> = self.edges().into_iter().map(|(u, v)| [u, v]).collect();
        serde_json::json!({ "n": self.vertex_count(), "edges": edges }).to_string()
    }

    pub fn parse(text: &[u8]) -> Result<Self, TreeError> {
        graph_from_value(&parse_json(text)?)
    }
}

pub(crate) fn graph_from_value(value: &Value) -> Result<PolytopeGraph, TreeError> {
    let bad = |m: &str| TreeError::Json(m.to_string());
    let n = value
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing integer field \"n\""))? as usize;
    let edges = value
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing array field \"edges\""))?;
    let mut list = Vec::with_capacity(edges.len());
    for e in edges {
        let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("edge must be [u, v]"))?;
        let u = pair[0].as_u64().ok_or_else(|| bad("edge endpoint must be an integer"))? as usize;
        let v = pair[1].as_u64().ok_or_else(|| bad("edge endpoint must be an integer"))? as usize;
        list.push((u, v));
    }
    PolytopeGraph::from_edges(n, &list)
}

/// A facet usable as base: the smallest-id vertex `v` of degree `d` together
/// with all but the largest of its neighbors. Nothing was stacked onto the
/// facets around such a vertex, so this is a facet of any stacked polytope.
pub fn default_base(g: &PolytopeGraph, dim: usize) -> Option<Vec<usize>> {
    let v = (0..g.vertex_count()).find(|&v| g.degree(v) == dim)?;
    let mut base: Vec<usize> = g.neighbors(v).iter().copied().collect();
    base.pop();
    base.push(v);
    base.sort_unstable();
    Some(base)
}

/// Recovers the tree-representation of a stacked `d`-polytope graph whose
/// untouched facet is `base`.
pub fn tree_from_graph(g: &PolytopeGraph, dim: usize, base: &[usize]) -> Result<TreeRep, TreeError> {
    Ok(tree_from_graph_labeled(g, dim, base)?.0)
}

/// Like [`tree_from_graph`], also returning `label` with `label[i]` the graph
/// vertex that plays the role of skeleton vertex `i` of the returned tree.
pub fn tree_from_graph_labeled(
    g: &PolytopeGraph,
    dim: usize,
    base: &[usize],
) -> Result<(TreeRep, Vec<usize>), TreeError> {
    let not_stacked = |m: String| TreeError::NotStacked(m);
    if dim < 3 {
        return Err(TreeError::DimensionTooSmall(dim));
    }
    let n = g.vertex_count();
    let base_set: BTreeSet<usize> = base.iter().copied().collect();
    if base.len() != dim || base_set.len() != dim || base.iter().any(|&b| b >= n) {
        return Err(not_stacked(format!("base must list {dim} distinct vertices")));
    }
    if n < dim + 1 {
        return Err(not_stacked("too few vertices".into()));
    }
    if !g.is_clique(base) {
        return Err(not_stacked("base vertices do not form a clique".into()));
    }

    // Peel simplicial degree-d vertices outside the base, smallest id first.
    let mut h = g.clone();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let removable = |h: &PolytopeGraph, v: usize| {
        !base_set.contains(&v)
            && h.degree(v) == dim
            && h.is_clique(&h.neighbors(v).iter().copied().collect::<Vec<_>>())
    };
    let mut removed: Vec<(usize, Vec<usize>)> = Vec::new();
    while alive.len() > dim + 1 {
        let v = alive
            .iter()
            .copied()
            .find(|&v| removable(&h, v))
            .ok_or_else(|| not_stacked(format!("no removable vertex among {} remaining", alive.len())))?;
        let ns: Vec<usize> = h.neighbors(v).iter().copied().collect();
        for &u in &ns {
            h.remove_edge(v, u);
        }
        alive.remove(&v);
        removed.push((v, ns));
    }
    let rest: Vec<usize> = alive.iter().copied().collect();
    if !h.is_clique(&rest) || !base.iter().all(|b| alive.contains(b)) {
        return Err(not_stacked("remaining vertices are not a simplex on the base".into()));
    }
    let apex = *alive.iter().find(|v| !base_set.contains(v)).expect("d + 1 > d");

    // Replay the removals in reverse as stackings.
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut facets: Vec<Vec<usize>> = vec![base.to_vec()];
    let mut stacked: Vec<Option<usize>> = vec![None];
    let mut leaf_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let stack_on = |node: usize,
                        p: usize,
                        children: &mut Vec<Vec<usize>>,
                        facets: &mut Vec<Vec<usize>>,
                        stacked: &mut Vec<Option<usize>>,
                        leaf_of: &mut HashMap<Vec<usize>, usize>| {
        stacked[node] = Some(p);
        for i in 0..dim {
            let mut f = facets[node].clone();
            f[i] = p;
            let id = facets.len();
            let mut key = f.clone();
            key.sort_unstable();
            leaf_of.insert(key, id);
            facets.push(f);
            children.push(Vec::new());
            stacked.push(None);
            children[node].push(id);
        }
    };
    stack_on(0, apex, &mut children, &mut facets, &mut stacked, &mut leaf_of);
    for (v, ns) in removed.into_iter().rev() {
        let node = leaf_of
            .remove(&ns)
            .ok_or_else(|| not_stacked(format!("neighbors of {v} are not a facet")))?;
        stack_on(node, v, &mut children, &mut facets, &mut stacked, &mut leaf_of);
    }

    let (tree, original) = TreeRep::from_children(dim, &children, 0)?;
    let mut label: Vec<usize> = base.to_vec();
    label.extend(original.iter().filter_map(|&old| stacked[old]));

    let skeleton = Skeleton::new(&tree);
    if skeleton.graph().relabel(&label) != *g {
        return Err(not_stacked("graph has edges beyond the stacking".into()));
    }
    Ok((tree, label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_a_tetrahedron() {
        let t = tree_from_graph(&PolytopeGraph::complete(4), 3, &[0, 1, 2]).unwrap();
        assert_eq!(t, TreeRep::simplex(3).unwrap());
    }

    #[test]
    fn subdivided_edge_is_rejected() {
        let mut g = PolytopeGraph::complete(4);
        g.remove_edge(0, 3);
        let m = g.add_vertex();
        g.add_edge(0, m);
        g.add_edge(m, 3);
        assert!(matches!(tree_from_graph(&g, 3, &[0, 1, 2]), Err(TreeError::NotStacked(_))));
    }

    #[test]
    fn extra_edge_is_rejected() {
        // Two stackings onto different facets, then join the two apexes.
        let mut g = PolytopeGraph::complete(4);
        for f in [[0, 1, 3], [1, 2, 3]] {
            let v = g.add_vertex();
            for u in f {
                g.add_edge(v, u);
            }
        }
        assert!(tree_from_graph(&g, 3, &[0, 1, 2]).is_ok());
        g.add_edge(4, 5);
        assert!(tree_from_graph(&g, 3, &[0, 1, 2]).is_err());
    }

    #[test]
    fn default_base_works_on_b3() {
        let g = super::super::StackedTriangulation::b3().graph;
        let base = default_base(&g, 3).unwrap();
        let t = tree_from_graph(&g, 3, &base).unwrap();
        assert_eq!(t.interior_count(), 17);
        assert_eq!(default_base(&PolytopeGraph::complete(4), 3), Some(vec![0, 1, 2]));
    }

    #[test]
    fn graph_json_round_trip() {
        let g = PolytopeGraph::complete(5);
        assert_eq!(PolytopeGraph::parse(g.to_json().as_bytes()).unwrap(), g);
        assert!(PolytopeGraph::parse(br#"{"n":2,"edges":[[0,2]]}"#).is_err());
    }
}
