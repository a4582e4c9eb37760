//! Seeded tree generators and the lower-bound graph families.
//!
//! Random generation uses ChaCha8 seeded through `seed_from_u64`, so a
//! `(shape, d, size, seed)` tuple always yields the same tree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PolytopeGraph, TreeError, TreeRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeShape {
    /// Expand a uniformly chosen leaf, `size` times.
    Random,
    /// Expand a child of the previously expanded node, `size` times; the
    /// child index cycles through `0, 1, .., d - 1`.
    Serpentine,
    /// Expand every leaf once per round, for `size` rounds.
    BalancedRounds,
}

struct Arena {
    dim: usize,
    children: Vec<Vec<usize>>,
}

impl Arena {
    fn new(dim: usize) -> Self {
        Arena {
            dim,
            children: vec![Vec::new()],
        }
    }

    fn expand(&mut self, v: usize) -> &[usize] {
        let first = self.children.len();
        for _ in 0..self.dim {
            self.children.push(Vec::new());
        }
        self.children[v] = (first..first + self.dim).collect();
        &self.children[v]
    }

    fn finish(self) -> Result<TreeRep, TreeError> {
        Ok(TreeRep::from_children(self.dim, &self.children, 0)?.0)
    }
}

/// Generates a tree. For `Random` and `Serpentine`, `size` is the number of
/// stackings (interior nodes); for `BalancedRounds` it is the number of rounds.
pub fn gen_tree(shape: TreeShape, dim: usize, size: usize, seed: u64) -> Result<TreeRep, TreeError> {
    if dim < 3 {
        return Err(TreeError::DimensionTooSmall(dim));
    }
    if size == 0 {
        return Err(TreeError::EmptySize);
    }
    let mut arena = Arena::new(dim);
    match shape {
        TreeShape::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut leaves = vec![0usize];
            for _ in 0..size {
                let pick = rng.gen_range(0..leaves.len());
                let v = leaves.swap_remove(pick);
                leaves.extend_from_slice(arena.expand(v));
            }
        }
        TreeShape::Serpentine => {
            let mut last = 0;
            arena.expand(last);
            for step in 1..size {
                let next = arena.children[last][(step - 1) % dim];
                arena.expand(next);
                last = next;
            }
        }
        TreeShape::BalancedRounds => {
            let mut leaves = vec![0usize];
            for _ in 0..size {
                let mut next = Vec::with_capacity(leaves.len() * dim);
                for v in leaves {
                    next.extend_from_slice(arena.expand(v));
                }
                leaves = next;
            }
        }
    }
    arena.finish()
}

/// A stacked 3-polytope graph with its triangular faces.
#[derive(Clone, Debug)]
pub struct StackedTriangulation {
    pub graph: PolytopeGraph,
    pub faces: Vec<[usize; 3]>,
}

impl StackedTriangulation {
    pub fn tetrahedron() -> Self {
        StackedTriangulation {
            graph: PolytopeGraph::complete(4),
            faces: vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
        }
    }

    /// Stacks a new vertex onto face `f`; the three new faces take the place
    /// of `f` and the end of the face list. Returns the new vertex.
    pub fn stack(&mut self, f: usize) -> usize {
        let [a, b, c] = self.faces[f];
        let p = self.graph.add_vertex();
        for u in [a, b, c] {
            self.graph.add_edge(p, u);
        }
        self.faces[f] = [p, b, c];
        self.faces.push([a, p, c]);
        self.faces.push([a, b, p]);
        p
    }

    /// The tetrahedron with every face stacked, twice over.
    pub fn b3() -> Self {
        let mut t = Self::tetrahedron();
        for _ in 0..2 {
            for f in 0..t.faces.len() {
                t.stack(f);
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBoundKind {
    B3,
    Gamma,
}

/// Shape of the 3-tree glued into each face of `B3` to form `Gamma_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gadget {
    Serpentine,
    Random { seed: u64 },
}

/// `B3`, or `Gamma_n` built from `B3` by stacking a gadget into each of its
/// 36 faces so that the result has exactly `n` vertices (`n` a positive
/// multiple of 36). The `n - 20` gadget vertices are spread as evenly as
/// possible, earlier faces receiving the extra ones.
pub fn gen_lowerbound_graph(kind: LowerBoundKind, n: usize, gadget: Gadget) -> Result<StackedTriangulation, TreeError> {
    let mut t = StackedTriangulation::b3();
    if kind == LowerBoundKind::B3 {
        return Ok(t);
    }
    if n == 0 || !n.is_multiple_of(36) {
        return Err(TreeError::InvalidSize(n));
    }
    let faces = t.faces.len();
    let extra = n - t.graph.vertex_count();
    let mut rng = match gadget {
        Gadget::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Gadget::Serpentine => None,
    };
    for f in 0..faces {
        let count = extra / faces + usize::from(f < extra % faces);
        // Faces currently inside the gadget of face `f`.
        let mut local = vec![f];
        let mut last = f;
        for step in 0..count {
            t.stack(last);
            let created = [last, t.faces.len() - 2, t.faces.len() - 1];
            local.extend_from_slice(&created[1..]);
            last = match rng.as_mut() {
                Some(r) => local[r.gen_range(0..local.len())],
                None => created[step % 3],
            };
        }
    }
    Ok(t)
}
