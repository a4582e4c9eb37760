//! Balanced face-weights.
//!
//! A node is balanced when all of its light children carry the same weight
//! and its heavy child is at least as heavy. Weights are assigned caterpillar
//! by caterpillar, bottom-up through the hierarchy:
//!
//! * a caterpillar without child caterpillars gets weight one on every leaf;
//! * otherwise its light subtrees are balanced first, then for every path node
//!   the lighter light children are raised to the heaviest one by adding the
//!   difference along their own heavy path, and finally the largest light
//!   weight is added to every node of the path so that heavy children stay
//!   heaviest.
//!
//! All weights are integers.

use num_bigint::BigInt;
use num_traits::One;

use super::heavy::{heavy_paths, HeavyPaths};
use super::{NodeId, TreeError, TreeRep};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree {
    pub tree: TreeRep,
    /// Face-weight of every node.
    pub weights: Vec<BigInt>,
    pub heavy: HeavyPaths,
}

impl WeightedTree {
    pub fn weight(&self, v: NodeId) -> &BigInt {
        &self.weights[v.0]
    }

    pub fn root_weight(&self) -> &BigInt {
        &self.weights[0]
    }

    /// Index of the heavy child of an interior node.
    pub fn heavy_index(&self, v: NodeId) -> usize {
        self.heavy.heavy_child[v.0].expect("interior node")
    }

    /// `(heavy child weight, common light child weight)` of an interior node.
    pub fn stacking_weights(&self, v: NodeId) -> (&BigInt, &BigInt) {
        let kids = self.tree.children(v);
        let h = self.heavy_index(v);
        let light = if h == 0 { 1 } else { 0 };
        (&self.weights[kids[h].0], &self.weights[kids[light].0])
    }

    /// Checks sums, positivity and the balanced predicate at every node.
    pub fn validate(&self) -> Result<(), TreeError> {
        let unbalanced = |v: NodeId, reason: String| TreeError::Unbalanced { node: v.0, reason };
        for v in self.tree.node_ids() {
            let kids = self.tree.children(v);
            if kids.is_empty() {
                if self.weights[v.0] < BigInt::one() {
                    return Err(unbalanced(v, "leaf weight below one".into()));
                }
                continue;
            }
            let sum: BigInt = kids.iter().map(|k| &self.weights[k.0]).sum();
            if sum != self.weights[v.0] {
                return Err(unbalanced(v, "weight differs from the sum of its children".into()));
            }
            let h = self.heavy_index(v);
            let heavy = &self.weights[kids[h].0];
            let mut light = kids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != h)
                .map(|(_, k)| &self.weights[k.0]);
            let first = light.next().expect("d >= 3 gives light children");
            if light.any(|w| w != first) {
                return Err(unbalanced(v, "light children differ".into()));
            }
            if heavy < first {
                return Err(unbalanced(v, "heavy child lighter than light children".into()));
            }
        }
        Ok(())
    }
}

/// Computes balanced face-weights for `tree`.
pub fn balance_weights(tree: &TreeRep) -> WeightedTree {
    let heavy = heavy_paths(tree);
    let mut w = vec![BigInt::one(); tree.len()];
    let cats = &heavy.hierarchy.caterpillars;

    let resum = |w: &mut Vec<BigInt>, path: &[NodeId]| {
        for &v in path.iter().rev() {
            if !tree.is_leaf(v) {
                w[v.0] = tree.children(v).iter().map(|k| &w[k.0]).sum();
            }
        }
    };

    for ci in (0..cats.len()).rev() {
        let cat = &cats[ci];
        resum(&mut w, &cat.path);
        if heavy.hierarchy.is_bottom(ci) {
            continue;
        }

        for &v in &cat.path[..cat.path.len() - 1] {
            let h = heavy.heavy_child[v.0].expect("path node is interior");
            let light: Vec<NodeId> = tree
                .children(v)
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != h)
                .map(|(_, &k)| k)
                .collect();
            let target = light.iter().map(|k| w[k.0].clone()).max().expect("light children");
            for &u in &light {
                let delta = &target - &w[u.0];
                if delta == BigInt::from(0) {
                    continue;
                }
                match heavy.caterpillar_of_top[u.0] {
                    Some(sub) => {
                        for x in &cats[sub].path {
                            w[x.0] += &delta;
                        }
                    }
                    None => w[u.0] += &delta,
                }
            }
        }
        resum(&mut w, &cat.path);

        let repair = cat
            .light_edges
            .iter()
            .map(|&(_, k)| w[k.0].clone())
            .max()
            .expect("non-bottom caterpillar has light edges");
        for v in &cat.path {
            w[v.0] += &repair;
        }
    }

    WeightedTree {
        tree: tree.clone(),
        weights: w,
        heavy,
    }
}
