//! Flat embedding in `Q^(d-1)` by repeated weighted barycentric subdivision.
//!
//! The base simplex has one vertex at the origin and the others at `L * e_i`,
//! where `L` is the smallest integer with `L^(d-1) >= R` for the root weight
//! `R`. Every face-weight is rescaled by `lambda = L^(d-1) / R >= 1`, so the
//! bracket of each node's facet is exactly `lambda` times its weight and the
//! effective root weight is `R_eff = L^(d-1)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Pow, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::exact_geometry::{bracket, GeometryError, Point, Rat};
use crate::tree_model::{NodeId, Skeleton, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("root weight {0} is below 3")]
    RootWeightTooSmall(BigInt),
    #[error("barycentric weights sum to {found}, expected {expected}")]
    WeightSum { expected: Rat, found: Rat },
    #[error("barycentric weights must be positive")]
    NonPositiveWeight,
    #[error("facet has {points} points but {weights} weights")]
    WeightCount { points: usize, weights: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Base simplex placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSimplex {
    pub coords: Vec<Point>,
    pub side: BigInt,
    pub lambda: Rat,
}

/// `v_0 = 0`, `v_j = L e_j` with `L^(d-1) >= R` minimal, and
/// `lambda = L^(d-1) / R`. The bracket of the base simplex is
/// `(-1)^(d-1) L^(d-1)`.
pub fn base_simplex(dim: usize, root_weight: &BigInt) -> Result<BaseSimplex, EmbeddingError> {
    if *root_weight < BigInt::from(3) {
        return Err(EmbeddingError::RootWeightTooSmall(root_weight.clone()));
    }
    let k = (dim - 1) as u32;
    let mut side = root_weight.nth_root(k);
    if Pow::pow(&side, k) < *root_weight {
        side += 1;
    }
    let volume: BigInt = Pow::pow(&side, k);
    let lambda = Rat::new(volume, root_weight.clone());
    let l = Rat::from_integer(side.clone());
    let mut coords = vec![Point::origin(dim - 1)];
    for j in 0..dim - 1 {
        let mut c = vec![Rat::zero(); dim - 1];
        c[j] = l.clone();
        coords.push(Point::new(c));
    }
    Ok(BaseSimplex {
        coords,
        side,
        lambda,
    })
}

/// Point with barycentric weights `weights[i] / total` on `facet[i]`. The
/// sub-simplex obtained by replacing `facet[i]` with the result has
/// `|bracket|` equal to `weights[i] / total` times that of `facet`.
pub fn place_stacked_vertex(facet: &[Point], weights: &[Rat], total: &Rat) -> Result<Point, EmbeddingError> {
    if facet.len() != weights.len() {
        return Err(EmbeddingError::WeightCount {
            points: facet.len(),
            weights: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(EmbeddingError::NonPositiveWeight);
    }
    let sum: Rat = weights.iter().sum();
    if sum != *total {
        return Err(EmbeddingError::WeightSum {
            expected: total.clone(),
            found: sum,
        });
    }
    let dim = facet[0].dim();
    let mut coords = vec![Rat::zero(); dim];
    for (p, w) in facet.iter().zip(weights) {
        let t = w / total;
        for (c, x) in coords.iter_mut().zip(p.coords()) {
            *c += &t * x;
        }
    }
    Ok(Point::new(coords))
}

/// Subdivided base simplex with its combinatorics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatComplex {
    pub skeleton: Arc<Skeleton>,
    pub coords: Vec<Point>,
    /// `L`: side length of the base simplex.
    pub side: BigInt,
    /// Weight rescaling factor `L^(d-1) / R`.
    pub lambda: Rat,
    /// Root face-weight `R` before rescaling.
    pub root_weight: BigInt,
}

impl FlatComplex {
    pub fn dim(&self) -> usize {
        self.skeleton.dim
    }

    /// `R_eff = L^(d-1)`, the bracket of the base simplex.
    pub fn effective_root_weight(&self) -> BigInt {
        Pow::pow(&self.side, (self.dim() - 1) as u32)
    }

    pub fn points(&self, vertices: &[usize]) -> Vec<Point> {
        vertices.iter().map(|&v| self.coords[v].clone()).collect()
    }

    /// Bracket of the facet of a tree node.
    pub fn node_bracket(&self, v: NodeId) -> Rat {
        bracket(&self.points(&self.skeleton.node_facets[v.0])).expect("flat points have dimension d - 1")
    }

    /// JSON dump with exact rationals as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let coords: Vec<Vec<String>> = self
            .coords
            .iter()
            .map(|p| p.coords().iter().map(ToString::to_string).collect())
            .collect();
        let ridges: Vec<serde_json::Value> = self
            .skeleton
            .ridges
            .iter()
            .map(|(r, fs)| json!({ "ridge": r.vertices(), "facets": fs.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>() }))
            .collect();
        json!({
            "dim": self.dim(),
            "side": self.side.to_string(),
            "lambda": self.lambda.to_string(),
            "root_weight": self.root_weight.to_string(),
            "coords": coords,
            "node_facets": self.skeleton.node_facets,
            "ridges": ridges,
        })
    }
}

/// Builds the flat embedding of a balanced weighted tree, stacking in
/// pre-order.
pub fn build_flat(wt: &WeightedTree) -> Result<FlatComplex, EmbeddingError> {
    let tree = &wt.tree;
    let dim = tree.dim();
    let skeleton = Skeleton::new(tree);
    let base = base_simplex(dim, wt.root_weight())?;
    let mut coords = base.coords;
    coords.resize(skeleton.vertex_count, Point::origin(dim - 1));

    for &v in &skeleton.stackings {
        let facet: Vec<Point> = skeleton.node_facets[v.0].iter().map(|&u| coords[u].clone()).collect();
        let weights: Vec<Rat> = tree
            .children(v)
            .iter()
            .map(|c| Rat::from_integer(wt.weight(*c).clone()))
            .collect();
        let total = Rat::from_integer(wt.weight(v).clone());
        let p = place_stacked_vertex(&facet, &weights, &total)?;
        coords[skeleton.stacked_vertex[v.0].expect("interior")] = p;
    }

    Ok(FlatComplex {
        skeleton: Arc::new(skeleton),
        coords,
        side: base.side,
        lambda: base.lambda,
        root_weight: wt.root_weight().clone(),
    })
}
