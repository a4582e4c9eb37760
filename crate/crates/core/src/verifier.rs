//! Independent certification of an integer realization.
//!
//! Only the final coordinates and the facet list are trusted. Convexity is
//! checked twice: once by the sign pattern of the ridge stresses and once by
//! testing every facet hyperplane against every vertex. Both checks use the
//! normalization of the construction: the base facet lies in `z = 0` and the
//! polytope above it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::exact_geometry::{determinant, stress_int, BaseIncidence, Rat};
use crate::rounding::Realization;
use crate::tree_model::{Skeleton, TreeRep};

/// A violated condition, with the exact offending values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Malformed(String),
    BaseHeight { vertex: usize, z: BigInt },
    NegativeHeight { vertex: usize, z: BigInt },
    NotAbove { vertex: usize, z: BigInt },
    RidgeIncidence { ridge: Vec<usize>, facets: usize },
    InconsistentSides { ridge: Vec<usize> },
    InteriorStress { ridge: Vec<usize>, stress: Rat },
    BaseStress { ridge: Vec<usize>, stress: Rat },
    DegenerateFacet { facet: usize },
    VerticalFacet { facet: usize },
    NotSupporting { facet: usize, vertex: usize, side: BigInt },
    NegativeCoordinate { vertex: usize, axis: usize, value: BigInt },
    CoordinateBound { vertex: usize, axis: usize, value: BigInt, bound: BigInt },
    VertexCount { expected: usize, found: usize },
    FacetCount { expected: usize, found: usize },
    FacetMismatch { facet: Vec<usize> },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Witness::*;
        match self {
            Malformed(m) => write!(f, "malformed realization: {m}"),
            BaseHeight { vertex, z } => write!(f, "base vertex {vertex} has height {z}"),
            NegativeHeight { vertex, z } => write!(f, "vertex {vertex} has negative height {z}"),
            NotAbove { vertex, z } => write!(f, "vertex {vertex} off the base has height {z}"),
            RidgeIncidence { ridge, facets } => write!(f, "ridge {ridge:?} lies on {facets} facets"),
            InconsistentSides { ridge } => write!(f, "ridge {ridge:?} has both facets on one side"),
            InteriorStress { ridge, stress } => write!(f, "interior ridge {ridge:?} has stress {stress}"),
            BaseStress { ridge, stress } => write!(f, "base ridge {ridge:?} has stress {stress}"),
            DegenerateFacet { facet } => write!(f, "facet {facet} does not span a hyperplane"),
            VerticalFacet { facet } => write!(f, "facet {facet} is vertical"),
            NotSupporting { facet, vertex, side } => {
                write!(f, "vertex {vertex} is on the wrong side of facet {facet} (value {side})")
            }
            NegativeCoordinate { vertex, axis, value } => {
                write!(f, "coordinate {axis} of vertex {vertex} is negative: {value}")
            }
            CoordinateBound {
                vertex,
                axis,
                value,
                bound,
            } => write!(f, "coordinate {axis} of vertex {vertex} is {value}, above {bound}"),
            VertexCount { expected, found } => write!(f, "expected {expected} vertices, found {found}"),
            FacetCount { expected, found } => write!(f, "expected {expected} facets, found {found}"),
            FacetMismatch { facet } => write!(f, "facet {facet:?} does not match the tree"),
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub witnesses: Vec<Witness>,
}

impl Verdict {
    fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        Verdict {
            ok: witnesses.is_empty(),
            witnesses,
        }
    }
}

fn check_shape(r: &Realization) -> Vec<Witness> {
    let mut w = Vec::new();
    let n = r.coords.len();
    if let Some(v) = r.coords.iter().position(|c| c.len() != r.dim) {
        w.push(Witness::Malformed(format!("vertex {v} does not have {} coordinates", r.dim)));
    }
    for (i, f) in r.all_facets().enumerate() {
        let distinct: BTreeSet<&usize> = f.iter().collect();
        if f.len() != r.dim || distinct.len() != f.len() || f.iter().any(|&v| v >= n) {
            w.push(Witness::Malformed(format!("facet {i} is not {} distinct vertices", r.dim)));
        }
    }
    w
}

fn height(r: &Realization, v: usize) -> &BigInt {
    &r.coords[v][r.dim - 1]
}

type RidgeTable = BTreeMap<Vec<usize>, Vec<(usize, usize)>>;

/// Ridges of the facet list with their incident `(facet index, apex)` pairs.
/// Facet index 0 is the base.
fn ridge_table(r: &Realization) -> RidgeTable {
    let mut table: RidgeTable = BTreeMap::new();
    for (i, f) in r.all_facets().enumerate() {
        for &apex in f {
            let mut ridge: Vec<usize> = f.iter().copied().filter(|&v| v != apex).collect();
            ridge.sort_unstable();
            table.entry(ridge).or_default().push((i, apex));
        }
    }
    table
}

/// True iff the base facet lies in `z = 0`, all heights are nonnegative,
/// interior ridges carry positive stress and base ridges negative stress.
pub fn verify_convexity_stress(r: &Realization) -> Verdict {
    let mut w = check_shape(r);
    if !w.is_empty() {
        return Verdict::from_witnesses(w);
    }
    for &v in &r.base_facet {
        if !height(r, v).is_zero() {
            w.push(Witness::BaseHeight {
                vertex: v,
                z: height(r, v).clone(),
            });
        }
    }
    for v in 0..r.coords.len() {
        if height(r, v).is_negative() {
            w.push(Witness::NegativeHeight {
                vertex: v,
                z: height(r, v).clone(),
            });
        }
    }
    let table = ridge_table(r);
    let ridge_witnesses: Vec<Witness> = table
        .par_iter()
        .filter_map(|(ridge, inc)| {
            if inc.len() != 2 {
                return Some(Witness::RidgeIncidence {
                    ridge: ridge.clone(),
                    facets: inc.len(),
                });
            }
            let pts: Vec<&[BigInt]> = ridge.iter().map(|&v| r.coords[v].as_slice()).collect();
            let base = match (inc[0].0, inc[1].0) {
                (0, _) => BaseIncidence::First,
                (_, 0) => BaseIncidence::Second,
                _ => BaseIncidence::Neither,
            };
            let stress = stress_int(&pts, &r.coords[inc[0].1], &r.coords[inc[1].1], base);
            match stress {
                None => Some(Witness::InconsistentSides { ridge: ridge.clone() }),
                Some(s) if base == BaseIncidence::Neither && !s.is_positive() => Some(Witness::InteriorStress {
                    ridge: ridge.clone(),
                    stress: s,
                }),
                Some(s) if base != BaseIncidence::Neither && !s.is_negative() => Some(Witness::BaseStress {
                    ridge: ridge.clone(),
                    stress: s,
                }),
                Some(_) => None,
            }
        })
        .collect();
    w.extend(ridge_witnesses);
    Verdict::from_witnesses(w)
}

/// Coefficients `c` of the affine function
/// `q -> det[[p_1, 1], .., [p_d, 1], [q, 1]] = sum_j c_j q_j + c_d`.
fn facet_functional(points: &[&[BigInt]]) -> Vec<BigInt> {
    let d = points.len();
    let rows: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| p.iter().cloned().chain(std::iter::once(BigInt::from(1))).collect())
        .collect();
    (0..=d)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let m = determinant(minor);
            if (d + j).is_multiple_of(2) {
                m
            } else {
                -m
            }
        })
        .collect()
}

fn evaluate(c: &[BigInt], q: &[BigInt]) -> BigInt {
    let d = q.len();
    c[..d].iter().zip(q).map(|(a, b)| a * b).sum::<BigInt>() + &c[d]
}

/// True iff the base facet lies in `z = 0`, every other vertex has positive
/// height, all vertices off the base lie strictly above its hyperplane, and
/// for every other facet all vertices off it lie strictly below its
/// hyperplane. This is convexity with the base as the only lower facet.
pub fn verify_convexity_global(r: &Realization) -> Verdict {
    let mut w = check_shape(r);
    if !w.is_empty() {
        return Verdict::from_witnesses(w);
    }
    let base: BTreeSet<usize> = r.base_facet.iter().copied().collect();
    for v in 0..r.coords.len() {
        let z = height(r, v);
        if base.contains(&v) && !z.is_zero() {
            w.push(Witness::BaseHeight { vertex: v, z: z.clone() });
        } else if !base.contains(&v) && !z.is_positive() {
            w.push(Witness::NotAbove { vertex: v, z: z.clone() });
        }
    }
    let facets: Vec<&[usize]> = r.all_facets().collect();
    let facet_witnesses: Vec<Witness> = facets
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let pts: Vec<&[BigInt]> = f.iter().map(|&v| r.coords[v].as_slice()).collect();
            let c = facet_functional(&pts);
            if c[..r.dim].iter().all(Zero::is_zero) {
                return Some(Witness::DegenerateFacet { facet: i });
            }
            // The base facet must have the polytope above it, every other
            // facet the polytope below it.
            let cz = &c[r.dim - 1];
            if cz.is_zero() {
                return Some(Witness::VerticalFacet { facet: i });
            }
            let want_positive = cz.is_positive() == (i == 0);
            for (v, q) in r.coords.iter().enumerate() {
                if f.contains(&v) {
                    continue;
                }
                let s = evaluate(&c, q);
                let ok = if want_positive { s.is_positive() } else { s.is_negative() };
                if !ok {
                    return Some(Witness::NotSupporting {
                        facet: i,
                        vertex: v,
                        side: s,
                    });
                }
            }
            None
        })
        .collect();
    w.extend(facet_witnesses);
    Verdict::from_witnesses(w)
}

/// All coordinates nonnegative, non-height coordinates at most
/// `10 d^2 R_eff^2`, heights at most `6 R_eff^3`.
pub fn verify_bounds(r: &Realization, r_eff: &BigInt, dim: usize) -> Verdict {
    let xy_bound = BigInt::from(10 * dim * dim) * r_eff * r_eff;
    let z_bound = BigInt::from(6) * r_eff * r_eff * r_eff;
    let mut w = Vec::new();
    for (v, row) in r.coords.iter().enumerate() {
        for (axis, value) in row.iter().enumerate() {
            let bound = if axis + 1 == row.len() { &z_bound } else { &xy_bound };
            if value.is_negative() {
                w.push(Witness::NegativeCoordinate {
                    vertex: v,
                    axis,
                    value: value.clone(),
                });
            } else if value > bound {
                w.push(Witness::CoordinateBound {
                    vertex: v,
                    axis,
                    value: value.clone(),
                    bound: bound.clone(),
                });
            }
        }
    }
    Verdict::from_witnesses(w)
}

/// Facets match the leaves of `tree` one to one, the base facet matches the
/// root, and every facet is supporting.
pub fn verify_combinatorics(r: &Realization, tree: &TreeRep) -> Verdict {
    let mut w = check_shape(r);
    if !w.is_empty() {
        return Verdict::from_witnesses(w);
    }
    let d = tree.dim();
    let k = tree.interior_count();
    if r.dim != d {
        w.push(Witness::Malformed(format!("dimension {} differs from the tree's {d}", r.dim)));
        return Verdict::from_witnesses(w);
    }
    if r.coords.len() != tree.vertex_count() {
        w.push(Witness::VertexCount {
            expected: tree.vertex_count(),
            found: r.coords.len(),
        });
    }
    let total = r.facets.len() + 1;
    if total != k * (d - 1) + 2 {
        w.push(Witness::FacetCount {
            expected: k * (d - 1) + 2,
            found: total,
        });
    }
    let sorted = |f: &[usize]| {
        let mut f = f.to_vec();
        f.sort_unstable();
        f
    };
    let sk = Skeleton::new(tree);
    let mut expected: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for f in std::iter::once(sk.base_facet()).chain(sk.leaf_facets(tree)) {
        *expected.entry(sorted(f)).or_default() += 1;
    }
    if sorted(&r.base_facet) != sorted(sk.base_facet()) {
        w.push(Witness::FacetMismatch {
            facet: r.base_facet.clone(),
        });
    }
    for f in r.all_facets() {
        match expected.get_mut(&sorted(f)) {
            Some(c) if *c > 0 => *c -= 1,
            _ => w.push(Witness::FacetMismatch { facet: f.to_vec() }),
        }
    }
    w.extend(verify_convexity_global(r).witnesses);
    Verdict::from_witnesses(w)
}

/// Combined verdict of all checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub convex_by_stress: bool,
    pub convex_global: bool,
    pub bounds_ok: bool,
    pub combinatorics_ok: bool,
    pub witnesses: Vec<Witness>,
}

impl Certificate {
    pub fn all_ok(&self) -> bool {
        self.convex_by_stress && self.convex_global && self.bounds_ok && self.combinatorics_ok
    }
}

pub fn certify(r: &Realization, tree: &TreeRep) -> Certificate {
    let stress = verify_convexity_stress(r);
    let global = verify_convexity_global(r);
    let bounds = verify_bounds(r, &r.meta.r_eff, r.dim);
    let comb = verify_combinatorics(r, tree);
    let mut witnesses = stress.witnesses;
    for w in global.witnesses.into_iter().chain(bounds.witnesses).chain(comb.witnesses) {
        if !witnesses.contains(&w) {
            witnesses.push(w);
        }
    }
    Certificate {
        convex_by_stress: stress.ok,
        convex_global: global.ok,
        bounds_ok: bounds.ok,
        combinatorics_ok: comb.ok,
        witnesses,
    }
}
