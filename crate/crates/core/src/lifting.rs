//! Vertical shifts, the lift to `Q^d`, and ridge stresses.
//!
//! Every stacked vertex sits at height `zeta` above the hyperplane of the
//! facet it is stacked onto, with `zeta = A * B` for the (rescaled) heavy and
//! light child weights. Stresses are computed directly from the final
//! coordinates; an incremental computation that updates stresses stacking by
//! stacking serves as a cross-check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact_geometry::{bracket, height_on_hyperplane, stress_of_ridge, BaseIncidence, GeometryError, Point, Rat};
use crate::flat_embedding::FlatComplex;
use crate::tree_model::{FacetRef, Ridge, TreeError, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("weights are not balanced: {0}")]
    Unbalanced(#[from] TreeError),
    #[error("expected {expected} vertical shifts, found {found}")]
    ShiftCount { expected: usize, found: usize },
    #[error("vertical shift of stacking {index} is not positive: {value}")]
    NonPositiveShift { index: usize, value: Rat },
    #[error("interior ridge {ridge} has stress {value} below {bound}")]
    InteriorStress { ridge: Ridge, value: Rat, bound: Rat },
    #[error("base ridge {ridge} has stress {value} outside ({bound}, 0)")]
    BoundaryStress { ridge: Ridge, value: Rat, bound: Rat },
    #[error("incremental and direct stress differ on ridge {ridge}: {incremental} vs {direct}")]
    StressMismatch { ridge: Ridge, incremental: String, direct: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `zeta_i = A_i * B_i` per stacking (pre-order), where `A_i` and `B_i` are
/// the heavy and the common light child weight, both scaled by `lambda`.
pub fn vertical_shifts(wt: &WeightedTree, lambda: &Rat) -> Result<Vec<Rat>, LiftError> {
    wt.validate()?;
    Ok(wt
        .tree
        .interior_nodes()
        .map(|v| {
            let (a, b) = wt.stacking_weights(v);
            let a = lambda * Rat::from_integer(a.clone());
            let b = lambda * Rat::from_integer(b.clone());
            a * b
        })
        .collect())
}

/// Flat complex lifted to `Q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedComplex {
    pub flat: FlatComplex,
    /// Height of every vertex.
    pub z: Vec<Rat>,
    /// Vertical shift of every stacking, in stacking order.
    pub zeta: Vec<Rat>,
    /// Stress of every ridge; empty until [`LiftedComplex::with_stresses`].
    pub stresses: BTreeMap<Ridge, Rat>,
}

impl LiftedComplex {
    pub fn point(&self, v: usize) -> Point {
        self.flat.coords[v].lift(self.z[v].clone())
    }

    pub fn points(&self, vertices: &[usize]) -> Vec<Point> {
        vertices.iter().map(|&v| self.point(v)).collect()
    }

    pub fn z_max(&self) -> Rat {
        self.z.iter().max().cloned().unwrap_or_else(Rat::zero)
    }

    /// Fills in the stress table by direct evaluation.
    pub fn with_stresses(mut self) -> Result<Self, LiftError> {
        self.stresses = stress_map(&self)?;
        Ok(self)
    }
}

/// Lifts the flat complex: base vertices at height zero, each stacked vertex
/// `zeta` above the hyperplane of the facet it is stacked onto.
pub fn lift_heights(flat: &FlatComplex, zeta: &[Rat]) -> Result<LiftedComplex, LiftError> {
    let sk = &flat.skeleton;
    if zeta.len() != sk.stackings.len() {
        return Err(LiftError::ShiftCount {
            expected: sk.stackings.len(),
            found: zeta.len(),
        });
    }
    if let Some((index, value)) = zeta.iter().enumerate().find(|(_, z)| !z.is_positive()) {
        return Err(LiftError::NonPositiveShift {
            index,
            value: value.clone(),
        });
    }
    let mut z = vec![Rat::zero(); sk.vertex_count];
    for (&v, shift) in sk.stackings.iter().zip(zeta) {
        let facet: Vec<Point> = sk.node_facets[v.0]
            .iter()
            .map(|&u| flat.coords[u].lift(z[u].clone()))
            .collect();
        let p = sk.stacked_vertex[v.0].expect("interior");
        z[p] = height_on_hyperplane(&facet, &flat.coords[p])? + shift;
    }
    Ok(LiftedComplex {
        flat: flat.clone(),
        z,
        zeta: zeta.to_vec(),
        stresses: BTreeMap::new(),
    })
}

/// Lift followed by direct stress evaluation.
pub fn lift(flat: &FlatComplex, zeta: &[Rat]) -> Result<LiftedComplex, LiftError> {
    lift_heights(flat, zeta)?.with_stresses()
}

fn apex_of(facet: &[usize], ridge: &Ridge) -> usize {
    *facet
        .iter()
        .find(|v| ridge.vertices().binary_search(v).is_err())
        .expect("facet has one vertex off the ridge")
}

/// Stress of one ridge from the lifted coordinates.
pub fn ridge_stress(lifted: &LiftedComplex, ridge: &Ridge, facets: [FacetRef; 2]) -> Result<Rat, LiftError> {
    let sk = &lifted.flat.skeleton;
    let pts = lifted.points(ridge.vertices());
    let s = lifted.point(apex_of(sk.facet_vertices(facets[0]), ridge));
    let t = lifted.point(apex_of(sk.facet_vertices(facets[1]), ridge));
    let base = match facets {
        [FacetRef::Base, _] => BaseIncidence::First,
        [_, FacetRef::Base] => BaseIncidence::Second,
        _ => BaseIncidence::Neither,
    };
    Ok(stress_of_ridge(&pts, &s, &t, base)?)
}

/// Stress of every ridge, evaluated independently per ridge.
pub fn stress_map(lifted: &LiftedComplex) -> Result<BTreeMap<Ridge, Rat>, LiftError> {
    lifted
        .flat
        .skeleton
        .ridges
        .par_iter()
        .map(|(r, fs)| Ok((r.clone(), ridge_stress(lifted, r, *fs)?)))
        .collect()
}

/// Stresses obtained by replaying the stackings. Ridges of the root facet
/// start at zero (the first stacking happens on a flat double simplex). Each
/// stacking of `p` with shift `zeta` onto a facet `D` then
///
/// * lowers the stress of every ridge `X` of `D` by `zeta / |[[X o p]]|`;
/// * creates, for children `i < j`, the ridge shared by them with stress
///   `zeta * |[[D]] / ([[child_i]] [[child_j]])|`.
pub fn incremental_stress_map(lifted: &LiftedComplex) -> Result<BTreeMap<Ridge, Rat>, LiftError> {
    let flat = &lifted.flat;
    let sk = &flat.skeleton;
    let d = sk.dim;
    let mut stress: BTreeMap<Ridge, Rat> = BTreeMap::new();
    for skip in 0..d {
        let r: Vec<usize> = (0..d).filter(|&i| i != skip).collect();
        stress.insert(Ridge(r), Rat::zero());
    }
    for (&v, zeta) in sk.stackings.iter().zip(&lifted.zeta) {
        let parent = &sk.node_facets[v.0];
        let p = sk.stacked_vertex[v.0].expect("interior");
        let parent_bracket = bracket(&flat.points(parent))?.abs();
        let children: Vec<Rat> = (0..d)
            .map(|i| {
                let mut f = parent.clone();
                f[i] = p;
                bracket(&flat.points(&f)).map(|b| b.abs())
            })
            .collect::<Result<_, _>>()?;
        for i in 0..d {
            let mut x = parent.clone();
            x.remove(i);
            let entry = stress.get_mut(&Ridge::from_unsorted(x)).expect("ridge of a facet exists");
            *entry -= zeta / &children[i];
            for j in i + 1..d {
                let r: Vec<usize> = parent
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &u)| u)
                    .chain(std::iter::once(p))
                    .collect();
                let value = zeta * &parent_bracket / (&children[i] * &children[j]);
                stress.insert(Ridge::from_unsorted(r), value);
            }
        }
    }
    Ok(stress)
}

/// Checks that the incremental and the direct stress tables agree exactly.
pub fn cross_check_stresses(lifted: &LiftedComplex) -> Result<(), LiftError> {
    let direct = if lifted.stresses.is_empty() {
        stress_map(lifted)?
    } else {
        lifted.stresses.clone()
    };
    let incremental = incremental_stress_map(lifted)?;
    for (r, d) in &direct {
        match incremental.get(r) {
            Some(i) if i == d => {}
            other => {
                return Err(LiftError::StressMismatch {
                    ridge: r.clone(),
                    incremental: other.map_or("missing".into(), ToString::to_string),
                    direct: d.to_string(),
                })
            }
        }
    }
    if let Some(r) = incremental.keys().find(|r| !direct.contains_key(*r)) {
        return Err(LiftError::StressMismatch {
            ridge: r.clone(),
            incremental: incremental[r].to_string(),
            direct: "missing".into(),
        });
    }
    Ok(())
}

/// Stress extrema of a lifted complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StressExtrema {
    pub min_interior: Rat,
    /// Largest base-ridge stress (closest to zero).
    pub max_boundary: Rat,
    /// Smallest base-ridge stress.
    pub min_boundary: Rat,
}

impl StressExtrema {
    pub fn max_abs_boundary(&self) -> Rat {
        self.min_boundary.abs()
    }
}

/// Extrema over interior and base ridges of a stress table.
pub fn stress_extrema(lifted: &LiftedComplex, stresses: &BTreeMap<Ridge, Rat>) -> StressExtrema {
    let sk = &lifted.flat.skeleton;
    let mut min_interior: Option<&Rat> = None;
    let mut max_boundary: Option<&Rat> = None;
    let mut min_boundary: Option<&Rat> = None;
    for (r, w) in stresses {
        if sk.is_base_ridge(r) {
            max_boundary = Some(max_boundary.map_or(w, |m| m.max(w)));
            min_boundary = Some(min_boundary.map_or(w, |m| m.min(w)));
        } else {
            min_interior = Some(min_interior.map_or(w, |m| m.min(w)));
        }
    }
    StressExtrema {
        min_interior: min_interior.cloned().expect("a stacking creates interior ridges"),
        max_boundary: max_boundary.cloned().expect("base ridges exist"),
        min_boundary: min_boundary.cloned().expect("base ridges exist"),
    }
}

/// Interior stresses at least one and base stresses in `(-R_eff, 0)`.
pub fn check_lift_bounds(lifted: &LiftedComplex, r_eff: &BigInt) -> Result<StressExtrema, LiftError> {
    let sk = &lifted.flat.skeleton;
    let one = Rat::one();
    let low = -Rat::from_integer(r_eff.clone());
    for (r, w) in &lifted.stresses {
        if sk.is_base_ridge(r) {
            if !(w < &Rat::zero() && w > &low) {
                return Err(LiftError::BoundaryStress {
                    ridge: r.clone(),
                    value: w.clone(),
                    bound: low,
                });
            }
        } else if w < &one {
            return Err(LiftError::InteriorStress {
                ridge: r.clone(),
                value: w.clone(),
                bound: one,
            });
        }
    }
    Ok(stress_extrema(lifted, &lifted.stresses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::{rat, rat_int};
    use crate::flat_embedding::build_flat;
    use crate::tree_model::{balance_weights, gen_tree, parse_tree, TreeRep, TreeShape};

    fn fixture() -> LiftedComplex {
        let wt = balance_weights(&TreeRep::simplex(3).unwrap());
        let flat = build_flat(&wt).unwrap();
        let zeta = vertical_shifts(&wt, &flat.lambda).unwrap();
        lift(&flat, &zeta).unwrap()
    }

    #[test]
    fn fixture_shift_and_height() {
        let l = fixture();
        assert_eq!(l.zeta, vec![rat(16, 9)]);
        assert_eq!(l.z, vec![rat_int(0), rat_int(0), rat_int(0), rat(16, 9)]);
    }

    #[test]
    fn fixture_stresses() {
        let l = fixture();
        for (r, w) in &l.stresses {
            let want = if r.vertices().contains(&3) { rat_int(4) } else { rat(-4, 3) };
            assert_eq!(w, &want, "ridge {r}");
        }
        assert_eq!(incremental_stress_map(&l).unwrap(), l.stresses);
        let ex = check_lift_bounds(&l, &BigInt::from(4)).unwrap();
        assert_eq!(ex.min_interior, rat_int(4));
        assert_eq!(ex.max_abs_boundary(), rat(4, 3));
    }

    #[test]
    fn doubling_zeta_doubles_fresh_interior_stress() {
        let l = fixture();
        let doubled = lift(&l.flat, &[rat(32, 9)]).unwrap();
        let r = Ridge(vec![0, 3]);
        assert_eq!(doubled.stresses[&r], &l.stresses[&r] * rat_int(2));
    }

    #[test]
    fn nested_shift_uses_balanced_weights() {
        // Weights [5, 1, 3, 1, 1, 1, 1]; lambda = 9/5.
        let t = parse_tree(br#"{"dim":3,"tree":[null,[null,null,null],null]}"#).unwrap();
        let wt = balance_weights(&t);
        let flat = build_flat(&wt).unwrap();
        let zeta = vertical_shifts(&wt, &flat.lambda).unwrap();
        assert_eq!(zeta, vec![rat(243, 25), rat(81, 25)]);
    }

    #[test]
    fn nested_stackings_rise_above_parent_plane() {
        let t = parse_tree(br#"{"dim":3,"tree":[null,[null,null,null],null]}"#).unwrap();
        let wt = balance_weights(&t);
        let flat = build_flat(&wt).unwrap();
        let l = lift_heights(&flat, &[rat_int(1), rat_int(1)]).unwrap();
        let sk = &flat.skeleton;
        let inner = sk.stackings[1];
        let p = sk.stacked_vertex[inner.0].unwrap();
        let plane = l.points(&sk.node_facets[inner.0]);
        assert!(height_on_hyperplane(&plane, &flat.coords[p]).unwrap() < l.z[p]);
        assert!(l.z[3..].iter().all(Signed::is_positive));
    }

    #[test]
    fn direct_and_incremental_agree_on_random_trees() {
        for (d, seed) in [(3, 1), (3, 2), (4, 3), (5, 4)] {
            let t = gen_tree(TreeShape::Random, d, 12, seed).unwrap();
            let wt = balance_weights(&t);
            let flat = build_flat(&wt).unwrap();
            let zeta = vertical_shifts(&wt, &flat.lambda).unwrap();
            let l = lift(&flat, &zeta).unwrap();
            assert_eq!(l.stresses.len(), sk_ridges(&l));
            cross_check_stresses(&l).unwrap();
            check_lift_bounds(&l, &flat.effective_root_weight()).unwrap();
        }
    }

    fn sk_ridges(l: &LiftedComplex) -> usize {
        l.flat.skeleton.ridges.len()
    }

    #[test]
    fn serpentine_passes_bounds() {
        let t = gen_tree(TreeShape::Serpentine, 3, 10, 0).unwrap();
        let wt = balance_weights(&t);
        let flat = build_flat(&wt).unwrap();
        let zeta = vertical_shifts(&wt, &flat.lambda).unwrap();
        let l = lift(&flat, &zeta).unwrap();
        check_lift_bounds(&l, &flat.effective_root_weight()).unwrap();
    }

    #[test]
    fn shift_errors() {
        let l = fixture();
        assert!(matches!(lift_heights(&l.flat, &[]), Err(LiftError::ShiftCount { .. })));
        assert!(matches!(
            lift_heights(&l.flat, &[rat_int(0)]),
            Err(LiftError::NonPositiveShift { .. })
        ));
    }
}
