//! Rounding the lifted polytope to an integer grid.
//!
//! The flat coordinates are floored to multiples of `alpha`, the vertical
//! shifts are recomputed from the perturbed brackets, the complex is lifted
//! again, and the heights are floored to multiples of `alpha_z`. Scaling by
//! `1 / alpha` and `1 / alpha_z` then gives integer coordinates. Every
//! intermediate guarantee is checked, and a violation is a hard error.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

use crate::exact_geometry::{bracket, Point, Rat};
use crate::flat_embedding::FlatComplex;
use crate::lifting::{lift, stress_extrema, LiftError, LiftedComplex, StressExtrema};
use crate::tree_model::{NodeId, Ridge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundingError {
    #[error("effective root weight {0} is below 3")]
    RootWeightTooSmall(BigInt),
    #[error("facet of node {node} changed volume by ratio {ratio}, outside [{low}, {high}]")]
    VolumeRatio { node: usize, ratio: Rat, low: Rat, high: Rat },
    #[error("after perturbation interior ridge {ridge} has stress {value}, below 4/5")]
    PerturbedInterior { ridge: Ridge, value: Rat },
    #[error("after perturbation base ridge {ridge} has stress {value}, not above {bound}")]
    PerturbedBoundary { ridge: Ridge, value: Rat, bound: Rat },
    #[error("maximal height {z_max} is not below {bound}")]
    HeightTooLarge { z_max: Rat, bound: Rat },
    #[error("after height rounding ridge {ridge} has stress {value} of the wrong sign")]
    RoundedStress { ridge: Ridge, value: Rat },
    #[error("after height rounding vertex {vertex} has height {z}")]
    RoundedHeight { vertex: usize, z: Rat },
    #[error("coordinate {value} of vertex {vertex} is not on the grid")]
    OffGrid { vertex: usize, value: Rat },
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Grid pitches and perturbation factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridParams {
    pub dim: usize,
    pub side: BigInt,
    pub r_eff: BigInt,
    /// `1 / (10 d^2 L^(d-2) R_eff)`.
    pub alpha: Rat,
    /// `1 / (3 R_eff)`.
    pub alpha_z: Rat,
    /// `1 + alpha d^2 L^(d-2)`.
    pub delta_plus: Rat,
    /// `1 - alpha d^2 L^(d-2)`.
    pub delta_minus: Rat,
}

pub fn grid_params(dim: usize, side: &BigInt, r_eff: &BigInt) -> Result<GridParams, RoundingError> {
    if *r_eff < BigInt::from(3) {
        return Err(RoundingError::RootWeightTooSmall(r_eff.clone()));
    }
    let d2 = BigInt::from(dim * dim);
    let l_pow: BigInt = Pow::pow(side, (dim - 2) as u32);
    let alpha = Rat::new(BigInt::one(), BigInt::from(10) * &d2 * &l_pow * r_eff);
    let alpha_z = Rat::new(BigInt::one(), BigInt::from(3) * r_eff);
    let spread = &alpha * Rat::from_integer(d2 * l_pow);
    Ok(GridParams {
        dim,
        side: side.clone(),
        r_eff: r_eff.clone(),
        alpha,
        alpha_z,
        delta_plus: Rat::one() + &spread,
        delta_minus: Rat::one() - spread,
    })
}

impl GridParams {
    pub fn for_flat(flat: &FlatComplex) -> Result<Self, RoundingError> {
        grid_params(flat.dim(), &flat.side, &flat.effective_root_weight())
    }
}

/// `floor(c / pitch) * pitch`.
pub fn floor_to_grid(c: &Rat, pitch: &Rat) -> Rat {
    (c / pitch).floor() * pitch
}

/// Floors every flat coordinate to a multiple of `alpha`.
pub fn perturb_flat(flat: &FlatComplex, alpha: &Rat) -> FlatComplex {
    let coords = flat
        .coords
        .iter()
        .map(|p| Point::new(p.coords().iter().map(|c| floor_to_grid(c, alpha)).collect()))
        .collect();
    FlatComplex {
        skeleton: Arc::clone(&flat.skeleton),
        coords,
        ..flat.clone()
    }
}

/// Smallest and largest ratio `[[F']] / [[F]]` over the facets of all nodes.
pub fn volume_ratios(original: &FlatComplex, perturbed: &FlatComplex) -> Vec<Rat> {
    (0..original.skeleton.node_facets.len())
        .map(|v| perturbed.node_bracket(NodeId(v)) / original.node_bracket(NodeId(v)))
        .collect()
}

/// Checks every volume ratio against `[delta_minus, delta_plus]` and returns
/// the extrema.
pub fn check_volume_ratios(
    original: &FlatComplex,
    perturbed: &FlatComplex,
    params: &GridParams,
) -> Result<(Rat, Rat), RoundingError> {
    let ratios = volume_ratios(original, perturbed);
    for (node, ratio) in ratios.iter().enumerate() {
        if *ratio < params.delta_minus || *ratio > params.delta_plus {
            return Err(RoundingError::VolumeRatio {
                node,
                ratio: ratio.clone(),
                low: params.delta_minus.clone(),
                high: params.delta_plus.clone(),
            });
        }
    }
    let min = ratios.iter().min().cloned().expect("root facet");
    let max = ratios.iter().max().cloned().expect("root facet");
    Ok((min, max))
}

/// `zeta'_i = |[[A'_i]] [[B'_i]]|` with `A'_i`, `B'_i` the two largest of the
/// facets created by stacking `i`, ties going to the lower child index.
pub fn adjusted_shifts(perturbed: &FlatComplex) -> Vec<Rat> {
    let sk = &perturbed.skeleton;
    sk.stackings
        .iter()
        .map(|&v| {
            let parent = &sk.node_facets[v.0];
            let p = sk.stacked_vertex[v.0].expect("interior");
            let mut sizes: Vec<(Rat, usize)> = (0..sk.dim)
                .map(|i| {
                    let mut f = parent.clone();
                    f[i] = p;
                    let b = bracket(&perturbed.points(&f)).expect("flat dimension");
                    (b.abs(), i)
                })
                .collect();
            sizes.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            &sizes[0].0 * &sizes[1].0
        })
        .collect()
}

/// Integer realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub dim: usize,
    /// Integer coordinates of every vertex, height last.
    pub coords: Vec<Vec<BigInt>>,
    pub base_facet: Vec<usize>,
    /// Facets other than the base, one per leaf in node order.
    pub facets: Vec<Vec<usize>>,
    pub meta: RealizationMeta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationMeta {
    pub r_eff: BigInt,
    pub side: BigInt,
    pub alpha: Rat,
    pub alpha_z: Rat,
    /// Largest non-height coordinate.
    pub max_xy: BigInt,
    pub max_z: BigInt,
}

impl Realization {
    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    /// All facets, base first.
    pub fn all_facets(&self) -> impl Iterator<Item = &[usize]> + '_ {
        std::iter::once(self.base_facet.as_slice()).chain(self.facets.iter().map(Vec::as_slice))
    }
}

/// Values observed across the rounding stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundingStats {
    pub ratio_min: Rat,
    pub ratio_max: Rat,
    /// Stresses after relifting the perturbed complex.
    pub relift: StressExtrema,
    /// Maximal height before height rounding.
    pub z_max: Rat,
    /// Stresses after height rounding.
    pub rounded: StressExtrema,
    /// Smallest height of a vertex off the base facet after height rounding.
    pub min_nonbase_z: Rat,
}

/// Intermediate complexes of the rounding stage.
#[derive(Clone, Debug)]
pub struct RoundingOutcome {
    pub params: GridParams,
    pub perturbed: FlatComplex,
    pub relifted: LiftedComplex,
    pub rounded: LiftedComplex,
    pub realization: Realization,
    pub stats: RoundingStats,
}

fn relift_checks(relifted: &LiftedComplex, params: &GridParams) -> Result<(), RoundingError> {
    let sk = &relifted.flat.skeleton;
    let four_fifths = Rat::new(BigInt::from(4), BigInt::from(5));
    let low = -Rat::from_integer(BigInt::from(2) * &params.r_eff);
    for (r, w) in &relifted.stresses {
        if sk.is_base_ridge(r) {
            if *w <= low {
                return Err(RoundingError::PerturbedBoundary {
                    ridge: r.clone(),
                    value: w.clone(),
                    bound: low,
                });
            }
        } else if *w < four_fifths {
            return Err(RoundingError::PerturbedInterior {
                ridge: r.clone(),
                value: w.clone(),
            });
        }
    }
    let z_max = relifted.z_max();
    let bound = Rat::from_integer(BigInt::from(2) * &params.r_eff * &params.r_eff);
    if z_max >= bound {
        return Err(RoundingError::HeightTooLarge { z_max, bound });
    }
    Ok(())
}

fn rounded_checks(rounded: &LiftedComplex) -> Result<Rat, RoundingError> {
    let sk = &rounded.flat.skeleton;
    for (r, w) in &rounded.stresses {
        let ok = if sk.is_base_ridge(r) {
            w.is_negative()
        } else {
            w.is_positive()
        };
        if !ok {
            return Err(RoundingError::RoundedStress {
                ridge: r.clone(),
                value: w.clone(),
            });
        }
    }
    let base = sk.base_facet();
    let mut min_nonbase: Option<&Rat> = None;
    for (v, z) in rounded.z.iter().enumerate() {
        let on_base = base.contains(&v);
        if (on_base && !z.is_zero()) || (!on_base && !z.is_positive()) {
            return Err(RoundingError::RoundedHeight { vertex: v, z: z.clone() });
        }
        if !on_base {
            min_nonbase = Some(min_nonbase.map_or(z, |m| m.min(z)));
        }
    }
    Ok(min_nonbase.cloned().expect("a stacked vertex exists"))
}

fn to_integer(vertex: usize, c: &Rat, pitch: &Rat) -> Result<BigInt, RoundingError> {
    let scaled = c / pitch;
    if scaled.is_integer() {
        Ok(scaled.to_integer())
    } else {
        Err(RoundingError::OffGrid {
            vertex,
            value: c.clone(),
        })
    }
}

/// Relifts the perturbed complex with the adjusted shifts, floors the heights
/// to multiples of `alpha_z`, and scales to integers.
pub fn round_and_scale(
    perturbed: &FlatComplex,
    zeta: &[Rat],
    params: &GridParams,
) -> Result<(LiftedComplex, LiftedComplex, Realization), RoundingError> {
    let relifted = lift(perturbed, zeta)?;
    relift_checks(&relifted, params)?;

    let z: Vec<Rat> = relifted.z.iter().map(|z| floor_to_grid(z, &params.alpha_z)).collect();
    let rounded = LiftedComplex {
        flat: perturbed.clone(),
        z,
        // Kept for reference only: the floored heights are not generated by
        // these shifts, so the incremental stresses do not apply here.
        zeta: zeta.to_vec(),
        stresses: BTreeMap::new(),
    }
    .with_stresses()?;
    rounded_checks(&rounded)?;

    let mut coords = Vec::with_capacity(perturbed.coords.len());
    for (v, (p, z)) in perturbed.coords.iter().zip(&rounded.z).enumerate() {
        let mut row = p
            .coords()
            .iter()
            .map(|c| to_integer(v, c, &params.alpha))
            .collect::<Result<Vec<_>, _>>()?;
        row.push(to_integer(v, z, &params.alpha_z)?);
        coords.push(row);
    }
    let d = params.dim;
    let max_xy = coords.iter().flat_map(|r| r[..d - 1].iter()).max().cloned().unwrap_or_default();
    let max_z = coords.iter().map(|r| &r[d - 1]).max().cloned().unwrap_or_default();

    let sk = &perturbed.skeleton;
    let facets = sk
        .node_facets
        .iter()
        .enumerate()
        .filter(|(v, _)| sk.stacked_vertex[*v].is_none())
        .map(|(_, f)| f.clone())
        .collect();
    let realization = Realization {
        dim: d,
        coords,
        base_facet: sk.base_facet().to_vec(),
        facets,
        meta: RealizationMeta {
            r_eff: params.r_eff.clone(),
            side: params.side.clone(),
            alpha: params.alpha.clone(),
            alpha_z: params.alpha_z.clone(),
            max_xy,
            max_z,
        },
    };
    Ok((relifted, rounded, realization))
}

/// Runs the whole rounding stage on a flat complex.
pub fn round_flat(flat: &FlatComplex) -> Result<RoundingOutcome, RoundingError> {
    let params = GridParams::for_flat(flat)?;
    let perturbed = perturb_flat(flat, &params.alpha);
    let (ratio_min, ratio_max) = check_volume_ratios(flat, &perturbed, &params)?;
    let zeta = adjusted_shifts(&perturbed);
    let (relifted, rounded, realization) = round_and_scale(&perturbed, &zeta, &params)?;
    let min_nonbase_z = rounded_checks(&rounded)?;
    let stats = RoundingStats {
        ratio_min,
        ratio_max,
        relift: stress_extrema(&relifted, &relifted.stresses),
        z_max: relifted.z_max(),
        rounded: stress_extrema(&rounded, &rounded.stresses),
        min_nonbase_z,
    };
    Ok(RoundingOutcome {
        params,
        perturbed,
        relifted,
        rounded,
        realization,
        stats,
    })
}
