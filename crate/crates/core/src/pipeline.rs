//! The full realization pipeline with its stage report.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact_geometry::Rat;
use crate::flat_embedding::{build_flat, EmbeddingError, FlatComplex};
use crate::lifting::{check_lift_bounds, cross_check_stresses, lift, vertical_shifts, LiftError, LiftedComplex, StressExtrema};
use crate::rounding::{round_flat, Realization, RoundingError, RoundingOutcome};
use crate::tree_model::{balance_weights, TreeError, TreeRep, WeightedTree};
use crate::verifier::{certify, Certificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("balancing: {0}")]
    Balance(#[from] TreeError),
    #[error("flat embedding: {0}")]
    Flat(#[from] EmbeddingError),
    #[error("lifting: {0}")]
    Lift(#[from] LiftError),
    #[error("rounding: {0}")]
    Round(#[from] RoundingError),
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Balance(_) => "balance",
            PipelineError::Flat(_) => "flat",
            PipelineError::Lift(_) => "lift",
            PipelineError::Round(_) => "round",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Compare the incremental stress computation with the direct one.
    pub cross_check: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { cross_check: true }
    }
}

/// One checked stage invariant with its exact value and bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub value: String,
    pub relation: &'static str,
    pub bound: String,
    pub ok: bool,
}

fn check<T: PartialOrd + ToString>(name: &'static str, value: &T, relation: &'static str, bound: &T) -> Check {
    let ok = match relation {
        ">=" => value >= bound,
        ">" => value > bound,
        "<=" => value <= bound,
        "<" => value < bound,
        _ => unreachable!("unknown relation {relation}"),
    };
    Check {
        name,
        value: value.to_string(),
        relation,
        bound: bound.to_string(),
        ok,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub dim: usize,
    /// Vertices of the polytope.
    pub vertices: usize,
    /// Stacking operations.
    pub stackings: usize,
    pub root_weight: BigInt,
    pub r_eff: BigInt,
    pub side: BigInt,
    pub lambda: Rat,
    pub alpha: Rat,
    pub alpha_z: Rat,
    pub lift: StressExtrema,
    pub lift_z_max: Rat,
    pub rounding: crate::rounding::RoundingStats,
    pub max_xy: BigInt,
    pub max_z: BigInt,
    /// `R_eff / n^(log2(2d))`, for monitoring only.
    pub growth_ratio: f64,
    pub checks: Vec<Check>,
    pub certificate: Certificate,
    pub timings: Vec<(&'static str, Duration)>,
}

impl PipelineReport {
    pub fn checks_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Every artifact of a pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub weighted: WeightedTree,
    pub flat: FlatComplex,
    pub lifted: LiftedComplex,
    pub rounding: RoundingOutcome,
    pub report: PipelineReport,
}

impl PipelineRun {
    pub fn tree(&self) -> &TreeRep {
        &self.weighted.tree
    }

    pub fn realization(&self) -> &Realization {
        &self.rounding.realization
    }

    pub fn certificate(&self) -> &Certificate {
        &self.report.certificate
    }
}

fn stage_checks(
    d: usize,
    r_eff: &BigInt,
    lift: &StressExtrema,
    out: &RoundingOutcome,
    cross_checked: bool,
) -> Vec<Check> {
    let r = Rat::from_integer(r_eff.clone());
    let zero = Rat::zero();
    let st = &out.stats;
    let p = &out.params;
    let meta = &out.realization.meta;
    let mut checks = vec![
        check("lift.min_interior_stress", &lift.min_interior, ">=", &Rat::one()),
        check("lift.max_base_stress", &lift.max_boundary, "<", &zero),
        check("lift.min_base_stress", &lift.min_boundary, ">", &-r.clone()),
        check("perturb.min_volume_ratio", &st.ratio_min, ">=", &p.delta_minus),
        check("perturb.max_volume_ratio", &st.ratio_max, "<=", &p.delta_plus),
        check(
            "perturb.min_interior_stress",
            &st.relift.min_interior,
            ">=",
            &Rat::new(BigInt::from(4), BigInt::from(5)),
        ),
        check("perturb.min_base_stress", &st.relift.min_boundary, ">", &(-Rat::from_integer(BigInt::from(2)) * &r)),
        check("relift.z_max", &st.z_max, "<", &(Rat::from_integer(BigInt::from(2)) * &r * &r)),
        check("zround.min_interior_stress", &st.rounded.min_interior, ">", &zero),
        check("zround.max_base_stress", &st.rounded.max_boundary, "<", &zero),
        check("zround.min_nonbase_z", &st.min_nonbase_z, ">", &zero),
        check("final.max_xy", &meta.max_xy, "<=", &(BigInt::from(10 * d * d) * r_eff * r_eff)),
        check("final.max_z", &meta.max_z, "<=", &(BigInt::from(6) * r_eff * r_eff * r_eff)),
    ];
    if cross_checked {
        checks.push(Check {
            name: "lift.stress_paths_agree",
            value: "equal".into(),
            relation: "==",
            bound: "equal".into(),
            ok: true,
        });
    }
    checks
}

/// Balance, embed, lift, round and certify.
pub fn run_pipeline(tree: &TreeRep, opts: PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let mut timings = Vec::new();
    let mut timed = |name: &'static str, start: Instant| timings.push((name, start.elapsed()));

    let t = Instant::now();
    let weighted = balance_weights(tree);
    weighted.validate()?;
    timed("balance", t);

    let t = Instant::now();
    let flat = build_flat(&weighted)?;
    timed("flat", t);

    let t = Instant::now();
    let zeta = vertical_shifts(&weighted, &flat.lambda)?;
    let lifted = lift(&flat, &zeta)?;
    let r_eff = flat.effective_root_weight();
    let lift_extrema = check_lift_bounds(&lifted, &r_eff)?;
    if opts.cross_check {
        cross_check_stresses(&lifted)?;
    }
    timed("lift", t);

    let t = Instant::now();
    let rounding = round_flat(&flat)?;
    timed("round", t);

    let t = Instant::now();
    let certificate = certify(&rounding.realization, tree);
    timed("verify", t);

    let d = tree.dim();
    let n = tree.vertex_count();
    let growth_ratio = r_eff.to_f64().unwrap_or(f64::INFINITY) / (n as f64).powf((2.0 * d as f64).log2());
    let checks = stage_checks(d, &r_eff, &lift_extrema, &rounding, opts.cross_check);
    let meta = &rounding.realization.meta;
    let report = PipelineReport {
        dim: d,
        vertices: n,
        stackings: tree.interior_count(),
        root_weight: weighted.root_weight().clone(),
        r_eff: r_eff.clone(),
        side: flat.side.clone(),
        lambda: flat.lambda.clone(),
        alpha: rounding.params.alpha.clone(),
        alpha_z: rounding.params.alpha_z.clone(),
        lift_z_max: lifted.z_max(),
        lift: lift_extrema,
        rounding: rounding.stats.clone(),
        max_xy: meta.max_xy.clone(),
        max_z: meta.max_z.clone(),
        growth_ratio,
        checks,
        certificate,
        timings,
    };
    Ok(PipelineRun {
        weighted,
        flat,
        lifted,
        rounding,
        report,
    })
}

/// `(2d)^ceil(log2 n)`, a safe upper bound on the root weight of a balanced
/// tree with `n` vertices.
pub fn root_weight_bound(dim: usize, vertices: usize) -> BigInt {
    let exp = usize::BITS - (vertices.max(1) - 1).leading_zeros();
    Pow::pow(&BigInt::from(2 * dim), exp)
}

/// `2 log2(2d)` and `3 log2(2d)`, the exponents of the coordinate bounds in
/// the number of vertices.
pub fn bound_exponents(dim: usize) -> (f64, f64) {
    let l = (2.0 * dim as f64).log2();
    (2.0 * l, 3.0 * l)
}

/// Rounds `x` up to two decimals.
pub fn ceil_hundredths(x: f64) -> f64 {
    // Guard against representation error pushing an exact value up a step.
    ((x * 100.0) - 1e-9).ceil() / 100.0
}
