//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion, and exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use stackgrid::exact_geometry::Rat;
use stackgrid::lifting::{incremental_stress_map, stress_map, LiftedComplex};
use stackgrid::pipeline::{run_pipeline, PipelineOptions, PipelineRun};
use stackgrid::rounding::Realization;
use stackgrid::tree_model::{
    balance_weights, gen_lowerbound_graph, gen_tree, tree_from_graph, Gadget, LowerBoundKind, Ridge,
    StackedTriangulation, TreeRep, TreeShape,
};
use stackgrid::verifier::{verify_convexity_global, verify_convexity_stress};

use common::{ceil_log2, check_balanced, floor_log2, int, light_depth, rat, smallest_side};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(tree: &TreeRep) -> Result<PipelineRun, String> {
    run_pipeline(tree, PipelineOptions::default()).map_err(|e| format!("pipeline failed in {}: {e}", e.stage()))
}

fn ints(rows: &[[i64; 3]]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run(&TreeRep::simplex(3).unwrap())?;
    let elapsed = start.elapsed();
    let want = ints(&[[0, 0, 0], [1440, 0, 0], [0, 1440, 0], [480, 480, 21]]);
    ensure(r.realization().coords == want, || format!("coordinates {:?}", r.realization().coords))?;
    ensure(r.report.r_eff == BigInt::from(4), || format!("R_eff {}", r.report.r_eff))?;
    ensure(r.report.alpha == rat(1, 720), || format!("alpha {}", r.report.alpha))?;
    ensure(r.report.alpha_z == rat(1, 12), || format!("alpha_z {}", r.report.alpha_z))?;
    let c = r.certificate();
    ensure(c.all_ok(), || format!("certificate {c:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("fixture exact, certified, {elapsed:.2?}"))
}

/// Vertex count of instance `i` of a sweep of `count` from `d + 1` to `max`.
fn sweep_n(d: usize, max: usize, i: usize, count: usize) -> usize {
    d + 1 + i * (max - d - 1) / (count - 1)
}

struct Sweep {
    runs: Vec<(usize, usize, PipelineRun)>,
    elapsed: Duration,
}

fn sweep() -> Result<Sweep, String> {
    let start = Instant::now();
    let mut runs = Vec::new();
    for (d, max) in [(3, 200), (4, 80), (5, 80)] {
        for i in 0..200 {
            let n = sweep_n(d, max, i, 200);
            let t = gen_tree(TreeShape::Random, d, n - d, 1000 * d as u64 + i as u64).map_err(|e| e.to_string())?;
            let r = run(&t).map_err(|e| format!("d={d} n={n}: {e}"))?;
            runs.push((d, n, r));
        }
    }
    Ok(Sweep {
        runs,
        elapsed: start.elapsed(),
    })
}

/// Every coordinate is an integer that scales back to the rounded complex.
fn check_integral(r: &PipelineRun) -> Result<(), String> {
    let real = r.realization();
    let alpha = &real.meta.alpha;
    let alpha_z = &real.meta.alpha_z;
    for (v, row) in real.coords.iter().enumerate() {
        let flat = r.rounding.perturbed.coords[v].coords();
        for (j, c) in row[..real.dim - 1].iter().enumerate() {
            ensure(Rat::from_integer(c.clone()) * alpha == flat[j], || format!("vertex {v} axis {j}"))?;
        }
        let z = Rat::from_integer(row[real.dim - 1].clone()) * alpha_z;
        ensure(z == r.rounding.rounded.z[v], || format!("vertex {v} height"))?;
    }
    Ok(())
}

fn criterion_2(sweep: &Sweep) -> Outcome {
    let mut worst_xy = 0f64;
    let mut worst_z = 0f64;
    for (d, n, r) in &sweep.runs {
        let ctx = |m: String| format!("d={d} n={n}: {m}");
        check_integral(r).map_err(ctx)?;
        let side = smallest_side(r.weighted.root_weight(), *d);
        let r_eff: BigInt = Pow::pow(&side, (*d - 1) as u32);
        ensure(r_eff == r.report.r_eff, || ctx(format!("R_eff {} vs {}", r_eff, r.report.r_eff)))?;
        let xy_bound = BigInt::from(10 * d * d) * &r_eff * &r_eff;
        let z_bound = BigInt::from(6) * &r_eff * &r_eff * &r_eff;
        let real = r.realization();
        for row in &real.coords {
            ensure(row.iter().all(|c| !c.is_negative()), || ctx("negative coordinate".into()))?;
            let xy = row[..d - 1].iter().max().unwrap();
            ensure(xy <= &xy_bound, || ctx(format!("coordinate {xy} above {xy_bound}")))?;
            ensure(row[d - 1] <= z_bound, || ctx(format!("height {} above {z_bound}", row[d - 1])))?;
        }
        let max_xy = real.coords.iter().flat_map(|row| row[..d - 1].iter()).max().unwrap();
        let max_z = real.coords.iter().map(|row| &row[d - 1]).max().unwrap();
        worst_xy = worst_xy.max(max_xy.to_f64().unwrap() / xy_bound.to_f64().unwrap());
        worst_z = worst_z.max(max_z.to_f64().unwrap() / z_bound.to_f64().unwrap());
    }
    ensure(sweep.elapsed < Duration::from_secs(600), || format!("sweep took {:?}", sweep.elapsed))?;
    Ok(format!(
        "{} realizations within bounds (max ratio xy {worst_xy:.3}, z {worst_z:.3e}), sweep {:.1?}",
        sweep.runs.len(),
        sweep.elapsed
    ))
}

/// A ridge lies on the base facet iff all its vertices are base vertices.
fn is_base_ridge(r: &Ridge, d: usize) -> bool {
    r.vertices().iter().all(|&v| v < d)
}

fn stress_bounds(
    lifted: &LiftedComplex,
    d: usize,
    interior_ok: impl Fn(&Rat) -> bool,
    base_ok: impl Fn(&Rat) -> bool,
) -> Result<(), String> {
    let stresses = stress_map(lifted).map_err(|e| e.to_string())?;
    for (ridge, w) in &stresses {
        if is_base_ridge(ridge, d) {
            ensure(base_ok(w), || format!("base ridge {ridge} stress {w}"))?;
        } else {
            ensure(interior_ok(w), || format!("interior ridge {ridge} stress {w}"))?;
        }
    }
    Ok(())
}

fn stage_bounds(d: usize, r: &PipelineRun) -> Result<(), String> {
    let r_eff = Rat::from_integer(r.report.r_eff.clone());
    let zero = Rat::zero();

    // Pre-rounding stresses.
    stress_bounds(&r.lifted, d, |w| *w >= Rat::one(), |w| *w < zero && *w > -r_eff.clone())
        .map_err(|e| format!("pre-rounding: {e}"))?;

    // Facet volume ratios after perturbation.
    let low = Rat::one() - Rat::one() / (int(10) * &r_eff);
    let high = Rat::one() + Rat::one() / (int(10) * &r_eff);
    for v in 0..r.flat.skeleton.node_facets.len() {
        let f = &r.flat.skeleton.node_facets[v];
        let before = common::bracket_oracle(&r.flat.points(f));
        let after = common::bracket_oracle(&r.rounding.perturbed.points(f));
        let ratio = after / before;
        ensure(ratio >= low && ratio <= high, || format!("node {v}: volume ratio {ratio}"))?;
    }

    // Relifted stresses and maximal height.
    let four_fifths = rat(4, 5);
    let two_r = int(2) * &r_eff;
    stress_bounds(&r.rounding.relifted, d, |w| *w >= four_fifths, |w| *w > -two_r.clone())
        .map_err(|e| format!("after perturbation: {e}"))?;
    let z_max = r.rounding.relifted.z.iter().max().unwrap();
    ensure(*z_max < int(2) * &r_eff * &r_eff, || format!("z_max {z_max}"))?;

    // After rounding the heights.
    stress_bounds(&r.rounding.rounded, d, |w| w.is_positive(), |w| w.is_negative())
        .map_err(|e| format!("after height rounding: {e}"))?;
    for (v, z) in r.rounding.rounded.z.iter().enumerate().skip(d) {
        ensure(z.is_positive(), || format!("vertex {v} height {z}"))?;
    }
    Ok(())
}

fn criterion_3(sweep: &Sweep) -> Outcome {
    for (d, n, r) in &sweep.runs {
        stage_bounds(*d, r).map_err(|e| format!("d={d} n={n}: {e}"))?;
    }
    Ok(format!("all stage bounds hold exactly on {} instances", sweep.runs.len()))
}

fn stress_paths_agree(l: &LiftedComplex) -> Result<usize, String> {
    let direct = stress_map(l).map_err(|e| e.to_string())?;
    let incremental = incremental_stress_map(l).map_err(|e| e.to_string())?;
    ensure(direct == incremental, || "direct and incremental stresses differ".into())?;
    Ok(direct.len())
}

#[derive(Clone, Copy, Debug)]
enum Corruption {
    Flatten,
    Raise,
    PushOutside,
}

fn corrupt(r: &Realization, kind: Corruption, vertex: usize) -> Realization {
    let mut c = r.clone();
    let d = c.dim;
    match kind {
        Corruption::Flatten => c.coords[vertex][d - 1] = BigInt::zero(),
        Corruption::Raise => {
            let big = &c.meta.max_z * BigInt::from(1000) + BigInt::from(1000);
            c.coords[vertex][d - 1] += big;
        }
        Corruption::PushOutside => {
            let far = &c.meta.max_xy * BigInt::from(3) + BigInt::one();
            c.coords[vertex][0] = far;
        }
    }
    c
}

fn criterion_4() -> Outcome {
    let mut ridges = 0;
    let mut negatives = 0;
    let mut instance = 0u64;
    for i in 0..1000usize {
        let d = 3 + i % 3;
        let n = d + 1 + (i / 3) % 15;
        let shape = if i % 2 == 0 { TreeShape::Random } else { TreeShape::Serpentine };
        let t = gen_tree(shape, d, n - d, i as u64).map_err(|e| e.to_string())?;
        let r = run(&t).map_err(|e| format!("instance {i}: {e}"))?;
        ridges += stress_paths_agree(&r.lifted).map_err(|e| format!("instance {i}: {e}"))?;
        ridges += stress_paths_agree(&r.rounding.relifted).map_err(|e| format!("instance {i} relifted: {e}"))?;
        let real = r.realization();
        let s = verify_convexity_stress(real).ok;
        let g = verify_convexity_global(real).ok;
        ensure(s == g, || format!("instance {i}: oracles disagree ({s} vs {g})"))?;
        ensure(s, || format!("instance {i}: not certified"))?;

        if negatives < 100 && n >= 6 {
            let kind = [Corruption::Flatten, Corruption::Raise, Corruption::PushOutside][negatives % 3];
            let vertex = d + (instance as usize % (n - d));
            instance += 7;
            let bad = corrupt(real, kind, vertex);
            let s = verify_convexity_stress(&bad).ok;
            let g = verify_convexity_global(&bad).ok;
            ensure(s == g, || format!("instance {i} {kind:?} v{vertex}: oracles disagree ({s} vs {g})"))?;
            ensure(!s, || format!("instance {i} {kind:?} v{vertex}: corruption accepted"))?;
            negatives += 1;
        }
    }
    ensure(negatives == 100, || format!("only {negatives} corruptions"))?;
    Ok(format!(
        "oracles agree on 1000 instances and {negatives} corruptions; {ridges} ridge stresses match on both paths"
    ))
}

fn criterion_5() -> Outcome {
    let mut max_ratio = 0f64;
    for i in 0..500usize {
        let d = 3 + i % 4;
        let k = 1 + (i * 37) % 120;
        let t = gen_tree(TreeShape::Random, d, k, 50_000 + i as u64).map_err(|e| e.to_string())?;
        let wt = balance_weights(&t);
        check_balanced(&wt).map_err(|e| format!("tree {i}: {e}"))?;
        let n = t.vertex_count();
        let bound: BigInt = Pow::pow(&BigInt::from(2 * d), ceil_log2(n) as u32);
        ensure(wt.root_weight() <= &bound, || format!("tree {i}: R = {} above {bound}", wt.root_weight()))?;
        max_ratio = max_ratio.max(wt.root_weight().to_f64().unwrap() / bound.to_f64().unwrap());
        let depth = light_depth(&t);
        ensure(depth <= floor_log2(n), || format!("tree {i}: light depth {depth} with n = {n}"))?;
        // The library's heavy paths agree with the oracle.
        for v in t.interior_nodes() {
            ensure(wt.heavy_index(v) == common::heavy_child(&t, v), || format!("tree {i}: heavy child of {v}"))?;
        }
    }
    Ok(format!("500 trees balanced, max R / bound = {max_ratio:.3}"))
}

fn sorted_faces(t: &StackedTriangulation) -> BTreeSet<[usize; 3]> {
    t.faces
        .iter()
        .map(|f| {
            let mut f = *f;
            f.sort_unstable();
            f
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let b3 = gen_lowerbound_graph(LowerBoundKind::B3, 20, Gadget::Serpentine).map_err(|e| e.to_string())?;
    let g = &b3.graph;
    ensure(g.vertex_count() == 20, || format!("{} vertices", g.vertex_count()))?;
    let faces = sorted_faces(&b3);
    ensure(faces.len() == 36, || format!("{} faces", faces.len()))?;
    let deg3 = (0..20).filter(|&v| g.degree(v) == 3).count();
    ensure(deg3 == 12, || format!("{deg3} vertices of degree 3"))?;
    for f in &faces {
        let t = tree_from_graph(g, 3, f).map_err(|e| format!("base {f:?}: {e}"))?;
        ensure(t.interior_count() == 17, || format!("base {f:?}: {} stackings", t.interior_count()))?;
        let r = run(&t)?;
        let facets = r.realization().facets.len() + 1;
        ensure(facets == 36, || format!("base {f:?}: {facets} facets"))?;
        ensure(r.certificate().all_ok(), || format!("base {f:?}: not certified"))?;
    }
    Ok("b3: 20 vertices, 36 faces, 12 of degree 3; certified from all 36 bases".into())
}

fn criterion_7() -> Outcome {
    let d = 3;
    let mut rows = Vec::new();
    let mut prev: Option<BigInt> = None;
    for n in [25usize, 50, 100, 200] {
        let mut max_coord = BigInt::zero();
        let mut bound = BigInt::zero();
        for seed in 0..5u64 {
            let t = gen_tree(TreeShape::Random, d, n - d, 7000 + seed).map_err(|e| e.to_string())?;
            let r = run(&t)?;
            let real = r.realization();
            let m = real.meta.max_xy.clone().max(real.meta.max_z.clone());
            let r_eff = &r.report.r_eff;
            let b = (BigInt::from(10 * d * d) * r_eff * r_eff).max(BigInt::from(6) * r_eff * r_eff * r_eff);
            ensure(m <= b, || format!("n={n} seed={seed}: {m} above {b}"))?;
            max_coord = max_coord.max(m);
            bound = bound.max(b);
        }
        if let Some(p) = &prev {
            ensure(&max_coord >= p, || format!("max coordinate fell to {max_coord} at n={n}"))?;
        }
        rows.push(format!("n={n}: {max_coord} <= {bound}"));
        prev = Some(max_coord);
    }
    Ok(format!("monotone growth: {}", rows.join("; ")))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, outcome: Outcome| {
        match &outcome {
            Ok(msg) => println!("criterion {id}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id}: FAIL  {msg}");
            }
        }
    };
    report(1, criterion_1());
    match sweep() {
        Ok(s) => {
            report(2, criterion_2(&s));
            report(3, criterion_3(&s));
        }
        Err(e) => {
            report(2, Err(e.clone()));
            report(3, Err(e));
        }
    }
    report(4, criterion_4());
    report(5, criterion_5());
    report(6, criterion_6());
    report(7, criterion_7());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
