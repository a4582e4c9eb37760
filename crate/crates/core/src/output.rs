//! Serialization of realizations, weights and reports.
//!
//! Exact numbers are written as strings (`"1/720"`, `"1440"`) so that JSON
//! consumers never lose precision. Objects are written with sorted keys, so
//! equal inputs give byte-identical output.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exact_geometry::Rat;
use crate::lifting::StressExtrema;
use crate::pipeline::{PipelineReport, PipelineRun};
use crate::rounding::{Realization, RealizationMeta};
use crate::tree_model::{
    default_base, graph_from_value, parse_json, tree_from_graph_labeled, tree_from_value, TreeError, TreeRep,
    WeightedTree,
};
use crate::verifier::Certificate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OutputError {
    #[error("OFF output needs dimension 3, got {0}")]
    OffDimension(usize),
    #[error("malformed realization JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

/// OFF text of a 3-dimensional realization, every face oriented
/// counterclockwise as seen from outside.
pub fn emit_off(r: &Realization) -> Result<String, OutputError> {
    if r.dim != 3 {
        return Err(OutputError::OffDimension(r.dim));
    }
    let n = BigInt::from(r.coords.len());
    let sum: Vec<BigInt> = (0..3).map(|k| r.coords.iter().map(|p| &p[k]).sum()).collect();
    let mut out = format!("OFF\n{} {} 0\n", r.coords.len(), r.facets.len() + 1);
    for p in &r.coords {
        out.push_str(&strings(p).join(" "));
        out.push('\n');
    }
    for f in r.all_facets() {
        let (a, mut b, mut c) = (f[0], f[1], f[2]);
        // det(b - a, c - a, n * centroid - n * a) must be negative.
        if orientation(&r.coords[a], &r.coords[b], &r.coords[c], &sum, &n).is_positive() {
            std::mem::swap(&mut b, &mut c);
        }
        out.push_str(&format!("3 {a} {b} {c}\n"));
    }
    Ok(out)
}

/// `det(b - a, c - a, s - n a)`.
pub fn orientation(a: &[BigInt], b: &[BigInt], c: &[BigInt], s: &[BigInt], n: &BigInt) -> BigInt {
    let u: Vec<BigInt> = (0..3).map(|k| &b[k] - &a[k]).collect();
    let v: Vec<BigInt> = (0..3).map(|k| &c[k] - &a[k]).collect();
    let w: Vec<BigInt> = (0..3).map(|k| &s[k] - n * &a[k]).collect();
    &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0])
}

pub fn realization_json(r: &Realization) -> Value {
    let m = &r.meta;
    json!({
        "dim": r.dim,
        "coords": r.coords.iter().map(|p| strings(p)).collect::<Vec<_>>(),
        "base_facet": r.base_facet,
        "facets": r.facets,
        "meta": {
            "r_eff": m.r_eff.to_string(),
            "L": m.side.to_string(),
            "alpha": m.alpha.to_string(),
            "alpha_z": m.alpha_z.to_string(),
            "max_xy": m.max_xy.to_string(),
            "max_z": m.max_z.to_string(),
        }
    })
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, OutputError> {
    v.get(key).ok_or_else(|| OutputError::Json(format!("missing field \"{key}\"")))
}

fn parse_num<T: FromStr>(v: &Value, what: &str) -> Result<T, OutputError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(OutputError::Json(format!("{what} must be a string or number"))),
    };
    text.parse()
        .map_err(|_| OutputError::Json(format!("{what} is not a valid number: {text}")))
}

fn parse_ids(v: &Value, what: &str) -> Result<Vec<usize>, OutputError> {
    v.as_array()
        .ok_or_else(|| OutputError::Json(format!("{what} must be an array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| OutputError::Json(format!("{what} must hold vertex ids")))
        })
        .collect()
}

pub fn realization_from_value(v: &Value) -> Result<Realization, OutputError> {
    let dim = field(v, "dim")?
        .as_u64()
        .ok_or_else(|| OutputError::Json("dim must be an integer".into()))? as usize;
    let coords = field(v, "coords")?
        .as_array()
        .ok_or_else(|| OutputError::Json("coords must be an array".into()))?
        .iter()
        .map(|p| {
            p.as_array()
                .ok_or_else(|| OutputError::Json("a vertex must be an array".into()))?
                .iter()
                .map(|c| parse_num::<BigInt>(c, "coordinate"))
                .collect()
        })
        .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
    let base_facet = parse_ids(field(v, "base_facet")?, "base_facet")?;
    let facets = field(v, "facets")?
        .as_array()
        .ok_or_else(|| OutputError::Json("facets must be an array".into()))?
        .iter()
        .map(|f| parse_ids(f, "facet"))
        .collect::<Result<Vec<_>, _>>()?;
    let m = field(v, "meta")?;
    let meta = RealizationMeta {
        r_eff: parse_num(field(m, "r_eff")?, "r_eff")?,
        side: parse_num(field(m, "L")?, "L")?,
        alpha: parse_num::<Rat>(field(m, "alpha")?, "alpha")?,
        alpha_z: parse_num::<Rat>(field(m, "alpha_z")?, "alpha_z")?,
        max_xy: parse_num(field(m, "max_xy")?, "max_xy")?,
        max_z: parse_num(field(m, "max_z")?, "max_z")?,
    };
    Ok(Realization {
        dim,
        coords,
        base_facet,
        facets,
        meta,
    })
}

/// A pipeline input: a tree, or a graph with the tree recovered from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Input {
    pub tree: TreeRep,
    /// For graph input, `labels[i]` is the graph vertex playing skeleton
    /// vertex `i`.
    pub labels: Option<Vec<usize>>,
}

/// Parses tree JSON (`{"dim", "tree"}`) or graph JSON (`{"n", "edges"}`,
/// optionally with `"dim"` and `"base"`). `dim` applies to graphs that do not
/// state their own.
pub fn parse_input(text: &[u8], dim: usize) -> Result<Input, OutputError> {
    let v = parse_json(text)?;
    if v.get("tree").is_some() {
        return Ok(Input {
            tree: tree_from_value(&v)?,
            labels: None,
        });
    }
    let g = graph_from_value(&v)?;
    let dim = v.get("dim").and_then(Value::as_u64).map_or(dim, |d| d as usize);
    let base = match v.get("base") {
        Some(b) => parse_ids(b, "base")?,
        None => default_base(&g, dim)
            .ok_or_else(|| TreeError::NotStacked(format!("no vertex of degree {dim}")))?,
    };
    let (tree, labels) = tree_from_graph_labeled(&g, dim, &base)?;
    Ok(Input {
        tree,
        labels: Some(labels),
    })
}

/// Parses a document written by [`realize_document`]: the source tree and its
/// realization.
pub fn parse_realize_document(text: &[u8]) -> Result<(TreeRep, Realization), OutputError> {
    let doc = parse_json(text)?;
    let tree = tree_from_value(field(&doc, "tree")?)?;
    let r = realization_from_value(field(&doc, "realization")?)?;
    Ok((tree, r))
}

/// `{"realization": .., "report": .., "tree": ..}` on one line, plus
/// `"graph_labels"` for graph input.
pub fn realize_document(run: &PipelineRun, labels: Option<&[usize]>, include_timings: bool) -> String {
    let labels = labels.map_or(String::new(), |l| format!("\"graph_labels\":{},", Value::from(l.to_vec())));
    format!(
        "{{{}\"realization\":{},\"report\":{},\"tree\":{}}}\n",
        labels,
        realization_json(run.realization()),
        report_json(&run.report, include_timings),
        run.tree().to_json()
    )
}

/// Tree with its balanced weights in node pre-order.
pub fn weights_document(wt: &WeightedTree) -> String {
    let weights = strings(&wt.weights);
    let light_depth = wt.heavy.light_depth(&wt.tree);
    format!(
        "{{\"light_depth\":{},\"root_weight\":\"{}\",\"tree\":{},\"weights\":{}}}\n",
        light_depth,
        wt.root_weight(),
        wt.tree.to_json(),
        Value::from(weights)
    )
}

fn extrema_json(e: &StressExtrema) -> Value {
    json!({
        "min_interior": e.min_interior.to_string(),
        "min_base": e.min_boundary.to_string(),
        "max_base": e.max_boundary.to_string(),
    })
}

pub fn certificate_json(c: &Certificate) -> Value {
    json!({
        "convex_by_stress": c.convex_by_stress,
        "convex_global": c.convex_global,
        "bounds_ok": c.bounds_ok,
        "combinatorics_ok": c.combinatorics_ok,
        "witnesses": strings(&c.witnesses),
    })
}

pub fn report_json(r: &PipelineReport, include_timings: bool) -> Value {
    let st = &r.rounding;
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "value": c.value, "relation": c.relation, "bound": c.bound, "ok": c.ok }))
        .collect();
    let mut obj = json!({
        "input": { "d": r.dim, "n": r.vertices, "k": r.stackings },
        "R": r.root_weight.to_string(),
        "R_eff": r.r_eff.to_string(),
        "L": r.side.to_string(),
        "lambda": r.lambda.to_string(),
        "alpha": r.alpha.to_string(),
        "alpha_z": r.alpha_z.to_string(),
        "stages": {
            "lift": { "stress": extrema_json(&r.lift), "z_max": r.lift_z_max.to_string() },
            "perturb": {
                "min_volume_ratio": st.ratio_min.to_string(),
                "max_volume_ratio": st.ratio_max.to_string(),
                "stress": extrema_json(&st.relift),
                "z_max": st.z_max.to_string(),
            },
            "zround": { "stress": extrema_json(&st.rounded), "min_nonbase_z": st.min_nonbase_z.to_string() },
        },
        "final": { "max_xy": r.max_xy.to_string(), "max_z": r.max_z.to_string() },
        "growth_ratio": format!("{:.6e}", r.growth_ratio),
        "checks": checks,
        "certificate": certificate_json(&r.certificate),
    });
    if include_timings {
        let mut t = Map::new();
        for (name, d) in &r.timings {
            t.insert((*name).to_string(), json!(d.as_secs_f64() * 1000.0));
        }
        obj["timings_ms"] = Value::Object(t);
    }
    obj
}

/// Report as one line of JSON.
pub fn emit_report(r: &PipelineReport, include_timings: bool) -> String {
    format!("{}\n", report_json(r, include_timings))
}
