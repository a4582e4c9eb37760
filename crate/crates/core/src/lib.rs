//! Exact realization of stacked polytopes on small integer grids.
//!
//! The pipeline takes the tree-representation of a stacked `d`-polytope,
//! balances its face-weights, embeds it flat in `Q^(d-1)` by weighted
//! barycentric subdivision, lifts it to a convex polytope in `Q^d`, and rounds
//! the result to nonnegative integer coordinates. Each stage is checked
//! exactly, and the final coordinates are certified independently.
//!
//! ```
//! use stackgrid::pipeline::{run_pipeline, PipelineOptions};
//! use stackgrid::tree_model::parse_tree;
//!
//! let tree = parse_tree(br#"{"dim":3,"tree":[null,null,null]}"#).unwrap();
//! let run = run_pipeline(&tree, PipelineOptions::default()).unwrap();
//! assert!(run.certificate().all_ok());
//! assert_eq!(run.realization().coords[3], vec![480.into(), 480.into(), 21.into()]);
//! ```

pub mod exact_geometry;
pub mod flat_embedding;
pub mod lifting;
pub mod output;
pub mod pipeline;
pub mod rounding;
pub mod tree_model;
pub mod verifier;

pub use exact_geometry::{Point, Rat};
pub use num_bigint::BigInt;
