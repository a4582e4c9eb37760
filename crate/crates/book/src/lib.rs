//! Compiles every Rust listing of the guide in `book/` as a doctest.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(tree_representations, "tree-representations.md");
chapter!(exact_geometry, "exact-geometry.md");
chapter!(balanced_weights, "balanced-weights.md");
chapter!(flat_embedding, "flat-embedding.md");
chapter!(lifting, "lifting.md");
chapter!(rounding, "rounding.md");
chapter!(verification, "verification.md");
chapter!(command_line, "command-line.md");

#[doc = include_str!("../../../README.md")]
pub mod readme {}
