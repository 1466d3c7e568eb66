//! Exact-arithmetic toolkit for perfect fractional linear matroid matching:
//! a brute-force polytope oracle, determinant-degree probes over `F_p`,
//! isolating weight families, circuit lattices, and a black-box hitting set
//! for rank-two skew-symmetric symbolic matrices.
//!
//! The guide in `book/` walks through the pipeline; its code blocks run as
//! doc-tests of this crate.

pub mod algebra;
pub mod corpus;
pub mod error;
pub mod format;
pub mod hitting_set;
pub mod instance;
pub mod lattice;
pub mod oracle;
pub mod selfcheck;
pub mod solver;
pub mod weights;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polytope.md")]
    mod polytope {}
    #[doc = include_str!("../../../book/src/blowups.md")]
    mod blowups {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/hitting-sets.md")]
    mod hitting_sets {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
