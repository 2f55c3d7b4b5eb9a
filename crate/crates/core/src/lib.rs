//! Construction and verification of k-cordial labelings of trees.
//!
//! A labeling assigns each vertex a residue mod `k`; an edge's weight is
//! the sum of its end labels mod `k`. A labeling is k-cordial when label
//! counts and weight counts are each balanced to within one.
//! [`labeler::label_tree_7`] builds a 7-cordial labeling of any tree.

pub mod catalog;
pub mod cordiality;
pub mod decompose;
pub mod document;
pub mod grace;
pub mod graph;
pub mod labeler;
pub mod search;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/labelings.md")]
    mod labelings {}
    #[doc = include_str!("../../../book/src/caterpillars.md")]
    mod caterpillars {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/splitting.md")]
    mod splitting {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
