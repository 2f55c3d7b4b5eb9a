//! Trees, rooted pieces, canonical forms and enumeration.

pub mod canon;
pub mod enumerate;
mod piece;
pub mod random;
mod tree;

pub use canon::{canonical_code, CanonicalCode};
pub use enumerate::{enumerate_rooted_forests, enumerate_trees, EnumerateError};
pub use piece::{End, PieceError, RootedPiece};
pub use tree::{parse_tree, ParseError, Tree, TreeClass, TreeError};
