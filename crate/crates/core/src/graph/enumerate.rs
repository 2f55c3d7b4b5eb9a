//! Exhaustive generation of small free trees and rooted pieces, one
//! representative per isomorphism class.

use std::collections::BTreeMap;

use thiserror::Error;

use super::canon::{free_tree_form, rooted_form, CanonicalCode};
use super::{RootedPiece, Tree};

pub const MAX_TREE_ORDER: usize = 12;
pub const MAX_PIECE_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("tree order {0} outside 1..={MAX_TREE_ORDER}")]
    TreeOrder(usize),
    #[error("piece order {0} outside 1..={MAX_PIECE_ORDER}")]
    PieceOrder(usize),
}

/// All free trees on `n` vertices up to isomorphism, each relabeled into its
/// canonical preorder and listed in code order.
///
/// Trees on `m` vertices are grown from those on `m - 1` by hanging a leaf
/// on every vertex; every tree arises this way because deleting any leaf
/// leaves a smaller tree.
pub fn enumerate_trees(n: usize) -> Result<Vec<Tree>, EnumerateError> {
    if !(1..=MAX_TREE_ORDER).contains(&n) {
        return Err(EnumerateError::TreeOrder(n));
    }
    let mut level = vec![Tree::single()];
    for _ in 2..=n {
        let mut next: BTreeMap<CanonicalCode, Tree> = BTreeMap::new();
        for t in &level {
            for v in 0..t.len() {
                let grown = t.with_leaf(v);
                let form = free_tree_form(&grown);
                next.entry(form.code).or_insert_with(|| relabel(&grown, &form.order));
            }
        }
        level = next.into_values().collect();
    }
    Ok(level)
}

fn relabel(t: &Tree, order: &[usize]) -> Tree {
    let mut perm = vec![0; t.len()];
    for (pos, &v) in order.iter().enumerate() {
        perm[v] = pos;
    }
    t.permuted(&perm)
}

/// Rooted trees on exactly `size` vertices (root = vertex 0), one per class.
pub fn enumerate_rooted_trees(size: usize) -> Vec<Tree> {
    if size == 0 {
        return Vec::new();
    }
    let mut level = vec![Tree::single()];
    for _ in 2..=size {
        let mut next: BTreeMap<Vec<u32>, Tree> = BTreeMap::new();
        for t in &level {
            for v in 0..t.len() {
                let grown = t.with_leaf(v);
                let (code, order) = rooted_form(grown.adjacency(), 0, None);
                next.entry(code).or_insert_with(|| relabel(&grown, &order));
            }
        }
        level = next.into_values().collect();
    }
    level
}

/// All rooted pieces with `p` branch vertices and at most `max_roots`
/// roots, one representative per isomorphism class.
///
/// A piece is a multiset of roots, each carrying a nonempty multiset of
/// branches (rooted trees whose root is the vertex adjacent to the piece
/// root). Output is ordered by root count, then by construction order.
pub fn enumerate_rooted_forests(p: usize, max_roots: usize) -> Result<Vec<RootedPiece>, EnumerateError> {
    if !(1..=MAX_PIECE_ORDER).contains(&p) {
        return Err(EnumerateError::PieceOrder(p));
    }
    // branches[s] = rooted trees with s vertices
    let branches: Vec<Vec<Tree>> = (0..=p).map(enumerate_rooted_trees).collect();
    // A flat catalogue of branch shapes, ordered by size.
    let shapes: Vec<&Tree> = branches.iter().flatten().collect();
    // forests[q] = multisets of branch indices with total size q
    let mut forests: Vec<Vec<Vec<usize>>> = vec![Vec::new(); p + 1];
    for (q, slot) in forests.iter_mut().enumerate().skip(1) {
        multisets(&shapes.iter().map(|t| t.len()).collect::<Vec<_>>(), q, &mut |m| slot.push(m.to_vec()));
    }
    // flat list of forests (one per root), ordered by size
    let flat: Vec<&Vec<usize>> = forests.iter().flatten().collect();
    let flat_sizes: Vec<usize> = flat.iter().map(|f| f.iter().map(|&b| shapes[b].len()).sum()).collect();
    let mut out = Vec::new();
    for roots in 1..=max_roots.min(p) {
        multisets_of_len(&flat_sizes, p, roots, &mut |choice| {
            let per_root: Vec<Vec<&Tree>> =
                choice.iter().map(|&f| flat[f].iter().map(|&b| shapes[b]).collect()).collect();
            out.push(assemble(&per_root));
        });
    }
    Ok(out)
}

/// Builds a piece from branch shapes listed per root.
pub(crate) fn assemble(per_root: &[Vec<&Tree>]) -> RootedPiece {
    let mut internal = Vec::new();
    let mut root_edges = Vec::new();
    let mut next = 0;
    for (r, branches) in per_root.iter().enumerate() {
        for b in branches {
            root_edges.push((r, next));
            internal.extend(b.edges().iter().map(|&(u, v)| (u + next, v + next)));
            next += b.len();
        }
    }
    RootedPiece::new(next, per_root.len(), &internal, &root_edges).expect("assembled piece is valid")
}

/// Nondecreasing index sequences whose item sizes sum to `total`.
fn multisets(sizes: &[usize], total: usize, emit: &mut dyn FnMut(&[usize])) {
    fn go(sizes: &[usize], start: usize, left: usize, cur: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        if left == 0 {
            emit(cur);
            return;
        }
        for i in start..sizes.len() {
            if sizes[i] <= left {
                cur.push(i);
                go(sizes, i, left - sizes[i], cur, emit);
                cur.pop();
            }
        }
    }
    go(sizes, 0, total, &mut Vec::new(), emit);
}

fn multisets_of_len(sizes: &[usize], total: usize, len: usize, emit: &mut dyn FnMut(&[usize])) {
    multisets(sizes, total, &mut |m| {
        if m.len() == len {
            emit(m)
        }
    });
}
