//! Canonical encodings of rooted trees, free trees and rooted pieces.
//!
//! Rooted trees use the sorted parenthesis encoding: a vertex is written as
//! `(` followed by the encodings of its children in sorted order and `)`.
//! Two rooted trees are isomorphic exactly when their encodings are equal.
//! Child order is never part of the identity of a shape.

use std::fmt;

use super::{RootedPiece, Tree};

const OPEN: u32 = u32::MAX;
const CLOSE: u32 = u32::MAX - 1;
const ROOT: u32 = u32::MAX - 2;

/// Isomorphism-invariant code of a rooted tree, free tree or rooted piece.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u32>);

impl CanonicalCode {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut after_root = false;
        for &t in &self.0 {
            match t {
                OPEN => s.push('('),
                CLOSE => s.push(')'),
                ROOT => {
                    s.push('[');
                    after_root = true;
                    continue;
                }
                x if after_root => s.push_str(&format!("{x}:")),
                x => s.push_str(&x.to_string()),
            }
            after_root = false;
        }
        write!(f, "Code({s})")
    }
}

/// Code plus a preorder listing of the vertices that realizes it.
///
/// For two isomorphic inputs, position `i` of their orders correspond under
/// some isomorphism, which lets a result computed for one be transported to
/// the other.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    pub order: Vec<usize>,
}

/// Rooted form of the component of `root` after deleting `parent`.
pub(crate) fn rooted_form(adj: &[Vec<usize>], root: usize, parent: Option<usize>) -> (Vec<u32>, Vec<usize>) {
    // Iterative post-order so deep paths do not blow the stack.
    let mut stack = vec![(root, parent.unwrap_or(usize::MAX), false)];
    let mut done: Vec<(usize, Vec<u32>, Vec<usize>)> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    while let Some((v, par, expanded)) = stack.pop() {
        if !expanded {
            stack.push((v, par, true));
            pending.push(done.len());
            for &w in adj[v].iter().rev() {
                if w != par {
                    stack.push((w, v, false));
                }
            }
        } else {
            let start = pending.pop().expect("balanced");
            let mut kids: Vec<(Vec<u32>, Vec<usize>)> =
                done.drain(start..).map(|(_, c, o)| (c, o)).collect();
            kids.sort_by(|a, b| a.0.cmp(&b.0));
            let mut code = vec![OPEN];
            let mut order = vec![v];
            for (c, o) in kids {
                code.extend(c);
                order.extend(o);
            }
            code.push(CLOSE);
            done.push((v, code, order));
        }
    }
    let (_, code, order) = done.pop().expect("root processed");
    (code, order)
}

/// Code of `t` rooted at `root`.
pub fn rooted_tree_code(t: &Tree, root: usize) -> CanonicalCode {
    CanonicalCode(rooted_form(t.adjacency(), root, None).0)
}

/// Code of the subtree hanging below `child` when its parent is `parent`.
pub fn branch_code(t: &Tree, parent: usize, child: usize) -> CanonicalCode {
    CanonicalCode(rooted_form(t.adjacency(), child, Some(parent)).0)
}

/// Vertices minimizing the largest remaining component (one or two).
pub fn centroids(t: &Tree) -> Vec<usize> {
    let n = t.len();
    if n == 1 {
        return vec![0];
    }
    let (order, parent) = bfs_order(t, 0);
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let weight = |v: usize| {
        let mut worst = n - size[v];
        for &w in t.neighbors(v) {
            if w != parent[v] {
                worst = worst.max(size[w]);
            }
        }
        worst
    };
    let best = (0..n).map(weight).min().expect("nonempty");
    (0..n).filter(|&v| weight(v) == best).collect()
}

pub(crate) fn bfs_order(t: &Tree, root: usize) -> (Vec<usize>, Vec<usize>) {
    let n = t.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    seen[root] = true;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    (order, parent)
}

/// Canonical form of a free tree: rooted at its centroid, taking the smaller
/// code when there are two centroids.
pub fn free_tree_form(t: &Tree) -> CanonicalForm {
    centroids(t)
        .into_iter()
        .map(|c| {
            let (code, order) = rooted_form(t.adjacency(), c, None);
            CanonicalForm { code: CanonicalCode(code), order }
        })
        .min_by(|a, b| a.code.cmp(&b.code))
        .expect("at least one centroid")
}

pub fn free_tree_code(t: &Tree) -> CanonicalCode {
    free_tree_form(t).code
}

/// Canonical form of a piece; with `root_labels`, each root's label becomes
/// part of its identity so that only label-preserving isomorphisms count.
///
/// `order` lists branch vertices; the root order is returned separately.
pub fn piece_form(piece: &RootedPiece, root_labels: Option<&[u32]>) -> (CanonicalForm, Vec<usize>) {
    let adj: Vec<Vec<usize>> = (0..piece.len()).map(|v| piece.neighbors(v).to_vec()).collect();
    let mut roots: Vec<(Vec<u32>, Vec<usize>, usize)> = (0..piece.root_count())
        .map(|r| {
            let mut branches: Vec<(Vec<u32>, Vec<usize>)> =
                piece.tops(r).iter().map(|&t| rooted_form(&adj, t, None)).collect();
            branches.sort_by(|a, b| a.0.cmp(&b.0));
            let mut code = vec![ROOT];
            if let Some(labels) = root_labels {
                code.push(labels[r]);
            }
            let mut order = Vec::new();
            for (c, o) in branches {
                code.extend(c);
                order.extend(o);
            }
            code.push(CLOSE);
            (code, order, r)
        })
        .collect();
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    let mut code = Vec::new();
    let mut order = Vec::new();
    let mut root_order = Vec::new();
    for (c, o, r) in roots {
        code.extend(c);
        order.extend(o);
        root_order.push(r);
    }
    (CanonicalForm { code: CanonicalCode(code), order }, root_order)
}

/// Shape code of a piece, ignoring root labels.
pub fn canonical_code(piece: &RootedPiece) -> CanonicalCode {
    piece_form(piece, None).0.code
}

/// Code of a piece together with the labels on its roots.
pub fn labeled_piece_code(piece: &RootedPiece, root_labels: &[u32]) -> CanonicalCode {
    piece_form(piece, Some(root_labels)).0.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf_pieces_agree() {
        assert_eq!(canonical_code(&RootedPiece::path(1)), canonical_code(&RootedPiece::leaves(1)));
    }

    #[test]
    fn path_vs_cherry() {
        assert_ne!(canonical_code(&RootedPiece::path(2)), canonical_code(&RootedPiece::leaves(2)));
    }

    #[test]
    fn labels_distinguish_roots() {
        let p = RootedPiece::new(3, 2, &[(1, 2)], &[(0, 0), (1, 1)]).unwrap();
        assert_ne!(labeled_piece_code(&p, &[0, 1]), labeled_piece_code(&p, &[1, 0]));
        // swapping the roots of the piece itself swaps which label goes where
        let q = RootedPiece::new(3, 2, &[(0, 1)], &[(0, 0), (1, 2)]).unwrap();
        assert_eq!(labeled_piece_code(&p, &[0, 1]), labeled_piece_code(&q, &[1, 0]));
        assert_eq!(canonical_code(&p), canonical_code(&q));
    }

    #[test]
    fn centroid_of_path() {
        assert_eq!(centroids(&Tree::path(5)), vec![2]);
        assert_eq!(centroids(&Tree::path(4)), vec![1, 2]);
    }

    #[test]
    fn free_code_ignores_labels() {
        let t = Tree::spider(&[1, 2, 3]);
        let perm = [6, 2, 4, 0, 1, 5, 3];
        assert_eq!(free_tree_code(&t), free_tree_code(&t.permuted(&perm)));
        assert_ne!(free_tree_code(&t), free_tree_code(&Tree::path(7)));
    }
}
