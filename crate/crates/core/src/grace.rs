//! Sequential labelings of caterpillars.
//!
//! Both bipartition classes are listed along the spine and numbered with
//! consecutive residues, class after class. Walking the caterpillar edge by
//! edge, exactly one endpoint index advances at each step, so the edge
//! weights are consecutive too and every count profile comes out balanced.

use thiserror::Error;

use crate::cordiality::{check_def_2_10, Labeling};
use crate::graph::{RootedPiece, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraceError {
    #[error("tree is not a caterpillar")]
    NotCaterpillar,
    #[error("modulus must be at least 2, got {0}")]
    Modulus(u32),
    #[error("piece must have exactly one root")]
    RootCount,
    #[error("root must hang from a single branch")]
    RootDegree,
    #[error("root is not within distance one of an end of a longest path")]
    RootPosition,
    #[error("piece has {p} vertices but the modulus is {k}")]
    SizeMismatch { p: usize, k: u32 },
    #[error("no offset gives the root neighbor label {0} with a balanced piece")]
    Unreachable(u32),
}

/// Spine and the two ordered bipartition classes; `part_a` holds the first
/// spine vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaterpillarLayout {
    pub spine: Vec<usize>,
    pub part_a: Vec<usize>,
    pub part_b: Vec<usize>,
}

impl CaterpillarLayout {
    /// Checks disjoint cover, crossing edges and spine order.
    pub fn is_consistent(&self, t: &Tree) -> bool {
        let mut side = vec![None; t.len()];
        for (s, part) in [(0, &self.part_a), (1, &self.part_b)] {
            for &v in part {
                if side[v].replace(s).is_some() {
                    return false;
                }
            }
        }
        if side.contains(&None) || t.edges().iter().any(|&(u, v)| side[u] == side[v]) {
            return false;
        }
        [&self.part_a, &self.part_b].iter().all(|part| {
            let on_spine: Vec<usize> = part
                .iter()
                .filter_map(|v| self.spine.iter().position(|s| s == v))
                .collect();
            on_spine.windows(2).all(|w| w[0] < w[1])
        })
    }
}

/// Lays out a caterpillar along the longest path reported by the tree,
/// read from its lower-indexed end.
pub fn layout(t: &Tree) -> Result<CaterpillarLayout, GraceError> {
    let mut spine = t.longest_path();
    if spine.last() < spine.first() {
        spine.reverse();
    }
    layout_along(t, spine)
}

fn layout_along(t: &Tree, spine: Vec<usize>) -> Result<CaterpillarLayout, GraceError> {
    let n = t.len();
    let mut key = vec![usize::MAX; n];
    for (i, &v) in spine.iter().enumerate() {
        key[v] = i;
    }
    for v in 0..n {
        if key[v] == usize::MAX {
            key[v] = t
                .neighbors(v)
                .iter()
                .filter_map(|&w| spine.iter().position(|&s| s == w))
                .min()
                .ok_or(GraceError::NotCaterpillar)?;
        }
    }
    let dist = t.distances_from(spine[0]);
    let mut part_a: Vec<usize> = (0..n).filter(|&v| dist[v].is_multiple_of(2)).collect();
    let mut part_b: Vec<usize> = (0..n).filter(|&v| dist[v] % 2 == 1).collect();
    part_a.sort_by_key(|&v| (key[v], v));
    part_b.sort_by_key(|&v| (key[v], v));
    Ok(CaterpillarLayout { spine, part_a, part_b })
}

fn sequential(n: usize, first: &[usize], second: &[usize], k: u32, offset: u32) -> Vec<u32> {
    let mut labels = vec![0; n];
    for (i, &v) in first.iter().chain(second).enumerate() {
        labels[v] = ((offset as usize + i) % k as usize) as u32;
    }
    labels
}

/// Part A gets `offset, offset+1, ...` in layout order, part B continues.
pub fn grace_label(t: &Tree, k: u32, offset: u32) -> Result<Labeling, GraceError> {
    if k < 2 {
        return Err(GraceError::Modulus(k));
    }
    let lay = layout(t)?;
    Ok(Labeling::new(k, sequential(t.len(), &lay.part_a, &lay.part_b, k, offset % k)))
}

/// Labels a one-root caterpillar piece with `k = p` so that every weight
/// appears once: the root's class is numbered first from 0, so the root
/// gets 0 and label 0 is the only repeat.
pub fn rooted_grace(piece: &RootedPiece, k: u32) -> Result<Labeling, GraceError> {
    if piece.root_count() != 1 {
        return Err(GraceError::RootCount);
    }
    if k < 2 {
        return Err(GraceError::Modulus(k));
    }
    if piece.len() != k as usize {
        return Err(GraceError::SizeMismatch { p: piece.len(), k });
    }
    let (tree, back) = piece.with_root(0);
    let diameter = tree.diameter();
    let start = std::iter::once(0)
        .chain(tree.neighbors(0).iter().copied().filter(|&v| tree.degree(v) == 1))
        .find(|&c| tree.degree(c) == 1 && tree.distances_from(c).into_iter().max() == Some(diameter))
        .ok_or(GraceError::RootPosition)?;
    let (dist, parent) = tree.bfs(start);
    let far = (0..tree.len()).find(|&v| dist[v] == diameter).expect("diameter is attained");
    let mut spine = vec![far];
    while *spine.last().unwrap() != start {
        spine.push(parent[*spine.last().unwrap()]);
    }
    spine.reverse();
    let lay = layout_along(&tree, spine)?;
    let (first, second) =
        if lay.part_a.contains(&0) { (&lay.part_a, &lay.part_b) } else { (&lay.part_b, &lay.part_a) };
    let labels = sequential(tree.len(), first, second, k, 0);
    debug_assert_eq!(labels[0], 0);
    Ok(Labeling::with_roots(k, (1..tree.len()).map(|i| labels[i]).collect::<Vec<_>>(), vec![0])
        .reindexed(&back[1..]))
}

/// Labels a one-branch caterpillar piece under a root labeled 0 so that the
/// root's neighbor gets `w` (the root edge then has weight `w`), and checks
/// that the piece is balanced with `w` as the distinguished weight.
pub fn grace_with_neighbor_label(piece: &RootedPiece, k: u32, w: u32) -> Result<Labeling, GraceError> {
    if piece.root_count() != 1 {
        return Err(GraceError::RootCount);
    }
    if k < 2 {
        return Err(GraceError::Modulus(k));
    }
    let branch = piece.branch_tree().ok_or(GraceError::RootDegree)?;
    let top = piece.tops(0)[0];
    let at_zero = grace_label(&branch, k, 0)?;
    let offset = (w % k + k - at_zero.labels[top]) % k;
    let f = grace_label(&branch, k, offset)?;
    debug_assert_eq!(f.labels[top], w % k);
    let out = Labeling::with_roots(k, f.labels, vec![0]);
    match check_def_2_10(piece, &[0], w % k, &out) {
        Ok(true) => Ok(out),
        _ => Err(GraceError::Unreachable(w)),
    }
}

impl Labeling {
    /// Moves `labels[i]` to position `targets[i]`.
    fn reindexed(mut self, targets: &[usize]) -> Labeling {
        let mut labels = vec![0; self.labels.len()];
        for (i, &t) in targets.iter().enumerate() {
            labels[t] = self.labels[i];
        }
        self.labels = labels;
        self
    }
}
