//! Splitting a tree into a core and a small rooted piece.
//!
//! Work happens near one end `v_0` of a longest path `v_0 .. v_L`. The tree
//! is rooted at `v_L`, so the children of a vertex are the neighbors away
//! from the far end, and every subtree hanging below `v_i` has depth at most
//! `i`. A plan picks one or two roots close to `v_0` and some of their child
//! subtrees; those subtrees form the piece and everything else, roots
//! included, stays in the core.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::canon::{branch_code, CanonicalCode};
use crate::graph::{RootedPiece, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("tree on {n} vertices is too small for a piece of {s}")]
    TooSmall { n: usize, s: usize },
    #[error("target size {0} outside 1..=7")]
    Target(usize),
    #[error("no split of a {n}-vertex tree into a piece of {s} (longest path {path:?})")]
    Exhausted { n: usize, s: usize, path: Vec<usize> },
    #[error("plan does not fit this tree")]
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanKind {
    /// One root, piece of exactly `s` vertices.
    ExactTree,
    /// One root, piece of `s - 1` vertices; the core keeps one extra vertex.
    ShortTree,
    /// Two roots, pieces totaling `s` vertices.
    TwoRootForest,
}

/// Roots (tree vertices) and, for each root, the children whose subtrees
/// move into the piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitPlan {
    pub kind: PlanKind,
    pub target: usize,
    pub roots: Vec<usize>,
    pub branches: Vec<Vec<usize>>,
}

impl SplitPlan {
    pub fn piece_len(&self, t: &Tree) -> usize {
        let ctx = Layout::new(t);
        self.branches.iter().flatten().map(|&c| ctx.size[c]).sum()
    }
}

/// A plan carried out: both halves with their index maps into the tree.
#[derive(Debug, Clone)]
pub struct Split {
    pub core: Tree,
    /// core index to tree vertex
    pub core_map: Vec<usize>,
    pub piece: RootedPiece,
    /// piece vertex to tree vertex
    pub piece_map: Vec<usize>,
    /// core index of each root
    pub root_in_core: Vec<usize>,
}

impl Split {
    /// Glues the halves back together, in the original tree's indices.
    pub fn paste(&self) -> Tree {
        let n = self.core.len() + self.piece.len();
        let mut edges: Vec<(usize, usize)> =
            self.core.edges().iter().map(|&(u, v)| (self.core_map[u], self.core_map[v])).collect();
        edges.extend(self.piece.internal_edges().iter().map(|&(u, v)| (self.piece_map[u], self.piece_map[v])));
        for r in 0..self.piece.root_count() {
            let root = self.core_map[self.root_in_core[r]];
            edges.extend(self.piece.tops(r).iter().map(|&t| (root, self.piece_map[t])));
        }
        Tree::from_edges(n, &edges).expect("pasting a split yields a tree")
    }
}

/// The tree rooted at the far end of its longest path.
struct Layout {
    path: Vec<usize>,
    children: Vec<Vec<usize>>,
    size: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl Layout {
    fn new(t: &Tree) -> Layout {
        let path = t.longest_path();
        let far = *path.last().expect("nonempty path");
        let n = t.len();
        let (_, parent) = t.bfs(far);
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if v != far {
                children[parent[v]].push(v);
            }
        }
        let mut size = vec![1; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut stack = vec![(far, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                for &c in &children[v] {
                    size[v] += size[c];
                }
                tout[v] = clock;
                continue;
            }
            tin[v] = clock;
            clock += 1;
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                stack.push((c, false));
            }
        }
        Layout { path, children, size, tin, tout }
    }

    /// `x` lies in the subtree of `c`.
    fn below(&self, x: usize, c: usize) -> bool {
        self.tin[c] <= self.tin[x] && self.tin[x] < self.tout[c]
    }
}

/// Child classes of `x` (subtrees up to `limit` vertices), grouped by
/// shape; members ascending.
fn child_classes(t: &Tree, ctx: &Layout, x: usize, limit: usize) -> Vec<(usize, Vec<usize>)> {
    let mut classes: BTreeMap<CanonicalCode, Vec<usize>> = BTreeMap::new();
    for &c in &ctx.children[x] {
        if ctx.size[c] <= limit {
            classes.entry(branch_code(t, x, c)).or_default().push(c);
        }
    }
    classes.into_values().map(|members| (ctx.size[members[0]], members)).collect()
}

/// Child selections at `x` with total size in `lo..=hi`, one per multiset
/// of shapes, always taking the lowest-indexed children of each shape.
/// Sorted lexicographically by chosen children.
fn selections(t: &Tree, ctx: &Layout, x: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let classes = child_classes(t, ctx, x, hi);
    let mut out = Vec::new();
    fn go(i: usize, left: usize, used: usize, lo: usize, classes: &[(usize, Vec<usize>)], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == classes.len() {
            if used >= lo && used > 0 {
                let mut pick = cur.clone();
                pick.sort_unstable();
                out.push(pick);
            }
            return;
        }
        let (size, members) = &classes[i];
        let mut taken = 0;
        loop {
            go(i + 1, left - taken * size, used + taken * size, lo, classes, cur, out);
            if taken == members.len() || (taken + 1) * size > left {
                break;
            }
            cur.push(members[taken]);
            taken += 1;
        }
        cur.truncate(cur.len() - taken);
    }
    go(0, hi, 0, lo, &classes, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Debug, Clone, Copy)]
enum Stage {
    Single(PlanKind, usize),
    PathPairs(usize),
    Local(usize),
}

/// Lazily generated plans in preference order: every exact-size plan (by
/// root position along the path), then every short plan, then every
/// two-root plan near the path (by the farther root's distance from `v_0`).
///
/// The path alone is not always enough: a bulky subtree hanging off the
/// path can leave every root on or next to it with only oversized
/// branches. The last stages therefore work around each vertex whose
/// subtree exceeds `s` while all of its child subtrees fit within `s`,
/// nearest to `v_0` first.
pub fn split_plans(t: &Tree, s: usize) -> Result<impl Iterator<Item = SplitPlan> + '_, SplitError> {
    if !(1..=7).contains(&s) {
        return Err(SplitError::Target(s));
    }
    if t.len() < s + 1 {
        return Err(SplitError::TooSmall { n: t.len(), s });
    }
    let ctx = Layout::new(t);
    let reach = s.min(ctx.path.len() - 1);
    let mut stages: Vec<Stage> = (1..=reach).map(|i| Stage::Single(PlanKind::ExactTree, ctx.path[i])).collect();
    if s >= 2 {
        stages.extend((1..=reach).map(|i| Stage::Single(PlanKind::ShortTree, ctx.path[i])));
        stages.extend((2..=s).map(Stage::PathPairs));
    }
    let dist = t.distances_from(ctx.path[0]);
    let mut heavy: Vec<usize> = (0..t.len())
        .filter(|&h| ctx.size[h] > s && ctx.children[h].iter().all(|&c| ctx.size[c] <= s))
        .collect();
    heavy.sort_by_key(|&h| (dist[h], h));
    stages.extend(heavy.into_iter().map(Stage::Local));
    let candidates = root_candidates(t, &ctx, s);
    Ok(stages.into_iter().flat_map(move |stage| match stage {
        Stage::Single(kind, root) => single_plans(t, &ctx, kind, s, root),
        Stage::PathPairs(d) => pair_plans(t, &ctx, &candidates, s, Some(d)),
        Stage::Local(h) => {
            let mut out = single_plans(t, &ctx, PlanKind::ExactTree, s, h);
            if s >= 2 {
                out.extend(single_plans(t, &ctx, PlanKind::ShortTree, s, h));
                out.extend(pair_plans(t, &ctx, &local_candidates(t, &ctx, h), s, None));
            }
            out
        }
    }))
}

fn single_plans(t: &Tree, ctx: &Layout, kind: PlanKind, s: usize, root: usize) -> Vec<SplitPlan> {
    let p = if kind == PlanKind::ExactTree { s } else { s - 1 };
    selections(t, ctx, root, p, p)
        .into_iter()
        .map(|pick| SplitPlan { kind, target: s, roots: vec![root], branches: vec![pick] })
        .collect()
}

/// Every plan from [`split_plans`], collected; fails if there are none.
pub fn find_splits(t: &Tree, s: usize) -> Result<Vec<SplitPlan>, SplitError> {
    let plans: Vec<SplitPlan> = split_plans(t, s)?.collect();
    if plans.is_empty() {
        return Err(SplitError::Exhausted { n: t.len(), s, path: t.longest_path() });
    }
    Ok(plans)
}

/// Keeps at most two children of `v` per shape, skipping `except` and
/// leaves (a leaf has nothing to give as a root).
fn kept_children(t: &Tree, ctx: &Layout, v: usize, except: Option<usize>) -> Vec<usize> {
    let mut seen: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for &c in &ctx.children[v] {
        if Some(c) == except || ctx.children[c].is_empty() {
            continue;
        }
        let kept = seen.entry(branch_code(t, v, c)).or_insert(0);
        if *kept < 2 {
            *kept += 1;
            out.push(c);
        }
    }
    out
}

/// Candidate roots for two-root plans with their distance from `v_0`: path
/// vertices `v_1 .. v_s` and children of path vertices off the path, at
/// most two per (parent, shape).
fn root_candidates(t: &Tree, ctx: &Layout, s: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (j, &v) in ctx.path.iter().enumerate().take(s + 1).skip(1) {
        out.push((v, j));
        if j < s {
            out.extend(kept_children(t, ctx, v, Some(ctx.path[j - 1])).into_iter().map(|c| (c, j + 1)));
        }
    }
    out.sort_by_key(|&(v, d)| (d, v));
    out
}

/// `h` itself, then its children (two per shape) and everything below
/// those, tagged with depth below `h`.
fn local_candidates(t: &Tree, ctx: &Layout, h: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(h, 0)];
    let mut stack: Vec<(usize, usize)> = kept_children(t, ctx, h, None).into_iter().map(|c| (c, 1)).rev().collect();
    while let Some((v, d)) = stack.pop() {
        out.push((v, d));
        stack.extend(ctx.children[v].iter().rev().filter(|&&c| !ctx.children[c].is_empty()).map(|&c| (c, d + 1)));
    }
    out
}

/// Two-root plans where the later root `b` has tag `d` (any tag when
/// `None`), the earlier root coming before it in `candidates`.
fn pair_plans(t: &Tree, ctx: &Layout, candidates: &[(usize, usize)], s: usize, d: Option<usize>) -> Vec<SplitPlan> {
    let mut out = Vec::new();
    let opts: Vec<Vec<Vec<usize>>> = candidates.iter().map(|&(v, _)| selections(t, ctx, v, 1, s - 1)).collect();
    let sized = |pick: &Vec<usize>| pick.iter().map(|&c| ctx.size[c]).sum::<usize>();
    for (bi, &(b, db)) in candidates.iter().enumerate() {
        if d.is_some_and(|d| d != db) {
            continue;
        }
        for (ai, &(a, _)) in candidates[..bi].iter().enumerate() {
            for pa in &opts[ai] {
                if pa.iter().any(|&c| ctx.below(b, c)) {
                    continue;
                }
                for pb in &opts[bi] {
                    if sized(pa) + sized(pb) != s || pb.iter().any(|&c| ctx.below(a, c)) {
                        continue;
                    }
                    out.push(SplitPlan {
                        kind: PlanKind::TwoRootForest,
                        target: s,
                        roots: vec![a, b],
                        branches: vec![pa.clone(), pb.clone()],
                    });
                }
            }
        }
    }
    out
}

/// Cuts the chosen subtrees off. Piece vertices and core vertices are each
/// indexed in ascending tree order.
pub fn apply_split(t: &Tree, plan: &SplitPlan) -> Result<Split, SplitError> {
    let n = t.len();
    if plan.roots.len() != plan.branches.len() || plan.roots.iter().any(|&r| r >= n) {
        return Err(SplitError::Mismatch);
    }
    let mut in_piece = vec![false; n];
    let mut stack = Vec::new();
    for (&r, picks) in plan.roots.iter().zip(&plan.branches) {
        if picks.is_empty() {
            return Err(SplitError::Mismatch);
        }
        for &c in picks {
            if c >= n || !t.neighbors(r).contains(&c) || in_piece[c] {
                return Err(SplitError::Mismatch);
            }
            in_piece[c] = true;
            stack.push((c, r));
            while let Some((u, from)) = stack.pop() {
                for &w in t.neighbors(u) {
                    if w != from {
                        if in_piece[w] {
                            return Err(SplitError::Mismatch);
                        }
                        in_piece[w] = true;
                        stack.push((w, u));
                    }
                }
            }
        }
    }
    if plan.roots.iter().any(|&r| in_piece[r]) {
        return Err(SplitError::Mismatch);
    }
    let keep: Vec<bool> = in_piece.iter().map(|&x| !x).collect();
    let (core, core_map) = t.induced(&keep);
    let mut core_of = vec![usize::MAX; n];
    for (i, &v) in core_map.iter().enumerate() {
        core_of[v] = i;
    }
    let piece_map: Vec<usize> = (0..n).filter(|&v| in_piece[v]).collect();
    let mut piece_of = vec![usize::MAX; n];
    for (i, &v) in piece_map.iter().enumerate() {
        piece_of[v] = i;
    }
    let internal: Vec<_> = t
        .edges()
        .iter()
        .filter(|&&(u, v)| in_piece[u] && in_piece[v])
        .map(|&(u, v)| (piece_of[u], piece_of[v]))
        .collect();
    let root_edges: Vec<_> = plan
        .branches
        .iter()
        .enumerate()
        .flat_map(|(r, picks)| picks.iter().map(move |&c| (r, c)))
        .map(|(r, c)| (r, piece_of[c]))
        .collect();
    let piece = RootedPiece::new(piece_map.len(), plan.roots.len(), &internal, &root_edges)
        .map_err(|_| SplitError::Mismatch)?;
    let root_in_core = plan.roots.iter().map(|&r| core_of[r]).collect();
    Ok(Split { core, core_map, piece, piece_map, root_in_core })
}

/// Largest distance from the start of the longest path to a root of
/// `plan`.
pub fn root_reach(t: &Tree, plan: &SplitPlan) -> usize {
    let ctx = Layout::new(t);
    let dist = t.distances_from(ctx.path[0]);
    plan.roots.iter().map(|&r| dist[r]).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_code;

    #[test]
    fn fourteen_path() {
        let t = Tree::path(14);
        let plans = find_splits(&t, 7).unwrap();
        let first = &plans[0];
        assert_eq!(first.kind, PlanKind::ExactTree);
        let split = apply_split(&t, first).unwrap();
        assert_eq!(split.core.len(), 7);
        assert!(split.core.classify() == crate::graph::TreeClass::Caterpillar && split.core.diameter() == 6);
        assert_eq!(canonical_code(&split.piece), canonical_code(&RootedPiece::path(7)));
        assert_eq!(split.paste().edge_set(), t.edge_set());
    }

    #[test]
    fn nine_star() {
        let t = Tree::star(10);
        let plans = find_splits(&t, 7).unwrap();
        let split = apply_split(&t, &plans[0]).unwrap();
        assert_eq!(split.core_map[split.root_in_core[0]], 0);
        assert_eq!(canonical_code(&split.piece), canonical_code(&RootedPiece::leaves(7)));
        assert_eq!(split.core.len(), 3);
    }

    #[test]
    fn too_small() {
        assert!(matches!(find_splits(&Tree::path(7), 7), Err(SplitError::TooSmall { .. })));
    }

    #[test]
    fn plans_respect_sizes() {
        let t = Tree::spider(&[3, 3, 2, 2, 1]);
        for s in 5..=7 {
            for plan in find_splits(&t, s).unwrap() {
                let split = apply_split(&t, &plan).unwrap();
                let want = match plan.kind {
                    PlanKind::ShortTree => s - 1,
                    _ => s,
                };
                assert_eq!(split.piece.len(), want);
                assert_eq!(split.piece.root_count(), plan.roots.len());
                assert_eq!(split.paste().edge_set(), t.edge_set());
                assert!(root_reach(&t, &plan) <= s);
            }
        }
    }
}
