//! Complete backtracking search for labelings under count constraints.
//!
//! Vertices are assigned in DFS preorder, so each new vertex closes exactly
//! one edge (to its parent or its root) and both the label and the weight
//! counters can be checked on the spot.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::cordiality::{check_def_2_10, is_k_cordial, CountProfile, Labeling};
use crate::graph::canon::{piece_form, rooted_tree_code, CanonicalCode};
use crate::graph::{End, RootedPiece, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("inconsistent constraint spec: {0}")]
    InconsistentSpec(String),
    #[error("node budget of {0} exceeded")]
    BudgetExceeded(u64),
}

/// The distinguished weight of the rooted-forest condition: at the end its
/// count must be at least every other count and at most `slack` above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpecialWeight {
    pub weight: u32,
    pub slack: usize,
}

/// Bounds on the final counts, on top of an already labeled context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSpec {
    pub k: u32,
    pub base_v: Vec<usize>,
    pub base_e: Vec<usize>,
    pub cap_v: Vec<usize>,
    pub floor_v: Vec<usize>,
    pub cap_e: Vec<usize>,
    pub floor_e: Vec<usize>,
    pub special_weight: Option<SpecialWeight>,
    pub fixed: BTreeMap<End, u32>,
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

impl ConstraintSpec {
    /// No context and no bounds.
    pub fn unconstrained(k: u32) -> ConstraintSpec {
        let z = vec![0; k as usize];
        let max = vec![usize::MAX; k as usize];
        ConstraintSpec {
            k,
            base_v: z.clone(),
            base_e: z.clone(),
            cap_v: max.clone(),
            floor_v: z.clone(),
            cap_e: max,
            floor_e: z,
            special_weight: None,
            fixed: BTreeMap::new(),
        }
    }

    /// Cordial bounds for a structure with the given totals.
    pub fn cordial(k: u32, vertices: usize, edges: usize) -> ConstraintSpec {
        ConstraintSpec::cordial_over(&CountProfile::zero(k), vertices, edges)
    }

    /// Cordial bounds for `base` plus `vertices` new vertices and `edges`
    /// new edges.
    pub fn cordial_over(base: &CountProfile, vertices: usize, edges: usize) -> ConstraintSpec {
        let k = base.k();
        let kk = k as usize;
        let nv = base.vertex_total() + vertices;
        let ne = base.edge_total() + edges;
        ConstraintSpec {
            k,
            base_v: base.v_counts.clone(),
            base_e: base.e_counts.clone(),
            cap_v: vec![ceil_div(nv, kk); kk],
            floor_v: vec![nv / kk; kk],
            cap_e: vec![ceil_div(ne, kk); kk],
            floor_e: vec![ne / kk; kk],
            special_weight: None,
            fixed: BTreeMap::new(),
        }
    }

    pub fn fix(mut self, at: End, label: u32) -> ConstraintSpec {
        self.fixed.insert(at, label);
        self
    }

    pub fn with_roots(mut self, roots: &[u32]) -> ConstraintSpec {
        for (r, &g) in roots.iter().enumerate() {
            self.fixed.insert(End::Root(r), g);
        }
        self
    }

    fn root_labels(&self, count: usize) -> Result<Vec<u32>, SearchError> {
        (0..count)
            .map(|r| {
                self.fixed
                    .get(&End::Root(r))
                    .copied()
                    .ok_or_else(|| SearchError::InconsistentSpec(format!("root {r} has no label")))
            })
            .collect()
    }

    fn has_vertex_fixings(&self) -> bool {
        self.fixed.keys().any(|e| matches!(e, End::Vertex(_)))
    }

    /// Structural problems only; caps too small to hold the totals are a
    /// pigeonhole exhaustion, not an error.
    fn check(&self, vertices: usize, roots: usize) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InconsistentSpec(m));
        let k = self.k as usize;
        if self.k < 2 {
            return bad(format!("modulus {} below 2", self.k));
        }
        for (name, v) in [
            ("base_v", &self.base_v),
            ("base_e", &self.base_e),
            ("cap_v", &self.cap_v),
            ("floor_v", &self.floor_v),
            ("cap_e", &self.cap_e),
            ("floor_e", &self.floor_e),
        ] {
            if v.len() != k {
                return bad(format!("{name} has length {} instead of {k}", v.len()));
            }
        }
        for (caps, floors) in [(&self.cap_v, &self.floor_v), (&self.cap_e, &self.floor_e)] {
            if caps.iter().zip(floors).any(|(c, f)| f > c) {
                return bad("a floor exceeds its cap".into());
            }
        }
        if let Some(sw) = self.special_weight {
            if sw.weight >= self.k {
                return bad(format!("special weight {} out of range", sw.weight));
            }
        }
        for (&at, &label) in &self.fixed {
            if label >= self.k {
                return bad(format!("fixed label {label} out of range"));
            }
            let ok = match at {
                End::Vertex(v) => v < vertices,
                End::Root(r) => r < roots,
            };
            if !ok {
                return bad(format!("fixed endpoint {at:?} out of range"));
            }
        }
        Ok(())
    }

    /// Everything the outcome depends on besides the structure itself.
    fn signature(&self) -> Vec<i64> {
        let mut sig = vec![self.k as i64];
        let clamp = |x: usize| x.min(i64::MAX as usize / 2) as i64;
        for (base, cap, floor) in
            [(&self.base_v, &self.cap_v, &self.floor_v), (&self.base_e, &self.cap_e, &self.floor_e)]
        {
            for i in 0..base.len() {
                sig.push(clamp(cap[i]) - clamp(base[i]));
                sig.push((clamp(floor[i]) - clamp(base[i])).max(0));
            }
        }
        if let Some(sw) = self.special_weight {
            sig.extend([-1, sw.weight as i64, sw.slack as i64]);
            sig.extend(self.base_e.iter().map(|&x| clamp(x)));
        }
        sig
    }
}

/// What to label.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Tree(&'a Tree),
    Piece(&'a RootedPiece),
}

impl<'a> From<&'a Tree> for Target<'a> {
    fn from(t: &'a Tree) -> Self {
        Target::Tree(t)
    }
}

impl<'a> From<&'a RootedPiece> for Target<'a> {
    fn from(p: &'a RootedPiece) -> Self {
        Target::Piece(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Labeling),
    Exhausted,
}

impl SearchOutcome {
    pub fn found(self) -> Option<Labeling> {
        match self {
            SearchOutcome::Found(f) => Some(f),
            SearchOutcome::Exhausted => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Parent {
    None,
    Var(usize),
    Label(u32),
}

/// Variables in assignment order.
struct Problem {
    order: Vec<usize>,
    parent: Vec<Parent>,
    fixed: Vec<Option<u32>>,
}

fn tree_problem(t: &Tree, spec: &ConstraintSpec) -> Problem {
    let n = t.len();
    let mut pos = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut parent = Vec::with_capacity(n);
    let mut stack = vec![(0usize, Parent::None)];
    while let Some((v, par)) = stack.pop() {
        pos[v] = order.len();
        order.push(v);
        parent.push(par);
        for &w in t.neighbors(v).iter().rev() {
            if pos[w] == usize::MAX {
                stack.push((w, Parent::Var(pos[v])));
            }
        }
    }
    let fixed = order.iter().map(|&v| spec.fixed.get(&End::Vertex(v)).copied()).collect();
    Problem { order, parent, fixed }
}

fn piece_problem(piece: &RootedPiece, roots: &[u32], spec: &ConstraintSpec) -> (Problem, CanonicalCode) {
    let (form, _) = piece_form(piece, Some(roots));
    let mut top_of = vec![None; piece.len()];
    for (r, &g) in roots.iter().enumerate() {
        for &t in piece.tops(r) {
            top_of[t] = Some(g);
        }
    }
    let mut pos = vec![usize::MAX; piece.len()];
    let mut parent = Vec::with_capacity(piece.len());
    for (i, &v) in form.order.iter().enumerate() {
        pos[v] = i;
        let par = match top_of[v] {
            Some(g) => Parent::Label(g),
            None => Parent::Var(
                piece.neighbors(v).iter().map(|&w| pos[w]).find(|&p| p < i).expect("preorder parent"),
            ),
        };
        parent.push(par);
    }
    let fixed = form.order.iter().map(|&v| spec.fixed.get(&End::Vertex(v)).copied()).collect();
    (Problem { order: form.order, parent, fixed }, form.code)
}

/// Result of a run in assignment order.
fn run(problem: &Problem, spec: &ConstraintSpec, budget: Option<u64>) -> Result<Option<Vec<u32>>, SearchError> {
    let p = problem.order.len();
    let k = spec.k as usize;
    let mut cur_v = spec.base_v.clone();
    let mut cur_e = spec.base_e.clone();
    let mut edges_from = vec![0usize; p + 1];
    for i in (0..p).rev() {
        edges_from[i] = edges_from[i + 1] + usize::from(!matches!(problem.parent[i], Parent::None));
    }
    if cur_v.iter().zip(&spec.cap_v).any(|(c, cap)| c > cap) || cur_e.iter().zip(&spec.cap_e).any(|(c, cap)| c > cap)
    {
        return Ok(None);
    }
    let feasible = |cur_v: &[usize], cur_e: &[usize], i: usize| -> bool {
        let rv = p - i;
        let re = edges_from[i];
        let mut need = 0usize;
        let mut room = 0usize;
        for a in 0..k {
            need += spec.floor_v[a].saturating_sub(cur_v[a]);
            room = room.saturating_add(spec.cap_v[a] - cur_v[a]);
        }
        if need > rv || room < rv {
            return false;
        }
        need = 0;
        room = 0;
        for a in 0..k {
            need += spec.floor_e[a].saturating_sub(cur_e[a]);
            room = room.saturating_add(spec.cap_e[a] - cur_e[a]);
        }
        if need > re || room < re {
            return false;
        }
        if let Some(sw) = spec.special_weight {
            let l = sw.weight as usize;
            let top = (0..k).filter(|&a| a != l).map(|a| cur_e[a]).max().unwrap_or(0);
            if top > cur_e[l] + re {
                return false;
            }
        }
        true
    };
    let finished = |cur_e: &[usize]| match spec.special_weight {
        None => true,
        Some(sw) => {
            let l = cur_e[sw.weight as usize];
            cur_e.iter().all(|&c| c <= l && l - c <= sw.slack)
        }
    };
    if !feasible(&cur_v, &cur_e, 0) {
        return Ok(None);
    }
    if p == 0 {
        return Ok(finished(&cur_e).then(Vec::new));
    }
    let mut assigned = vec![0u32; p];
    let mut cands: Vec<Vec<u32>> = vec![Vec::new(); p];
    let mut next = vec![0usize; p];
    let mut nodes = 0u64;
    let weight_of = |assigned: &[u32], i: usize, x: u32| match problem.parent[i] {
        Parent::None => None,
        Parent::Var(j) => Some(((assigned[j] + x) % spec.k) as usize),
        Parent::Label(g) => Some(((g + x) % spec.k) as usize),
    };
    let candidates = |assigned: &[u32], cur_v: &[usize], cur_e: &[usize], i: usize| -> Vec<u32> {
        let mut out: Vec<u32> = match problem.fixed[i] {
            Some(x) => vec![x],
            None => (0..spec.k).collect(),
        };
        out.retain(|&x| {
            cur_v[x as usize] < spec.cap_v[x as usize]
                && weight_of(assigned, i, x).is_none_or(|w| cur_e[w] < spec.cap_e[w])
        });
        out.sort_by_key(|&x| (std::cmp::Reverse(spec.cap_v[x as usize] - cur_v[x as usize]), x));
        out
    };
    let mut depth = 0;
    cands[0] = candidates(&assigned, &cur_v, &cur_e, 0);
    loop {
        if next[depth] < cands[depth].len() {
            let x = cands[depth][next[depth]];
            next[depth] += 1;
            nodes += 1;
            if let Some(limit) = budget {
                if nodes > limit {
                    return Err(SearchError::BudgetExceeded(limit));
                }
            }
            assigned[depth] = x;
            let w = weight_of(&assigned, depth, x);
            cur_v[x as usize] += 1;
            if let Some(w) = w {
                cur_e[w] += 1;
            }
            if feasible(&cur_v, &cur_e, depth + 1) {
                if depth + 1 == p {
                    if finished(&cur_e) {
                        return Ok(Some(assigned));
                    }
                } else {
                    depth += 1;
                    cands[depth] = candidates(&assigned, &cur_v, &cur_e, depth);
                    next[depth] = 0;
                    continue;
                }
            }
            cur_v[x as usize] -= 1;
            if let Some(w) = w {
                cur_e[w] -= 1;
            }
        } else {
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
            let x = assigned[depth];
            cur_v[x as usize] -= 1;
            if let Some(w) = weight_of(&assigned, depth, x) {
                cur_e[w] -= 1;
            }
        }
    }
}

fn unpermute(problem: &Problem, in_order: &[u32]) -> Vec<u32> {
    let mut labels = vec![0; in_order.len()];
    for (i, &v) in problem.order.iter().enumerate() {
        labels[v] = in_order[i];
    }
    labels
}

type MemoKey = (CanonicalCode, Vec<i64>);

/// Search entry point with an optional memo table shared between threads.
///
/// Pieces are always searched in their canonical vertex order, so a memo
/// hit returns exactly what a fresh search would have found.
pub struct Solver {
    memo: Option<RwLock<HashMap<MemoKey, Option<Vec<u32>>>>>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver { memo: Some(RwLock::new(HashMap::new())) }
    }

    pub fn without_memo() -> Solver {
        Solver { memo: None }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.read().expect("memo lock").len())
    }

    pub fn solve<'a>(&self, target: impl Into<Target<'a>>, spec: &ConstraintSpec) -> Result<SearchOutcome, SearchError> {
        self.solve_inner(target.into(), spec, None)
    }

    pub fn solve_budgeted<'a>(
        &self,
        target: impl Into<Target<'a>>,
        spec: &ConstraintSpec,
        max_nodes: u64,
    ) -> Result<SearchOutcome, SearchError> {
        self.solve_inner(target.into(), spec, Some(max_nodes))
    }

    fn solve_inner(&self, target: Target<'_>, spec: &ConstraintSpec, budget: Option<u64>) -> Result<SearchOutcome, SearchError> {
        match target {
            Target::Tree(t) => {
                spec.check(t.len(), 0)?;
                let problem = tree_problem(t, spec);
                let found = run(&problem, spec, budget)?;
                Ok(match found {
                    Some(x) => SearchOutcome::Found(Labeling::new(spec.k, unpermute(&problem, &x))),
                    None => SearchOutcome::Exhausted,
                })
            }
            Target::Piece(piece) => {
                spec.check(piece.len(), piece.root_count())?;
                let roots = spec.root_labels(piece.root_count())?;
                let (problem, code) = piece_problem(piece, &roots, spec);
                let memo = self.memo.as_ref().filter(|_| !spec.has_vertex_fixings());
                let key = memo.map(|_| (code, spec.signature()));
                let cached = match (memo, &key) {
                    (Some(m), Some(key)) => m.read().expect("memo lock").get(key).cloned(),
                    _ => None,
                };
                let found = match cached {
                    Some(hit) => hit,
                    None => {
                        let found = run(&problem, spec, budget)?;
                        if let (Some(m), Some(key)) = (memo, key) {
                            m.write().expect("memo lock").insert(key, found.clone());
                        }
                        found
                    }
                };
                Ok(match found {
                    Some(x) => SearchOutcome::Found(Labeling::with_roots(spec.k, unpermute(&problem, &x), roots)),
                    None => SearchOutcome::Exhausted,
                })
            }
        }
    }
}

/// Process-wide memoizing solver.
pub fn shared() -> &'static Solver {
    static SOLVER: OnceLock<Solver> = OnceLock::new();
    SOLVER.get_or_init(Solver::new)
}

/// Complete search through the shared solver.
pub fn solve<'a>(target: impl Into<Target<'a>>, spec: &ConstraintSpec) -> Result<SearchOutcome, SearchError> {
    shared().solve(target, spec)
}

/// A `k`-cordial labeling of `t`, if one exists.
pub fn exists_k_cordial(t: &Tree, k: u32) -> Option<Labeling> {
    match exists_k_cordial_budgeted(t, k, u64::MAX) {
        Ok(found) => found,
        Err(e) => panic!("unbudgeted cordial search failed: {e}"),
    }
}

/// Like [`exists_k_cordial`] but gives up after `max_nodes` assignments.
pub fn exists_k_cordial_budgeted(t: &Tree, k: u32, max_nodes: u64) -> Result<Option<Labeling>, SearchError> {
    let spec = ConstraintSpec::cordial(k, t.len(), t.edge_count());
    let found = Solver::without_memo().solve_budgeted(t, &spec, max_nodes)?.found();
    if let Some(f) = &found {
        assert!(is_k_cordial(t, f).expect("witness fits the tree").is_cordial(), "search returned a non-cordial witness");
    }
    Ok(found)
}

/// A labeling of `piece` under roots `g` meeting the rooted-forest balance
/// condition with distinguished weight `ell`.
pub fn def_2_10_witness(solver: &Solver, piece: &RootedPiece, g: &[u32], ell: u32, k: u32) -> Option<Labeling> {
    let p = piece.len();
    let kk = k as usize;
    for q in 0..=p {
        // other weights in [q, q+1], the distinguished one in [q, q+2]
        if q * kk > p {
            break;
        }
        if (kk - 1) * (q + 1) + q + 2 < p {
            continue;
        }
        let mut spec = ConstraintSpec::cordial(k, p, 0);
        spec.floor_e = vec![q; kk];
        spec.cap_e = vec![q + 1; kk];
        spec.cap_e[ell as usize] = q + 2;
        spec.special_weight = Some(SpecialWeight { weight: ell, slack: 2 });
        let spec = spec.with_roots(g);
        let outcome = solver.solve(piece, &spec).expect("rooted balance spec is consistent");
        if let SearchOutcome::Found(f) = outcome {
            assert!(check_def_2_10(piece, g, ell, &f).expect("witness fits the piece"), "invalid witness");
            return Some(f);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub g: Vec<u32>,
    pub ell: u32,
    pub labeling: Option<Labeling>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoveyCertificate {
    pub certified: bool,
    pub witnesses: Vec<Witness>,
}

impl HoveyCertificate {
    pub fn failures(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.labeling.is_none())
    }
}

/// Root labelings up to symmetry: root 0 is fixed to 0 (rotating every
/// label preserves the conditions once all `ell` are covered), and roots
/// with identical branches take nondecreasing labels.
pub fn root_labelings(piece: &RootedPiece, k: u32) -> Vec<Vec<u32>> {
    let r = piece.root_count();
    let codes: Vec<CanonicalCode> = (0..r).map(|i| rooted_tree_code(&piece.with_root(i).0, 0)).collect();
    let mut out = Vec::new();
    let mut g = vec![0u32; r];
    fn go(i: usize, g: &mut Vec<u32>, codes: &[CanonicalCode], k: u32, out: &mut Vec<Vec<u32>>) {
        if i == g.len() {
            out.push(g.clone());
            return;
        }
        let low = (0..i).rev().find(|&j| codes[j] == codes[i]).map_or(0, |j| g[j]);
        for x in low..k {
            g[i] = x;
            go(i + 1, g, codes, k, out);
        }
    }
    if r > 0 {
        go(1, &mut g, &codes, k, &mut out);
    }
    out
}

/// Checks the rooted-forest condition for every root labeling (up to the
/// symmetries of [`root_labelings`]) and every distinguished weight.
pub fn hovey_certify(shape: &RootedPiece, k: u32) -> HoveyCertificate {
    hovey_certify_with(shared(), shape, k)
}

pub fn hovey_certify_with(solver: &Solver, shape: &RootedPiece, k: u32) -> HoveyCertificate {
    let mut witnesses = Vec::new();
    for g in root_labelings(shape, k) {
        for ell in 0..k {
            let labeling = def_2_10_witness(solver, shape, &g, ell, k);
            witnesses.push(Witness { g: g.clone(), ell, labeling });
        }
    }
    HoveyCertificate { certified: witnesses.iter().all(|w| w.labeling.is_some()), witnesses }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_forced_by_caps() {
        let piece = RootedPiece::leaves(1);
        let mut spec = ConstraintSpec::unconstrained(7).with_roots(&[0]);
        spec.cap_e = vec![0, 0, 0, 1, 0, 0, 0];
        let f = solve(&piece, &spec).unwrap().found().unwrap();
        assert_eq!(f.labels, vec![3]);
        assert_eq!(f.roots, vec![0]);
    }

    #[test]
    fn pigeonhole_exhausts() {
        let mut spec = ConstraintSpec::unconstrained(7);
        spec.cap_v = vec![1, 1, 0, 0, 0, 0, 0];
        assert_eq!(solve(&Tree::path(3), &spec).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn inconsistent_specs() {
        let mut spec = ConstraintSpec::unconstrained(7);
        spec.floor_v = vec![1; 7];
        spec.cap_v = vec![0; 7];
        assert!(matches!(solve(&Tree::path(3), &spec), Err(SearchError::InconsistentSpec(_))));
        let spec = ConstraintSpec::unconstrained(7);
        assert!(matches!(solve(&RootedPiece::leaves(1), &spec), Err(SearchError::InconsistentSpec(_))));
    }

    #[test]
    fn spider_is_seven_cordial() {
        let t = Tree::spider(&[2, 2, 2]);
        let f = exists_k_cordial(&t, 7).unwrap();
        assert!(is_k_cordial(&t, &f).unwrap().is_cordial());
        assert!(exists_k_cordial(&Tree::path(2), 2).is_some());
    }

    #[test]
    fn budget_trips() {
        let t = Tree::path(40);
        assert_eq!(exists_k_cordial_budgeted(&t, 7, 5), Err(SearchError::BudgetExceeded(5)));
    }

    #[test]
    fn single_leaf_certifies() {
        let c = hovey_certify(&RootedPiece::leaves(1), 7);
        assert!(c.certified);
        assert_eq!(c.witnesses.len(), 7);
    }

    #[test]
    fn identical_roots_are_sorted() {
        let two = RootedPiece::new(2, 2, &[], &[(0, 0), (1, 1)]).unwrap();
        let gs = root_labelings(&two, 3);
        assert_eq!(gs, vec![vec![0, 0], vec![0, 1], vec![0, 2]]);
    }
}
