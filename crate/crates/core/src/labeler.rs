//! 7-cordial labelings of arbitrary trees by induction on the order.
//!
//! Trees with at most seven vertices are labeled directly. Above that the
//! residue of `n` mod 7 decides the step: for 1..=4 a leaf is peeled off
//! and put back once the rest is labeled, for 0, 5 and 6 a small rooted
//! piece is cut off, the core is labeled, and the piece is fitted to the
//! core's count profile.
//!
//! The induction runs as a loop: the top-down pass records what was removed
//! and the bottom-up pass undoes it, so deep trees never recurse.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::cordiality::{count_profile, is_k_cordial, minority_majority, CountProfile, Labeling};
use crate::decompose::{apply_split, split_plans, PlanKind, Split};
use crate::grace::{grace_label, grace_with_neighbor_label};
use crate::graph::canon::CanonicalCode;
use crate::graph::{canonical_code, RootedPiece, Tree};
use crate::search::{self, exists_k_cordial, root_labelings, ConstraintSpec, SearchOutcome};

pub const K: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("leaf attachment needs a core of 7m + j vertices with j <= 3, got j = {0}")]
    AttachPrecondition(usize),
    #[error("certificate does not match the tree")]
    Mismatch,
    #[error("no split of the {n}-vertex core could be completed; tried {plans} plans")]
    Exhausted { n: usize, plans: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceSource {
    Grace,
    Search,
}

/// `x -> (negate ? -x : x) + rotate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Transform {
    pub negate: bool,
    pub rotate: u32,
}

impl Transform {
    pub fn apply(self, x: u32) -> u32 {
        let x = if self.negate { (K - x) % K } else { x };
        (x + self.rotate) % K
    }

    pub fn is_identity(self) -> bool {
        !self.negate && self.rotate == 0
    }

    fn profile(self, p: &CountProfile) -> CountProfile {
        let p = if self.negate { p.negated() } else { p.clone() };
        p.rotated(self.rotate)
    }

    /// Rotations first, then negation followed by each rotation.
    pub fn all() -> impl Iterator<Item = Transform> {
        [false, true].into_iter().flat_map(|negate| (0..K).map(move |rotate| Transform { negate, rotate }))
    }
}

/// One step of the construction. Vertex ids refer to the labeled tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step {
    BaseCase { vertices: Vec<usize>, labels: Vec<u32>, source: PieceSource },
    LeafAttach { leaf: usize, parent: usize, label: u32 },
    Split {
        kind: PlanKind,
        roots: Vec<usize>,
        piece: Vec<usize>,
        piece_labels: Vec<u32>,
        transform: Transform,
        source: PieceSource,
        /// Set when no plan was certified up front and the core was labeled
        /// by a separate run, whose steps are recorded here.
        nested: Option<Vec<Step>>,
    },
}

impl Step {
    fn remap(self, map: &[usize]) -> Step {
        let m = |v: Vec<usize>| v.into_iter().map(|x| map[x]).collect();
        match self {
            Step::BaseCase { vertices, labels, source } => Step::BaseCase { vertices: m(vertices), labels, source },
            Step::LeafAttach { leaf, parent, label } => Step::LeafAttach { leaf: map[leaf], parent: map[parent], label },
            Step::Split { kind, roots, piece, piece_labels, transform, source, nested } => Step::Split {
                kind,
                roots: m(roots),
                piece: m(piece),
                piece_labels,
                transform,
                source,
                nested: nested.map(|steps| steps.into_iter().map(|s| s.remap(map)).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelingCertificate {
    pub labeling: Labeling,
    pub trace: Vec<Step>,
    pub verified: bool,
}

/// Piece shapes known to fit every core of the given residue.
fn certified_memo() -> &'static RwLock<HashMap<(CanonicalCode, usize), bool>> {
    static MEMO: OnceLock<RwLock<HashMap<(CanonicalCode, usize), bool>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Count profiles a core of `7m + residue` vertices can have, for `m = 1`;
/// larger `m` only adds the same constant to every count.
fn residue_profiles(residue: usize) -> Vec<CountProfile> {
    let k = K as usize;
    (0..k)
        .map(|x| match residue {
            0 => {
                let mut e = vec![1; k];
                e[x] = 0;
                CountProfile { v_counts: vec![1; k], e_counts: e }
            }
            _ => {
                let mut v = vec![1; k];
                v[x] = 2;
                CountProfile { v_counts: v, e_counts: vec![1; k] }
            }
        })
        .collect()
}

/// Whether `piece` can be fitted onto every cordially labeled core with
/// `7m + residue` vertices (`residue` 0 or 1), whatever the root labels.
pub fn piece_fits_every_core(piece: &RootedPiece, residue: usize) -> bool {
    let key = (canonical_code(piece), residue);
    if let Some(&hit) = certified_memo().read().expect("memo lock").get(&key) {
        return hit;
    }
    let ok = residue_profiles(residue).iter().all(|base| {
        root_labelings(piece, K).iter().all(|g| {
            let spec = ConstraintSpec::cordial_over(base, piece.len(), piece.len()).with_roots(g);
            matches!(search::solve(piece, &spec), Ok(SearchOutcome::Found(_)))
        })
    });
    certified_memo().write().expect("memo lock").insert(key, ok);
    ok
}

/// A piece labeling that fits a core with profile `core`, plus the
/// transform the core needs first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fitted {
    pub transform: Transform,
    pub piece_labels: Labeling,
    pub source: PieceSource,
}

/// Fits `piece` to a core with count profile `core` whose roots carry
/// `roots`. Tries the sequential fast path, then a search for each of the
/// 14 core transforms in turn.
pub fn fit_piece(core: &CountProfile, roots: &[u32], piece: &RootedPiece) -> Option<Fitted> {
    let p = piece.len();
    let fits = |t: Transform, f: &Labeling| {
        let mut total = t.profile(core);
        total.add(&count_profile(piece, f).expect("piece labeling fits"));
        total.is_cordial()
    };
    if piece.root_count() == 1 && piece.tops(0).len() == 1 {
        let t = Transform { negate: false, rotate: (K - roots[0]) % K };
        if let Ok(x) = minority_majority(&t.profile(core)) {
            if let [w] = x.minority_weights[..] {
                if let Ok(f) = grace_with_neighbor_label(piece, K, w) {
                    if fits(t, &f) {
                        return Some(Fitted { transform: t, piece_labels: f, source: PieceSource::Grace });
                    }
                }
            }
        }
    }
    for t in Transform::all() {
        let g: Vec<u32> = roots.iter().map(|&x| t.apply(x)).collect();
        let spec = ConstraintSpec::cordial_over(&t.profile(core), p, p).with_roots(&g);
        if let Ok(SearchOutcome::Found(f)) = search::solve(piece, &spec) {
            assert!(fits(t, &f), "search returned a piece labeling that breaks the whole");
            return Some(Fitted { transform: t, piece_labels: f, source: PieceSource::Search });
        }
    }
    None
}

/// Result of [`combine`]: the core labeling after its transform and the
/// labels of the piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combined {
    pub core_labels: Labeling,
    pub piece_labels: Labeling,
    pub transform: Transform,
    pub source: PieceSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error("no transform of the core admits a fitting piece labeling")]
    Failed,
    #[error("core labeling does not match the split")]
    Mismatch,
}

/// Labels the piece of `split` against the labeled core and checks the
/// pasted tree.
pub fn combine(split: &Split, core_labels: &Labeling) -> Result<Combined, CombineError> {
    let profile = count_profile(&split.core, core_labels).map_err(|_| CombineError::Mismatch)?;
    let roots: Vec<u32> = split.root_in_core.iter().map(|&r| core_labels.labels[r]).collect();
    let fitted = fit_piece(&profile, &roots, &split.piece).ok_or(CombineError::Failed)?;
    let core_labels = Labeling::new(K, core_labels.labels.iter().map(|&x| fitted.transform.apply(x)).collect());
    let whole = split.paste();
    let mut labels = vec![0; whole.len()];
    for (i, &v) in split.core_map.iter().enumerate() {
        labels[v] = core_labels.labels[i];
    }
    for (i, &v) in split.piece_map.iter().enumerate() {
        labels[v] = fitted.piece_labels.labels[i];
    }
    let report = is_k_cordial(&whole, &Labeling::new(K, labels)).expect("sizes match");
    if !report.is_cordial() {
        return Err(CombineError::Failed);
    }
    Ok(Combined { core_labels, piece_labels: fitted.piece_labels, transform: fitted.transform, source: fitted.source })
}

/// Smallest label for a new leaf under a vertex labeled `parent_label`
/// that keeps the profile cordial, for a labeled tree with profile `p`.
fn leaf_label(p: &CountProfile, parent_label: u32) -> Option<u32> {
    let n = p.vertex_total();
    let cap_v = (n + 1).div_ceil(K as usize);
    let cap_e = n.div_ceil(K as usize);
    (0..K).find(|&c| p.v_counts[c as usize] < cap_v && p.e_counts[((c + parent_label) % K) as usize] < cap_e)
}

/// Hangs a new leaf (index `core.len()`) from `at` and labels it with the
/// smallest label that keeps the labeling cordial.
pub fn attach_leaf(core: &Tree, cert: &LabelingCertificate, at: usize) -> Result<(Tree, LabelingCertificate), LabelError> {
    let j = core.len() % K as usize;
    if j > 3 {
        return Err(LabelError::AttachPrecondition(j));
    }
    let profile = count_profile(core, &cert.labeling).map_err(|_| LabelError::Mismatch)?;
    let c = leaf_label(&profile, cert.labeling.labels[at])
        .ok_or_else(|| LabelError::Internal("no admissible leaf label".into()))?;
    let tree = core.with_leaf(at);
    let mut labeling = cert.labeling.clone();
    labeling.labels.push(c);
    let mut trace = cert.trace.clone();
    trace.push(Step::LeafAttach { leaf: core.len(), parent: at, label: c });
    let verified = is_k_cordial(&tree, &labeling).expect("sizes match").is_cordial();
    Ok((tree, LabelingCertificate { labeling, trace, verified }))
}

enum Frame {
    Leaf { leaf: usize, parent: usize },
    Split { kind: PlanKind, roots: Vec<usize>, piece: RootedPiece, piece_map: Vec<usize> },
}

fn piece_size_for(n: usize) -> usize {
    match n % 7 {
        0 => 7,
        r => r,
    }
}

fn base_case(t: &Tree) -> (Labeling, PieceSource) {
    match grace_label(t, K, 0) {
        Ok(f) => (f, PieceSource::Grace),
        Err(_) => (exists_k_cordial(t, K).expect("every small tree is 7-cordial"), PieceSource::Search),
    }
}

/// A verified 7-cordial labeling of `t` with the steps that built it.
pub fn label_tree_7(t: &Tree) -> Result<LabelingCertificate, LabelError> {
    let n = t.len();
    let mut alive = vec![true; n];
    let mut labels = vec![u32::MAX; n];
    let mut frames = Vec::new();
    let mut trace = Vec::new();
    loop {
        let (cur, map) = t.induced(&alive);
        let m = cur.len();
        if m <= 7 {
            let (f, source) = base_case(&cur);
            for (i, &v) in map.iter().enumerate() {
                labels[v] = f.labels[i];
            }
            trace.push(Step::BaseCase { vertices: map, labels: f.labels, source });
            break;
        }
        if (1..=4).contains(&(m % 7)) {
            let leaf = cur.leaves().last().expect("a tree has leaves");
            let parent = cur.neighbors(leaf)[0];
            frames.push(Frame::Leaf { leaf: map[leaf], parent: map[parent] });
            alive[map[leaf]] = false;
            continue;
        }
        let s = piece_size_for(m);
        let mut chosen = None;
        for plan in split_plans(&cur, s).map_err(|e| LabelError::Internal(e.to_string()))? {
            let split = apply_split(&cur, &plan).map_err(|e| LabelError::Internal(e.to_string()))?;
            let residue = split.core.len() % 7;
            if piece_fits_every_core(&split.piece, residue) {
                chosen = Some((plan, split));
                break;
            }
        }
        if let Some((plan, split)) = chosen {
            let piece_map: Vec<usize> = split.piece_map.iter().map(|&v| map[v]).collect();
            for &v in &piece_map {
                alive[v] = false;
            }
            let roots = plan.roots.iter().map(|&r| map[r]).collect();
            frames.push(Frame::Split { kind: plan.kind, roots, piece: split.piece, piece_map });
            continue;
        }
        // Nothing fits every core: label cores one plan at a time instead.
        let mut tried = 0;
        let mut done = false;
        for plan in split_plans(&cur, s).map_err(|e| LabelError::Internal(e.to_string()))? {
            tried += 1;
            let split = apply_split(&cur, &plan).map_err(|e| LabelError::Internal(e.to_string()))?;
            let sub = label_tree_7(&split.core)?;
            if let Ok(c) = combine(&split, &sub.labeling) {
                for (i, &v) in split.core_map.iter().enumerate() {
                    labels[map[v]] = c.core_labels.labels[i];
                }
                let piece: Vec<usize> = split.piece_map.iter().map(|&v| map[v]).collect();
                for (i, &v) in piece.iter().enumerate() {
                    labels[v] = c.piece_labels.labels[i];
                }
                let core_to_tree: Vec<usize> = split.core_map.iter().map(|&v| map[v]).collect();
                trace.push(Step::Split {
                    kind: plan.kind,
                    roots: plan.roots.iter().map(|&r| map[r]).collect(),
                    piece,
                    piece_labels: c.piece_labels.labels,
                    transform: c.transform,
                    source: c.source,
                    nested: Some(sub.trace.into_iter().map(|st| st.remap(&core_to_tree)).collect()),
                });
                done = true;
                break;
            }
        }
        if !done {
            return Err(LabelError::Exhausted { n: m, plans: tried });
        }
        break;
    }

    // Bottom-up: undo the removals in reverse order.
    let mut profile = CountProfile::zero(K);
    for &(u, v) in t.edges() {
        if labels[u] != u32::MAX && labels[v] != u32::MAX {
            profile.e_counts[((labels[u] + labels[v]) % K) as usize] += 1;
        }
    }
    for &x in labels.iter().filter(|&&x| x != u32::MAX) {
        profile.v_counts[x as usize] += 1;
    }
    while let Some(frame) = frames.pop() {
        match frame {
            Frame::Leaf { leaf, parent } => {
                let c = leaf_label(&profile, labels[parent])
                    .ok_or_else(|| LabelError::Internal(format!("no leaf label at order {}", profile.vertex_total())))?;
                labels[leaf] = c;
                profile.v_counts[c as usize] += 1;
                profile.e_counts[((c + labels[parent]) % K) as usize] += 1;
                trace.push(Step::LeafAttach { leaf, parent, label: c });
            }
            Frame::Split { kind, roots, piece, piece_map } => {
                let g: Vec<u32> = roots.iter().map(|&r| labels[r]).collect();
                let fitted = fit_piece(&profile, &g, &piece).ok_or_else(|| {
                    LabelError::Internal(format!("certified piece did not fit a core of {}", profile.vertex_total()))
                })?;
                if !fitted.transform.is_identity() {
                    for x in labels.iter_mut().filter(|x| **x != u32::MAX) {
                        *x = fitted.transform.apply(*x);
                    }
                    profile = fitted.transform.profile(&profile);
                }
                for (i, &v) in piece_map.iter().enumerate() {
                    labels[v] = fitted.piece_labels.labels[i];
                }
                profile.add(&count_profile(&piece, &fitted.piece_labels).expect("piece labeling fits"));
                if !profile.is_cordial() {
                    return Err(LabelError::Internal("pasted profile is not cordial".into()));
                }
                trace.push(Step::Split {
                    kind,
                    roots,
                    piece: piece_map,
                    piece_labels: fitted.piece_labels.labels,
                    transform: fitted.transform,
                    source: fitted.source,
                    nested: None,
                });
            }
        }
    }
    let labeling = Labeling::new(K, labels);
    let verified = is_k_cordial(t, &labeling).map_err(|_| LabelError::Mismatch)?.is_cordial();
    if !verified {
        return Err(LabelError::Internal("final labeling is not cordial".into()));
    }
    Ok(LabelingCertificate { labeling, trace, verified })
}

/// Rebuilds the labeling from the trace alone, checking along the way that
/// every step leaves the labeled part cordial.
pub fn replay(t: &Tree, trace: &[Step]) -> Result<Labeling, LabelError> {
    let mut labels = vec![None; t.len()];
    replay_into(t, trace, &mut labels)?;
    let labels: Option<Vec<u32>> = labels.into_iter().collect();
    Ok(Labeling::new(K, labels.ok_or(LabelError::Mismatch)?))
}

fn replay_into(t: &Tree, trace: &[Step], labels: &mut [Option<u32>]) -> Result<(), LabelError> {
    let set = |labels: &mut [Option<u32>], v: usize, x: u32| -> Result<(), LabelError> {
        match labels.get_mut(v) {
            Some(slot @ None) if x < K => {
                *slot = Some(x);
                Ok(())
            }
            _ => Err(LabelError::Mismatch),
        }
    };
    for step in trace {
        match step {
            Step::BaseCase { vertices, labels: xs, .. } => {
                for (&v, &x) in vertices.iter().zip(xs) {
                    set(labels, v, x)?;
                }
            }
            Step::LeafAttach { leaf, parent, label } => {
                if labels.get(*parent).copied().flatten().is_none() || !t.neighbors(*leaf).contains(parent) {
                    return Err(LabelError::Mismatch);
                }
                set(labels, *leaf, *label)?;
            }
            Step::Split { piece, piece_labels, transform, nested, roots, .. } => {
                if let Some(steps) = nested {
                    replay_into(t, steps, labels)?;
                }
                if roots.iter().any(|&r| labels.get(r).copied().flatten().is_none()) {
                    return Err(LabelError::Mismatch);
                }
                for x in labels.iter_mut().flatten() {
                    *x = transform.apply(*x);
                }
                for (&v, &x) in piece.iter().zip(piece_labels) {
                    set(labels, v, x)?;
                }
            }
        }
        if !partial_is_cordial(t, labels) {
            return Err(LabelError::Mismatch);
        }
    }
    Ok(())
}

fn partial_is_cordial(t: &Tree, labels: &[Option<u32>]) -> bool {
    let mut p = CountProfile::zero(K);
    for x in labels.iter().flatten() {
        p.v_counts[*x as usize] += 1;
    }
    for &(u, v) in t.edges() {
        if let (Some(a), Some(b)) = (labels[u], labels[v]) {
            p.e_counts[((a + b) % K) as usize] += 1;
        }
    }
    p.is_cordial()
}
