//! Labelings over Z_k, edge weights, count profiles and cordiality checks.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{End, RootedPiece, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CordialityError {
    #[error("modulus must be at least 2, got {0}")]
    Modulus(u32),
    #[error("expected {expected} vertex labels, got {got}")]
    VertexCount { expected: usize, got: usize },
    #[error("expected {expected} root labels, got {got}")]
    RootCount { expected: usize, got: usize },
    #[error("label {label} is not below k = {k}")]
    LabelRange { label: u32, k: u32 },
    #[error("spread of the counts exceeds one")]
    NotCordial,
}

/// A map from vertices to Z_k. For rooted pieces `roots` holds the fixed
/// labels of the roots; for trees it is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling {
    pub k: u32,
    pub labels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<u32>,
}

impl Labeling {
    pub fn new(k: u32, labels: Vec<u32>) -> Labeling {
        Labeling { k, labels, roots: Vec::new() }
    }

    pub fn with_roots(k: u32, labels: Vec<u32>, roots: Vec<u32>) -> Labeling {
        Labeling { k, labels, roots }
    }

    fn validate(&self, vertices: usize, roots: usize) -> Result<(), CordialityError> {
        if self.k < 2 {
            return Err(CordialityError::Modulus(self.k));
        }
        if self.labels.len() != vertices {
            return Err(CordialityError::VertexCount { expected: vertices, got: self.labels.len() });
        }
        if self.roots.len() != roots {
            return Err(CordialityError::RootCount { expected: roots, got: self.roots.len() });
        }
        match self.labels.iter().chain(&self.roots).find(|&&x| x >= self.k) {
            Some(&label) => Err(CordialityError::LabelRange { label, k: self.k }),
            None => Ok(()),
        }
    }

    fn end(&self, e: End) -> u32 {
        match e {
            End::Vertex(v) => self.labels[v],
            End::Root(r) => self.roots[r],
        }
    }
}

/// Per-residue counts of vertex labels and edge weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountProfile {
    pub v_counts: Vec<usize>,
    pub e_counts: Vec<usize>,
}

impl CountProfile {
    pub fn zero(k: u32) -> CountProfile {
        CountProfile { v_counts: vec![0; k as usize], e_counts: vec![0; k as usize] }
    }

    pub fn k(&self) -> u32 {
        self.v_counts.len() as u32
    }

    pub fn vertex_total(&self) -> usize {
        self.v_counts.iter().sum()
    }

    pub fn edge_total(&self) -> usize {
        self.e_counts.iter().sum()
    }

    /// Both count arrays have spread at most one.
    pub fn is_cordial(&self) -> bool {
        spread(&self.v_counts) <= 1 && spread(&self.e_counts) <= 1
    }

    pub fn add(&mut self, other: &CountProfile) {
        for (a, b) in self.v_counts.iter_mut().zip(&other.v_counts) {
            *a += b;
        }
        for (a, b) in self.e_counts.iter_mut().zip(&other.e_counts) {
            *a += b;
        }
    }

    /// Profile of the rotated labeling: labels shift by `a`, weights by `2a`.
    pub fn rotated(&self, a: u32) -> CountProfile {
        let k = self.k();
        let shift = |counts: &[usize], by: u32| {
            let mut out = vec![0; counts.len()];
            for (x, &c) in counts.iter().enumerate() {
                out[((x as u32 + by) % k) as usize] = c;
            }
            out
        };
        CountProfile { v_counts: shift(&self.v_counts, a % k), e_counts: shift(&self.e_counts, (2 * a) % k) }
    }

    /// Profile of the negated labeling.
    pub fn negated(&self) -> CountProfile {
        let k = self.k() as usize;
        let flip = |counts: &[usize]| (0..k).map(|x| counts[(k - x) % k]).collect();
        CountProfile { v_counts: flip(&self.v_counts), e_counts: flip(&self.e_counts) }
    }
}

pub(crate) fn spread(counts: &[usize]) -> usize {
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    max - min
}

/// Anything whose edges can be weighted under a [`Labeling`].
pub trait Structure {
    fn vertex_count(&self) -> usize;
    fn root_count(&self) -> usize;
    fn edge_ends(&self) -> Vec<(End, End)>;
}

impl Structure for Tree {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn root_count(&self) -> usize {
        0
    }

    fn edge_ends(&self) -> Vec<(End, End)> {
        self.edges().iter().map(|&(u, v)| (End::Vertex(u), End::Vertex(v))).collect()
    }
}

impl Structure for RootedPiece {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn root_count(&self) -> usize {
        RootedPiece::root_count(self)
    }

    fn edge_ends(&self) -> Vec<(End, End)> {
        self.ends()
    }
}

/// Weight of every edge, in the structure's edge order.
pub fn edge_weights<S: Structure + ?Sized>(s: &S, f: &Labeling) -> Result<Vec<u32>, CordialityError> {
    f.validate(s.vertex_count(), s.root_count())?;
    Ok(s.edge_ends().into_iter().map(|(a, b)| (f.end(a) + f.end(b)) % f.k).collect())
}

/// Counts of labels on vertices (roots excluded) and of weights on all
/// edges (root edges included).
pub fn count_profile<S: Structure + ?Sized>(s: &S, f: &Labeling) -> Result<CountProfile, CordialityError> {
    let weights = edge_weights(s, f)?;
    let mut profile = CountProfile::zero(f.k);
    for &x in &f.labels {
        profile.v_counts[x as usize] += 1;
    }
    for w in weights {
        profile.e_counts[w as usize] += 1;
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    Label,
    Weight,
}

/// Two residues whose counts differ by more than one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: CountKind,
    pub a: u32,
    pub b: u32,
    pub count_a: usize,
    pub count_b: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            CountKind::Label => 'v',
            CountKind::Weight => 'e',
        };
        write!(f, "{tag}_{}={} vs {tag}_{}={}", self.a, self.count_a, self.b, self.count_b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CordialReport {
    pub profile: CountProfile,
    pub violation: Option<Violation>,
}

impl CordialReport {
    pub fn is_cordial(&self) -> bool {
        self.violation.is_none()
    }
}

fn first_violation(kind: CountKind, counts: &[usize]) -> Option<Violation> {
    for a in 0..counts.len() {
        for b in a + 1..counts.len() {
            if counts[a].abs_diff(counts[b]) > 1 {
                return Some(Violation { kind, a: a as u32, b: b as u32, count_a: counts[a], count_b: counts[b] });
            }
        }
    }
    None
}

/// Checks both balance conditions. Label violations are reported before
/// weight violations, each as the lexicographically smallest pair.
pub fn is_k_cordial(t: &Tree, f: &Labeling) -> Result<CordialReport, CordialityError> {
    let profile = count_profile(t, f)?;
    let violation = first_violation(CountKind::Label, &profile.v_counts)
        .or_else(|| first_violation(CountKind::Weight, &profile.e_counts));
    Ok(CordialReport { profile, violation })
}

/// The rooted-forest balance condition with a distinguished weight `ell`:
/// labels balanced, the other weights balanced, and `e_ell` at least every
/// other weight count and at most two above it.
pub fn check_def_2_10(piece: &RootedPiece, g: &[u32], ell: u32, f: &Labeling) -> Result<bool, CordialityError> {
    let full = Labeling::with_roots(f.k, f.labels.clone(), g.to_vec());
    let profile = count_profile(piece, &full)?;
    if ell >= f.k {
        return Err(CordialityError::LabelRange { label: ell, k: f.k });
    }
    Ok(profile_meets_def_2_10(&profile, ell))
}

pub(crate) fn profile_meets_def_2_10(profile: &CountProfile, ell: u32) -> bool {
    let e = &profile.e_counts;
    let l = ell as usize;
    let others: Vec<usize> = (0..e.len()).filter(|&i| i != l).map(|i| e[i]).collect();
    spread(&profile.v_counts) <= 1 && spread(&others) <= 1 && others.iter().all(|&c| c <= e[l] && e[l] - c <= 2)
}

/// Adds `a` to every label, roots included.
pub fn rotate(f: &Labeling, a: u32) -> Labeling {
    let k = f.k;
    let shift = |x: &u32| (x + a % k) % k;
    Labeling { k, labels: f.labels.iter().map(shift).collect(), roots: f.roots.iter().map(shift).collect() }
}

/// Replaces every label `x` by `-x mod k`, roots included.
pub fn negate(f: &Labeling) -> Labeling {
    let k = f.k;
    let flip = |x: &u32| (k - x) % k;
    Labeling { k, labels: f.labels.iter().map(flip).collect(), roots: f.roots.iter().map(flip).collect() }
}

/// Residues at the minimum and maximum count, for labels and for weights.
/// Each set is empty when the corresponding counts are uniform.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremes {
    pub minority_weights: Vec<u32>,
    pub majority_weights: Vec<u32>,
    pub minority_labels: Vec<u32>,
    pub majority_labels: Vec<u32>,
}

fn extremes(counts: &[usize]) -> Result<(Vec<u32>, Vec<u32>), CordialityError> {
    let max = counts.iter().copied().max().unwrap_or(0);
    let min = counts.iter().copied().min().unwrap_or(0);
    match max - min {
        0 => Ok((Vec::new(), Vec::new())),
        1 => {
            let at = |c| (0..counts.len() as u32).filter(|&i| counts[i as usize] == c).collect();
            Ok((at(min), at(max)))
        }
        _ => Err(CordialityError::NotCordial),
    }
}

/// Fails with [`CordialityError::NotCordial`] when either spread is two or
/// more.
pub fn minority_majority(profile: &CountProfile) -> Result<Extremes, CordialityError> {
    let (minority_labels, majority_labels) = extremes(&profile.v_counts)?;
    let (minority_weights, majority_weights) = extremes(&profile.e_counts)?;
    Ok(Extremes { minority_weights, majority_weights, minority_labels, majority_labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_on_small_path() {
        let t = Tree::path(3);
        assert_eq!(edge_weights(&t, &Labeling::new(7, vec![2, 6, 4])).unwrap(), vec![1, 3]);
        assert!(edge_weights(&t, &Labeling::new(7, vec![2, 6])).is_err());
        assert!(edge_weights(&t, &Labeling::new(7, vec![2, 6, 7])).is_err());
    }

    #[test]
    fn piece_profile_skips_root() {
        let piece = RootedPiece::leaves(1);
        let p = count_profile(&piece, &Labeling::with_roots(7, vec![6], vec![2])).unwrap();
        assert_eq!(p.v_counts, vec![0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(p.e_counts, vec![0, 1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn violation_is_smallest_pair() {
        let r = is_k_cordial(&Tree::path(3), &Labeling::new(7, vec![0, 0, 1])).unwrap();
        let v = r.violation.unwrap();
        assert_eq!((v.kind, v.a, v.b), (CountKind::Label, 0, 2));
        assert_eq!(v.to_string(), "v_0=2 vs v_2=0");
        assert!(is_k_cordial(&Tree::path(2), &Labeling::new(7, vec![0, 1])).unwrap().is_cordial());
    }

    #[test]
    fn rooted_balance_examples() {
        let piece = RootedPiece::leaves(1);
        assert!(check_def_2_10(&piece, &[3], 5, &Labeling::new(7, vec![2])).unwrap());
        assert!(!check_def_2_10(&piece, &[3], 5, &Labeling::new(7, vec![0])).unwrap());
    }

    #[test]
    fn transforms() {
        let f = Labeling::new(7, vec![0, 1, 3]);
        assert_eq!(rotate(&f, 5).labels, vec![5, 6, 1]);
        assert_eq!(rotate(&f, 0), f);
        assert_eq!(negate(&f).labels, vec![0, 6, 4]);
        assert_eq!(negate(&negate(&f)), f);
    }

    #[test]
    fn profile_transforms_match_relabeling() {
        let t = Tree::spider(&[2, 2, 2]);
        let f = Labeling::new(7, vec![0, 3, 5, 1, 6, 2, 4]);
        let p = count_profile(&t, &f).unwrap();
        for a in 0..7 {
            assert_eq!(count_profile(&t, &rotate(&f, a)).unwrap(), p.rotated(a));
        }
        assert_eq!(count_profile(&t, &negate(&f)).unwrap(), p.negated());
    }

    #[test]
    fn extremes_by_spread() {
        let uniform = CountProfile { v_counts: vec![1; 7], e_counts: vec![1; 7] };
        assert_eq!(minority_majority(&uniform).unwrap(), Extremes::default());
        let p = CountProfile { v_counts: vec![1; 7], e_counts: vec![2, 1, 1, 1, 1, 1, 1] };
        let x = minority_majority(&p).unwrap();
        assert_eq!(x.majority_weights, vec![0]);
        assert_eq!(x.minority_weights, vec![1, 2, 3, 4, 5, 6]);
        let bad = CountProfile { v_counts: vec![1; 7], e_counts: vec![3, 1, 1, 1, 1, 1, 0] };
        assert_eq!(minority_majority(&bad), Err(CordialityError::NotCordial));
    }
}
