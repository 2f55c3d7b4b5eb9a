//! Published label sequences and the claims attached to them.
//!
//! The shipped data holds label sequences only. Shapes are supplied by the
//! caller as a shape file: an edge list over vertices `0..n` plus a
//! `roots a b ...` line. Labels are read in level order: the roots in their
//! declared order, then every vertex at distance one from the roots, then
//! distance two, and so on, breaking ties by parent position and then by
//! vertex index.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cordiality::{count_profile, Labeling};
use crate::graph::RootedPiece;

/// Every published entry, one per line.
pub const ADDENDUM: &str = include_str!("../data/addendum.txt");

const K: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("entry {id} is malformed: {reason}")]
    Malformed { id: String, reason: String },
    #[error("shape file line {line}: {reason}")]
    Shape { line: usize, reason: String },
}

/// What an entry says about its labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Claim {
    NoMajorityWeight,
    MajorityWeight { weight: u32 },
    MinorityLabels { labels: Vec<u32> },
    MinorityWeights { weights: Vec<u32> },
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match self {
            Claim::NoMajorityWeight => write!(f, "no majority weight"),
            Claim::MajorityWeight { weight } => write!(f, "majority weight {weight}"),
            Claim::MinorityLabels { labels } => write!(f, "minority labels {{{}}}", list(labels)),
            Claim::MinorityWeights { weights } => write!(f, "minority weights {{{}}}", list(weights)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub list: u32,
    pub id: String,
    /// The label field exactly as transcribed.
    pub labels_text: String,
    /// Parsed labels, empty when the entry is malformed.
    pub labels: Vec<u32>,
    /// Why the label field could not be read, if it could not.
    pub malformed: Option<String>,
    pub claim_text: String,
    pub claim: Claim,
}

impl CatalogEntry {
    pub fn is_malformed(&self) -> bool {
        self.malformed.is_some()
    }
}

fn read_labels(text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(str::trim)
        .enumerate()
        .map(|(i, tok)| match tok.parse::<u32>() {
            _ if tok.is_empty() => Err(format!("empty token at position {}", i + 1)),
            Ok(x) if x < K => Ok(x),
            Ok(x) => Err(format!("token {x:?} at position {} is not a residue mod {K}", i + 1)),
            Err(_) => Err(format!("token {tok:?} at position {} is not a number", i + 1)),
        })
        .collect()
}

fn residues(text: &str) -> Option<Vec<u32>> {
    let mut out: Vec<u32> = text
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok().filter(|&x| x < K))
        .collect::<Option<_>>()?;
    out.sort_unstable();
    out.dedup();
    (!out.is_empty()).then_some(out)
}

/// Reads the claim wordings that occur in the data.
pub fn parse_claim(text: &str) -> Option<Claim> {
    let t = text.trim().trim_end_matches('.').trim();
    if t == "no majority weight" {
        return Some(Claim::NoMajorityWeight);
    }
    let cut = t.find(|c: char| c == '=' || c == ':' || c.is_ascii_digit()).unwrap_or(t.len());
    let (head, rest) = t.split_at(cut);
    let xs = residues(rest)?;
    match head.trim() {
        "majority weight" if xs.len() == 1 => Some(Claim::MajorityWeight { weight: xs[0] }),
        "minority label" | "minority labels" => Some(Claim::MinorityLabels { labels: xs }),
        "minority weight" | "minority weights" => Some(Claim::MinorityWeights { weights: xs }),
        _ => None,
    }
}

/// Parses one `LIST:<n> ID:<name> LABELS:<labels> CLAIM:<text>` line. Bad
/// label tokens do not fail the parse; they are recorded in
/// [`CatalogEntry::malformed`].
pub fn parse_entry(line: &str, line_no: usize) -> Result<CatalogEntry, CatalogError> {
    let err = |reason: &str| CatalogError::Syntax { line: line_no, reason: reason.to_string() };
    let rest = line.strip_prefix("LIST:").ok_or_else(|| err("missing LIST field"))?;
    let (list, rest) = rest.split_once(" ID:").ok_or_else(|| err("missing ID field"))?;
    let (id, rest) = rest.split_once(" LABELS:").ok_or_else(|| err("missing LABELS field"))?;
    let (labels_text, claim_text) = rest.split_once(" CLAIM:").ok_or_else(|| err("missing CLAIM field"))?;
    let list = list.trim().parse().map_err(|_| err("bad list number"))?;
    let claim = parse_claim(claim_text).ok_or_else(|| err("unrecognised claim"))?;
    let (labels, malformed) = match read_labels(labels_text) {
        Ok(labels) => (labels, None),
        Err(reason) => (Vec::new(), Some(reason)),
    };
    Ok(CatalogEntry {
        list,
        id: id.trim().to_string(),
        labels_text: labels_text.to_string(),
        labels,
        malformed,
        claim_text: claim_text.trim().to_string(),
        claim,
    })
}

/// Parses a whole data file, skipping blank lines and `#` comments.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_entry(l.trim_end(), i + 1))
        .collect()
}

/// The shipped entries.
pub fn addendum() -> Vec<CatalogEntry> {
    parse_catalog(ADDENDUM).expect("shipped catalog parses")
}

/// A shape with its vertices renumbered in level order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub piece: RootedPiece,
    /// Shape-file index of each root, in declared order.
    pub roots: Vec<usize>,
    /// Shape-file index of each piece vertex.
    pub vertices: Vec<usize>,
}

impl Shape {
    /// Number of labels an entry needs for this shape.
    pub fn label_count(&self) -> usize {
        self.roots.len() + self.vertices.len()
    }

    /// Builds the level-ordered shape from an edge list over `0..n` with
    /// designated roots. Roots may not be adjacent to each other and every
    /// vertex must be reachable from some root.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], roots: &[usize]) -> Result<Shape, String> {
        if roots.is_empty() {
            return Err("no roots".into());
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(format!("edge {u} {v} out of range"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let mut root_pos = vec![None; n];
        for (i, &r) in roots.iter().enumerate() {
            if r >= n {
                return Err(format!("root {r} out of range"));
            }
            if root_pos[r].replace(i).is_some() {
                return Err(format!("root {r} listed twice"));
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        let mut seen = vec![false; n];
        roots.iter().for_each(|&r| seen[r] = true);
        let mut queue: VecDeque<usize> = roots.iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    index[w] = vertices.len();
                    vertices.push(w);
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(format!("vertex {v} is not reachable from a root"));
        }
        let mut internal = Vec::new();
        let mut root_edges = Vec::new();
        for &(u, v) in edges {
            match (root_pos[u], root_pos[v]) {
                (Some(_), Some(_)) => return Err(format!("roots {u} and {v} are adjacent")),
                (Some(r), None) => root_edges.push((r, index[v])),
                (None, Some(r)) => root_edges.push((r, index[u])),
                (None, None) => internal.push((index[u], index[v])),
            }
        }
        let piece = RootedPiece::new(vertices.len(), roots.len(), &internal, &root_edges).map_err(|e| e.to_string())?;
        Ok(Shape { piece, roots: roots.to_vec(), vertices })
    }
}

/// Reads a shape file: `u v` edge lines over vertices `0..n` (roots
/// included), one `roots a b ...` line, `#` comments.
pub fn parse_shape(text: &str) -> Result<Shape, CatalogError> {
    let mut edges = Vec::new();
    let mut roots: Option<Vec<usize>> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        last = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| CatalogError::Shape { line: i + 1, reason: reason.to_string() };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nums = |xs: &[&str]| xs.iter().map(|s| s.parse::<usize>()).collect::<Result<Vec<_>, _>>();
        if fields[0] == "roots" {
            if roots.is_some() {
                return Err(err("second roots line"));
            }
            roots = Some(nums(&fields[1..]).map_err(|_| err("bad root index"))?);
        } else if fields.len() == 2 {
            let uv = nums(&fields).map_err(|_| err("bad vertex index"))?;
            edges.push((uv[0], uv[1]));
        } else {
            return Err(err("expected `u v` or `roots ...`"));
        }
    }
    let roots = roots.ok_or(CatalogError::Shape { line: last, reason: "missing roots line".into() })?;
    let n = edges.iter().flat_map(|&(u, v)| [u + 1, v + 1]).chain(roots.iter().map(|r| r + 1)).max().unwrap_or(0);
    Shape::from_edges(n, &edges, &roots).map_err(|reason| CatalogError::Shape { line: last, reason })
}

/// Result of checking one entry against one shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    ClaimHolds,
    ClaimFails { observed: String },
    ShapeSizeMismatch { labels: usize, shape: usize },
}

fn describe(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Applies the entry's labels to the shape in level order and checks its
/// claim with `k = 7`.
///
/// * no majority weight: every weight occurs at most once.
/// * majority weight `x`: weight `x` occurs twice, every other at most once.
/// * minority labels: the named residues are exactly the labels no piece
///   vertex carries (roots do not count).
/// * minority weights: the named residues are exactly the weights at the
///   minimum count.
pub fn check_catalog_entry(entry: &CatalogEntry, shape: &Shape) -> Result<Verdict, CatalogError> {
    if let Some(reason) = &entry.malformed {
        return Err(CatalogError::Malformed { id: entry.id.clone(), reason: reason.clone() });
    }
    if entry.labels.len() != shape.label_count() {
        return Ok(Verdict::ShapeSizeMismatch { labels: entry.labels.len(), shape: shape.label_count() });
    }
    let r = shape.roots.len();
    let f = Labeling::with_roots(K, entry.labels[r..].to_vec(), entry.labels[..r].to_vec());
    let profile = count_profile(&shape.piece, &f).expect("sizes checked");
    let e = &profile.e_counts;
    let at = |counts: &[usize], c: usize| (0..K).filter(|&i| counts[i as usize] == c).collect::<Vec<u32>>();
    let holds = match &entry.claim {
        Claim::NoMajorityWeight => e.iter().all(|&c| c <= 1),
        Claim::MajorityWeight { weight } => {
            (0..K as usize).all(|i| if i == *weight as usize { e[i] == 2 } else { e[i] <= 1 })
        }
        Claim::MinorityLabels { labels } => at(&profile.v_counts, 0) == *labels,
        Claim::MinorityWeights { weights } => at(e, *e.iter().min().unwrap()) == *weights,
    };
    Ok(if holds {
        Verdict::ClaimHolds
    } else {
        Verdict::ClaimFails { observed: format!("v_counts={} e_counts={}", describe(&profile.v_counts), describe(e)) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(s: &str) -> CatalogEntry {
        parse_entry(s, 1).unwrap()
    }

    #[test]
    fn shipped_entries_parse() {
        let all = addendum();
        assert_eq!(all.len(), 567);
        let bad: Vec<&str> = all.iter().filter(|e| e.is_malformed()).map(|e| e.id.as_str()).collect();
        assert_eq!(bad, vec!["F13", "F13", "F22", "F40"]);
        for l in 1..=9 {
            assert!(all.iter().any(|e| e.list == l));
        }
    }

    #[test]
    fn claim_wordings() {
        assert_eq!(parse_claim("no majority weight"), Some(Claim::NoMajorityWeight));
        assert_eq!(parse_claim("majority weight = 3"), Some(Claim::MajorityWeight { weight: 3 }));
        assert_eq!(parse_claim("minority label = 0"), Some(Claim::MinorityLabels { labels: vec![0] }));
        assert_eq!(parse_claim("minority labels: 6 and 0"), Some(Claim::MinorityLabels { labels: vec![0, 6] }));
        assert_eq!(parse_claim("minority labels 0, 5, and 6"), Some(Claim::MinorityLabels { labels: vec![0, 5, 6] }));
        assert_eq!(parse_claim("minority weights 2 and 5"), Some(Claim::MinorityWeights { weights: vec![2, 5] }));
        assert_eq!(parse_claim("minority weight = 9"), None);
        assert_eq!(parse_claim("maximal weight = 1"), None);
    }

    #[test]
    fn malformed_tokens_are_kept() {
        let e = entry("LIST:3 ID:F13 LABELS:0, 0, 0, 2, 3, 4, 5, 16, CLAIM:majority weight = 1");
        assert_eq!(e.labels_text, "0, 0, 0, 2, 3, 4, 5, 16,");
        assert!(e.malformed.as_deref().unwrap().contains("token 16 at position 8"));
        let e = entry("LIST:3 ID:F22 LABELS:0, 0, , 2 CLAIM:no majority weight");
        assert!(e.malformed.as_deref().unwrap().contains("position 3"));
        let shape = parse_shape("0 1\nroots 0\n").unwrap();
        assert!(matches!(check_catalog_entry(&e, &shape), Err(CatalogError::Malformed { .. })));
    }

    #[test]
    fn path_shape_refutes_entry_h() {
        let text = "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\nroots 0\n";
        let shape = parse_shape(text).unwrap();
        let e = entry("LIST:1 ID:h LABELS:0, 0, 1, 2, 3, 4, 5, 6 CLAIM:majority weight = 1");
        let v = check_catalog_entry(&e, &shape).unwrap();
        assert_eq!(v, Verdict::ClaimFails { observed: "v_counts=1,1,1,1,1,1,1 e_counts=2,1,1,1,1,1,0".into() });
        let e0 = entry("LIST:1 ID:h LABELS:0, 0, 1, 2, 3, 4, 5, 6 CLAIM:majority weight = 0");
        assert_eq!(check_catalog_entry(&e0, &shape).unwrap(), Verdict::ClaimHolds);
        let short = entry("LIST:2 ID:T9 LABELS:0, 4, 3, 1, 2, 5, 6 CLAIM:minority label = 0");
        assert_eq!(check_catalog_entry(&short, &shape).unwrap(), Verdict::ShapeSizeMismatch { labels: 7, shape: 8 });
    }

    #[test]
    fn star_shape_minority_label() {
        let text = "roots 0\n0 1\n0 2\n0 3\n0 4\n0 5\n0 6\n";
        let shape = parse_shape(text).unwrap();
        let e = entry("LIST:2 ID:T10 LABELS:0, 1, 2, 3, 4, 5, 6 CLAIM:minority label = 0");
        assert_eq!(check_catalog_entry(&e, &shape).unwrap(), Verdict::ClaimHolds);
    }

    #[test]
    fn level_order_follows_roots() {
        // two roots 5 and 2; the 5-side is read first
        let shape = parse_shape("roots 5 2\n5 0\n0 1\n2 3\n2 4\n").unwrap();
        assert_eq!(shape.vertices, vec![0, 3, 4, 1]);
        assert_eq!(shape.piece.tops(0), &[0]);
        assert_eq!(shape.piece.tops(1), &[1, 2]);
        assert!(parse_shape("roots 0 1\n0 1\n").is_err());
        assert!(parse_shape("0 1\n").is_err());
        assert!(parse_shape("roots 0\n0 1\n1 2\n2 0\n").is_err());
    }
}
