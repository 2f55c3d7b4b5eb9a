//! The JSON labeling document and DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cordiality::{count_profile, edge_weights, CordialityError, Labeling};
use crate::graph::Tree;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid labeling document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Labeling(#[from] CordialityError),
    #[error("root entries must list roots 0, 1, ... in order")]
    RootOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootLabel {
    pub vertex: usize,
    pub label: u32,
}

/// A labeling together with its counts. `valid`, `v_counts` and `e_counts`
/// are informational when read back; [`LabelingDocument::labeling`] keeps
/// only `k`, `labels` and `roots`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingDocument {
    pub k: u32,
    pub labels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<RootLabel>>,
    #[serde(default)]
    pub valid: bool,
    #[serde(default)]
    pub v_counts: Vec<usize>,
    #[serde(default)]
    pub e_counts: Vec<usize>,
}

impl LabelingDocument {
    /// Describes `f` on `t`, recording whether it is k-cordial.
    pub fn for_tree(t: &Tree, f: &Labeling) -> Result<LabelingDocument, CordialityError> {
        let profile = count_profile(t, f)?;
        Ok(LabelingDocument {
            k: f.k,
            labels: f.labels.clone(),
            roots: None,
            valid: profile.is_cordial(),
            v_counts: profile.v_counts,
            e_counts: profile.e_counts,
        })
    }

    pub fn labeling(&self) -> Result<Labeling, DocumentError> {
        let roots = match &self.roots {
            None => Vec::new(),
            Some(rs) => {
                if rs.iter().enumerate().any(|(i, r)| r.vertex != i) {
                    return Err(DocumentError::RootOrder);
                }
                rs.iter().map(|r| r.label).collect()
            }
        };
        Ok(Labeling::with_roots(self.k, self.labels.clone(), roots))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<LabelingDocument, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Renders `t` as an undirected DOT graph: nodes `v<i>` labelled
/// `v<i>:<label>`, edges labelled with their weight.
pub fn to_dot(t: &Tree, f: &Labeling) -> Result<String, CordialityError> {
    let weights = edge_weights(t, f)?;
    let mut out = format!("graph tree {{\n  // k = {}\n", f.k);
    for (v, x) in f.labels.iter().enumerate() {
        writeln!(out, "  v{v} [label=\"v{v}:{x}\"];").unwrap();
    }
    for (&(u, v), w) in t.edges().iter().zip(weights) {
        writeln!(out, "  v{u} -- v{v} [label=\"{w}\"];").unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = Tree::path(3);
        let doc = LabelingDocument::for_tree(&t, &Labeling::new(7, vec![0, 0, 1])).unwrap();
        assert!(!doc.valid);
        assert_eq!(doc.v_counts, vec![2, 1, 0, 0, 0, 0, 0]);
        let text = doc.to_json();
        assert!(!text.contains("roots"));
        let back = LabelingDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.labeling().unwrap(), Labeling::new(7, vec![0, 0, 1]));
    }

    #[test]
    fn minimal_document_reads() {
        let doc = LabelingDocument::from_json(r#"{"k": 7, "labels": [1], "roots": [{"vertex": 0, "label": 3}]}"#).unwrap();
        assert_eq!(doc.labeling().unwrap(), Labeling::with_roots(7, vec![1], vec![3]));
        let swapped = r#"{"k": 7, "labels": [1], "roots": [{"vertex": 1, "label": 3}]}"#;
        assert!(matches!(LabelingDocument::from_json(swapped).unwrap().labeling(), Err(DocumentError::RootOrder)));
        assert!(LabelingDocument::from_json("{\"k\": 7}").is_err());
    }

    #[test]
    fn dot_for_single_edge() {
        let dot = to_dot(&Tree::path(2), &Labeling::new(7, vec![0, 1])).unwrap();
        assert_eq!(
            dot,
            "graph tree {\n  // k = 7\n  v0 [label=\"v0:0\"];\n  v1 [label=\"v1:1\"];\n  v0 -- v1 [label=\"1\"];\n}\n"
        );
        assert!(to_dot(&Tree::path(2), &Labeling::new(7, vec![0])).is_err());
    }
}
