use thiserror::Error;

/// One end of an edge in a rooted piece: either a branch vertex or a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Vertex(usize),
    Root(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PieceError {
    #[error("a piece needs at least one root")]
    NoRoots,
    #[error("root {0} has no branches")]
    BareRoot(usize),
    #[error("endpoint {0:?} out of range")]
    OutOfRange(End),
    #[error("branch vertices do not form a forest with one root edge per component")]
    NotAForest,
}

/// A forest of branches hanging from designated roots.
///
/// Roots carry labels during labeling but are not vertices of the piece: a
/// piece with `p` branch vertices has `p` edges in total, counting the edges
/// from each branch to its root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedPiece {
    adj: Vec<Vec<usize>>,
    internal: Vec<(usize, usize)>,
    // for each root, the top vertices of the branches hanging from it
    tops: Vec<Vec<usize>>,
}

impl RootedPiece {
    /// `internal` are edges between branch vertices, `root_edges` are
    /// `(root, top)` attachments.
    pub fn new(
        p: usize,
        roots: usize,
        internal: &[(usize, usize)],
        root_edges: &[(usize, usize)],
    ) -> Result<RootedPiece, PieceError> {
        if roots == 0 {
            return Err(PieceError::NoRoots);
        }
        let mut adj = vec![Vec::new(); p];
        for &(u, v) in internal {
            for x in [u, v] {
                if x >= p {
                    return Err(PieceError::OutOfRange(End::Vertex(x)));
                }
            }
            if u == v {
                return Err(PieceError::NotAForest);
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut tops = vec![Vec::new(); roots];
        for &(r, v) in root_edges {
            if r >= roots {
                return Err(PieceError::OutOfRange(End::Root(r)));
            }
            if v >= p {
                return Err(PieceError::OutOfRange(End::Vertex(v)));
            }
            tops[r].push(v);
        }
        for list in adj.iter_mut().chain(tops.iter_mut()) {
            list.sort_unstable();
        }
        if let Some(r) = tops.iter().position(Vec::is_empty) {
            return Err(PieceError::BareRoot(r));
        }
        // Each component must be a tree containing exactly one top vertex.
        if internal.len() + root_edges.len() != p {
            return Err(PieceError::NotAForest);
        }
        let mut comp = vec![usize::MAX; p];
        let mut stack = Vec::new();
        for (ci, &top) in root_edges.iter().map(|(_, v)| v).enumerate() {
            if comp[top] != usize::MAX {
                return Err(PieceError::NotAForest);
            }
            comp[top] = ci;
            stack.push(top);
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = ci;
                        stack.push(w);
                    }
                }
            }
        }
        if comp.contains(&usize::MAX) {
            return Err(PieceError::NotAForest);
        }
        Ok(RootedPiece { adj, internal: internal.to_vec(), tops })
    }

    /// Single root with a path of `p` vertices hanging from it.
    pub fn path(p: usize) -> RootedPiece {
        let internal: Vec<_> = (1..p).map(|v| (v - 1, v)).collect();
        RootedPiece::new(p, 1, &internal, &[(0, 0)]).expect("valid path piece")
    }

    /// Single root with `p` leaves.
    pub fn leaves(p: usize) -> RootedPiece {
        let root_edges: Vec<_> = (0..p).map(|v| (0, v)).collect();
        RootedPiece::new(p, 1, &[], &root_edges).expect("valid star piece")
    }

    /// Number of branch vertices (roots excluded).
    #[inline]
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    #[inline]
    pub fn root_count(&self) -> usize {
        self.tops.len()
    }

    /// Total edge count, root edges included; equals [`len`](Self::len).
    pub fn edge_count(&self) -> usize {
        self.internal.len() + self.tops.iter().map(Vec::len).sum::<usize>()
    }

    pub fn internal_edges(&self) -> &[(usize, usize)] {
        &self.internal
    }

    /// Branch tops attached to root `r`.
    pub fn tops(&self, r: usize) -> &[usize] {
        &self.tops[r]
    }

    /// Neighbors of a branch vertex among branch vertices.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// All edges: internal ones first, then root edges in root order.
    pub fn ends(&self) -> Vec<(End, End)> {
        let mut out: Vec<(End, End)> =
            self.internal.iter().map(|&(u, v)| (End::Vertex(u), End::Vertex(v))).collect();
        for (r, tops) in self.tops.iter().enumerate() {
            out.extend(tops.iter().map(|&t| (End::Root(r), End::Vertex(t))));
        }
        out
    }

    /// Root each branch vertex hangs from.
    pub fn owner_roots(&self) -> Vec<usize> {
        let mut owner = vec![usize::MAX; self.len()];
        let mut stack = Vec::new();
        for (r, tops) in self.tops.iter().enumerate() {
            for &t in tops {
                owner[t] = r;
                stack.push(t);
                while let Some(u) = stack.pop() {
                    for &w in &self.adj[u] {
                        if owner[w] == usize::MAX {
                            owner[w] = r;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        owner
    }

    /// The tree formed by the branches of root `r` together with the root,
    /// which gets index `0`; returns the tree and the map from tree index to
    /// piece vertex (`usize::MAX` for the root).
    pub fn with_root(&self, r: usize) -> (super::Tree, Vec<usize>) {
        let owner = self.owner_roots();
        let mut idx = vec![usize::MAX; self.len()];
        let mut back = vec![usize::MAX];
        for v in 0..self.len() {
            if owner[v] == r {
                idx[v] = back.len();
                back.push(v);
            }
        }
        let mut edges: Vec<_> = self.tops[r].iter().map(|&t| (0, idx[t])).collect();
        for &(u, v) in &self.internal {
            if owner[u] == r {
                edges.push((idx[u], idx[v]));
            }
        }
        let tree = super::Tree::from_edges(back.len(), &edges).expect("root plus branches is a tree");
        (tree, back)
    }

    /// Branch vertices (without roots) as a tree, when the piece has a
    /// single root with a single branch. The map goes from tree index to
    /// piece vertex and is the identity.
    pub fn branch_tree(&self) -> Option<super::Tree> {
        if self.root_count() != 1 || self.tops[0].len() != 1 {
            return None;
        }
        super::Tree::from_edges(self.len(), &self.internal).ok()
    }
}
