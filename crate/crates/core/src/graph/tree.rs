use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Structural problems found while building a [`Tree`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} is out of range for a tree on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} closes a cycle")]
    Cycle(usize, usize),
    #[error("graph is disconnected ({edges} edges on {n} vertices)")]
    Disconnected { n: usize, edges: usize },
}

/// Failure to read an edge-list document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Structure(#[from] TreeError),
}

/// An undirected free tree on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

/// Coarse shape class of a tree relative to its longest path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeClass {
    /// Every vertex lies within distance one of a longest path.
    Caterpillar,
    /// Every vertex lies within distance two of a longest path (and not one).
    Lobster,
    Other,
}

impl Tree {
    /// Builds a tree, rejecting anything that is not a simple connected acyclic graph.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Tree, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut dsu = Dsu::new(n);
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(TreeError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(TreeError::DuplicateEdge(u, v));
            }
            if !dsu.union(u, v) {
                return Err(TreeError::Cycle(u, v));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::Disconnected { n, edges: edges.len() });
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Tree { adj, edges: edges.to_vec() })
    }

    pub fn single() -> Tree {
        Tree { adj: vec![Vec::new()], edges: Vec::new() }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Tree {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Tree::from_edges(n, &edges).expect("path is a tree")
    }

    /// Star with center `0` and `n - 1` leaves.
    pub fn star(n: usize) -> Tree {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Tree::from_edges(n, &edges).expect("star is a tree")
    }

    /// Spider with center `0` and one leg per entry of `legs`.
    pub fn spider(legs: &[usize]) -> Tree {
        let mut edges = Vec::new();
        let mut next = 1;
        for &len in legs {
            let mut prev = 0;
            for _ in 0..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        Tree::from_edges(next, &edges).expect("spider is a tree")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.adj.len()
    }

    /// Always false; a tree has at least one vertex.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub(crate) fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Edges in insertion order.
    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v` in ascending order.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.degree(v) <= 1)
    }

    /// BFS distances from `src`.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        self.bfs(src).0
    }

    /// BFS distances and parents; neighbors are scanned in ascending order.
    pub(crate) fn bfs(&self, src: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::with_capacity(n);
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Multi-source BFS distance to the nearest vertex of `sources`.
    pub fn distances_to_set(&self, sources: &[usize]) -> Vec<usize> {
        let n = self.len();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::with_capacity(n);
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// A longest path, found by double BFS starting at vertex 0.
    ///
    /// Both sweeps pick the lowest-indexed vertex among the farthest ones and
    /// the path is read back through BFS parents, so the result is a pure
    /// function of the edge list.
    pub fn longest_path(&self) -> Vec<usize> {
        let far = |dist: &[usize]| {
            let best = *dist.iter().max().expect("nonempty");
            dist.iter().position(|&d| d == best).expect("max exists")
        };
        let a = far(&self.distances_from(0));
        let (dist, parent) = self.bfs(a);
        let b = far(&dist);
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Number of edges on a longest path.
    pub fn diameter(&self) -> usize {
        self.longest_path().len() - 1
    }

    pub fn classify(&self) -> TreeClass {
        let path = self.longest_path();
        let reach = self.distances_to_set(&path).into_iter().max().unwrap_or(0);
        match reach {
            0 | 1 => TreeClass::Caterpillar,
            2 => TreeClass::Lobster,
            _ => TreeClass::Other,
        }
    }

    pub fn is_caterpillar(&self) -> bool {
        self.classify() == TreeClass::Caterpillar
    }

    /// Subtree induced by `keep` (which must induce a connected subgraph),
    /// reindexed in ascending order of the kept vertices. Returns the tree
    /// and the map from new to old indices.
    pub fn induced(&self, keep: &[bool]) -> (Tree, Vec<usize>) {
        let mut new_of = vec![usize::MAX; self.len()];
        let mut old_of = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_of[v] = old_of.len();
                old_of.push(v);
            }
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u] && keep[v])
            .map(|&(u, v)| (new_of[u], new_of[v]))
            .collect();
        let tree = Tree::from_edges(old_of.len(), &edges).expect("kept vertices induce a subtree");
        (tree, old_of)
    }

    /// Removes leaf `v`, returning the smaller tree and its new-to-old map.
    pub fn without_leaf(&self, v: usize) -> (Tree, Vec<usize>) {
        debug_assert!(self.degree(v) <= 1 && self.len() > 1);
        let mut keep = vec![true; self.len()];
        keep[v] = false;
        self.induced(&keep)
    }

    /// Same tree with one extra leaf (index `n`) hung from `at`.
    pub fn with_leaf(&self, at: usize) -> Tree {
        let mut edges = self.edges.clone();
        edges.push((at, self.len()));
        Tree::from_edges(self.len() + 1, &edges).expect("adding a leaf keeps a tree")
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Tree {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Tree::from_edges(self.len(), &edges).expect("permutation keeps a tree")
    }

    /// Edge list document, including the `n` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Unordered edge set, for comparisons that ignore insertion order.
    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect()
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree(n={}, edges={:?})", self.len(), self.edges)
    }
}

/// Parses the edge-list format: one `u v` pair per line, `#` comments and
/// blank lines ignored, optional leading `n <count>` header.
pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| ParseError::Malformed { line: line_no, reason: reason.to_string() };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() == Some(&"n") {
            if seen_content {
                return Err(malformed("vertex-count header must come first"));
            }
            if fields.len() != 2 {
                return Err(malformed("expected `n <count>`"));
            }
            declared = Some(fields[1].parse().map_err(|_| malformed("bad vertex count"))?);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if fields.len() != 2 {
            return Err(malformed("expected two vertex indices"));
        }
        let u: usize = fields[0].parse().map_err(|_| malformed("bad vertex index"))?;
        let v: usize = fields[1].parse().map_err(|_| malformed("bad vertex index"))?;
        edges.push((u, v));
    }
    let n = match declared {
        Some(n) => n,
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    Ok(Tree::from_edges(n, &edges)?)
}

impl FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_small_path() {
        let t = parse_tree("0 1\n1 2").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_duplicate_edge() {
        assert_eq!(
            parse_tree("0 1\n0 1"),
            Err(ParseError::Structure(TreeError::DuplicateEdge(0, 1)))
        );
    }

    #[test]
    fn rejects_disconnected() {
        assert!(matches!(
            parse_tree("0 1\n2 3"),
            Err(ParseError::Structure(TreeError::Disconnected { n: 4, edges: 2 }))
        ));
    }

    #[test]
    fn rejects_cycle_and_garbage() {
        assert!(matches!(
            parse_tree("0 1\n1 2\n2 0"),
            Err(ParseError::Structure(TreeError::Cycle(2, 0)))
        ));
        assert!(matches!(parse_tree("0 x"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(parse_tree("0 1 2"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(parse_tree("0 0"), Err(ParseError::Structure(TreeError::SelfLoop(0)))));
    }

    #[test]
    fn header_and_comments() {
        let t = parse_tree("# one vertex\nn 1\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(parse_tree(""), Err(ParseError::Structure(TreeError::Empty)));
        let t = parse_tree("n 3\n\n# c\n2 0\n0 1\n").unwrap();
        assert_eq!(t.neighbors(0), &[1, 2]);
        assert!(matches!(parse_tree("0 1\nn 2"), Err(ParseError::Malformed { line: 2, .. })));
        assert!(parse_tree("n 4\n0 1\n1 2").is_err());
    }

    #[test]
    fn longest_path_cases() {
        assert_eq!(Tree::path(5).longest_path(), vec![4, 3, 2, 1, 0]);
        let star = Tree::star(4);
        let p = star.longest_path();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1], 0);
        let spider = Tree::spider(&[2, 2, 2]);
        let p = spider.longest_path();
        assert_eq!(p.len(), 5);
        assert_eq!(p[2], 0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(Tree::star(5).classify(), TreeClass::Caterpillar);
        assert_eq!(Tree::spider(&[2, 2, 2]).classify(), TreeClass::Lobster);
        assert_eq!(Tree::spider(&[3, 3, 3]).classify(), TreeClass::Other);
        assert_eq!(Tree::single().classify(), TreeClass::Caterpillar);
    }

    #[test]
    fn leaf_removal_round_trip() {
        let t = Tree::spider(&[2, 1, 3]);
        let (core, map) = t.without_leaf(6);
        assert_eq!(core.len(), 6);
        assert_eq!(map, vec![0, 1, 2, 3, 4, 5]);
        let back = core.with_leaf(5);
        assert_eq!(back.edge_set(), t.edge_set());
    }
}
