//! Random tree generators used by fuzzing and the scale tests.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rand::Rng;

use super::Tree;

/// Decodes a Prüfer sequence over `0..seq.len() + 2` into a labeled tree.
pub fn prufer_decode(seq: &[usize]) -> Tree {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let Reverse(leaf) = leaves.pop().expect("a leaf remains");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(u) = leaves.pop().expect("two leaves remain");
    let Reverse(v) = leaves.pop().expect("two leaves remain");
    edges.push((u, v));
    Tree::from_edges(n, &edges).expect("Prüfer decoding yields a tree")
}

/// Uniformly random labeled tree on `n` vertices.
pub fn uniform_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    match n {
        0 | 1 => Tree::single(),
        2 => Tree::path(2),
        _ => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            prufer_decode(&seq)
        }
    }
}

/// Each new vertex attaches to a uniformly chosen earlier vertex.
pub fn recursive_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    let edges: Vec<_> = (1..n.max(1)).map(|v| (rng.gen_range(0..v), v)).collect();
    Tree::from_edges(n.max(1), &edges).expect("recursive tree")
}

/// Long spine with short random hair; exercises deep trees and the
/// caterpillar/lobster boundary.
pub fn hairy_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    let n = n.max(1);
    let spine = (n / 2).max(1);
    let mut edges: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
    for v in spine..n {
        let parent = if v > spine && rng.gen_bool(0.3) { rng.gen_range(spine..v) } else { rng.gen_range(0..spine) };
        edges.push((parent, v));
    }
    Tree::from_edges(n, &edges).expect("hairy path")
}

/// Picks one of the generators above at random, then shuffles vertex ids.
pub fn mixed_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    let t = match rng.gen_range(0..3) {
        0 => uniform_tree(n, rng),
        1 => recursive_tree(n, rng),
        _ => hairy_path(n, rng),
    };
    let mut perm: Vec<usize> = (0..t.len()).collect();
    for i in (1..perm.len()).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    t.permuted(&perm)
}
