use cordial::cordiality::is_k_cordial;
use cordial::graph::Tree;
use cordial::labeler::{label_tree_7, replay};

fn full_ary(arity: usize, depth: usize) -> Tree {
    let mut edges = Vec::new();
    let mut frontier = vec![0];
    let mut n = 1;
    for _ in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            for _ in 0..arity {
                edges.push((v, n));
                next.push(n);
                n += 1;
            }
        }
        frontier = next;
    }
    Tree::from_edges(n, &edges).unwrap()
}

/// Two stars whose centers are joined by a path.
fn dumbbell(leaves: usize, bar: usize) -> Tree {
    let mut edges: Vec<_> = (1..bar).map(|v| (v - 1, v)).collect();
    let mut n = bar;
    for center in [0, bar - 1] {
        for _ in 0..leaves {
            edges.push((center, n));
            n += 1;
        }
    }
    Tree::from_edges(n, &edges).unwrap()
}

fn check(t: &Tree) {
    let cert = label_tree_7(t).unwrap_or_else(|e| panic!("{t:?}: {e}"));
    assert!(cert.verified);
    assert!(is_k_cordial(t, &cert.labeling).unwrap().is_cordial());
    assert_eq!(replay(t, &cert.trace).unwrap(), cert.labeling);
}

#[test]
fn complete_trees() {
    for arity in 2..=7 {
        for depth in 1..=5 {
            let t = full_ary(arity, depth);
            if t.len() <= 3000 {
                check(&t);
            }
        }
    }
}

#[test]
fn spiders() {
    for legs in 1..=30 {
        for len in 1..=5 {
            check(&Tree::spider(&vec![len; legs]));
        }
    }
    check(&Tree::spider(&[1, 2, 3, 4, 5, 6, 7, 8, 9]));
}

#[test]
fn stars_paths_and_dumbbells() {
    for n in 1..=60 {
        check(&Tree::star(n));
        check(&Tree::path(n));
    }
    for leaves in 0..=12 {
        for bar in 2..=12 {
            check(&dumbbell(leaves, bar));
        }
    }
}
