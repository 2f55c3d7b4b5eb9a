use std::collections::{BTreeMap, HashSet, VecDeque};

use proptest::prelude::*;

use cordial::cordiality::{check_def_2_10, count_profile, edge_weights, is_k_cordial, negate, rotate, Labeling};
use cordial::decompose::{apply_split, root_reach, split_plans};
use cordial::grace::{grace_label, layout};
use cordial::graph::random::prufer_decode;
use cordial::graph::{canonical_code, End, RootedPiece, Tree};
use cordial::search::{ConstraintSpec, SearchOutcome, Solver, SpecialWeight};

fn tree(max_n: usize) -> impl Strategy<Value = Tree> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n - 2)).prop_map(|seq| prufer_decode(&seq))
}

fn tree_and_labels(max_n: usize) -> impl Strategy<Value = (Tree, Labeling)> {
    (tree(max_n), 2u32..=12).prop_flat_map(|(t, k)| {
        let n = t.len();
        (Just(t), prop::collection::vec(0..k, n)).prop_map(move |(t, labels)| (t, Labeling::new(k, labels)))
    })
}

/// Vertex `v` hangs from a root or from an earlier vertex; vertex 0 (and 1
/// when there are two roots) starts a branch of root 0 (and root 1).
fn piece(max_p: usize) -> impl Strategy<Value = RootedPiece> {
    (1..=max_p, 1usize..=2)
        .prop_flat_map(|(p, roots)| {
            let roots = roots.min(p);
            let picks: Vec<_> = (0..p).map(|v| 0..(v + roots)).collect();
            (Just(p), Just(roots), picks)
        })
        .prop_map(|(p, roots, picks)| build_piece(p, roots, &picks))
}

fn build_piece(p: usize, roots: usize, picks: &[usize]) -> RootedPiece {
    let mut internal = Vec::new();
    let mut root_edges = Vec::new();
    for v in 0..p {
        let pick = if v < roots { v } else { picks[v] };
        if v < roots || pick < roots {
            root_edges.push((pick, v));
        } else {
            internal.push((pick - roots, v));
        }
    }
    RootedPiece::new(p, roots, &internal, &root_edges).unwrap()
}

fn relabel(piece: &RootedPiece, perm: &[usize], swap_roots: bool) -> RootedPiece {
    let r = piece.root_count();
    let root = |x: usize| if swap_roots && r == 2 { 1 - x } else { x };
    let internal: Vec<_> = piece.internal_edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    let root_edges: Vec<_> = (0..r).flat_map(|x| piece.tops(x).iter().map(move |&t| (root(x), perm[t]))).collect();
    RootedPiece::new(piece.len(), r, &internal, &root_edges).unwrap()
}

/// Tries every vertex bijection and root order.
fn isomorphic(a: &RootedPiece, b: &RootedPiece) -> bool {
    if a.len() != b.len() || a.root_count() != b.root_count() || a.internal_edges().len() != b.internal_edges().len() {
        return false;
    }
    let edge_set = |x: &RootedPiece| -> HashSet<(End, End)> {
        x.ends().into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect()
    };
    let target = edge_set(b);
    let p = a.len();
    let mut perm: Vec<usize> = (0..p).collect();
    let root_orders: Vec<Vec<usize>> = if a.root_count() == 2 { vec![vec![0, 1], vec![1, 0]] } else { vec![vec![0]] };
    loop {
        for ro in &root_orders {
            let map = |e: End| match e {
                End::Vertex(v) => End::Vertex(perm[v]),
                End::Root(r) => End::Root(ro[r]),
            };
            let image: HashSet<(End, End)> = a
                .ends()
                .into_iter()
                .map(|(u, v)| {
                    let (x, y) = (map(u), map(v));
                    (x.min(y), x.max(y))
                })
                .collect();
            if image == target {
                return true;
            }
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = (1..xs.len()).rev().find(|&i| xs[i - 1] < xs[i]) else { return false };
    let j = (i..xs.len()).rev().find(|&j| xs[j] > xs[i - 1]).unwrap();
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn all_pairs_diameter(t: &Tree) -> usize {
    (0..t.len())
        .map(|s| {
            let mut dist = vec![usize::MAX; t.len()];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in t.neighbors(u) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        q.push_back(w);
                    }
                }
            }
            dist.into_iter().max().unwrap()
        })
        .max()
        .unwrap()
}

/// Whether some full assignment meets `spec`, trying all `k^p` of them.
fn naive_exists<'a>(target: Target<'a>, spec: &ConstraintSpec) -> bool {
    let (p, ends) = match target {
        Target::Tree(t) => (t.len(), t.edges().iter().map(|&(u, v)| (End::Vertex(u), End::Vertex(v))).collect::<Vec<_>>()),
        Target::Piece(x) => (x.len(), x.ends()),
    };
    let k = spec.k as usize;
    let mut labels = vec![0u32; p];
    loop {
        let fixed_ok = spec.fixed.iter().all(|(&at, &x)| match at {
            End::Vertex(v) => labels[v] == x,
            End::Root(_) => true,
        });
        if fixed_ok {
            let label = |e: End| match e {
                End::Vertex(v) => labels[v],
                End::Root(r) => spec.fixed[&End::Root(r)],
            };
            let mut v = spec.base_v.clone();
            let mut e = spec.base_e.clone();
            labels.iter().for_each(|&x| v[x as usize] += 1);
            ends.iter().for_each(|&(a, b)| e[((label(a) + label(b)) % spec.k) as usize] += 1);
            let within = (0..k).all(|i| {
                spec.floor_v[i] <= v[i] && v[i] <= spec.cap_v[i] && spec.floor_e[i] <= e[i] && e[i] <= spec.cap_e[i]
            });
            let special = spec.special_weight.is_none_or(|sw| {
                let l = e[sw.weight as usize];
                e.iter().all(|&c| c <= l && l - c <= sw.slack)
            });
            if within && special {
                return true;
            }
        }
        let mut i = 0;
        loop {
            if i == p {
                return false;
            }
            labels[i] += 1;
            if labels[i] < spec.k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Tree(&'a Tree),
    Piece(&'a RootedPiece),
}

/// A spec with random context, caps near the cordial bounds, optional
/// floors, a special weight and a fixed vertex.
fn random_spec(k: u32, vertices: usize, edges: usize, roots: usize, knobs: &[u32]) -> ConstraintSpec {
    let kk = k as usize;
    let mut it = knobs.iter().copied().cycle();
    let mut next = |m: u32| it.next().unwrap() % m;
    let mut spec = ConstraintSpec::cordial(k, vertices, edges);
    for i in 0..kk {
        spec.base_v[i] = next(2) as usize;
        spec.base_e[i] = next(2) as usize;
        spec.cap_v[i] = spec.base_v[i] + spec.cap_v[i] + next(2) as usize;
        spec.cap_e[i] = spec.base_e[i] + spec.cap_e[i] + next(2) as usize;
        spec.floor_v[i] = if next(3) == 0 { spec.base_v[i] + next(2) as usize } else { 0 };
        spec.floor_e[i] = if next(3) == 0 { spec.base_e[i] + next(2) as usize } else { 0 };
    }
    if next(3) == 0 {
        spec.special_weight = Some(SpecialWeight { weight: next(k), slack: 2 });
    }
    for r in 0..roots {
        spec = spec.fix(End::Root(r), next(k));
    }
    if vertices > 0 && next(4) == 0 {
        spec = spec.fix(End::Vertex(next(vertices as u32) as usize), next(k));
    }
    spec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cordiality_survives_rotation_and_negation((t, f) in tree_and_labels(30), a in 0u32..12) {
        let a = a % f.k;
        let verdict = is_k_cordial(&t, &f).unwrap().is_cordial();
        prop_assert_eq!(is_k_cordial(&t, &rotate(&f, a)).unwrap().is_cordial(), verdict);
        prop_assert_eq!(is_k_cordial(&t, &negate(&f)).unwrap().is_cordial(), verdict);
        prop_assert_eq!(negate(&negate(&f)), f.clone());
    }

    #[test]
    fn rotation_shifts_weights_by_twice((t, f) in tree_and_labels(30), a in 0u32..12) {
        let a = a % f.k;
        let before = edge_weights(&t, &f).unwrap();
        let after = edge_weights(&t, &rotate(&f, a)).unwrap();
        for (w0, w1) in before.iter().zip(&after) {
            prop_assert_eq!(*w1, (w0 + 2 * a) % f.k);
        }
    }

    #[test]
    fn profile_totals((t, f) in tree_and_labels(30), p in piece(8), g in prop::collection::vec(0u32..7, 2), labels in prop::collection::vec(0u32..7, 8)) {
        let prof = count_profile(&t, &f).unwrap();
        prop_assert_eq!(prof.v_counts.iter().sum::<usize>(), t.len());
        prop_assert_eq!(prof.e_counts.iter().sum::<usize>(), t.len() - 1);
        let h = Labeling::with_roots(7, labels[..p.len()].to_vec(), g[..p.root_count()].to_vec());
        let prof = count_profile(&p, &h).unwrap();
        prop_assert_eq!(prof.v_counts.iter().sum::<usize>(), p.len());
        prop_assert_eq!(prof.e_counts.iter().sum::<usize>(), p.len());
    }

    #[test]
    fn balanced_pieces_pass_with_the_top_weight(p in piece(8), g in prop::collection::vec(0u32..7, 2), labels in prop::collection::vec(0u32..7, 8)) {
        let g = &g[..p.root_count()];
        let f = Labeling::with_roots(7, labels[..p.len()].to_vec(), g.to_vec());
        let prof = count_profile(&p, &f).unwrap();
        if prof.is_cordial() {
            let ell = (0..7).max_by_key(|&i| (prof.e_counts[i as usize], std::cmp::Reverse(i))).unwrap();
            let bare = Labeling::new(7, f.labels.clone());
            prop_assert!(check_def_2_10(&p, g, ell, &bare).unwrap());
        }
    }

    #[test]
    fn code_ignores_vertex_names(p in piece(8), seed in any::<u64>(), swap in any::<bool>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..p.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(canonical_code(&relabel(&p, &perm, swap)), canonical_code(&p));
    }

    #[test]
    fn code_equality_is_isomorphism(a in piece(7), b in piece(7), seed in any::<u64>(), copy in any::<bool>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let b = if copy {
            let mut perm: Vec<usize> = (0..a.len()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            relabel(&a, &perm, seed % 2 == 0)
        } else {
            b
        };
        prop_assert_eq!(canonical_code(&a) == canonical_code(&b), isomorphic(&a, &b));
    }

    #[test]
    fn longest_path_is_a_diameter(t in tree(50)) {
        let path = t.longest_path();
        prop_assert_eq!(path.len() - 1, all_pairs_diameter(&t));
        prop_assert_eq!(t.diameter(), path.len() - 1);
        let distinct: HashSet<_> = path.iter().collect();
        prop_assert_eq!(distinct.len(), path.len());
        for w in path.windows(2) {
            prop_assert!(t.neighbors(w[0]).contains(&w[1]));
        }
    }

    #[test]
    fn grace_is_cordial_on_caterpillars(t in tree(16), k in 2u32..=12, offset in 0u32..12) {
        if let Ok(lay) = layout(&t) {
            prop_assert!(lay.is_consistent(&t));
            let f = grace_label(&t, k, offset).unwrap();
            let prof = count_profile(&t, &f).unwrap();
            let (lo, hi) = (prof.v_counts.iter().min().unwrap(), prof.v_counts.iter().max().unwrap());
            prop_assert!(hi - lo <= 1);
            prop_assert!(prof.is_cordial());
        } else {
            prop_assert!(!t.is_caterpillar());
        }
    }

    #[test]
    fn split_paste_round_trip(t in tree(120), s in 5usize..=7) {
        prop_assume!(t.len() > s);
        for plan in split_plans(&t, s).unwrap().take(5) {
            let split = apply_split(&t, &plan).unwrap();
            prop_assert_eq!(split.paste().edge_set(), t.edge_set());
            prop_assert_eq!(split.core.len() + split.piece.len(), t.len());
            let expect: &[usize] = match plan.kind {
                cordial::decompose::PlanKind::ShortTree => &[s - 1],
                _ => &[s],
            };
            prop_assert!(expect.contains(&split.piece.len()));
            for (i, &r) in plan.roots.iter().enumerate() {
                prop_assert_eq!(split.core_map[split.root_in_core[i]], r);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solve_agrees_with_brute_force(
        use_piece in any::<bool>(),
        t in tree(7),
        p in piece(7),
        k in 2u32..=7,
        knobs in prop::collection::vec(any::<u32>(), 64),
    ) {
        let (target, n, edges, roots) = if use_piece {
            (Target::Piece(&p), p.len(), p.len(), p.root_count())
        } else {
            (Target::Tree(&t), t.len(), t.len() - 1, 0)
        };
        prop_assume!((k as u64).pow(n as u32) <= 200_000);
        let mut spec = random_spec(k, n, edges, roots, &knobs);
        if let Some(sw) = &mut spec.special_weight {
            sw.weight %= k;
        }
        let solver = Solver::without_memo();
        let outcome = match target {
            Target::Tree(t) => solver.solve(t, &spec),
            Target::Piece(p) => solver.solve(p, &spec),
        };
        let expected = naive_exists(target, &spec);
        match outcome {
            Ok(SearchOutcome::Found(f)) => {
                prop_assert!(expected);
                let mut witness = spec.clone();
                witness.fixed = f.labels.iter().enumerate().map(|(v, &x)| (End::Vertex(v), x)).collect::<BTreeMap<_, _>>();
                witness.fixed.extend(spec.fixed.iter().filter(|(e, _)| matches!(e, End::Root(_))).map(|(&e, &x)| (e, x)));
                prop_assert!(naive_exists(target, &witness));
            }
            Ok(SearchOutcome::Exhausted) => prop_assert!(!expected),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn memo_does_not_change_outcomes(p in piece(8), knobs in prop::collection::vec(any::<u32>(), 64)) {
        let spec = random_spec(7, p.len(), p.len(), p.root_count(), &knobs);
        let memo = Solver::new();
        let first = memo.solve(&p, &spec).unwrap();
        let again = memo.solve(&p, &spec).unwrap();
        let fresh = Solver::without_memo().solve(&p, &spec).unwrap();
        prop_assert_eq!(&first, &fresh);
        prop_assert_eq!(&again, &fresh);
        let mut perm: Vec<usize> = (0..p.len()).rev().collect();
        perm.rotate_left(knobs[0] as usize % p.len());
        let q = relabel(&p, &perm, false);
        let mut moved = spec.clone();
        moved.fixed = spec.fixed.iter().map(|(&e, &x)| (match e { End::Vertex(v) => End::Vertex(perm[v]), r => r }, x)).collect();
        prop_assert_eq!(memo.solve(&q, &moved).unwrap().found().is_some(), fresh.found().is_some());
    }
}

#[test]
fn small_trees_are_caterpillars_or_lobsters() {
    use cordial::graph::enumerate::enumerate_trees;
    use cordial::graph::TreeClass;
    for n in 1..=7 {
        for t in enumerate_trees(n).unwrap() {
            let class = t.classify();
            assert_ne!(class, TreeClass::Other);
            if n <= 6 {
                assert_eq!(class, TreeClass::Caterpillar);
            }
        }
    }
}

#[test]
fn path_stage_roots_stay_near_the_start_on_caterpillars() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let t = cordial::graph::random::hairy_path(rand::Rng::gen_range(&mut rng, 8..150), &mut rng);
        if !t.is_caterpillar() {
            continue;
        }
        for s in 5..=7 {
            for plan in split_plans(&t, s).unwrap().take(20) {
                assert!(root_reach(&t, &plan) <= s + 1, "{t:?} {plan:?}");
            }
        }
    }
}
