use ndarray::ArrayView2;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Smallest impurity decrease that counts as an improvement.
const MIN_DECREASE: f64 = 1e-12;

/// Gini impurity `1 - p0^2 - p1^2` of a binary label multiset. Empty input
/// has impurity 0.
pub fn gini(labels: &[u8]) -> f64 {
    let n1 = labels.iter().filter(|&&v| v == 1).count();
    gini_counts(labels.len() - n1, n1)
}

fn gini_counts(n0: usize, n1: usize) -> f64 {
    let n = (n0 + n1) as f64;
    if n == 0.0 {
        return 0.0;
    }
    // equals 1 - p0^2 - p1^2, written so relabelling is exact
    2.0 * (n0 as f64) * (n1 as f64) / (n * n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    /// Class probabilities `[p0, p1]`.
    Leaf { p: [f64; 2] },
}

/// Node arena; the root is `nodes[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Features drawn at each node.
    pub subspace: usize,
    /// `Some(1)` grows a stump; `None` grows until pure.
    pub max_depth: Option<usize>,
}

impl Tree {
    /// Class-1 probability of the leaf `row` lands in.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
                Node::Leaf { p } => return p[1],
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

/// Grows a Gini tree on `rows` of `x` (repeats allowed, as in a bootstrap).
/// At every node a fresh uniform subset of `params.subspace` features is
/// drawn; the best midpoint split by impurity decrease wins, ties going to
/// the lowest feature index and then the lowest threshold. A node becomes a
/// leaf when pure, at `max_depth`, or when no sampled feature reduces
/// impurity.
pub fn tree_train<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    y: &[u8],
    rows: &[usize],
    params: &TreeParams,
    rng: &mut R,
) -> Tree {
    let m = x.ncols();
    let k = params.subspace.clamp(1, m.max(1));
    let mut nodes = vec![Node::Leaf { p: [0.5, 0.5] }];
    let mut pending = vec![(0usize, rows.to_vec(), 0usize)];
    let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(rows.len());

    while let Some((slot, rows, depth)) = pending.pop() {
        let n1 = rows.iter().filter(|&&r| y[r] == 1).count();
        let n0 = rows.len() - n1;
        let leaf = leaf_of(n0, n1);
        let stop = n0 == 0 || n1 == 0 || params.max_depth.is_some_and(|d| depth >= d);
        if stop {
            nodes[slot] = leaf;
            continue;
        }
        let features: Vec<usize> = if k >= m {
            (0..m).collect()
        } else {
            let mut f = index::sample(rng, m, k).into_vec();
            f.sort_unstable();
            f
        };
        let parent = gini_counts(n0, n1);
        let mut best: Option<Candidate> = None;
        for &f in &features {
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (x[[r, f]], y[r])));
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (mut l0, mut l1) = (0usize, 0usize);
            for i in 0..pairs.len() - 1 {
                if pairs[i].1 == 1 {
                    l1 += 1
                } else {
                    l0 += 1
                }
                let (a, b) = (pairs[i].0, pairs[i + 1].0);
                if a >= b {
                    continue;
                }
                let nl = (l0 + l1) as f64;
                let nr = rows.len() as f64 - nl;
                let child = (nl * gini_counts(l0, l1) + nr * gini_counts(n0 - l0, n1 - l1)) / rows.len() as f64;
                let decrease = parent - child;
                if decrease > MIN_DECREASE && best.as_ref().is_none_or(|c| decrease > c.decrease) {
                    best = Some(Candidate { feature: f, threshold: midpoint(a, b), decrease });
                }
            }
        }
        let Some(split) = best else {
            nodes[slot] = leaf;
            continue;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| x[[r, split.feature]] <= split.threshold);
        let left = nodes.len();
        nodes.push(Node::Leaf { p: [0.5, 0.5] });
        nodes.push(Node::Leaf { p: [0.5, 0.5] });
        nodes[slot] = Node::Split { feature: split.feature, threshold: split.threshold, left, right: left + 1 };
        // right first so the left subtree is grown (and draws features) first
        pending.push((left + 1, right_rows, depth + 1));
        pending.push((left, left_rows, depth + 1));
    }
    Tree { nodes }
}

fn leaf_of(n0: usize, n1: usize) -> Node {
    let n = n0 + n1;
    if n == 0 {
        return Node::Leaf { p: [0.5, 0.5] };
    }
    let p1 = n1 as f64 / n as f64;
    Node::Leaf { p: [1.0 - p1, p1] }
}

/// Midpoint of `a < b` that still separates them under `<=`.
fn midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) / 2.0;
    if t >= b || !t.is_finite() {
        a
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full(m: usize) -> TreeParams {
        TreeParams { subspace: m, max_depth: None }
    }

    fn all_rows(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[1, 1, 1, 1]), 0.0);
        assert_eq!(gini(&[0, 0, 1, 1]), 0.5);
        assert_eq!(gini(&[0, 1, 1, 1]), 0.375);
    }

    #[test]
    fn separable_gives_stump() {
        let x = array![[1.0], [2.0], [3.0], [10.0], [11.0]];
        let y = [0, 0, 0, 1, 1];
        let t = tree_train(x.view(), &y, &all_rows(5), &full(1), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(t.depth(), 1);
        assert_eq!(t.nodes[0], Node::Split { feature: 0, threshold: 6.5, left: 1, right: 2 });
        for (row, &label) in x.rows().into_iter().zip(&y) {
            assert_eq!(t.predict(row.as_slice().unwrap()), label as f64);
        }
    }

    #[test]
    fn constant_input_is_prior_leaf() {
        let x = Array2::from_elem((4, 3), 2.0);
        let t = tree_train(x.view(), &[0, 1, 1, 1], &all_rows(4), &full(3), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(t.nodes, vec![Node::Leaf { p: [0.25, 0.75] }]);
    }

    #[test]
    fn xor_needs_depth_two() {
        // Balanced quadrants give no root decrease at all. With counts
        // 1, 2, 1, 3 the parent impurity is 24/49 and the decreases by hand
        // are 25/294 for x0 and 1/245 for x1, so x0 is the root.
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (a, b, label, copies) in [(0.0, 0.0, 0, 1), (0.0, 1.0, 1, 2), (1.0, 0.0, 1, 1), (1.0, 1.0, 0, 3)] {
            for _ in 0..copies {
                x.extend([a, b]);
                y.push(label);
            }
        }
        let x = Array2::from_shape_vec((7, 2), x).unwrap();
        let t = tree_train(x.view(), &y, &all_rows(7), &full(2), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(t.depth() >= 2);
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, threshold: 0.5, .. }));
        for (row, &label) in x.rows().into_iter().zip(&y) {
            assert_eq!(t.predict(row.as_slice().unwrap()), label as f64);
        }
    }

    #[test]
    fn tie_prefers_lowest_feature() {
        // both columns separate perfectly
        let x = array![[0.0, 0.0], [1.0, 1.0]];
        let t = tree_train(x.view(), &[0, 1], &all_rows(2), &full(2), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn stump_depth() {
        let x = Array2::from_shape_fn((20, 1), |(i, _)| i as f64);
        let y: Vec<u8> = (0..20).map(|i| (i % 3 == 0) as u8).collect();
        let p = TreeParams { subspace: 1, max_depth: Some(1) };
        let t = tree_train(x.view(), &y, &all_rows(20), &p, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(t.depth() <= 1);
    }

    fn path_splits(t: &Tree) -> bool {
        // no root-to-leaf path repeats a (feature, threshold) pair
        fn walk(t: &Tree, at: usize, seen: &mut Vec<(usize, u64)>) -> bool {
            match t.nodes[at] {
                Node::Leaf { .. } => true,
                Node::Split { feature, threshold, left, right } => {
                    let key = (feature, threshold.to_bits());
                    if seen.contains(&key) {
                        return false;
                    }
                    seen.push(key);
                    let ok = walk(t, left, seen) && walk(t, right, seen);
                    seen.pop();
                    ok
                }
            }
        }
        walk(t, 0, &mut Vec::new())
    }

    proptest! {
        #[test]
        fn gini_symmetric_and_bounded(labels in prop::collection::vec(0u8..2, 1..50)) {
            let flipped: Vec<u8> = labels.iter().map(|v| 1 - v).collect();
            let g = gini(&labels);
            prop_assert_eq!(g, gini(&flipped));
            prop_assert!((0.0..=0.5).contains(&g));
        }

        #[test]
        fn tree_structure_is_sound(
            v in prop::collection::vec(0i32..6, 6..60),
            labels in prop::collection::vec(0u8..2, 20),
            seed in 0u64..1000,
        ) {
            let n = (v.len() / 3).min(labels.len());
            let x = Array2::from_shape_fn((n, 3), |(i, j)| v[i * 3 + j] as f64);
            let y = &labels[..n];
            let t = tree_train(x.view(), y, &all_rows(n), &TreeParams { subspace: 2, max_depth: None }, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert!(path_splits(&t));
            for node in &t.nodes {
                if let Node::Leaf { p } = node {
                    prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
                }
            }
            for row in x.rows() {
                prop_assert!((0.0..=1.0).contains(&t.predict(row.as_slice().unwrap())));
            }
        }
    }
}
