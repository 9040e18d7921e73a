use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Linkage {
    Average,
}

/// One agglomeration step. Leaves are ids `0..n`; the cluster created by
/// step `s` gets id `n + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Agglomerative clustering with Euclidean distance and average linkage.
/// Ties between candidate pairs go to the pair with the smallest ids.
pub fn hier_cluster(points: &[Vec<f64>], linkage: Linkage) -> Result<Dendrogram> {
    let n = points.len();
    if n < 2 {
        return Err(Error::invalid("clustering needs at least two points"));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::Shape { expected: dim, got: p.len() });
    }
    // dist[i][j] between active cluster ids, grown as clusters are created
    let total = 2 * n - 1;
    let mut dist = vec![vec![f64::INFINITY; total]; total];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = euclidean(&points[i], &points[j]);
        }
    }
    let mut size = vec![1usize; total];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                if dist[i][j] < best.0 {
                    best = (dist[i][j], i, j);
                }
            }
        }
        let (d, a, b) = best;
        let new = n + step;
        size[new] = size[a] + size[b];
        active.retain(|&c| c != a && c != b);
        for &k in &active {
            let v = match linkage {
                Linkage::Average => (size[a] as f64 * dist[k][a] + size[b] as f64 * dist[k][b]) / size[new] as f64,
            };
            dist[k][new] = v;
            dist[new][k] = v;
        }
        active.push(new);
        merges.push(Merge { a, b, distance: d, size: size[new] });
    }
    Ok(Dendrogram { leaves: n, linkage, merges })
}

impl Dendrogram {
    /// Leaf members of cluster `id`, ascending.
    pub fn members(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if c < self.leaves {
                out.push(c);
            } else {
                let m = &self.merges[c - self.leaves];
                stack.push(m.a);
                stack.push(m.b);
            }
        }
        out.sort_unstable();
        out
    }

    /// Groups of leaves in the order they join `query`'s cluster.
    pub fn join_groups(&self, query: usize) -> Vec<Vec<usize>> {
        let mut current = query;
        let mut groups = Vec::new();
        for (s, m) in self.merges.iter().enumerate() {
            let other = if m.a == current {
                m.b
            } else if m.b == current {
                m.a
            } else {
                continue;
            };
            groups.push(self.members(other));
            current = self.leaves + s;
        }
        groups
    }

    /// Other leaves ordered by when they join `query`'s cluster; leaves that
    /// join in the same merge are ordered by their distance to `query`.
    pub fn similarity_order(&self, points: &[Vec<f64>], query: usize) -> Vec<usize> {
        self.join_groups(query)
            .into_iter()
            .flat_map(|mut g| {
                g.sort_by(|&x, &y| {
                    euclidean(&points[query], &points[x])
                        .total_cmp(&euclidean(&points[query], &points[y]))
                        .then(x.cmp(&y))
                });
                g
            })
            .collect()
    }
}
