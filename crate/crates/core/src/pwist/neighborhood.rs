//! Balls around the root with edge lengths `|1/conductance|`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use serde::Serialize;

use super::SkeletonTree;
use crate::error::{Error, Result};
use crate::linalg::{SparseSymMatrix, SymMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodEdge {
    pub parent: usize,
    pub child: usize,
    pub conductance: f64,
    /// Distance from the root to `child`.
    pub distance: f64,
}

/// Vertices within `radius` of the root, their distances, and the shortest-path edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootedNeighborhood {
    pub root: usize,
    /// Possibly nudged upward so no vertex sits exactly on the boundary.
    pub radius: f64,
    /// `(vertex, distance)`, sorted by distance then index.
    pub vertices: Vec<(usize, f64)>,
    pub edges: Vec<NeighborhoodEdge>,
}

impl RootedNeighborhood {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.iter().any(|&(u, _)| u == v)
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over a neighbor oracle; returns distances and shortest-path parents.
fn dijkstra<F>(n: usize, root: usize, neighbors: F) -> (Vec<f64>, Vec<Option<(usize, f64)>>)
where
    F: Fn(usize, &mut dyn FnMut(usize, f64)),
{
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(Entry(0.0, root));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        neighbors(u, &mut |v, c| {
            if c == 0.0 {
                return;
            }
            let nd = d + (1.0 / c).abs();
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = Some((u, c));
                heap.push(Entry(nd, v));
            }
        });
    }
    (dist, parent)
}

fn build(root: usize, radius: f64, dist: &[f64], parent: &[Option<(usize, f64)>]) -> Result<RootedNeighborhood> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let mut r = radius;
    while dist.iter().any(|&d| d == r) {
        r += 1e-12 * r;
    }
    let mut vertices: Vec<(usize, f64)> = dist.iter().enumerate().filter(|(_, &d)| d < r).map(|(v, &d)| (v, d)).collect();
    vertices.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let edges = vertices
        .iter()
        .filter_map(|&(v, d)| {
            parent[v].map(|(u, c)| NeighborhoodEdge {
                parent: u,
                child: v,
                conductance: c,
                distance: d,
            })
        })
        .collect();
    Ok(RootedNeighborhood {
        root,
        radius: r,
        vertices,
        edges,
    })
}

pub fn neighborhood_sparse(m: &SparseSymMatrix, root: usize, radius: f64) -> Result<RootedNeighborhood> {
    if root >= m.n() {
        return Err(Error::invalid(format!("root {root} out of range")));
    }
    let (dist, parent) = dijkstra(m.n(), root, |u, f| {
        for &(v, c) in m.row(u) {
            f(v, c)
        }
    });
    build(root, radius, &dist, &parent)
}

pub fn neighborhood_dense(m: &SymMatrix, root: usize, radius: f64) -> Result<RootedNeighborhood> {
    if root >= m.n() {
        return Err(Error::invalid(format!("root {root} out of range")));
    }
    let (dist, parent) = dijkstra(m.n(), root, |u, f| {
        for (v, &c) in m.row(u).iter().enumerate() {
            if v != u {
                f(v, c)
            }
        }
    });
    build(root, radius, &dist, &parent)
}

impl SkeletonTree {
    pub fn neighborhood(&self, radius: f64) -> Result<RootedNeighborhood> {
        neighborhood_sparse(&self.operator(), 0, radius)
    }
}

/// Edge records as for trees plus a `distance` field; vertices are named by
/// their tree word when a tree is given, otherwise by `[index]`.
pub fn write_neighborhood_json_lines<W: Write>(nb: &RootedNeighborhood, tree: Option<&SkeletonTree>, mut w: W) -> Result<()> {
    #[derive(Serialize)]
    struct Record {
        parent_word: Vec<u32>,
        child_word: Vec<u32>,
        conductance: f64,
        distance: f64,
    }
    let word = |v: usize| match tree {
        Some(t) => t.nodes()[v].word.clone(),
        None => vec![v as u32],
    };
    for e in &nb.edges {
        serde_json::to_writer(
            &mut w,
            &Record {
                parent_word: word(e.parent),
                child_word: word(e.child),
                conductance: e.conductance,
                distance: e.distance,
            },
        )?;
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, c: f64) -> SparseSymMatrix {
        let mut m = SparseSymMatrix::new(n);
        for i in 0..n - 1 {
            m.push_sym(i, i + 1, c);
        }
        m
    }

    #[test]
    fn unit_path() {
        let nb = neighborhood_sparse(&path(10, 1.0), 0, 2.5).unwrap();
        assert_eq!(nb.vertices.iter().map(|v| v.0).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(nb.edges.len(), 2);
        let tiny = neighborhood_sparse(&path(10, 1.0), 0, 0.5).unwrap();
        assert_eq!(tiny.vertices, vec![(0, 0.0)]);
    }

    #[test]
    fn boundary_is_nudged() {
        let nb = neighborhood_sparse(&path(10, 1.0), 0, 2.0).unwrap();
        assert!(nb.radius > 2.0);
        assert!(nb.vertices.iter().all(|v| v.1 != nb.radius));
        assert_eq!(nb.vertices.len(), 3);
    }

    #[test]
    fn nested_balls() {
        let mut m = SymMatrix::zeros(6);
        for (i, j, c) in [(0, 1, 2.0), (1, 2, -0.5), (0, 3, 0.25), (3, 4, 4.0), (2, 5, 1.0), (4, 5, 3.0)] {
            m.set_sym(i, j, c);
        }
        let mut last: Vec<usize> = Vec::new();
        for r in [0.1, 0.6, 1.0, 2.6, 3.0, 5.0, 9.0] {
            let nb = neighborhood_dense(&m, 0, r).unwrap();
            assert!(last.iter().all(|&v| nb.contains(v)));
            last = nb.vertices.iter().map(|v| v.0).collect();
        }
        assert_eq!(last.len(), 6);
    }
}
