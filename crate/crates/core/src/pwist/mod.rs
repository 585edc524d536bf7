//! Truncated Poisson weighted trees with cords, their conductance operator
//! and root spectral measure.

mod lwc;
mod neighborhood;

pub use lwc::{lwc_diagnostic, row_count_check, LwcLevel, LwcReport};
pub use neighborhood::{neighborhood_dense, neighborhood_sparse, write_neighborhood_json_lines, NeighborhoodEdge, RootedNeighborhood};

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{LevyCharacteristics, LevyMeasure};
use crate::linalg::{sym_eigen_with_row, SparseSymMatrix, SymMatrix};
use crate::rng::{stream, tag};
use crate::spectra::SpectralMeasure;

/// Default cap on the arrival mass kept per node.
pub const DEFAULT_TREE_MASS: f64 = 20.0;
/// Largest tree handed to the dense eigensolver.
pub const DENSE_ROOT_BUDGET: usize = 4000;

/// The first `max_count` points, by decreasing modulus, of a Poisson process
/// with intensity `Π` restricted to `{|x| > eps}`.
pub fn sample_ordered_conductances<R: Rng + ?Sized>(
    levy: &LevyMeasure,
    eps: f64,
    max_count: Option<usize>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let Some(sampler) = levy.restricted_sampler(eps)? else {
        return Ok(Vec::new());
    };
    let count = Poisson::new(sampler.total_mass())
        .map_err(|e| Error::invalid(format!("Poisson mean {}: {e}", sampler.total_mass())))?
        .sample(rng) as usize;
    let mut out: Vec<f64> = (0..count).map(|_| sampler.sample(rng)).collect();
    out.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    if let Some(b) = max_count {
        out.truncate(b);
    }
    Ok(out)
}

/// Growth parameters: branching cap, depth cap, conductance floor, node budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub branching: usize,
    pub depth: usize,
    pub epsilon: f64,
    pub max_nodes: usize,
}

impl TreeParams {
    /// `B = 50`, `H = 6`, `ε` with `Π{|x| > ε} <= 20`.
    pub fn defaults_for(chars: &LevyCharacteristics) -> Self {
        Self {
            branching: 50,
            depth: 6,
            epsilon: chars.default_epsilon(DEFAULT_TREE_MASS),
            max_nodes: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNode {
    /// Child labels from the root; label 0 is the cord.
    pub word: Vec<u32>,
    pub parent: Option<usize>,
    /// Conductance of the edge to the parent (0 at the root).
    pub conductance: f64,
}

/// A finite rooted tree; node 0 is the root and nodes are stored breadth first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkeletonTree {
    nodes: Vec<TreeNode>,
    sigma: f64,
    params: TreeParams,
}

fn node_rng(seed: u64, word: &[u32]) -> crate::rng::CounterRng {
    let mut ids = Vec::with_capacity(word.len() + 1);
    ids.push(word.len() as u64);
    ids.extend(word.iter().map(|&w| w as u64));
    stream(seed, tag::TREE_NODE, &ids)
}

/// Children of the node at `word`: the cord first when `sigma > 0`, then the
/// ordered arrivals labeled `1..`. Depends only on `(seed, word)`.
pub fn node_children(
    chars: &LevyCharacteristics,
    params: &TreeParams,
    seed: u64,
    word: &[u32],
) -> Result<Vec<(u32, f64)>> {
    let mut rng = node_rng(seed, word);
    let arrivals = sample_ordered_conductances(chars.levy(), params.epsilon, Some(params.branching), &mut rng)?;
    let mut out = Vec::with_capacity(arrivals.len() + 1);
    if chars.sigma() > 0.0 {
        out.push((0, chars.sigma()));
    }
    out.extend(arrivals.into_iter().enumerate().map(|(k, c)| (k as u32 + 1, c)));
    Ok(out)
}

pub fn grow_pwist(chars: &LevyCharacteristics, params: TreeParams, seed: u64) -> Result<SkeletonTree> {
    if params.depth == 0 {
        return Err(Error::invalid("tree depth must be at least 1"));
    }
    if !(params.epsilon >= 0.0) {
        return Err(Error::invalid(format!("conductance floor must be >= 0, got {}", params.epsilon)));
    }
    let mut nodes = vec![TreeNode {
        word: Vec::new(),
        parent: None,
        conductance: 0.0,
    }];
    let mut frontier: Vec<usize> = vec![0];
    for _ in 0..params.depth {
        let kids: Vec<Vec<(u32, f64)>> = frontier
            .par_iter()
            .map(|&v| node_children(chars, &params, seed, &nodes[v].word))
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (&v, children) in frontier.iter().zip(kids) {
            for (label, c) in children {
                let mut word = nodes[v].word.clone();
                word.push(label);
                next.push(nodes.len());
                nodes.push(TreeNode {
                    word,
                    parent: Some(v),
                    conductance: c,
                });
                if nodes.len() > params.max_nodes {
                    return Err(Error::Capacity(format!(
                        "tree exceeds {} nodes; lower the depth or branching cap, or raise the floor",
                        params.max_nodes
                    )));
                }
            }
        }
        frontier = next;
    }
    Ok(SkeletonTree {
        nodes,
        sigma: chars.sigma(),
        params,
    })
}

impl SkeletonTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn depth(&self) -> usize {
        self.nodes.last().map_or(0, |n| n.word.len())
    }

    pub fn find(&self, word: &[u32]) -> Option<usize> {
        self.nodes.iter().position(|n| n.word == word)
    }

    /// `(child label, conductance)` of every child of node `v`, in label order.
    pub fn children(&self, v: usize) -> Vec<(u32, f64)> {
        self.nodes
            .iter()
            .filter(|n| n.parent == Some(v))
            .map(|n| (*n.word.last().expect("non-root"), n.conductance))
            .collect()
    }

    /// Checks edge count, cord labeling, arrival order and floor.
    pub fn validate(&self) -> Result<()> {
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let p = n.parent.ok_or_else(|| Error::Invariant(format!("node {i} has no parent")))?;
            if p >= i || n.word[..n.word.len() - 1] != self.nodes[p].word[..] {
                return Err(Error::Invariant(format!("node {i} is not below its parent")));
            }
            kids[p].push(i);
        }
        for (v, ks) in kids.iter().enumerate() {
            let mut last = f64::INFINITY;
            for &k in ks {
                let node = &self.nodes[k];
                let label = *node.word.last().expect("non-root");
                if label == 0 {
                    if node.conductance != self.sigma {
                        return Err(Error::Invariant(format!("cord below node {v} has conductance {}", node.conductance)));
                    }
                    continue;
                }
                let a = node.conductance.abs();
                if a > last || a < self.params.epsilon || a == 0.0 {
                    return Err(Error::Invariant(format!("arrivals below node {v} out of order or under the floor")));
                }
                last = a;
            }
            if ks.iter().filter(|&&k| *self.nodes[k].word.last().unwrap() != 0).count() > self.params.branching {
                return Err(Error::Invariant(format!("node {v} exceeds the branching cap")));
            }
        }
        if self.depth() > self.params.depth {
            return Err(Error::Invariant("tree deeper than its cap".into()));
        }
        Ok(())
    }

    /// Adjacency matrix weighted by conductances.
    pub fn operator(&self) -> SparseSymMatrix {
        let mut m = SparseSymMatrix::new(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                m.push_sym(p, i, n.conductance);
            }
        }
        m
    }

    /// One JSON object per edge: `{"parent_word", "child_word", "conductance"}`.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct EdgeRecord<'a> {
            parent_word: &'a [u32],
            child_word: &'a [u32],
            conductance: f64,
        }
        for n in &self.nodes[1..] {
            let p = n.parent.expect("non-root");
            serde_json::to_writer(
                &mut w,
                &EdgeRecord {
                    parent_word: &self.nodes[p].word,
                    child_word: &n.word,
                    conductance: n.conductance,
                },
            )?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `Σ_j ⟨e_root, v_j⟩² δ_{λ_j}` by dense diagonalization, symmetrized exactly
/// (trees are bipartite). Errors above [`DENSE_ROOT_BUDGET`] nodes.
pub fn root_spectral_measure(tree: &SkeletonTree) -> Result<SpectralMeasure> {
    if tree.len() > DENSE_ROOT_BUDGET {
        return Err(Error::Capacity(format!(
            "tree has {} nodes, above the dense budget of {DENSE_ROOT_BUDGET}; use root_spectral_measure_lanczos",
            tree.len()
        )));
    }
    let dense: SymMatrix = tree.operator().to_dense();
    let (vals, weights) = sym_eigen_with_row(&dense, 0)?;
    Ok(SpectralMeasure::from_atoms(&vals, &weights)?.symmetrized())
}

/// Gauss quadrature of the root measure from `steps` Lanczos iterations with
/// full reorthogonalization; exact for moments up to order `2·steps − 1`.
pub fn root_spectral_measure_lanczos(tree: &SkeletonTree, steps: usize) -> Result<SpectralMeasure> {
    let op = tree.operator();
    let (alpha, beta) = lanczos(&op, 0, steps)?;
    let k = alpha.len();
    let mut t = SymMatrix::zeros(k);
    for i in 0..k {
        t.set_sym(i, i, alpha[i]);
        if i + 1 < k {
            t.set_sym(i, i + 1, beta[i]);
        }
    }
    let (vals, weights) = sym_eigen_with_row(&t, 0)?;
    Ok(SpectralMeasure::from_atoms(&vals, &weights)?.symmetrized())
}

/// Whichever of the dense and Lanczos routes fits the tree size.
pub fn root_spectral_measure_auto(tree: &SkeletonTree, lanczos_steps: usize) -> Result<SpectralMeasure> {
    if tree.len() <= DENSE_ROOT_BUDGET {
        root_spectral_measure(tree)
    } else {
        root_spectral_measure_lanczos(tree, lanczos_steps)
    }
}

/// Jacobi coefficients `(α, β)` of `op` started at `e_start`.
fn lanczos(op: &SparseSymMatrix, start: usize, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = op.n();
    if start >= n || steps == 0 {
        return Err(Error::invalid("Lanczos needs a valid start vertex and at least one step"));
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut q = vec![0.0; n];
    q[start] = 1.0;
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![0.0; n];
    let scale = (0..n).map(|i| op.row(i).iter().map(|e| e.1.abs()).sum::<f64>()).fold(0.0, f64::max).max(1.0);
    for _ in 0..steps.min(n) {
        op.matvec(&q, &mut w);
        let a: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
        alpha.push(a);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nb = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nb <= 1e-12 * scale {
            break;
        }
        beta.push(nb);
        q = w.iter().map(|x| x / nb).collect();
    }
    beta.truncate(alpha.len().saturating_sub(1));
    Ok((alpha, beta))
}
