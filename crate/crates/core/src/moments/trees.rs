//! Colored rooted tree counts.
//!
//! A colored tree is a plane tree with `p` edges together with a partition of
//! its non-root vertices into color classes such that members of a class sit
//! at the same depth and have parents in a common class. Classes are
//! unlabeled. Each class corresponds to one distinct edge of a closed walk of
//! length `2p` on a tree, and its size is half the number of times the walk
//! crosses that edge.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest `p` accepted by the enumerator.
pub const MAX_TREE_ORDER: usize = 8;

/// A partition of `p` as a nonincreasing list of positive parts.
pub type Partition = Vec<usize>;

/// All partitions of `p` in decreasing lexicographic order, e.g. `[4], [3,1], [2,2], [2,1,1], [1,1,1,1]`.
pub fn enumerate_partitions(p: usize) -> Vec<Partition> {
    fn rec(rest: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(cap)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p > 0 {
        rec(p, p, &mut Vec::new(), &mut out);
    }
    out
}

struct PlaneTree {
    parent: Vec<usize>,
    depth: Vec<usize>,
}

/// Plane trees with `p` edges, one per Dyck path of length `2p`. Vertex 0 is the root.
fn plane_trees(p: usize) -> Vec<PlaneTree> {
    fn rec(p: usize, ups: usize, stack: &mut Vec<usize>, tree: &mut PlaneTree, out: &mut Vec<PlaneTree>) {
        if ups == p && stack.len() == 1 {
            out.push(PlaneTree {
                parent: tree.parent.clone(),
                depth: tree.depth.clone(),
            });
            return;
        }
        if ups < p {
            let top = *stack.last().expect("stack holds the root");
            let v = tree.parent.len();
            tree.parent.push(top);
            tree.depth.push(tree.depth[top] + 1);
            stack.push(v);
            rec(p, ups + 1, stack, tree, out);
            stack.pop();
            tree.parent.pop();
            tree.depth.pop();
        }
        if stack.len() > 1 {
            let v = stack.pop().expect("nonempty");
            rec(p, ups, stack, tree, out);
            stack.push(v);
        }
    }
    let mut tree = PlaneTree {
        parent: vec![0],
        depth: vec![0],
    };
    let mut out = Vec::new();
    rec(p, 0, &mut vec![0], &mut tree, &mut out);
    out
}

struct Block {
    depth: usize,
    parent_block: usize,
    size: usize,
}

/// Adds, for every admissible coloring of `tree`, one to the count of its class-size profile.
fn count_colorings(tree: &PlaneTree, counts: &mut BTreeMap<Partition, u64>) {
    let mut order: Vec<usize> = (1..tree.parent.len()).collect();
    order.sort_by_key(|&v| tree.depth[v]);
    // block index per vertex; the root is its own block 0
    let mut block_of = vec![0usize; tree.parent.len()];
    let mut blocks = vec![Block {
        depth: 0,
        parent_block: usize::MAX,
        size: 1,
    }];

    fn rec(
        k: usize,
        order: &[usize],
        tree: &PlaneTree,
        block_of: &mut [usize],
        blocks: &mut Vec<Block>,
        counts: &mut BTreeMap<Partition, u64>,
    ) {
        if k == order.len() {
            let mut sizes: Vec<usize> = blocks[1..].iter().map(|b| b.size).collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            *counts.entry(sizes).or_insert(0) += 1;
            return;
        }
        let v = order[k];
        let pb = block_of[tree.parent[v]];
        let d = tree.depth[v];
        for b in 1..blocks.len() {
            if blocks[b].depth == d && blocks[b].parent_block == pb {
                blocks[b].size += 1;
                block_of[v] = b;
                rec(k + 1, order, tree, block_of, blocks, counts);
                blocks[b].size -= 1;
            }
        }
        blocks.push(Block {
            depth: d,
            parent_block: pb,
            size: 1,
        });
        block_of[v] = blocks.len() - 1;
        rec(k + 1, order, tree, block_of, blocks, counts);
        blocks.pop();
    }

    rec(0, &order, tree, &mut block_of, &mut blocks, counts);
}

fn table(p: usize) -> Result<BTreeMap<Partition, u64>> {
    if p > MAX_TREE_ORDER {
        return Err(Error::Capacity(format!(
            "colored tree enumeration is capped at p = {MAX_TREE_ORDER}, got {p}"
        )));
    }
    static CACHE: OnceLock<Mutex<BTreeMap<usize, BTreeMap<Partition, u64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache lock").get(&p) {
        return Ok(t.clone());
    }
    let mut counts = BTreeMap::new();
    for tree in plane_trees(p) {
        count_colorings(&tree, &mut counts);
    }
    cache.lock().expect("cache lock").insert(p, counts.clone());
    Ok(counts)
}

fn check_partition(q: &[usize]) -> Result<()> {
    if q.is_empty() || q.contains(&0) || q.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid(format!("{q:?} is not a nonincreasing list of positive parts")));
    }
    Ok(())
}

/// Number of colored trees whose class sizes are exactly `q`.
pub fn count_colored_trees(q: &[usize]) -> Result<u64> {
    check_partition(q)?;
    let p: usize = q.iter().sum();
    Ok(table(p)?.get(q).copied().unwrap_or(0))
}

/// Every partition of `p` with its tree count.
pub fn colored_tree_table(p: usize) -> Result<Vec<(Partition, u64)>> {
    let t = table(p)?;
    Ok(enumerate_partitions(p)
        .into_iter()
        .map(|q| {
            let c = t.get(&q).copied().unwrap_or(0);
            (q, c)
        })
        .collect())
}

/// Sum of tree counts over partitions of `p` with exactly `l` parts.
pub fn tree_count_by_parts(p: usize, l: usize) -> Result<u64> {
    Ok(table(p)?.iter().filter(|(q, _)| q.len() == l).map(|(_, c)| c).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed walks of length `2p` from the root of an unlabeled infinite tree,
    /// new vertices named in order of first visit; returns the half crossing
    /// counts of each distinct edge.
    fn walk_profiles(p: usize) -> BTreeMap<Partition, u64> {
        struct State {
            parent: Vec<usize>,
            children: Vec<Vec<usize>>,
            crossings: Vec<usize>,
        }
        fn rec(cur: usize, left: usize, depth: usize, s: &mut State, out: &mut BTreeMap<Partition, u64>) {
            if left == 0 {
                if cur == 0 {
                    let mut q: Vec<usize> = s.crossings[1..].iter().map(|c| c / 2).collect();
                    q.sort_unstable_by(|a, b| b.cmp(a));
                    *out.entry(q).or_insert(0) += 1;
                }
                return;
            }
            if depth > left {
                return;
            }
            if cur != 0 {
                s.crossings[cur] += 1;
                rec(s.parent[cur], left - 1, depth - 1, s, out);
                s.crossings[cur] -= 1;
            }
            for k in 0..s.children[cur].len() {
                let c = s.children[cur][k];
                s.crossings[c] += 1;
                rec(c, left - 1, depth + 1, s, out);
                s.crossings[c] -= 1;
            }
            let v = s.parent.len();
            s.parent.push(cur);
            s.children.push(Vec::new());
            s.crossings.push(1);
            s.children[cur].push(v);
            rec(v, left - 1, depth + 1, s, out);
            s.children[cur].pop();
            s.parent.pop();
            s.children.pop();
            s.crossings.pop();
        }
        let mut s = State {
            parent: vec![0],
            children: vec![Vec::new()],
            crossings: vec![0],
        };
        let mut out = BTreeMap::new();
        rec(0, 2 * p, 0, &mut s, &mut out);
        out
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_colored_trees(&[1]).unwrap(), 1);
        assert_eq!(count_colored_trees(&[1, 1]).unwrap(), 2);
        assert_eq!(count_colored_trees(&[2]).unwrap(), 1);
        assert!(count_colored_trees(&[1, 2]).is_err());
        assert!(matches!(count_colored_trees(&[9]), Err(Error::Capacity(_))));
    }

    #[test]
    fn partitions() {
        assert_eq!(enumerate_partitions(1), vec![vec![1]]);
        assert_eq!(enumerate_partitions(2), vec![vec![2], vec![1, 1]]);
        let counts: Vec<usize> = (1..=8).map(|p| enumerate_partitions(p).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn matches_closed_walks() {
        for p in 1..=6 {
            let walks = walk_profiles(p);
            for (q, c) in colored_tree_table(p).unwrap() {
                assert_eq!(c, walks.get(&q).copied().unwrap_or(0), "p={p} q={q:?}");
            }
        }
    }

    #[test]
    fn all_singleton_classes_count_plane_trees() {
        let catalan = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for p in 1..=MAX_TREE_ORDER {
            assert_eq!(count_colored_trees(&vec![1; p]).unwrap(), catalan[p]);
        }
    }
}
