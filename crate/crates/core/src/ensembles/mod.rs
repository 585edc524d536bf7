//! Entry laws, matrix sampling, the row replacement procedure, truncation
//! and Hermitization.

mod io;

pub use io::{read_binary, read_json_lines, write_binary, write_json_lines};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{EntrySampler, JumpSampler, LevyCharacteristics, LevyMeasure};
use crate::linalg::{sym_eigenvalues, SparseSymMatrix, SymMatrix};
use crate::rng::{stream, tag, CounterRng};

/// Fraction of `n` allowed for `Π{|x| > ε}` when ε is chosen automatically.
pub const DEFAULT_JUMP_BUDGET: f64 = 0.1;

/// Law of one off-diagonal entry at size n:
/// `sqrt(σ²_ε / n)·Z + Bernoulli(Π{|x|>ε}/n)·J` with `J ~ Π|{|x|>ε}` normalized.
#[derive(Debug, Clone)]
pub struct EntryLaw {
    n: usize,
    epsilon: f64,
    sigma2_eps: f64,
    jump_rate: f64,
    jumps: Option<JumpSampler>,
    levy: LevyMeasure,
}

impl EntryLaw {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Per-entry Gaussian variance `σ²_ε / n`.
    pub fn sigma2_eff(&self) -> f64 {
        self.sigma2_eps / self.n as f64
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn is_pure_jump(&self) -> bool {
        self.sigma2_eps == 0.0
    }

    fn draw_jump(&self, rng: &mut CounterRng) -> f64 {
        self.jumps.as_ref().expect("positive rate implies jumps").sample(rng)
    }

    /// Draws `count` i.i.d. entries and reports the nonzero ones by position.
    /// Pure-jump laws skip geometrically between jumps, so the draw sequence
    /// (and the result) does not depend on whether the caller stores zeros.
    pub fn fill_positions<F: FnMut(usize, f64)>(&self, rng: &mut CounterRng, count: usize, mut emit: F) {
        if self.is_pure_jump() {
            if self.jump_rate <= 0.0 {
                return;
            }
            let log_q = (-self.jump_rate).ln_1p();
            let mut pos = 0usize;
            loop {
                let skip = if self.jump_rate >= 1.0 {
                    0
                } else {
                    let u: f64 = 1.0 - rng.gen::<f64>();
                    let s = (u.ln() / log_q).floor();
                    if s >= (count - pos.min(count)) as f64 {
                        return;
                    }
                    s as usize
                };
                pos += skip;
                if pos >= count {
                    return;
                }
                let v = self.draw_jump(rng);
                emit(pos, v);
                pos += 1;
            }
        } else {
            let sd = self.sigma2_eff().sqrt();
            for pos in 0..count {
                let z: f64 = StandardNormal.sample(rng);
                let mut v = sd * z;
                if self.jump_rate > 0.0 && rng.gen::<f64>() < self.jump_rate {
                    v += self.draw_jump(rng);
                }
                emit(pos, v);
            }
        }
    }

    /// Entries `(i, j)` for `j > i`, from the row's own stream.
    pub fn sample_row_upper<F: FnMut(usize, f64)>(&self, seed: u64, i: usize, mut emit: F) {
        let mut rng = stream(seed, tag::MATRIX_ROW, &[i as u64]);
        let count = self.n.saturating_sub(i + 1);
        self.fill_positions(&mut rng, count, |p, v| emit(i + 1 + p, v));
    }
}

impl EntrySampler for EntryLaw {
    fn sample_entry(&self, rng: &mut CounterRng) -> f64 {
        let mut out = 0.0;
        if self.is_pure_jump() {
            if rng.gen::<f64>() < self.jump_rate {
                out = self.draw_jump(rng);
            }
        } else {
            self.fill_positions(rng, 1, |_, v| out = v);
        }
        out
    }

    fn exact_tail_probability(&self, t: f64) -> Option<f64> {
        if !self.is_pure_jump() {
            return None;
        }
        let total = self.levy.tail_mass(self.epsilon);
        if total == 0.0 || self.jump_rate == 0.0 {
            return Some(0.0);
        }
        Some(self.jump_rate * self.levy.tail_mass(t.max(self.epsilon)) / total)
    }

    fn exact_truncated_moments(&self, h: f64) -> Option<(f64, f64)> {
        if !self.is_pure_jump() {
            return None;
        }
        let total = self.levy.tail_mass(self.epsilon);
        if total == 0.0 || self.jump_rate == 0.0 || h <= self.epsilon {
            return Some((0.0, 0.0));
        }
        let w = self.jump_rate / total;
        let positive = self.levy.half_abs_moment_between(1.0, self.epsilon, h);
        let negative = -self.levy.half_abs_moment_between(1.0, self.epsilon, h);
        let second = 2.0 * self.levy.half_abs_moment_between(2.0, self.epsilon, h);
        Some((w * (positive + negative), w * second))
    }
}

/// Builds the entry law at size n. `epsilon = None` picks the smallest ε with
/// `Π{|x| > ε} <= n/10`.
pub fn build_entry_law(chars: &LevyCharacteristics, n: usize, epsilon: Option<f64>) -> Result<EntryLaw> {
    if n < 2 {
        return Err(Error::invalid(format!("matrix size must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let epsilon = match epsilon {
        Some(e) if e.is_finite() && e >= 0.0 => e,
        Some(e) => return Err(Error::invalid(format!("epsilon must be finite and >= 0, got {e}"))),
        None => chars.default_epsilon(DEFAULT_JUMP_BUDGET * nf),
    };
    let mass = chars.levy().tail_mass(epsilon);
    if !mass.is_finite() {
        return Err(Error::invalid(format!(
            "Π{{|x| > {epsilon}}} is infinite; pass a positive epsilon"
        )));
    }
    let jump_rate = mass / nf;
    if jump_rate > 1.0 {
        return Err(Error::invalid(format!(
            "jump rate Π{{|x| > ε}}/n = {jump_rate} exceeds 1; increase n or epsilon"
        )));
    }
    let sigma2_eps = if epsilon > 0.0 {
        chars.gaussian_compensation(epsilon)?
    } else {
        chars.sigma2()
    };
    Ok(EntryLaw {
        n,
        epsilon,
        sigma2_eps,
        jump_rate,
        jumps: chars.levy().restricted_sampler(epsilon)?,
        levy: chars.levy().clone(),
    })
}

/// Default `h_n = n^(-exponent)` with exponent 1/4; the exponent must lie in `(0, 1/2)`.
pub fn choose_hn(n: usize, exponent: Option<f64>) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be >= 2, got {n}")));
    }
    let e = exponent.unwrap_or(0.25);
    if !(e > 0.0 && e < 0.5) {
        return Err(Error::invalid(format!("h_n exponent must lie in (0, 1/2), got {e}")));
    }
    Ok((n as f64).powf(-e))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleMeta {
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub h_n: Option<f64>,
    pub tau: Option<f64>,
}

/// One real symmetric draw with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrixSample {
    pub matrix: SymMatrix,
    pub meta: SampleMeta,
}

impl SymmetricMatrixSample {
    /// Wraps a matrix after checking symmetry and the zero diagonal.
    pub fn new(matrix: SymMatrix, meta: SampleMeta) -> Result<Self> {
        for i in 0..matrix.n() {
            if matrix.get(i, i) != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is nonzero")));
            }
        }
        Ok(Self { matrix, meta })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.as_slice().iter().fold(0.0, |a, &b| a.max(b.abs()))
    }
}

/// Dense symmetric sample; row `i` of the upper triangle comes from its own stream.
pub fn sample_matrix(law: &EntryLaw, seed: u64) -> SymmetricMatrixSample {
    let n = law.n;
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            law.sample_row_upper(seed, i, |j, v| out.push((j, v)));
            out
        })
        .collect();
    let mut m = SymMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m.set_sym(i, j, v);
        }
    }
    SymmetricMatrixSample {
        matrix: m,
        meta: SampleMeta {
            seed,
            epsilon: Some(law.epsilon),
            h_n: None,
            tau: None,
        },
    }
}

/// Same draw as [`sample_matrix`] stored sparsely; meant for pure-jump laws at large n.
pub fn sample_sparse(law: &EntryLaw, seed: u64) -> SparseSymMatrix {
    let n = law.n;
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            law.sample_row_upper(seed, i, |j, v| {
                if v != 0.0 {
                    out.push((j, v))
                }
            });
            out
        })
        .collect();
    let mut m = SparseSymMatrix::new(n);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m.push_sym(i, j, v);
        }
    }
    m
}

/// Replacement procedure rooted at vertex 0.
pub fn replace_procedure(m: &SymmetricMatrixSample, h_n: f64, sigma: f64, seed: u64) -> Result<SymmetricMatrixSample> {
    replace_procedure_rooted(m, h_n, sigma, seed, 0)
}

/// Replacement procedure from an arbitrary root:
/// entries above `h_n` get fresh random signs, vertices are ordered by
/// shortest-path distance from `root` with edge lengths `1/|M(j,k)|` (ties to
/// the smaller index), and each processed row puts `sigma` on one uniformly
/// chosen still-blank position at or below `h_n`, zeros elsewhere.
pub fn replace_procedure_rooted(
    m: &SymmetricMatrixSample,
    h_n: f64,
    sigma: f64,
    seed: u64,
    root: usize,
) -> Result<SymmetricMatrixSample> {
    let n = m.n();
    if !(h_n > 0.0) {
        return Err(Error::invalid(format!("h_n must be > 0, got {h_n}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if root >= n {
        return Err(Error::invalid(format!("root {root} out of range for n = {n}")));
    }
    let mut out = SymMatrix::zeros(n);
    // blank[i*n+j] marks positions still to be decided
    let mut blank = vec![false; n * n];
    for j in 0..n {
        let mut rng = stream(seed, tag::REPLACE_SIGN, &[j as u64]);
        for k in (j + 1)..n {
            let v = m.get(j, k);
            if v.abs() > h_n {
                let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                out.set_sym(j, k, s * v.abs());
            } else {
                blank[j * n + k] = true;
                blank[k * n + j] = true;
            }
        }
    }

    for j in distance_order(&m.matrix, root) {
        let blanks: Vec<usize> = (0..n).filter(|&k| blank[j * n + k]).collect();
        if blanks.is_empty() {
            continue;
        }
        let mut rng = stream(seed, tag::REPLACE_FILL, &[j as u64]);
        let pick = blanks[rng.gen_range(0..blanks.len())];
        for &k in &blanks {
            out.set_sym(j, k, if k == pick { sigma } else { 0.0 });
            blank[j * n + k] = false;
            blank[k * n + j] = false;
        }
    }

    Ok(SymmetricMatrixSample {
        matrix: out,
        meta: SampleMeta {
            h_n: Some(h_n),
            ..m.meta
        },
    })
}

/// Vertices sorted by shortest-path distance from `root` (dense Dijkstra,
/// lengths `1/|M(j,k)|`, zero entries absent). Ties and unreachable vertices
/// go by index.
pub fn distance_order(m: &SymMatrix, root: usize) -> Vec<usize> {
    let dist = shortest_distances(m, root);
    let mut order: Vec<usize> = (0..m.n()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    order
}

pub fn shortest_distances(m: &SymMatrix, root: usize) -> Vec<f64> {
    let n = m.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[root] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let row = m.row(u);
        for v in 0..n {
            let w = row[v];
            if !done[v] && w != 0.0 {
                let d = best + 1.0 / w.abs();
                if d < dist[v] {
                    dist[v] = d;
                }
            }
        }
    }
    dist
}

/// Zeroes entries with `|M(j,k)| > tau`.
pub fn truncate_matrix(m: &SymmetricMatrixSample, tau: f64) -> Result<SymmetricMatrixSample> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
    }
    Ok(SymmetricMatrixSample {
        matrix: m.matrix.map_entries(|x| if x.abs() > tau { 0.0 } else { x }),
        meta: SampleMeta {
            tau: Some(tau),
            ..m.meta
        },
    })
}

/// `rank(M - truncate(M, tau)) / n`. The difference is supported on the rows
/// holding an exceedance, so the rank is taken on that principal block.
pub fn rank_defect_fraction(m: &SymmetricMatrixSample, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
    }
    let n = m.n();
    let rows = exceedance_rows(m, tau);
    if rows.is_empty() {
        return Ok(0.0);
    }
    let k = rows.len();
    let mut block = SymMatrix::zeros(k);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in rows.iter().enumerate().skip(a + 1) {
            let v = m.get(i, j);
            if v.abs() > tau {
                block.set_sym(a, b, v);
            }
        }
    }
    // The threshold is relative to the full size n, not the block size.
    let ev = sym_eigenvalues(&block)?;
    let top = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let thr = n as f64 * f64::EPSILON * top;
    let rank = ev.iter().filter(|x| x.abs() > thr).count();
    Ok(rank as f64 / n as f64)
}

/// Rows containing at least one entry with `|M(j,k)| > tau`.
pub fn exceedance_rows(m: &SymmetricMatrixSample, tau: f64) -> Vec<usize> {
    (0..m.n()).filter(|&i| m.matrix.row(i).iter().any(|x| x.abs() > tau)).collect()
}

/// General square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries, got {}", n * n, data.len())));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// All off-diagonal entries i.i.d. from `law`, zero diagonal.
pub fn sample_nonhermitian(law: &EntryLaw, seed: u64) -> SquareMatrix {
    let n = law.n;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut rng = stream(seed, tag::NONHERMITIAN_ROW, &[i as u64]);
            law.fill_positions(&mut rng, n - 1, |p, v| {
                let j = if p < i { p } else { p + 1 };
                row[j] = v;
            });
            row
        })
        .collect();
    SquareMatrix {
        n,
        data: rows.concat(),
    }
}

/// The `2n × 2n` symmetric matrix with `H(2j, 2k+1) = H(2k+1, 2j) = A(j,k)`,
/// a permutation of `[[0, A], [Aᵀ, 0]]`. Its eigenvalues are `±` the singular values of `A`.
pub fn hermitize(a: &SquareMatrix) -> SymmetricMatrixSample {
    let n = a.n;
    let mut h = SymMatrix::zeros(2 * n);
    for j in 0..n {
        for k in 0..n {
            h.set_sym(2 * j, 2 * k + 1, a.get(j, k));
        }
    }
    SymmetricMatrixSample {
        matrix: h,
        meta: SampleMeta::default(),
    }
}
