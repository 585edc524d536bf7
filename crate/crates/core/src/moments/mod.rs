//! Exact limiting moments from tree counts, their majorant, and Monte Carlo
//! trace moments for cross-checking.

mod trees;

pub use trees::{colored_tree_table, count_colored_trees, enumerate_partitions, tree_count_by_parts, Partition, MAX_TREE_ORDER};

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{build_entry_law, sample_matrix};
use crate::error::{Error, Result};
use crate::levy::LevyCharacteristics;
use crate::linalg::sym_eigenvalues;
use crate::rng::split_seed;
use crate::stats::mean_stderr;

/// `(2p)! / (p! (p+1)!)`.
pub fn catalan(p: u32) -> BigUint {
    // C(k+1) = C(k)·2(2k+1)/(k+2), exact at every step
    let mut c = BigUint::one();
    for k in 0..p {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

/// `S(2p, l) = (1/l!) Σ_k (−1)^(l−k) C(l,k) k^(2p)`, for `1 <= l <= 2p`.
pub fn stirling2_even(p: u32, l: u32) -> Result<BigUint> {
    if l == 0 || l > 2 * p {
        return Err(Error::invalid(format!("stirling2_even needs 1 <= l <= 2p, got p={p}, l={l}")));
    }
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=l {
        let term = &binom * BigInt::from(k).pow(2 * p);
        if (l - k) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * BigInt::from(l - k) / BigInt::from(k + 1);
    }
    let fact: BigInt = (1..=l).map(BigInt::from).product();
    (sum / fact)
        .to_biguint()
        .ok_or_else(|| Error::Numeric("negative Stirling number".into()))
}

fn big_to_f64(b: &BigUint) -> f64 {
    b.to_f64().unwrap_or(f64::INFINITY)
}

/// A limiting moment, or the first entry-moment order at which it diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MomentValue {
    Finite(f64),
    Infinite { divergent_order: u32 },
}

impl MomentValue {
    pub fn value(self) -> f64 {
        match self {
            MomentValue::Finite(v) => v,
            MomentValue::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MomentValue::Finite(_))
    }
}

/// Per-part weight: `σ² + M₂(Π)` for a part equal to 1, `M_{2q}(Π)` otherwise.
fn part_weight(chars: &LevyCharacteristics, q: usize) -> Result<f64> {
    let m = chars.levy().measure_moment(2 * q as u32)?;
    Ok(if q == 1 { chars.sigma2() + m } else { m })
}

/// `∫ x^{2p}` of the limiting spectral law.
pub fn lsd_moment(chars: &LevyCharacteristics, p: usize) -> Result<MomentValue> {
    if p == 0 {
        return Ok(MomentValue::Finite(1.0));
    }
    if p > MAX_TREE_ORDER {
        return Err(Error::Capacity(format!("lsd_moment is capped at p = {MAX_TREE_ORDER}, got {p}")));
    }
    let mut weights = Vec::with_capacity(p);
    for q in 1..=p {
        let w = part_weight(chars, q)?;
        if !w.is_finite() {
            return Ok(MomentValue::Infinite {
                divergent_order: 2 * q as u32,
            });
        }
        weights.push(w);
    }
    let mut total = 0.0;
    for (q, count) in colored_tree_table(p)? {
        if count == 0 {
            continue;
        }
        let mut term = count as f64;
        for &part in &q {
            term *= weights[part - 1];
        }
        total += term;
    }
    Ok(MomentValue::Finite(total))
}

/// `τ^{2p} c_p Σ_l S(2p, l) K^l` with `K = M₂(Π) + Π(|x| > 1) + σ²`. Values
/// `tau < 1` are raised to 1 since the bound is only derived for `τ >= 1`.
pub fn moment_bound(tau: f64, chars: &LevyCharacteristics, p: usize) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let radius = chars.levy().support_radius();
    if radius > tau {
        return Err(Error::invalid(format!("Lévy measure reaches {radius}, beyond tau = {tau}")));
    }
    if p == 0 {
        return Ok(1.0);
    }
    let k = chars.levy().abs_moment(2.0) + chars.levy().tail_mass(1.0) + chars.sigma2();
    let p32 = p as u32;
    let mut sum = 0.0;
    for l in 1..=p32 {
        sum += big_to_f64(&stirling2_even(p32, l)?) * k.powi(l as i32);
    }
    Ok(tau.max(1.0).powi(2 * p as i32) * big_to_f64(&catalan(p32)) * sum)
}

/// Tree count with `l` parts against its majorant `c_p S(2p, l)`.
#[derive(Debug, Clone, Serialize)]
pub struct TreeBoundRow {
    pub p: usize,
    pub parts: usize,
    pub count: u64,
    pub majorant: BigUint,
}

impl TreeBoundRow {
    pub fn holds(&self) -> bool {
        BigUint::from(self.count) <= self.majorant
    }
}

pub fn tree_bound_table(p: usize) -> Result<Vec<TreeBoundRow>> {
    let c = catalan(p as u32);
    (1..=p)
        .map(|l| {
            Ok(TreeBoundRow {
                p,
                parts: l,
                count: tree_count_by_parts(p, l)?,
                majorant: &c * stirling2_even(p as u32, l as u32)?,
            })
        })
        .collect()
}

/// Even moments `M_0, M_2, ..., M_{2 p_max}`; odd ones are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return Err(Error::invalid("moment vector must start with M_0 = 1"));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid("even moments must be nonnegative"));
        }
        Ok(Self { values })
    }

    pub fn from_lsd(chars: &LevyCharacteristics, p_max: usize) -> Result<Self> {
        let values = (0..=p_max).map(|p| lsd_moment(chars, p).map(MomentValue::value)).collect::<Result<_>>()?;
        Self::new(values)
    }

    pub fn p_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `M_{2p}`.
    pub fn even(&self, p: usize) -> f64 {
        self.values[p]
    }

    /// `M_k` for any `k <= 2 p_max`.
    pub fn get(&self, k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            self.values[k / 2]
        }
    }

    /// Positive semidefiniteness of the Hankel matrix `(M_{i+j})_{i,j <= p_max}`,
    /// via Cholesky of its unit-diagonal rescaling. Infinite entries fail.
    pub fn hankel_psd(&self) -> bool {
        let m = self.p_max() + 1;
        if self.values.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let d: Vec<f64> = (0..m).map(|i| self.get(2 * i).sqrt()).collect();
        if d.iter().any(|&x| x == 0.0) {
            // some M_{2i} = 0 with i >= 1 only fits δ₀
            return self.values[1..].iter().all(|&v| v == 0.0);
        }
        let mut a: Vec<f64> = (0..m * m).map(|k| self.get(k / m + k % m) / (d[k / m] * d[k % m])).collect();
        let tol = 1e-10;
        for j in 0..m {
            let mut pivot = a[j * m + j];
            for k in 0..j {
                pivot -= a[j * m + k] * a[j * m + k];
            }
            if pivot < -tol {
                return false;
            }
            if pivot <= tol {
                for i in j..m {
                    a[i * m + j] = 0.0;
                }
                continue;
            }
            let l = pivot.sqrt();
            a[j * m + j] = l;
            for i in j + 1..m {
                let mut s = a[i * m + j];
                for k in 0..j {
                    s -= a[i * m + k] * a[j * m + k];
                }
                a[i * m + j] = s / l;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo `E (1/n) tr(M^k)` for `k = 1..=max_order`, from exact eigenvalues.
pub fn trace_moments_mc(
    chars: &LevyCharacteristics,
    n: usize,
    max_order: u32,
    reps: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if reps < 2 {
        return Err(Error::invalid("trace moments need at least 2 replicates"));
    }
    let law = build_entry_law(chars, n, None)?;
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let m = sample_matrix(&law, split_seed(seed, &[n as u64, r as u64]));
            let ev = sym_eigenvalues(&m.matrix)?;
            Ok((1..=max_order)
                .map(|k| ev.iter().map(|x| x.powi(k as i32)).sum::<f64>() / n as f64)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((1..=max_order)
        .map(|k| {
            let xs: Vec<f64> = per_rep.iter().map(|v| v[k as usize - 1]).collect();
            let (mean, stderr) = mean_stderr(&xs);
            MomentEstimate { order: k, mean, stderr }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub order: u32,
    pub exact: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub bound: f64,
}

/// `order,exact,mc_estimate,mc_stderr,bound`; missing values are written as `nan`.
pub fn write_moment_csv<W: Write>(rows: &[MomentRow], mut w: W) -> Result<()> {
    writeln!(w, "order,exact,mc_estimate,mc_stderr,bound")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.order, r.exact, r.mc_estimate, r.mc_stderr, r.bound)?;
    }
    Ok(())
}
