//! Finite-n evidence that a matrix row looks like the root's arrivals.
//!
//! Only distributions are compared, never couplings across n.

use rayon::prelude::*;
use serde::Serialize;

use super::{sample_ordered_conductances, DEFAULT_TREE_MASS};
use crate::ensembles::{build_entry_law, sample_sparse};
use crate::error::{Error, Result};
use crate::levy::LevyCharacteristics;
use crate::rng::{split_seed, stream, tag};
use crate::stats::{ks_two_sample, poisson_chi_square, ChiSquareResult};

#[derive(Debug, Clone, Serialize)]
pub struct LwcLevel {
    pub n: usize,
    /// Two-sample KS statistic for the k-th largest modulus, `k = 1..=B`.
    pub ks: Vec<f64>,
    /// Mean number of row entries above the floor.
    pub matrix_count_mean: f64,
    /// Mean number of arrivals above the floor.
    pub arrival_count_mean: f64,
    /// Mean of the largest row modulus.
    pub max_modulus_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LwcReport {
    pub epsilon: f64,
    pub branching: usize,
    pub reps: usize,
    /// True when `Π{|x| > ε} = 0`, so the limit root has no arrivals.
    pub no_arrivals: bool,
    pub levels: Vec<LwcLevel>,
    /// The largest-arrival KS statistic does not increase from the first to the last n.
    pub trend_decreasing: bool,
}

/// Top `b` moduli above `eps`, padded with zeros.
fn top_moduli(mut v: Vec<f64>, eps: f64, b: usize) -> Vec<f64> {
    v.retain(|x| *x > eps);
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(b, 0.0);
    v
}

/// Compares row 0 of the matrix ensemble with the ordered arrivals at the
/// root, both censored at the default tree floor.
pub fn lwc_diagnostic(chars: &LevyCharacteristics, ns: &[usize], branching: usize, reps: usize, seed: u64) -> Result<LwcReport> {
    if branching == 0 || branching > 8 {
        return Err(Error::invalid(format!("branching must be in 1..=8, got {branching}")));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns.is_empty() {
        return Err(Error::invalid("n list must be nonempty and increasing"));
    }
    let eps = chars.default_epsilon(DEFAULT_TREE_MASS);
    let no_arrivals = chars.levy().tail_mass(eps) == 0.0;
    let mut levels = Vec::with_capacity(ns.len());
    for &n in ns {
        let law = build_entry_law(chars, n, None)?;
        let rows: Vec<(Vec<f64>, usize, f64)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut mods = Vec::new();
                law.sample_row_upper(split_seed(seed, &[n as u64, r as u64]), 0, |_, v| mods.push(v.abs()));
                let count = mods.iter().filter(|&&x| x > eps).count();
                let max = mods.iter().copied().fold(0.0, f64::max);
                (top_moduli(mods, eps, branching), count, max)
            })
            .collect();
        let arrivals: Vec<(Vec<f64>, usize)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream(seed, tag::ARRIVALS, &[n as u64, r as u64]);
                let a = sample_ordered_conductances(chars.levy(), eps, None, &mut rng)?;
                let count = a.len();
                Ok((top_moduli(a.iter().map(|x| x.abs()).collect(), eps, branching), count))
            })
            .collect::<Result<_>>()?;
        let ks = (0..branching)
            .map(|k| {
                let a: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
                let b: Vec<f64> = arrivals.iter().map(|r| r.0[k]).collect();
                ks_two_sample(&a, &b)
            })
            .collect();
        levels.push(LwcLevel {
            n,
            ks,
            matrix_count_mean: rows.iter().map(|r| r.1 as f64).sum::<f64>() / reps as f64,
            arrival_count_mean: arrivals.iter().map(|r| r.1 as f64).sum::<f64>() / reps as f64,
            max_modulus_mean: rows.iter().map(|r| r.2).sum::<f64>() / reps as f64,
        });
    }
    let trend_decreasing = levels.last().expect("nonempty").ks[0] <= levels[0].ks[0];
    Ok(LwcReport {
        epsilon: eps,
        branching,
        reps,
        no_arrivals,
        levels,
        trend_decreasing,
    })
}

/// Chi-square test of nonzero entries per row against `Poisson(Π(ℝ))`, for
/// pure-jump laws with finite total mass.
pub fn row_count_check(chars: &LevyCharacteristics, n: usize, seed: u64) -> Result<ChiSquareResult> {
    let mass = chars.levy().tail_mass(0.0);
    if chars.sigma2() != 0.0 || !mass.is_finite() {
        return Err(Error::invalid("row counts need a pure-jump law with finite Lévy mass"));
    }
    let law = build_entry_law(chars, n, Some(0.0))?;
    let m = sample_sparse(&law, seed);
    let counts: Vec<usize> = (0..n).map(|i| m.row(i).len()).collect();
    poisson_chi_square(&counts, mass)
}
