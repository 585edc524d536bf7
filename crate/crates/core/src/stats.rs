//! Small statistical helpers shared by the diagnostics.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use crate::error::{Error, Result};

/// Sample mean and its standard error. Sums in input order.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let (m, _) = mean_stderr(xs);
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic p-value of a KS statistic with effective sample size `n_eff`.
pub fn ks_pvalue(d: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        s += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// `(first count, last count, observed, expected)` per pooled bin.
    pub bins: Vec<(usize, Option<usize>, f64, f64)>,
}

/// Chi-square goodness of fit of integer counts against Poisson(`mean`).
/// Adjacent counts are pooled left to right until each bin expects at least 5;
/// the last bin is the open upper tail.
pub fn poisson_chi_square(counts: &[usize], mean: f64) -> Result<ChiSquareResult> {
    if counts.is_empty() {
        return Err(Error::invalid("no counts"));
    }
    let pois = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
    let total = counts.len() as f64;
    let max = *counts.iter().max().expect("nonempty");
    let mut hist = vec![0usize; max + 1];
    for &c in counts {
        hist[c] += 1;
    }
    let mut bins: Vec<(usize, Option<usize>, f64, f64)> = Vec::new();
    let mut k = 0usize;
    let mut cum_p = 0.0;
    loop {
        let start = k;
        let mut obs = 0.0;
        let mut exp = 0.0;
        while exp < 5.0 {
            let pk = pois.pmf(k as u64);
            exp += total * pk;
            cum_p += pk;
            obs += hist.get(k).copied().unwrap_or(0) as f64;
            k += 1;
            if total * (1.0 - cum_p) < 5.0 {
                break;
            }
        }
        if total * (1.0 - cum_p) < 5.0 {
            // fold the remaining tail into this bin
            let tail_obs: usize = hist.iter().skip(k).sum();
            bins.push((start, None, obs + tail_obs as f64, exp + total * (1.0 - cum_p)));
            break;
        }
        bins.push((start, Some(k - 1), obs, exp));
    }
    let statistic: f64 = bins.iter().map(|b| (b.2 - b.3).powi(2) / b.3).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: 1.0 - chi.cdf(statistic),
        bins,
    })
}
