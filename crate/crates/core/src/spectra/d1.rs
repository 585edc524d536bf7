//! Lower bound for the bounded-Lipschitz distance restricted to nondecreasing
//! test functions.
//!
//! Test functions are piecewise linear with knots on a K-point grid spanning
//! both supports, constant outside it. Writing `f = f(x₁) + Σ d_j ramp_j` with
//! increments `d_j >= 0`, the objective is `f(x₁)·W + Σ d_j R_j` where
//! `W = μ(ℝ) − ν(ℝ)` and `R_j = ∫ ramp_j d(μ − ν)`. For a Lipschitz budget `L`
//! and sup budget `S = 1 − L`, choosing `f(x₁)` optimally leaves a fractional
//! knapsack over the `d_j` (caps `L·Δx_j`, total `<= 2S`); the result is
//! concave in `L`, which is then maximized by golden-section search.

use serde::Serialize;

use super::{kolmogorov_distance, SpectralMeasure};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct D1Result {
    /// Value achieved by an explicit admissible test function.
    pub lower_bound: f64,
    /// Lipschitz share of the norm budget at the optimum.
    pub lipschitz: f64,
    pub kolmogorov: f64,
    pub grid_points: usize,
}

/// `∫ ramp(x) dμ` where ramp rises linearly from 0 at `a` to 1 at `b`.
fn ramp_integral(mu: &SpectralMeasure, a: f64, b: f64) -> f64 {
    let total = mu.total_mass();
    if let Some((support, weights)) = mu.atoms() {
        support
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * ((x - a) / (b - a)).clamp(0.0, 1.0))
            .sum()
    } else {
        // ∫ ramp dμ = μ(ℝ) − (1/(b−a)) ∫_a^b F(x) dx, and F is linear between edges.
        let (edges, _) = mu.bins().expect("histogram");
        let mut pts: Vec<f64> = vec![a, b];
        pts.extend(edges.iter().copied().filter(|&e| e > a && e < b));
        pts.sort_by(f64::total_cmp);
        let integral_f: f64 = pts.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (mu.cdf(w[0]) + mu.cdf(w[1]))).sum();
        total - integral_f / (b - a)
    }
}

fn knapsack_value(l: f64, w_diff: f64, gains: &[(f64, f64)]) -> f64 {
    let s = 1.0 - l;
    let mut value = s * w_diff.abs();
    let mut budget = 2.0 * s;
    for &(gain, dx) in gains {
        if budget <= 0.0 {
            break;
        }
        let take = (l * dx).min(budget);
        value += take * gain;
        budget -= take;
    }
    value
}

fn one_sided(r: &[f64], dx: &[f64], w_diff: f64) -> (f64, f64) {
    let shift = w_diff.max(0.0);
    let mut gains: Vec<(f64, f64)> = r
        .iter()
        .zip(dx)
        .map(|(&rj, &d)| (rj - shift, d))
        .filter(|g| g.0 > 0.0)
        .collect();
    gains.sort_by(|a, b| b.0.total_cmp(&a.0));
    let f = |l: f64| knapsack_value(l, w_diff, &gains);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let cands = [(0.0, f(0.0)), (1.0, f(1.0)), (x1, f1), (x2, f2)];
    cands.into_iter().fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Grid lower bound on `sup |∫f dμ − ∫f dν|` over nondecreasing `f` with
/// `Lip(f) + sup|f| <= 1`, using a uniform grid of `k` knots over the union of supports.
pub fn d1_distance(mu: &SpectralMeasure, nu: &SpectralMeasure, k: usize) -> Result<D1Result> {
    if k < 2 {
        return Err(Error::invalid(format!("d1 grid needs at least 2 points, got {k}")));
    }
    let (a0, b0) = mu.support_bounds();
    let (a1, b1) = nu.support_bounds();
    let (mut lo, mut hi) = (a0.min(a1), b0.max(b1));
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let grid: Vec<f64> = (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect();
    let dx: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
    let r: Vec<f64> = grid
        .windows(2)
        .map(|w| ramp_integral(mu, w[0], w[1]) - ramp_integral(nu, w[0], w[1]))
        .collect();
    let w_diff = mu.total_mass() - nu.total_mass();
    let (l_plus, v_plus) = one_sided(&r, &dx, w_diff);
    let neg: Vec<f64> = r.iter().map(|x| -x).collect();
    let (l_minus, v_minus) = one_sided(&neg, &dx, -w_diff);
    let (lipschitz, value) = if v_plus >= v_minus { (l_plus, v_plus) } else { (l_minus, v_minus) };
    Ok(D1Result {
        lower_bound: value.max(0.0),
        lipschitz,
        kolmogorov: kolmogorov_distance(mu, nu),
        grid_points: k,
    })
}
