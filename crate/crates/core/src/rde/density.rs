//! Smoothed spectral density `(1/π) E Im R(x + iy)` and its moments.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::{solve_rde, RdeParams};
use crate::error::{Error, Result};
use crate::levy::LevyCharacteristics;
use crate::rng::split_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub x: f64,
    pub density: f64,
    pub mc_err: f64,
    pub converged: bool,
}

/// Density of the limit law convolved with a Cauchy kernel of width `y`;
/// the smoothing bias is `O(y)`. Each grid point runs its own population.
pub fn rde_density(chars: &LevyCharacteristics, xs: &[f64], y: f64, params: RdeParams, seed: u64) -> Result<Vec<DensityPoint>> {
    if !(y > 0.0) {
        return Err(Error::invalid(format!("smoothing height must be positive, got {y}")));
    }
    xs.iter()
        .enumerate()
        .map(|(k, &x)| {
            let pop = solve_rde(chars, Complex64::new(x, y), params, split_seed(seed, &[k as u64]))?;
            Ok(DensityPoint {
                x,
                density: pop.mean().im / PI,
                mc_err: pop.mean_stderr().1 / PI,
                converged: pop.converged(),
            })
        })
        .collect()
}

pub fn write_density_csv<W: Write>(points: &[DensityPoint], mut w: W) -> Result<()> {
    writeln!(w, "x,density,mc_err")?;
    for p in points {
        writeln!(w, "{},{},{}", p.x, p.density, p.mc_err)?;
    }
    Ok(())
}

/// Even moments `M_0, M_2, ..., M_{2 p_max}` of the unsmoothed law from a
/// Cauchy-smoothed density sampled on a uniform grid over `[-L, L]`.
///
/// Untruncated, the smoothed moments would be `E Re(t + iy)^k`. Truncating at
/// `±L` removes the Cauchy tails, which to first order in `y/L` gives
/// `T_k = (1 − 2y(k+1)/(πL)) M_k + Σ_{j even >= 2} C(k,j) (−1)^{j/2} y^j M_{k−j}
///        + (2y/π) Σ_{m even < k} (m+1) M_m L^{k−m−1}/(k−m−1)`
/// where `T_k` is the truncated trapezoid moment. This is solved upward in `k`.
pub fn moments_from_smoothed_density(xs: &[f64], density: &[f64], y: f64, p_max: usize) -> Result<Vec<f64>> {
    if xs.len() != density.len() || xs.len() < 3 {
        return Err(Error::invalid("grid and density must match and hold at least 3 points"));
    }
    let l = xs[xs.len() - 1];
    if (xs[0] + l).abs() > 1e-9 * l || !(l > 0.0) {
        return Err(Error::invalid("grid must be symmetric about 0"));
    }
    let trap = |k: i32| -> f64 {
        xs.windows(2)
            .zip(density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] * x[0].powi(k) + d[1] * x[1].powi(k)))
            .sum()
    };
    let mut m: Vec<f64> = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let k = 2 * p;
        let mut tail = 0.0;
        let mut smear = 0.0;
        for (q, &mq) in m.iter().enumerate() {
            let mm = 2 * q;
            let e = (k - mm - 1) as i32;
            tail += (mm + 1) as f64 * mq * l.powi(e) / e as f64;
            let j = k - mm;
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            smear += sign * binomial(k, j) * y.powi(j as i32) * mq;
        }
        let denom = 1.0 - 2.0 * y * (k + 1) as f64 / (PI * l);
        if denom <= 0.0 {
            return Err(Error::invalid(format!("grid half-width {l} too small for order {k} at y = {y}")));
        }
        m.push((trap(k as i32) - smear - 2.0 * y / PI * tail) / denom);
    }
    Ok(m)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
