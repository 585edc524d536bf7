//! Population dynamics for the root resolvent fixed point
//! `R ≐ −(z + σ_ε² R₀ + Σ_k c_k² R_k)^{-1}`.

mod density;

pub use density::{moments_from_smoothed_density, rde_density, write_density_csv, DensityPoint};

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::LevyCharacteristics;
use crate::pwist::DEFAULT_TREE_MASS;
use crate::rng::{stream, tag};
use crate::stats::{ks_two_sample, mean_stderr};

/// Histogram bins for the convergence monitor.
const MONITOR_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdeParams {
    pub pop_size: usize,
    pub sweeps: usize,
    /// Jump floor; `None` picks the tree default `Π{|x| > ε} <= 20`.
    pub epsilon: Option<f64>,
    /// Value every slot starts from.
    pub init: Complex64,
    /// Monitor tolerance on the normalized Im-marginal.
    pub tolerance: f64,
    /// Consecutive sweeps under tolerance needed to declare convergence.
    pub patience: usize,
}

impl Default for RdeParams {
    fn default() -> Self {
        Self {
            pop_size: 10_000,
            sweeps: 100,
            epsilon: None,
            init: Complex64::new(0.0, 1.0),
            tolerance: 1e-3,
            patience: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepStat {
    pub mean: Complex64,
    /// Wasserstein-1 between consecutive Im-histograms on `[0, 1/Im z]`, rescaled to `[0, 1]`.
    pub w1: f64,
}

/// The population after the last sweep, with its monitor history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventPopulation {
    pub z: Complex64,
    pub samples: Vec<Complex64>,
    pub params: RdeParams,
    pub seed: u64,
    pub epsilon: f64,
    pub sigma2_eff: f64,
    pub history: Vec<SweepStat>,
    /// First sweep at which the monitor stayed under tolerance for `patience` sweeps.
    pub converged_at: Option<usize>,
}

impl ResolventPopulation {
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.samples.len() as f64
    }

    /// Standard errors of the real and imaginary means.
    pub fn mean_stderr(&self) -> (f64, f64) {
        let re: Vec<f64> = self.samples.iter().map(|s| s.re).collect();
        let im: Vec<f64> = self.samples.iter().map(|s| s.im).collect();
        (mean_stderr(&re).1, mean_stderr(&im).1)
    }

    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    /// Full snapshot as JSON, enough to audit or resume a run.
    pub fn write_snapshot<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn read_snapshot<R: std::io::Read>(r: R) -> Result<Self> {
        let p: Self = serde_json::from_reader(r)?;
        p.check(p.z)?;
        Ok(p)
    }

    fn check(&self, z: Complex64) -> Result<()> {
        check_population(&self.samples, z)
    }
}

fn check_population(samples: &[Complex64], z: Complex64) -> Result<()> {
    let bound = 1.0 / z.im;
    for (k, s) in samples.iter().enumerate() {
        if !(s.im > 0.0) || !(s.norm() <= bound * (1.0 + 1e-12)) {
            return Err(Error::Invariant(format!(
                "resolvent sample {k} = {s} left the Herglotz region for z = {z}"
            )));
        }
    }
    Ok(())
}

fn im_histogram(samples: &[Complex64], z: Complex64) -> Vec<f64> {
    let mut h = vec![0.0; MONITOR_BINS];
    let scale = z.im * MONITOR_BINS as f64;
    for s in samples {
        let k = ((s.im * scale) as usize).min(MONITOR_BINS - 1);
        h[k] += 1.0;
    }
    let n = samples.len() as f64;
    h.iter_mut().for_each(|x| *x /= n);
    h
}

fn w1_hist(a: &[f64], b: &[f64]) -> f64 {
    let mut ca = 0.0;
    let mut cb = 0.0;
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        d += (ca - cb).abs();
    }
    d / a.len() as f64
}

/// Effective Gaussian variance and jump floor used by the update.
fn split_law(chars: &LevyCharacteristics, epsilon: Option<f64>) -> Result<(f64, f64)> {
    let eps = match epsilon {
        Some(e) if e >= 0.0 && e.is_finite() => e,
        Some(e) => return Err(Error::invalid(format!("epsilon must be finite and >= 0, got {e}"))),
        None => chars.default_epsilon(DEFAULT_TREE_MASS),
    };
    let s2 = if eps > 0.0 { chars.gaussian_compensation(eps)? } else { chars.sigma2() };
    if !chars.levy().tail_mass(eps).is_finite() {
        return Err(Error::invalid(format!("Π{{|x| > {eps}}} is infinite; raise epsilon")));
    }
    Ok((eps, s2))
}

pub fn solve_rde(chars: &LevyCharacteristics, z: Complex64, params: RdeParams, seed: u64) -> Result<ResolventPopulation> {
    if !(z.im > 0.0) {
        return Err(Error::invalid(format!("z must lie in the upper half-plane, got {z}")));
    }
    if params.pop_size < 2 {
        return Err(Error::invalid("population needs at least 2 slots"));
    }
    if !(params.init.im > 0.0) {
        return Err(Error::invalid("initial value must have positive imaginary part"));
    }
    let (eps, sigma2_eff) = split_law(chars, params.epsilon)?;
    let sampler = chars.levy().restricted_sampler(eps)?;
    let arrivals = match &sampler {
        Some(js) => Some(
            Poisson::new(js.total_mass()).map_err(|e| Error::invalid(format!("arrival mean {}: {e}", js.total_mass())))?,
        ),
        None => None,
    };
    let n = params.pop_size;
    let mut pop = vec![params.init; n];
    let mut hist = im_histogram(&pop, z);
    let mut history = Vec::with_capacity(params.sweeps);
    let mut streak = 0;
    let mut converged_at = None;
    for sweep in 0..params.sweeps {
        let prev = &pop;
        let next: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|slot| {
                let mut rng = stream(seed, tag::RDE_SLOT, &[sweep as u64, slot as u64]);
                let mut w = z;
                if sigma2_eff > 0.0 {
                    w += sigma2_eff * prev[rng.gen_range(0..n)];
                }
                // arrival order does not change the sum, so skip the sort
                if let (Some(js), Some(count)) = (&sampler, &arrivals) {
                    for _ in 0..count.sample(&mut rng) as usize {
                        let c = js.sample_abs(&mut rng);
                        w += c * c * prev[rng.gen_range(0..n)];
                    }
                }
                -w.inv()
            })
            .collect();
        check_population(&next, z)?;
        let h = im_histogram(&next, z);
        let w1 = w1_hist(&hist, &h);
        hist = h;
        pop = next;
        history.push(SweepStat {
            mean: pop.iter().sum::<Complex64>() / n as f64,
            w1,
        });
        if w1 < params.tolerance {
            streak += 1;
            if streak >= params.patience && converged_at.is_none() {
                converged_at = Some(sweep + 1);
            }
        } else {
            streak = 0;
        }
    }
    Ok(ResolventPopulation {
        z,
        samples: pop,
        params,
        seed,
        epsilon: eps,
        sigma2_eff,
        history,
        converged_at,
    })
}

/// Root of `σ² S² + z S + 1 = 0` with `Im S > 0`.
pub fn semicircle_resolvent(sigma: f64, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) || !(sigma > 0.0) {
        return Err(Error::invalid(format!("need Im z > 0 and sigma > 0, got z = {z}, sigma = {sigma}")));
    }
    let s2 = sigma * sigma;
    let disc = (z * z - 4.0 * s2).sqrt();
    // cancellation-free pair: q/σ² and 1/q, whose product is 1/σ²
    let sign = if (z.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (z + sign * disc);
    let r1 = q / s2;
    let r2 = q.inv();
    Ok(if r1.im > r2.im { r1 } else { r2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubordinationReport {
    pub z: Complex64,
    /// Mean resolvent of `(σ², Π)` at `z`.
    pub full: Complex64,
    /// Mean resolvent of `(0, Π)` at `z + σ² · full`.
    pub shifted: Complex64,
    pub residual: f64,
    pub stderr: f64,
}

/// `S_full(z)` against `S_jump(z + σ² S_full(z))`.
pub fn subordination_check(chars: &LevyCharacteristics, z: Complex64, params: RdeParams, seed: u64) -> Result<SubordinationReport> {
    let full_pop = solve_rde(chars, z, params, seed)?;
    let full = full_pop.mean();
    let jumps = LevyCharacteristics::new(0.0, chars.levy().clone())?;
    let shifted_z = z + chars.sigma2() * full;
    let shifted_pop = if jumps.levy().is_zero() {
        None
    } else {
        Some(solve_rde(&jumps, shifted_z, params, seed ^ 0x5AB0_4D1A)?)
    };
    let shifted = match &shifted_pop {
        Some(p) => p.mean(),
        None => -shifted_z.inv(),
    };
    let (a_re, a_im) = full_pop.mean_stderr();
    let (b_re, b_im) = shifted_pop.as_ref().map_or((0.0, 0.0), |p| p.mean_stderr());
    let stderr = (a_re * a_re + a_im * a_im + b_re * b_re + b_im * b_im).sqrt();
    Ok(SubordinationReport {
        z,
        full,
        shifted,
        residual: (full - shifted).norm(),
        stderr,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AntisymmetryReport {
    pub z: Complex64,
    /// KS statistic of real parts: population at `−z̄` against `−Re` of the population at `z`.
    pub ks_re: f64,
    pub ks_im: f64,
    /// `1.36·sqrt(2/N)`, the 5% two-sample critical value.
    pub threshold: f64,
    pub mean_gap: f64,
}

/// Compares the population at `−z̄` with the reflected population `−conj(R)` at `z`.
pub fn antisymmetry_check(chars: &LevyCharacteristics, z: Complex64, params: RdeParams, seed: u64) -> Result<AntisymmetryReport> {
    let at_z = solve_rde(chars, z, params, seed)?;
    let mirror_z = Complex64::new(-z.re, z.im);
    let at_mirror = solve_rde(chars, mirror_z, params, seed ^ 0xA11_5E7)?;
    let refl_re: Vec<f64> = at_z.samples.iter().map(|s| -s.re).collect();
    let refl_im: Vec<f64> = at_z.samples.iter().map(|s| s.im).collect();
    let m_re: Vec<f64> = at_mirror.samples.iter().map(|s| s.re).collect();
    let m_im: Vec<f64> = at_mirror.samples.iter().map(|s| s.im).collect();
    let n = params.pop_size as f64;
    Ok(AntisymmetryReport {
        z,
        ks_re: ks_two_sample(&m_re, &refl_re),
        ks_im: ks_two_sample(&m_im, &refl_im),
        threshold: 1.36 * (2.0 / n).sqrt(),
        mean_gap: (at_mirror.mean() + at_z.mean().conj()).norm(),
    })
}
