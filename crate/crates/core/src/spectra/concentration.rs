//! Spread of linear spectral statistics `∫ f dμ_M` across independent samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{build_entry_law, sample_matrix};
use crate::error::Result;
use crate::levy::LevyCharacteristics;
use crate::linalg::sym_eigenvalues;
use crate::rng::split_seed;
use crate::stats::{mean_stderr, sample_variance};

/// Fixed catalog of test functions, each with total variation at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `f ≡ 1/2`.
    Constant,
    /// `1 / (2(1 + x²))`.
    Lorentzian,
    /// `e^{-x²} / 2`.
    GaussianBump,
    /// `1{x > 0} / 2`.
    HalfStep,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [Self::Constant, Self::Lorentzian, Self::GaussianBump, Self::HalfStep];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Constant => 0.5,
            Self::Lorentzian => 0.5 / (1.0 + x * x),
            Self::GaussianBump => 0.5 * (-x * x).exp(),
            Self::HalfStep => {
                if x > 0.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    pub fn total_variation(self) -> f64 {
        match self {
            Self::Constant => 0.0,
            Self::Lorentzian | Self::GaussianBump => 1.0,
            Self::HalfStep => 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationRow {
    pub t: f64,
    pub observed_fraction: f64,
    pub stderr: f64,
    /// `2 exp(−n t² / 2)`.
    pub envelope: f64,
    pub within_envelope: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub reps: usize,
    pub function: TestFunction,
    pub mean: f64,
    pub variance: f64,
    pub values: Vec<f64>,
    pub deviations: Vec<DeviationRow>,
}

/// Samples `reps` matrices of size `n`, evaluates `∫ f dμ_M` for each and
/// compares the frequency of deviations `>= t` from the sample mean against
/// `2 exp(−n t²/2) + 3 se`.
pub fn concentration_probe(
    chars: &LevyCharacteristics,
    n: usize,
    f: TestFunction,
    reps: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let law = build_entry_law(chars, n, None)?;
    let values: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let m = sample_matrix(&law, split_seed(seed, &[n as u64, r as u64]));
            let ev = sym_eigenvalues(&m.matrix)?;
            Ok(ev.iter().map(|&x| f.eval(x)).sum::<f64>() / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, _) = mean_stderr(&values);
    let variance = sample_variance(&values);
    let max_dev = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    let grid_top = (max_dev * 1.5).max(4.0 / (n as f64).sqrt());
    let deviations = (1..=20)
        .map(|k| {
            let t = grid_top * k as f64 / 20.0;
            let hits = values.iter().filter(|v| (*v - mean).abs() >= t).count() as f64;
            let p = hits / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            let envelope = 2.0 * (-(n as f64) * t * t / 2.0).exp();
            DeviationRow {
                t,
                observed_fraction: p,
                stderr: se,
                envelope,
                within_envelope: p <= envelope + 3.0 * se,
            }
        })
        .collect();
    Ok(ConcentrationReport {
        n,
        reps,
        function: f,
        mean,
        variance,
        values,
        deviations,
    })
}
