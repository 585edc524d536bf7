//! Singular values of non-symmetric matrices through hermitization.

use serde::Serialize;

use crate::ensembles::{hermitize, SquareMatrix};
use crate::error::{Error, Result};
use crate::linalg::{singular_values, sym_eigenvalues};
use crate::spectra::SpectralMeasure;

/// Empirical singular-value law on `[0, ∞)` and its symmetrization `½(μ₊ + μ₋)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueMeasure {
    values: Vec<f64>,
    positive: SpectralMeasure,
    symmetrized: SpectralMeasure,
}

impl SingularValueMeasure {
    fn from_values(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        let positive = SpectralMeasure::uniform(&values)?;
        let symmetrized = positive.symmetrized();
        Ok(Self {
            values,
            positive,
            symmetrized,
        })
    }

    /// Singular values in decreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn positive(&self) -> &SpectralMeasure {
        &self.positive
    }

    pub fn symmetrized(&self) -> &SpectralMeasure {
        &self.symmetrized
    }

    /// Law of the squared singular values.
    pub fn squared(&self) -> Result<SpectralMeasure> {
        self.positive.pushforward_square()
    }
}

/// Eigen route: the upper half of the hermitization's spectrum, folded to `[0, ∞)`.
pub fn singular_value_esd(a: &SquareMatrix) -> Result<SingularValueMeasure> {
    if a.n() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let ev = sym_eigenvalues(&hermitize(a).matrix)?;
    SingularValueMeasure::from_values(ev[a.n()..].iter().map(|x| x.abs()).collect())
}

/// SVD route, for cross-checking.
pub fn singular_value_esd_svd(a: &SquareMatrix) -> Result<SingularValueMeasure> {
    if a.n() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    SingularValueMeasure::from_values(singular_values(a.n(), a.as_slice())?)
}

/// Largest gap between the eigen-route and SVD-route singular values.
pub fn hermitization_gap(a: &SquareMatrix) -> Result<f64> {
    let e = singular_value_esd(a)?;
    let s = singular_value_esd_svd(a)?;
    Ok(e.values.iter().zip(&s.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Image of a symmetric law under `x ↦ x²`.
pub fn wishart_lsd_map(mu: &SpectralMeasure) -> Result<SpectralMeasure> {
    if !mu.is_symmetric(1e-9) {
        return Err(Error::invalid("wishart_lsd_map needs a symmetric measure"));
    }
    mu.pushforward_square()
}

/// CDF of the `x ↦ x²` image of the semicircle: `2F(√t) − 1`.
pub fn squared_semicircle_cdf(sigma: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        2.0 * crate::spectra::semicircle_cdf(sigma, t.sqrt()) - 1.0
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WishartSummary {
    pub n: usize,
    pub kolmogorov: f64,
    pub hermitization_gap: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_entry_law, sample_matrix, sample_nonhermitian};
    use crate::levy::LevyCharacteristics;
    use crate::spectra::{kolmogorov_to_cdf, semicircle_histogram};
    use crate::stats::{ks_pvalue, ks_two_sample};
    use proptest::prelude::*;

    #[test]
    fn orthogonal_and_zero() {
        let (c, s) = (0.6, 0.8);
        let q = SquareMatrix::from_row_major(2, vec![c, -s, s, c]).unwrap();
        let m = singular_value_esd(&q).unwrap();
        assert!(m.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let z = SquareMatrix::from_row_major(3, vec![0.0; 9]).unwrap();
        assert_eq!(*singular_value_esd(&z).unwrap().positive(), SpectralMeasure::dirac(0.0));
    }

    #[test]
    fn eigen_route_matches_svd() {
        let law = build_entry_law(&LevyCharacteristics::sparse(2.0).unwrap(), 6, None).unwrap();
        for seed in 0..20 {
            let a = sample_nonhermitian(&law, seed);
            assert!(hermitization_gap(&a).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn square_map() {
        let two = SpectralMeasure::from_atoms(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(wishart_lsd_map(&two).unwrap(), SpectralMeasure::dirac(1.0));
        assert_eq!(wishart_lsd_map(&SpectralMeasure::dirac(0.0)).unwrap(), SpectralMeasure::dirac(0.0));
        assert!(wishart_lsd_map(&SpectralMeasure::dirac(1.0)).is_err());
        let sc = wishart_lsd_map(&semicircle_histogram(1.0, 400).unwrap()).unwrap();
        assert!((sc.moment(1) - 1.0).abs() < 1e-3);
        assert!((sc.moment(2) - 2.0).abs() < 5e-3);
    }

    #[test]
    fn nonhermitian_entries_match_symmetric_entries() {
        let law = build_entry_law(&LevyCharacteristics::wigner(1.0).unwrap(), 320, None).unwrap();
        let a = sample_nonhermitian(&law, 1);
        let s = sample_matrix(&law, 2);
        let off: Vec<f64> = (0..320).flat_map(|i| (0..320).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a.get(i, j)).collect();
        let up: Vec<f64> = (0..320).flat_map(|i| (i + 1..320).map(move |j| (i, j))).map(|(i, j)| s.get(i, j)).collect();
        let d = ks_two_sample(&off, &up);
        let n_eff = (off.len() * up.len()) as f64 / (off.len() + up.len()) as f64;
        assert!(ks_pvalue(d, n_eff) > 1e-3);
        assert!((0..320).all(|i| a.get(i, i) == 0.0));
        assert_eq!(sample_nonhermitian(&law, 1), a);
    }

    #[test]
    fn gaussian_squares_follow_the_map() {
        let law = build_entry_law(&LevyCharacteristics::wigner(1.0).unwrap(), 300, None).unwrap();
        let a = sample_nonhermitian(&law, 3);
        let sq = singular_value_esd(&a).unwrap().squared().unwrap();
        assert!(kolmogorov_to_cdf(&sq, |t| squared_semicircle_cdf(1.0, t)) < 0.08);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn moments_transfer(xs in proptest::collection::vec(0.01f64..3.0, 1..8)) {
            let vals: Vec<f64> = xs.iter().flat_map(|&x| [x, -x]).collect();
            let mu = SpectralMeasure::uniform(&vals).unwrap();
            let nu = wishart_lsd_map(&mu).unwrap();
            for k in 1..4u32 {
                let (a, b) = (nu.moment(k), mu.moment(2 * k));
                prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            }
        }
    }
}
