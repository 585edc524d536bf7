//! Spectral measures, Stieltjes transforms and distances between measures.

mod concentration;
mod d1;

pub use concentration::{concentration_probe, ConcentrationReport, DeviationRow, TestFunction};
pub use d1::{d1_distance, D1Result};

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::SymmetricMatrixSample;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen_with_row, sym_eigenvalues};

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Strictly increasing support with positive weights.
    Atoms { support: Vec<f64>, weights: Vec<f64> },
    /// `edges.len() == masses.len() + 1`; mass spread uniformly within each bin.
    Histogram { edges: Vec<f64>, masses: Vec<f64> },
}

/// A finite measure on ℝ, either finitely supported or a histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    repr: Repr,
}

/// Adds `f(i)` for `i` in `0..len` pairing index `i` with `len-1-i` first,
/// so contributions of mirrored points cancel exactly for symmetric inputs.
fn mirrored_sum<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    let mut s = 0.0;
    for i in 0..len / 2 {
        s += f(i) + f(len - 1 - i);
    }
    if len % 2 == 1 {
        s += f(len / 2);
    }
    s
}

impl SpectralMeasure {
    /// Sorts, merges exactly equal locations and drops zero weights.
    pub fn from_atoms(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::invalid("values and weights differ in length"));
        }
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for (&x, &w) in values.iter().zip(weights) {
            if !x.is_finite() || !(w >= 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("bad atom ({x}, {w})")));
            }
            if w > 0.0 {
                pairs.push((x, w));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut out_w: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            // -0.0 and 0.0 are the same point
            if support.last().is_some_and(|&last| last == x) {
                *out_w.last_mut().expect("parallel vectors") += w;
            } else {
                support.push(if x == 0.0 { 0.0 } else { x });
                out_w.push(w);
            }
        }
        Ok(Self {
            repr: Repr::Atoms { support, weights: out_w },
        })
    }

    /// Uniform probability on the given values: `(1/n) Σ δ_{x_j}`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("uniform measure on an empty set"));
        }
        let w = 1.0 / values.len() as f64;
        Self::from_atoms(values, &vec![w; values.len()])
    }

    /// Equal-weight mixture of atomic measures, e.g. an ESD averaged over replicates.
    pub fn average(measures: &[SpectralMeasure]) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::invalid("average of no measures"));
        }
        let k = measures.len() as f64;
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for m in measures {
            let (s, w) = m.atoms().ok_or_else(|| Error::invalid("average needs atomic measures"))?;
            xs.extend_from_slice(s);
            ws.extend(w.iter().map(|w| w / k));
        }
        Self::from_atoms(&xs, &ws)
    }

    pub fn dirac(x: f64) -> Self {
        Self {
            repr: Repr::Atoms {
                support: vec![x],
                weights: vec![1.0],
            },
        }
    }

    pub fn histogram(edges: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if edges.len() != masses.len() + 1 || masses.is_empty() {
            return Err(Error::invalid("histogram needs edges.len() == masses.len() + 1 >= 2"));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("histogram edges must be finite and strictly increasing"));
        }
        if masses.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::invalid("histogram masses must be finite and >= 0"));
        }
        Ok(Self {
            repr: Repr::Histogram { edges, masses },
        })
    }

    /// Equal-width histogram of an atomic measure over `[lo, hi]`;
    /// atoms outside the range are clamped into the end bins.
    pub fn binned(&self, bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::invalid("binned needs bins > 0 and lo < hi"));
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
        let mut masses = vec![0.0; bins];
        match &self.repr {
            Repr::Atoms { support, weights } => {
                for (&x, &w) in support.iter().zip(weights) {
                    let k = (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1);
                    masses[k] += w;
                }
            }
            Repr::Histogram { .. } => {
                for (k, m) in masses.iter_mut().enumerate() {
                    *m = self.cdf(edges[k + 1]) - self.cdf(edges[k]);
                }
            }
        }
        Self::histogram(edges, masses)
    }

    /// Default binning: 200 equal bins over the support widened by one bin per side.
    pub fn default_histogram(&self) -> Result<Self> {
        let (lo, hi) = self.support_bounds();
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let bins = 200;
        let w = (hi - lo) / (bins - 2) as f64;
        self.binned(bins, lo - w, hi + w)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.repr, Repr::Atoms { .. })
    }

    /// `(support, weights)` for atomic measures.
    pub fn atoms(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Atoms { support, weights } => Some((support, weights)),
            Repr::Histogram { .. } => None,
        }
    }

    /// `(edges, masses)` for histograms.
    pub fn bins(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Histogram { edges, masses } => Some((edges, masses)),
            Repr::Atoms { .. } => None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match &self.repr {
            Repr::Atoms { weights, .. } => weights.iter().sum(),
            Repr::Histogram { masses, .. } => masses.iter().sum(),
        }
    }

    /// Smallest and largest point of the support (bin edges for histograms).
    pub fn support_bounds(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Atoms { support, .. } => (
                support.first().copied().unwrap_or(0.0),
                support.last().copied().unwrap_or(0.0),
            ),
            Repr::Histogram { edges, .. } => (edges[0], edges[edges.len() - 1]),
        }
    }

    /// `∫ x^k dμ`. Symmetric inputs give exactly 0 for odd k.
    pub fn moment(&self, k: u32) -> f64 {
        match &self.repr {
            Repr::Atoms { support, weights } => mirrored_sum(support.len(), |i| weights[i] * support[i].powi(k as i32)),
            Repr::Histogram { edges, masses } => mirrored_sum(masses.len(), |i| {
                let (a, b) = (edges[i], edges[i + 1]);
                let kk = k as i32 + 1;
                masses[i] * (b.powi(kk) - a.powi(kk)) / (kk as f64 * (b - a))
            }),
        }
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Atoms { support, weights } => {
                let k = support.partition_point(|&s| s <= x);
                weights[..k].iter().sum()
            }
            Repr::Histogram { edges, masses } => hist_cdf(edges, masses, x),
        }
    }

    /// `μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Atoms { support, weights } => {
                let k = support.partition_point(|&s| s < x);
                weights[..k].iter().sum()
            }
            Repr::Histogram { edges, masses } => hist_cdf(edges, masses, x),
        }
    }

    /// Points where the CDF may jump or change slope.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.repr {
            Repr::Atoms { support, .. } => support,
            Repr::Histogram { edges, .. } => edges,
        }
    }

    /// `S(z) = ∫ dμ(x) / (x − z)`, `Im z ≠ 0`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
            return Err(Error::invalid(format!("Stieltjes transform needs finite z off the real axis, got {z}")));
        }
        let s = match &self.repr {
            Repr::Atoms { support, weights } => support.iter().zip(weights).map(|(&x, &w)| w / (x - z)).sum(),
            Repr::Histogram { edges, masses } => edges
                .windows(2)
                .zip(masses)
                .filter(|(_, &m)| m > 0.0)
                .map(|(e, &m)| m * ((e[1] - z).ln() - (e[0] - z).ln()) / (e[1] - e[0]))
                .sum(),
        };
        Ok(s)
    }

    /// `½(μ + μ∘(−·))`.
    pub fn symmetrized(&self) -> Self {
        match &self.repr {
            Repr::Atoms { support, weights } => {
                let vals: Vec<f64> = support.iter().flat_map(|&x| [x, -x]).collect();
                let ws: Vec<f64> = weights.iter().flat_map(|&w| [w / 2.0, w / 2.0]).collect();
                Self::from_atoms(&vals, &ws).expect("finite input stays valid")
            }
            Repr::Histogram { edges, masses } => {
                let mut all: Vec<f64> = edges.iter().flat_map(|&e| [e, -e]).collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                let m: Vec<f64> = all
                    .windows(2)
                    .map(|w| {
                        let plus = hist_cdf(edges, masses, w[1]) - hist_cdf(edges, masses, w[0]);
                        let minus = hist_cdf(edges, masses, -w[0]) - hist_cdf(edges, masses, -w[1]);
                        0.5 * (plus + minus)
                    })
                    .collect();
                Self::histogram(all, m).expect("sorted distinct edges")
            }
        }
    }

    /// True when `μ(B) = μ(−B)` up to `tol` on every breakpoint half-line.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.breakpoints()
            .iter()
            .flat_map(|&x| [x, -x])
            .all(|x| (self.cdf(x) - (self.total_mass() - self.cdf_left(-x))).abs() <= tol)
    }

    /// Image under `x ↦ x²`.
    pub fn pushforward_square(&self) -> Result<Self> {
        match &self.repr {
            Repr::Atoms { support, weights } => {
                let sq: Vec<f64> = support.iter().map(|x| x * x).collect();
                Self::from_atoms(&sq, weights)
            }
            Repr::Histogram { .. } => {
                // refine to a fine grid on [0, max²] via the CDF
                let (lo, hi) = self.support_bounds();
                let r = lo.abs().max(hi.abs());
                let bins = 400;
                let edges: Vec<f64> = (0..=bins).map(|k| r * r * k as f64 / bins as f64).collect();
                let masses = edges
                    .windows(2)
                    .map(|w| {
                        let (a, b) = (w[0].sqrt(), w[1].sqrt());
                        (self.cdf(b) - self.cdf(a)) + (self.cdf(-a) - self.cdf(-b))
                    })
                    .collect();
                Self::histogram(edges, masses)
            }
        }
    }

    /// `bin_left,bin_right,mass` for histograms, `atom,weight` otherwise.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match &self.repr {
            Repr::Atoms { support, weights } => {
                writeln!(w, "atom,weight")?;
                for (x, m) in support.iter().zip(weights) {
                    writeln!(w, "{x},{m}")?;
                }
            }
            Repr::Histogram { edges, masses } => {
                writeln!(w, "bin_left,bin_right,mass")?;
                for (e, m) in edges.windows(2).zip(masses) {
                    writeln!(w, "{},{},{m}", e[0], e[1])?;
                }
            }
        }
        Ok(())
    }
}

fn hist_cdf(edges: &[f64], masses: &[f64], x: f64) -> f64 {
    if x <= edges[0] {
        return 0.0;
    }
    let k = edges.partition_point(|&e| e <= x);
    if k >= edges.len() {
        return masses.iter().sum();
    }
    // x lies in bin k-1
    let full: f64 = masses[..k - 1].iter().sum();
    let (a, b) = (edges[k - 1], edges[k]);
    full + masses[k - 1] * (x - a) / (b - a)
}

/// `(1/n) Σ δ_{λ_j}` over the eigenvalues.
pub fn esd(m: &SymmetricMatrixSample) -> Result<SpectralMeasure> {
    if m.n() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    SpectralMeasure::uniform(&sym_eigenvalues(&m.matrix)?)
}

/// `Σ_j |⟨e_root, v_j⟩|² δ_{λ_j}`.
pub fn root_weighted_esd(m: &SymmetricMatrixSample, root: usize) -> Result<SpectralMeasure> {
    let (ev, w) = sym_eigen_with_row(&m.matrix, root)?;
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
    SpectralMeasure::from_atoms(&ev, &w)
}

/// Result of recovering an interval mass from Stieltjes values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InversionResult {
    pub mass: f64,
    /// Grid spacing exceeded `y` somewhere inside the interval.
    pub coarse_grid: bool,
}

/// `(1/π) ∫_a^b Im S(x + iy) dx` by the trapezoid rule on the given grid.
/// The integrand is interpolated linearly at the interval ends.
pub fn invert_stieltjes(xs: &[f64], s_values: &[Complex64], y: f64, a: f64, b: f64) -> Result<InversionResult> {
    if xs.len() != s_values.len() || xs.len() < 2 {
        return Err(Error::invalid("grid and values must match and have >= 2 points"));
    }
    if !(y > 0.0) || !(a < b) {
        return Err(Error::invalid("need y > 0 and a < b"));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    if a < xs[0] || b > xs[xs.len() - 1] {
        return Err(Error::invalid("interval must lie inside the grid"));
    }
    let im = |k: usize| s_values[k].im;
    let interp = |x: f64| {
        let k = xs.partition_point(|&g| g <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[k - 1], xs[k]);
        im(k - 1) + (im(k) - im(k - 1)) * (x - x0) / (x1 - x0)
    };
    let mut pts: Vec<(f64, f64)> = vec![(a, interp(a))];
    for (k, &x) in xs.iter().enumerate() {
        if x > a && x < b {
            pts.push((x, im(k)));
        }
    }
    pts.push((b, interp(b)));
    let mut integral = 0.0;
    let mut coarse = false;
    for w in pts.windows(2) {
        let h = w[1].0 - w[0].0;
        coarse |= h > y * (1.0 + 1e-9);
        integral += 0.5 * h * (w[0].1 + w[1].1);
    }
    Ok(InversionResult {
        mass: integral / std::f64::consts::PI,
        coarse_grid: coarse,
    })
}

/// Default inversion height: `10⁻² · span / points`.
pub fn default_inversion_height(span: f64, points: usize) -> f64 {
    1e-2 * span / points.max(1) as f64
}

/// Writes `x,y,re_S,im_S`.
pub fn write_stieltjes_csv<W: Write>(xs: &[f64], y: f64, s: &[Complex64], mut w: W) -> Result<()> {
    writeln!(w, "x,y,re_S,im_S")?;
    for (x, v) in xs.iter().zip(s) {
        writeln!(w, "{x},{y},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// `sup_x |F_μ(x) − F_ν(x)|`, exact: both CDFs are piecewise linear between
/// the merged breakpoints, so the supremum sits at a breakpoint or its left limit.
pub fn kolmogorov_distance(mu: &SpectralMeasure, nu: &SpectralMeasure) -> f64 {
    let mut pts: Vec<f64> = mu.breakpoints().iter().chain(nu.breakpoints()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.iter()
        .map(|&x| (mu.cdf(x) - nu.cdf(x)).abs().max((mu.cdf_left(x) - nu.cdf_left(x)).abs()))
        .fold(0.0, f64::max)
}

/// Kolmogorov distance from a measure to a continuous CDF. Exact for atomic
/// measures; histograms are checked at the edges and 16 interior points per bin.
pub fn kolmogorov_to_cdf<F: Fn(f64) -> f64>(mu: &SpectralMeasure, cdf: F) -> f64 {
    match &mu.repr {
        Repr::Atoms { support, .. } => support
            .iter()
            .map(|&x| {
                let f = cdf(x);
                (mu.cdf(x) - f).abs().max((mu.cdf_left(x) - f).abs())
            })
            .fold(0.0, f64::max),
        Repr::Histogram { edges, .. } => {
            let mut d: f64 = 0.0;
            for w in edges.windows(2) {
                for k in 0..=16 {
                    let x = w[0] + (w[1] - w[0]) * k as f64 / 16.0;
                    d = d.max((mu.cdf(x) - cdf(x)).abs());
                }
            }
            d
        }
    }
}

/// Semicircle density `sqrt(4σ² − x²) / (2πσ²)` on `|x| <= 2σ`.
pub fn semicircle_density(sigma: f64, x: f64) -> f64 {
    let r2 = 4.0 * sigma * sigma;
    if x * x >= r2 {
        0.0
    } else {
        (r2 - x * x).sqrt() / (2.0 * std::f64::consts::PI * sigma * sigma)
    }
}

pub fn semicircle_cdf(sigma: f64, x: f64) -> f64 {
    let r = 2.0 * sigma;
    if x <= -r {
        0.0
    } else if x >= r {
        1.0
    } else {
        let pi = std::f64::consts::PI;
        0.5 + x * (r * r - x * x).sqrt() / (4.0 * pi * sigma * sigma) + (x / r).asin() / pi
    }
}

/// Semicircle discretized into `bins` equal bins with exact bin masses,
/// built mirror-symmetric so odd moments vanish exactly.
pub fn semicircle_histogram(sigma: f64, bins: usize) -> Result<SpectralMeasure> {
    let r = 2.0 * sigma;
    let mut edges: Vec<f64> = (0..=bins).map(|k| -r + 2.0 * r * k as f64 / bins as f64).collect();
    for k in 0..=bins / 2 {
        edges[bins - k] = -edges[k];
    }
    if bins % 2 == 0 {
        edges[bins / 2] = 0.0;
    }
    let mut masses: Vec<f64> = edges.windows(2).map(|w| semicircle_cdf(sigma, w[1]) - semicircle_cdf(sigma, w[0])).collect();
    for k in 0..bins / 2 {
        masses[bins - 1 - k] = masses[k];
    }
    SpectralMeasure::histogram(edges, masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_entry_law, sample_matrix, SampleMeta};
    use crate::linalg::SymMatrix;
    use crate::quad::{integrate, QuadOptions};
    use crate::LevyCharacteristics;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn esd_of_swap_and_zero() {
        let mut m = SymMatrix::zeros(2);
        m.set_sym(0, 1, 1.0);
        let s = SymmetricMatrixSample::new(m, SampleMeta::default()).unwrap();
        let mu = esd(&s).unwrap();
        let (x, w) = mu.atoms().unwrap();
        assert!((x[0] + 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert_eq!(w, &[0.5, 0.5]);
        let r = root_weighted_esd(&s, 0).unwrap();
        assert!((r.atoms().unwrap().1[0] - 0.5).abs() < 1e-14);

        let z = SymmetricMatrixSample::new(SymMatrix::zeros(5), SampleMeta::default()).unwrap();
        let mu = esd(&z).unwrap();
        assert_eq!(mu.atoms().unwrap().0, &[0.0]);
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);
        let one = SymmetricMatrixSample::new(SymMatrix::zeros(1), SampleMeta::default()).unwrap();
        assert_eq!(root_weighted_esd(&one, 0).unwrap(), SpectralMeasure::dirac(0.0));
    }

    #[test]
    fn average_of_diracs() {
        let avg = SpectralMeasure::average(&[SpectralMeasure::dirac(1.0), SpectralMeasure::dirac(-1.0), SpectralMeasure::dirac(1.0)]).unwrap();
        assert_eq!(avg.atoms().unwrap().0, &[-1.0, 1.0]);
        assert!((avg.atoms().unwrap().1[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(SpectralMeasure::average(&[]).is_err());
    }

    #[test]
    fn wigner_esd_is_near_semicircle() {
        let law = build_entry_law(&LevyCharacteristics::wigner(1.0).unwrap(), 2000, None).unwrap();
        let mu = esd(&sample_matrix(&law, 1)).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        let d = kolmogorov_to_cdf(&mu, |x| semicircle_cdf(1.0, x));
        assert!(d <= 0.05, "{d}");
    }

    #[test]
    fn stieltjes_small_cases() {
        let s = SpectralMeasure::dirac(0.0).stieltjes(c(0.0, 1.0)).unwrap();
        assert!((s - c(0.0, 1.0)).norm() < 1e-15);
        let two = SpectralMeasure::from_atoms(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        let s = two.stieltjes(c(0.0, 1.0)).unwrap();
        assert!((s - c(0.0, 0.5)).norm() < 1e-15);
        assert!(two.stieltjes(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn semicircle_histogram_stieltjes() {
        let h = semicircle_histogram(1.0, 10_000).unwrap();
        let s = h.stieltjes(c(0.0, 1.0)).unwrap();
        let exact = c(0.0, (5f64.sqrt() - 1.0) / 2.0);
        assert!((s - exact).norm() < 1e-3, "{s}");
    }

    #[test]
    fn inversion_recovers_masses() {
        let y = 1e-3;
        let xs: Vec<f64> = (0..=16_000).map(|k| -2.0 + k as f64 * 2.5e-4).collect();
        let d0 = SpectralMeasure::dirac(0.0);
        let sv: Vec<Complex64> = xs.iter().map(|&x| d0.stieltjes(c(x, y)).unwrap()).collect();
        let inside = invert_stieltjes(&xs, &sv, y, -1.0, 1.0).unwrap();
        assert!((inside.mass - 1.0).abs() < 2e-3 && !inside.coarse_grid, "{inside:?}");
        let outside = invert_stieltjes(&xs, &sv, y, 1.0, 2.0).unwrap();
        assert!(outside.mass.abs() < 1e-3);

        let sc = semicircle_histogram(1.0, 4000).unwrap();
        let y = 1e-2;
        let xs: Vec<f64> = (0..=1000).map(|k| -2.5 + k as f64 * 5e-3).collect();
        let sv: Vec<Complex64> = xs.iter().map(|&x| sc.stieltjes(c(x, y)).unwrap()).collect();
        let r = invert_stieltjes(&xs, &sv, y, -2.0, 2.0).unwrap();
        assert!((r.mass - 1.0).abs() < 0.01, "{r:?}");
        let coarse = invert_stieltjes(&xs, &sv, 1e-3, -2.0, 2.0).unwrap();
        assert!(coarse.coarse_grid);
    }

    #[test]
    fn kolmogorov_small_cases() {
        let d0 = SpectralMeasure::dirac(0.0);
        let d1 = SpectralMeasure::dirac(1.0);
        let pm = SpectralMeasure::from_atoms(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(kolmogorov_distance(&d0, &d0), 0.0);
        assert_eq!(kolmogorov_distance(&d0, &d1), 1.0);
        assert_eq!(kolmogorov_distance(&pm, &d0), 0.5);
    }

    #[test]
    fn semicircle_basics() {
        assert!((semicircle_density(1.0, 0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(semicircle_density(1.0, 2.0), 0.0);
        assert_eq!(semicircle_density(1.5, -3.0), 0.0);
        let total = integrate(|x| semicircle_density(1.3, x), -2.6, 2.6, QuadOptions::default()).unwrap();
        assert!((total.value - 1.0).abs() < 1e-10);
        assert!((semicircle_cdf(1.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((semicircle_cdf(2.0, 1.7) - integrate(|x| semicircle_density(2.0, x), -4.0, 1.7, QuadOptions::default()).unwrap().value).abs() < 1e-10);
    }

    #[test]
    fn odd_moments_of_symmetric_measures_vanish() {
        let pm = SpectralMeasure::from_atoms(&[-3.0, -1.0, 0.0, 1.0, 3.0], &[0.1, 0.2, 0.4, 0.2, 0.1]).unwrap();
        assert_eq!(pm.moment(3), 0.0);
        assert!((pm.moment(2) - 2.2).abs() < 1e-14);
        let h = semicircle_histogram(1.0, 400).unwrap();
        assert_eq!(h.moment(1), 0.0);
        assert!((h.moment(2) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn symmetrize_and_square() {
        let a = SpectralMeasure::from_atoms(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        let s = a.symmetrized();
        assert!(s.is_symmetric(1e-15));
        assert!(!a.is_symmetric(1e-3));
        let pm = SpectralMeasure::from_atoms(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(pm.pushforward_square().unwrap(), SpectralMeasure::dirac(1.0));
        assert_eq!(SpectralMeasure::dirac(0.0).pushforward_square().unwrap(), SpectralMeasure::dirac(0.0));
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        SpectralMeasure::dirac(0.5).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "atom,weight\n0.5,1\n");
        let mut buf = Vec::new();
        SpectralMeasure::histogram(vec![0.0, 1.0], vec![1.0]).unwrap().write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("bin_left,bin_right,mass\n"));
    }

    fn arb_measure() -> impl Strategy<Value = SpectralMeasure> {
        prop_oneof![
            proptest::collection::vec((-5.0f64..5.0, 0.01f64..1.0), 1..12).prop_map(|v| {
                let (x, w): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
                SpectralMeasure::from_atoms(&x, &w).unwrap()
            }),
            (proptest::collection::vec(0.0f64..1.0, 1..10), -4.0f64..0.0, 0.1f64..1.0).prop_map(|(m, lo, w)| {
                let edges = (0..=m.len()).map(|k| lo + w * k as f64).collect();
                SpectralMeasure::histogram(edges, m).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn herglotz(mu in arb_measure(), re in -10.0f64..10.0, im in 1e-3f64..10.0) {
            let z = c(re, im);
            let s = mu.stieltjes(z).unwrap();
            let mass = mu.total_mass();
            if mass > 0.0 {
                prop_assert!(s.im > 0.0);
            }
            prop_assert!(s.norm() <= mass / im * (1.0 + 1e-12));
            let sym = mu.symmetrized();
            let a = sym.stieltjes(c(-re, im)).unwrap();
            let b = sym.stieltjes(z).unwrap();
            prop_assert!((a + b.conj()).norm() <= 1e-10 * (1.0 + b.norm()));
        }

        #[test]
        fn kolmogorov_is_a_metric(a in arb_measure(), b in arb_measure(), c2 in arb_measure()) {
            let ab = kolmogorov_distance(&a, &b);
            prop_assert!((ab - kolmogorov_distance(&b, &a)).abs() < 1e-15);
            prop_assert!(ab <= kolmogorov_distance(&a, &c2) + kolmogorov_distance(&c2, &b) + 1e-12);
        }
    }
}
