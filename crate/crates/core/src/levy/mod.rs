//! Symmetric Lévy measures built from atoms and two-sided power-law pieces,
//! the characteristic triple `(σ², 0, Π)`, and the quantities derived from it.
//!
//! Every measure here is symmetric: an atom `(x, m)` with `x > 0` stands for
//! mass `m` at `x` and mass `m` at `-x`, and a power piece contributes density
//! `scale·|x|^(-1-alpha)` on `xmin < |x| < xmax` on both sides. All masses and
//! moments are closed-form.

mod dg;
mod exponent;
mod json;

pub use dg::{dg_check, CriterionKind, CriterionReport, DgConfig, DgReport, DgStatus, EntrySampler};
pub use json::CharacteristicsJson;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Location, strictly positive; the mirror image at `-x` is implicit.
    pub x: f64,
    /// Mass at `x` (and, separately, at `-x`).
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPiece {
    /// Tail exponent: the density is `scale·|x|^(-1-alpha)`.
    pub alpha: f64,
    pub scale: f64,
    pub xmin: f64,
    /// `f64::INFINITY` for an untruncated tail.
    pub xmax: f64,
}

impl PowerPiece {
    pub fn new(alpha: f64, scale: f64, xmin: f64, xmax: f64) -> Self {
        Self {
            alpha,
            scale,
            xmin,
            xmax,
        }
    }

    /// `∫_{lo}^{hi} scale·x^(p-1-alpha) dx` clipped to the piece's support, one side only.
    fn half_power_integral(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(self.xmin);
        let hi = hi.min(self.xmax);
        if lo >= hi {
            return 0.0;
        }
        self.scale * power_integral(p - self.alpha, lo, hi)
    }
}

/// `∫_lo^hi x^(e-1) dx` for `0 <= lo < hi <= ∞`, possibly `+∞`.
pub(crate) fn power_integral(e: f64, lo: f64, hi: f64) -> f64 {
    if lo >= hi {
        return 0.0;
    }
    if e == 0.0 {
        if lo == 0.0 || hi.is_infinite() {
            return f64::INFINITY;
        }
        return (hi / lo).ln();
    }
    if e > 0.0 {
        if hi.is_infinite() {
            return f64::INFINITY;
        }
        (hi.powf(e) - lo.powf(e)) / e
    } else {
        if lo == 0.0 {
            return f64::INFINITY;
        }
        let hi_term = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
        (hi_term - lo.powf(e)) / e
    }
}

/// A symmetric measure on `ℝ∖{0}`.
///
/// The same representation serves as a Lévy measure `Π` (validated by
/// [`LevyMeasure::new`]) and as the arrival intensity `λ_Π` produced by
/// [`LevyMeasure::invert_to_intensity`], which need not be a Lévy measure.
#[derive(Debug, Clone)]
pub struct LevyMeasure {
    atoms: Vec<Atom>,
    pieces: Vec<PowerPiece>,
    /// The measure this one was inverted from, so inversion is an exact involution.
    origin: Option<Box<LevyMeasure>>,
}

impl PartialEq for LevyMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.pieces == other.pieces
    }
}

fn check_piece_shape(p: &PowerPiece) -> Result<()> {
    if !(p.alpha.is_finite() && p.scale.is_finite() && p.scale > 0.0) {
        return Err(Error::invalid(format!("power piece needs finite alpha and scale > 0, got {p:?}")));
    }
    if !(p.xmin >= 0.0 && p.xmin.is_finite() && p.xmax > p.xmin) {
        return Err(Error::invalid(format!("power piece needs 0 <= xmin < xmax, got {p:?}")));
    }
    Ok(())
}

impl LevyMeasure {
    /// Validates a Lévy measure: positive atoms and `∫(1 ∧ x²) Π(dx) < ∞`.
    pub fn new(atoms: Vec<Atom>, pieces: Vec<PowerPiece>) -> Result<Self> {
        for a in &atoms {
            if !(a.x.is_finite() && a.x > 0.0 && a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::invalid(format!("atoms need finite x > 0 and mass > 0, got {a:?}")));
            }
        }
        for p in &pieces {
            check_piece_shape(p)?;
            if p.xmin == 0.0 && p.alpha >= 2.0 {
                return Err(Error::invalid(format!(
                    "power piece touching 0 must have alpha < 2 (got {})",
                    p.alpha
                )));
            }
            if p.xmax.is_infinite() && p.alpha <= 0.0 {
                return Err(Error::invalid(format!(
                    "untruncated power tail must have alpha > 0 (got {})",
                    p.alpha
                )));
            }
        }
        let m = Self {
            atoms,
            pieces,
            origin: None,
        };
        debug_assert!(m.one_wedge_square_integral().is_finite());
        Ok(m)
    }

    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            pieces: Vec::new(),
            origin: None,
        }
    }

    /// `mass/2` at each of `±x`.
    pub fn symmetric_pair(x: f64, total_mass: f64) -> Result<Self> {
        Self::new(vec![Atom { x, mass: total_mass / 2.0 }], Vec::new())
    }

    pub fn power_law(alpha: f64, scale: f64, xmin: f64, xmax: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![PowerPiece::new(alpha, scale, xmin, xmax)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[PowerPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    /// Mass of `{lo < |x| <= hi}` counting both signs.
    pub fn abs_mass_between(&self, lo: f64, hi: f64) -> f64 {
        2.0 * self.half_mass(lo, hi, false)
    }

    /// Mass of `(lo, hi]` (or `(lo, hi)` when `open_hi`) on the positive half-line.
    fn half_mass(&self, lo: f64, hi: f64, open_hi: bool) -> f64 {
        let mut m = 0.0;
        for a in &self.atoms {
            let inside_hi = if open_hi { a.x < hi } else { a.x <= hi };
            if a.x > lo && inside_hi {
                m += a.mass;
            }
        }
        for p in &self.pieces {
            m += p.half_power_integral(0.0, lo, hi);
        }
        m
    }

    /// `Π{|x| > eps}`.
    pub fn tail_mass(&self, eps: f64) -> f64 {
        self.abs_mass_between(eps.max(0.0), f64::INFINITY)
    }

    /// Mass of the open interval `(a, b)`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        if a >= 0.0 {
            self.half_mass(a, b, true)
        } else if b <= 0.0 {
            self.half_mass(-b, -a, true)
        } else {
            self.half_mass(0.0, -a, true) + self.half_mass(0.0, b, true)
        }
    }

    /// `∫|x|^p Π(dx)`, possibly `+∞`.
    pub fn abs_moment(&self, p: f64) -> f64 {
        self.truncated_abs_moment(p, f64::INFINITY)
    }

    /// `∫_{|x| <= h} |x|^p Π(dx)`.
    pub fn truncated_abs_moment(&self, p: f64, h: f64) -> f64 {
        let mut s = 0.0;
        for a in &self.atoms {
            if a.x <= h {
                s += 2.0 * a.mass * a.x.powf(p);
            }
        }
        for piece in &self.pieces {
            s += 2.0 * piece.half_power_integral(p, 0.0, h);
        }
        s
    }

    /// `∫_{lo < x <= hi} x^p Π(dx)` over the positive half-line only.
    pub fn half_abs_moment_between(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.x > lo && a.x <= hi)
            .map(|a| a.mass * a.x.powf(p))
            .sum();
        atoms + self.pieces.iter().map(|piece| piece.half_power_integral(p, lo, hi)).sum::<f64>()
    }

    /// `M_p(Π) = ∫ x^p Π(dx)` for even `p >= 2`; odd moments vanish by symmetry and are not exposed.
    pub fn measure_moment(&self, p: u32) -> Result<f64> {
        if p < 2 || p % 2 == 1 {
            return Err(Error::invalid(format!("measure_moment needs an even order >= 2, got {p}")));
        }
        Ok(self.abs_moment(p as f64))
    }

    /// `∫(1 ∧ x²) Π(dx)`.
    pub fn one_wedge_square_integral(&self) -> f64 {
        self.truncated_abs_moment(2.0, 1.0) + self.tail_mass(1.0)
    }

    /// Largest `|x|` in the support, `+∞` for untruncated tails, 0 for the zero measure.
    pub fn support_radius(&self) -> f64 {
        let a = self.atoms.iter().map(|a| a.x).fold(0.0, f64::max);
        let p = self.pieces.iter().map(|p| p.xmax).fold(0.0, f64::max);
        a.max(p)
    }

    /// Every positive location where the measure has an atom.
    pub fn atom_locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.x)
    }

    /// `λ_Π` with `λ_Π{x : 1/x ∈ B} = Π(B)`: atoms move to `1/x`, a piece with
    /// density `scale·|x|^(-1-α)` on `(a, b)` becomes `scale·|x|^(α-1)` on `(1/b, 1/a)`.
    pub fn invert_to_intensity(&self) -> LevyMeasure {
        if let Some(origin) = &self.origin {
            return (**origin).clone();
        }
        let atoms = self
            .atoms
            .iter()
            .rev()
            .map(|a| Atom { x: 1.0 / a.x, mass: a.mass })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| PowerPiece {
                alpha: -p.alpha,
                scale: p.scale,
                xmin: if p.xmax.is_infinite() { 0.0 } else { 1.0 / p.xmax },
                xmax: if p.xmin == 0.0 { f64::INFINITY } else { 1.0 / p.xmin },
            })
            .collect();
        LevyMeasure {
            atoms,
            pieces,
            origin: Some(Box::new(self.clone())),
        }
    }

    /// Sampler for `Π` restricted to `{|x| > eps}` and normalized; `None` when that mass is 0.
    pub fn restricted_sampler(&self, eps: f64) -> Result<Option<JumpSampler>> {
        let total = self.tail_mass(eps);
        if !total.is_finite() {
            return Err(Error::invalid(format!(
                "Π{{|x| > {eps}}} is infinite; raise the cutoff"
            )));
        }
        if total == 0.0 {
            return Ok(None);
        }
        let mut comps = Vec::new();
        for a in &self.atoms {
            if a.x > eps {
                comps.push((2.0 * a.mass, JumpComponent::Atom(a.x)));
            }
        }
        for p in &self.pieces {
            let lo = eps.max(p.xmin);
            if lo < p.xmax {
                let w = 2.0 * p.half_power_integral(0.0, lo, p.xmax);
                if w > 0.0 {
                    comps.push((
                        w,
                        JumpComponent::Piece {
                            alpha: p.alpha,
                            lo,
                            hi: p.xmax,
                        },
                    ));
                }
            }
        }
        let mut cumulative = Vec::with_capacity(comps.len());
        let mut acc = 0.0;
        for (w, _) in &comps {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Some(JumpSampler {
            cumulative,
            components: comps.into_iter().map(|c| c.1).collect(),
            total: acc,
        }))
    }
}

#[derive(Debug, Clone, Copy)]
enum JumpComponent {
    Atom(f64),
    Piece { alpha: f64, lo: f64, hi: f64 },
}

/// Draws from a symmetric measure restricted to `{|x| > eps}`, normalized.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    cumulative: Vec<f64>,
    components: Vec<JumpComponent>,
    total: f64,
}

impl JumpSampler {
    /// Total mass of the restricted measure before normalization.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn sample_abs<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = rng.gen::<f64>() * self.total;
        let idx = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1);
        match self.components[idx] {
            JumpComponent::Atom(x) => x,
            JumpComponent::Piece { alpha, lo, hi } => {
                let v: f64 = rng.gen();
                if alpha == 0.0 {
                    lo * (hi / lo).powf(v)
                } else {
                    let a = lo.powf(-alpha);
                    let b = if hi.is_infinite() { 0.0 } else { hi.powf(-alpha) };
                    (a + v * (b - a)).powf(-1.0 / alpha)
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.sample_abs(rng);
        if rng.gen::<bool>() {
            x
        } else {
            -x
        }
    }
}

/// The triple `(σ², 0, Π)`; the drift is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyCharacteristics {
    sigma2: f64,
    levy: LevyMeasure,
}

impl LevyCharacteristics {
    pub fn new(sigma2: f64, levy: LevyMeasure) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::invalid(format!("sigma2 must be finite and >= 0, got {sigma2}")));
        }
        Ok(Self { sigma2, levy })
    }

    /// Wigner class `(σ², 0, 0)`.
    pub fn wigner(sigma2: f64) -> Result<Self> {
        Self::new(sigma2, LevyMeasure::zero())
    }

    /// Sparse class `(0, 0, c(½δ₁ + ½δ₋₁))`: Erdős–Rényi-type adjacency with mean degree `c`.
    pub fn sparse(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("sparse mean degree must be > 0, got {c}")));
        }
        Self::new(0.0, LevyMeasure::symmetric_pair(1.0, c)?)
    }

    /// Symmetric α-stable class `(0, 0, α|x|^(-1-α) dx)`.
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!("stable alpha must lie in (0, 2), got {alpha}")));
        }
        Self::new(0.0, LevyMeasure::power_law(alpha, alpha, 0.0, f64::INFINITY)?)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn levy(&self) -> &LevyMeasure {
        &self.levy
    }

    pub fn drift(&self) -> f64 {
        0.0
    }

    /// `Ψ(θ) = -½θ²σ² + ∫(e^{iθx} - 1 - iθx/(1+x²)) Π(dx)`.
    pub fn levy_exponent(&self, theta: f64) -> Result<num_complex::Complex64> {
        exponent::levy_exponent(self, theta)
    }

    /// `σ²_h = σ² + ∫_{|x|<=h} x² Π(dx)`.
    pub fn gaussian_compensation(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::invalid(format!("compensation level must be > 0, got {h}")));
        }
        Ok(self.sigma2 + self.levy.truncated_abs_moment(2.0, h))
    }

    /// `b_h = -∫_{h<|x|<=1} x Π(dx)`, computed from the signed halves.
    pub fn truncated_drift(&self, h: f64) -> f64 {
        if h >= 1.0 {
            return 0.0;
        }
        // Each half contributes ∫ x Π(dx) with opposite sign; keep both terms explicit.
        let positive = self.levy.half_abs_moment_between(1.0, h, 1.0);
        let negative = -self.levy.half_abs_moment_between(1.0, h, 1.0);
        -(positive + negative)
    }

    /// Pushforward of `Π` under `x ↦ x²` with `σ²` unchanged.
    pub fn subordinator_form(&self) -> SubordinatorCharacteristics {
        let atoms = self
            .levy
            .atoms
            .iter()
            .map(|a| Atom {
                x: a.x * a.x,
                mass: 2.0 * a.mass,
            })
            .collect();
        // Two sides of scale·|x|^(-1-α) on (a,b) push to scale·y^(-1-α/2) on (a², b²).
        let pieces = self
            .levy
            .pieces
            .iter()
            .map(|p| PowerPiece {
                alpha: p.alpha / 2.0,
                scale: p.scale,
                xmin: p.xmin * p.xmin,
                xmax: p.xmax * p.xmax,
            })
            .collect();
        SubordinatorCharacteristics {
            sigma2: self.sigma2,
            levy_s: SubordinatorMeasure { atoms, pieces },
        }
    }

    /// Smallest cutoff `ε` (on a geometric bracket) with `Π{|x| > ε} <= max_mass`.
    /// Returns 0 when the whole measure already fits.
    pub fn default_epsilon(&self, max_mass: f64) -> f64 {
        let total = self.levy.tail_mass(0.0);
        if total <= max_mass {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.levy.tail_mass(hi) > max_mass {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        while self.levy.tail_mass(lo) <= max_mass && lo > 1e-300 {
            lo /= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.levy.tail_mass(mid) <= max_mass {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// One-sided measure on `(0, ∞)`, the law of squared jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorMeasure {
    /// Atoms `(y, m)` with all the mass at `y` (no mirror).
    pub atoms: Vec<Atom>,
    /// Densities `scale·y^(-1-alpha)` on `(xmin, xmax)`, one side only.
    pub pieces: Vec<PowerPiece>,
}

impl SubordinatorMeasure {
    /// `∫ y^k Π_s(dy)`.
    pub fn moment(&self, k: f64) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.mass * a.x.powf(k)).sum();
        let p: f64 = self.pieces.iter().map(|p| p.half_power_integral(k, 0.0, f64::INFINITY)).sum();
        a + p
    }

    pub fn total_mass(&self) -> f64 {
        self.moment(0.0)
    }

    /// `∫(1 ∧ y) Π_s(dy)`.
    pub fn one_wedge_integral(&self) -> f64 {
        let mut s = 0.0;
        for a in &self.atoms {
            s += a.mass * a.x.min(1.0);
        }
        for p in &self.pieces {
            s += p.half_power_integral(1.0, 0.0, 1.0) + p.half_power_integral(0.0, 1.0, f64::INFINITY);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorCharacteristics {
    pub sigma2: f64,
    pub levy_s: SubordinatorMeasure,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn riemann<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        // midpoint rule on a log-spaced grid
        let la = a.ln();
        let lb = b.ln();
        let h = (lb - la) / n as f64;
        (0..n)
            .map(|i| {
                let t = la + (i as f64 + 0.5) * h;
                let x = t.exp();
                f(x) * x * h
            })
            .sum()
    }

    #[test]
    fn sparse_measure_moments() {
        let half = LevyMeasure::symmetric_pair(1.0, 1.0).unwrap();
        assert_eq!(half.measure_moment(2).unwrap(), 1.0);
        let five = LevyMeasure::symmetric_pair(1.0, 5.0).unwrap();
        assert_eq!(five.measure_moment(4).unwrap(), 5.0);
        assert!(five.measure_moment(3).is_err());
    }

    #[test]
    fn power_piece_second_moment() {
        // 2·∫₀¹ x^(1-α) dx = 2/(2-α) at α = 0.5
        let m = LevyMeasure::power_law(0.5, 1.0, 0.0, 1.0).unwrap();
        assert!((m.measure_moment(2).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let heavy = LevyMeasure::power_law(1.5, 1.0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(heavy.measure_moment(2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn constructor_rejects_nonintegrable() {
        assert!(LevyMeasure::power_law(2.0, 1.0, 0.0, 1.0).is_err());
        assert!(LevyMeasure::power_law(0.0, 1.0, 1.0, f64::INFINITY).is_err());
        assert!(LevyMeasure::power_law(2.5, 1.0, 0.1, 1.0).is_ok());
        assert!(LevyMeasure::new(vec![Atom { x: -1.0, mass: 1.0 }], vec![]).is_err());
    }

    #[test]
    fn tail_mass_of_stable_piece() {
        let m = LevyMeasure::power_law(1.0, 1.0, 0.0, f64::INFINITY).unwrap();
        assert!((m.tail_mass(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(m.tail_mass(0.0), f64::INFINITY);
    }

    #[test]
    fn gaussian_compensation_cases() {
        let w = LevyCharacteristics::wigner(1.0).unwrap();
        assert_eq!(w.gaussian_compensation(0.1).unwrap(), 1.0);
        let s = LevyCharacteristics::new(0.0, LevyMeasure::symmetric_pair(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(s.gaussian_compensation(2.0).unwrap(), 1.0);
        assert_eq!(s.gaussian_compensation(0.5).unwrap(), 0.0);
        assert!(s.gaussian_compensation(0.0).is_err());
    }

    #[test]
    fn gaussian_compensation_matches_riemann_sum() {
        let alpha = 1.3;
        let chars = LevyCharacteristics::new(0.0, LevyMeasure::power_law(alpha, 0.7, 0.01, 50.0).unwrap()).unwrap();
        let h = 0.8;
        let oracle = 2.0 * riemann(|x| x * x * 0.7 * x.powf(-1.0 - alpha), 0.01, h, 200_000);
        let got = chars.gaussian_compensation(h).unwrap();
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn subordinator_of_pair_merges() {
        let s = LevyCharacteristics::new(0.0, LevyMeasure::symmetric_pair(1.0, 1.0).unwrap())
            .unwrap()
            .subordinator_form();
        assert_eq!(s.levy_s.atoms, vec![Atom { x: 1.0, mass: 1.0 }]);
        let g = LevyCharacteristics::wigner(2.0).unwrap().subordinator_form();
        assert_eq!(g.sigma2, 2.0);
        assert!(g.levy_s.atoms.is_empty() && g.levy_s.pieces.is_empty());
    }

    #[test]
    fn subordinator_first_moment_is_second_moment_of_pi() {
        let alpha = 0.8;
        let chars = LevyCharacteristics::new(0.0, LevyMeasure::power_law(alpha, 1.0, 0.1, 10.0).unwrap()).unwrap();
        // closed form: 2·∫_{0.1}^{10} x^(1-α) dx
        let closed = 2.0 * (10f64.powf(2.0 - alpha) - 0.1f64.powf(2.0 - alpha)) / (2.0 - alpha);
        let s = chars.subordinator_form();
        assert!((s.levy_s.moment(1.0) - closed).abs() < 1e-12 * closed);
        assert!((chars.levy().measure_moment(2).unwrap() - closed).abs() < 1e-12 * closed);
        assert!(s.levy_s.one_wedge_integral().is_finite());
    }

    #[test]
    fn inversion_of_atom() {
        let m = LevyMeasure::new(vec![Atom { x: 2.0, mass: 1.0 }], vec![]).unwrap();
        let inv = m.invert_to_intensity();
        assert_eq!(inv.atoms(), &[Atom { x: 0.5, mass: 1.0 }]);
    }

    #[test]
    fn inversion_preserves_piece_mass() {
        let alpha = 1.2;
        let m = LevyMeasure::power_law(alpha, 1.0, 0.01, 100.0).unwrap();
        let inv = m.invert_to_intensity();
        assert_eq!(inv.pieces()[0].alpha, -alpha);
        let a = m.tail_mass(0.0);
        let b = inv.tail_mass(0.0);
        assert!((a - b).abs() < 1e-10 * a, "{a} vs {b}");
        // Π(1, 10) = λ(0.1, 1)
        assert!((m.abs_mass_between(1.0, 10.0) - inv.abs_mass_between(0.1, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn default_epsilon_bounds_mass() {
        let st = LevyCharacteristics::stable(1.0).unwrap();
        let eps = st.default_epsilon(100.0);
        assert!(st.levy().tail_mass(eps) <= 100.0);
        assert!(st.levy().tail_mass(eps * 0.999) > 100.0);
        assert_eq!(LevyCharacteristics::sparse(5.0).unwrap().default_epsilon(100.0), 0.0);
    }

    #[test]
    fn sampler_respects_restriction() {
        use crate::rng::stream;
        let m = LevyMeasure::power_law(1.0, 1.0, 0.0, f64::INFINITY).unwrap();
        let s = m.restricted_sampler(0.5).unwrap().unwrap();
        let mut rng = stream(3, 0, &[]);
        let draws: Vec<f64> = (0..20_000).map(|_| s.sample(&mut rng)).collect();
        assert!(draws.iter().all(|x| x.abs() > 0.5));
        // P(|J| > 1 | |J| > 0.5) = 0.5 for α = 1
        let frac = draws.iter().filter(|x| x.abs() > 1.0).count() as f64 / draws.len() as f64;
        assert!((frac - 0.5).abs() < 0.015, "{frac}");
        assert!(m.restricted_sampler(0.0).is_err());
        assert!(LevyMeasure::zero().restricted_sampler(0.1).unwrap().is_none());
    }

    fn arb_measure() -> impl Strategy<Value = LevyMeasure> {
        let atoms = proptest::collection::vec((0.01f64..50.0, 0.01f64..10.0), 0..4);
        let pieces = proptest::collection::vec((0.05f64..1.95, 0.1f64..5.0, 0.0f64..2.0, 0.0f64..50.0, any::<bool>()), 0..3);
        (atoms, pieces).prop_map(|(a, p)| {
            let atoms = a.into_iter().map(|(x, mass)| Atom { x, mass }).collect();
            let pieces = p
                .into_iter()
                .map(|(alpha, scale, xmin, width, open)| {
                    PowerPiece::new(alpha, scale, xmin, if open { f64::INFINITY } else { xmin + width + 0.01 })
                })
                .collect();
            LevyMeasure::new(atoms, pieces).unwrap()
        })
    }

    proptest! {
        #[test]
        fn measure_is_symmetric(m in arb_measure(), eps in 0.0f64..20.0, w in 0.01f64..30.0) {
            prop_assert_eq!(m.mass(eps, f64::INFINITY), m.mass(f64::NEG_INFINITY, -eps));
            prop_assert_eq!(m.mass(eps, eps + w), m.mass(-eps - w, -eps));
        }

        #[test]
        fn inversion_is_an_involution(m in arb_measure()) {
            let back = m.invert_to_intensity().invert_to_intensity();
            prop_assert_eq!(&back, &m);
        }

        #[test]
        fn compensation_is_monotone(m in arb_measure(), s2 in 0.0f64..3.0, h1 in 0.001f64..10.0, dh in 0.0f64..10.0) {
            let c = LevyCharacteristics::new(s2, m).unwrap();
            let a = c.gaussian_compensation(h1).unwrap();
            let b = c.gaussian_compensation(h1 + dh).unwrap();
            prop_assert!(a <= b);
            prop_assert!(a >= s2);
            let m2 = c.levy().abs_moment(2.0);
            if m2.is_finite() {
                prop_assert!(b <= s2 + m2 + 1e-12 * (1.0 + m2));
            }
        }

        #[test]
        fn lévy_integrability_holds(m in arb_measure()) {
            prop_assert!(m.one_wedge_square_integral().is_finite());
            prop_assert!(m.tail_mass(0.1).is_finite());
        }
    }

    #[test]
    fn compensation_limits() {
        let c = LevyCharacteristics::new(0.5, LevyMeasure::power_law(1.0, 1.0, 0.0, 3.0).unwrap()).unwrap();
        assert!((c.gaussian_compensation(1e-12).unwrap() - 0.5).abs() < 1e-11);
        let full = 0.5 + c.levy().abs_moment(2.0);
        assert!((c.gaussian_compensation(1e6).unwrap() - full).abs() < 1e-12);
    }

    #[test]
    fn truncated_drift_is_zero_by_symmetry() {
        let c = LevyCharacteristics::stable(1.5).unwrap();
        assert_eq!(c.truncated_drift(0.3), 0.0);
    }
}
