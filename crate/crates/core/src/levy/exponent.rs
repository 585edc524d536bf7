//! The Lévy exponent `Ψ(θ)` of a symmetric triple.
//!
//! For a power piece the real part splits into three ranges:
//! near zero a Taylor series in `θx`, a middle range by adaptive quadrature
//! over half-periods, and a far range where the oscillatory integral is
//! handled by its asymptotic expansion and the `-1` part is closed form.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{power_integral, LevyCharacteristics, PowerPiece};
use crate::error::Result;
use crate::quad::{integrate, QuadOptions};

/// Where the asymptotic tail expansion takes over, in units of `1/θ`.
const FAR_PHASE: f64 = 80.0;

pub(super) fn levy_exponent(chars: &LevyCharacteristics, theta: f64) -> Result<Complex64> {
    let t = theta.abs();
    let mut re = -0.5 * theta * theta * chars.sigma2();
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    for a in chars.levy().atoms() {
        re += 2.0 * a.mass * ((t * a.x).cos() - 1.0);
    }
    for p in chars.levy().pieces() {
        re += 2.0 * p.scale * cos_minus_one_integral(p, t)?;
    }
    // The compensated sine part is odd in x and cancels exactly against the
    // mirrored half of a symmetric measure.
    Ok(Complex64::new(re, 0.0))
}

/// `∫_{xmin}^{xmax} (cos θx − 1) x^(-1-α) dx` for `θ > 0`.
fn cos_minus_one_integral(p: &PowerPiece, t: f64) -> Result<f64> {
    let a = p.xmin;
    let b = p.xmax;
    let near_end = (1.0 / t).min(b);
    let far_start = (FAR_PHASE / t).max(near_end);
    let mut total = 0.0;

    if a < near_end {
        total += near_series(p.alpha, a, near_end, t);
    }
    let mid_lo = a.max(near_end);
    let mid_hi = b.min(far_start);
    if mid_lo < mid_hi {
        total += middle(p.alpha, mid_lo, mid_hi, t)?;
    }
    let far_lo = a.max(far_start);
    if far_lo < b {
        total += far(p.alpha, far_lo, b, t);
    }
    Ok(total)
}

/// Term-by-term integral of the cosine series on `[lo, hi]` with `θ·hi <= 1`.
fn near_series(alpha: f64, lo: f64, hi: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut coef = 1.0; // θ^{2k} / (2k)!
    for k in 1..60u32 {
        let kk = 2.0 * k as f64;
        coef *= t * t / ((kk - 1.0) * kk);
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coef * power_integral(kk - alpha, lo, hi);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn middle(alpha: f64, lo: f64, hi: f64, t: f64) -> Result<f64> {
    let f = |x: f64| ((t * x).cos() - 1.0) * x.powf(-1.0 - alpha);
    let half = PI / t;
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 400,
    };
    let mut s = 0.0;
    let mut x = lo;
    while x < hi {
        let next = (x + half).min(hi);
        s += integrate(f, x, next, opts)?.value;
        x = next;
    }
    Ok(s)
}

/// `∫_lo^hi (cos θx − 1) x^(-1-α) dx` for `θ·lo >= FAR_PHASE`.
fn far(alpha: f64, lo: f64, hi: f64, t: f64) -> f64 {
    let cos_part = oscillatory_tail(alpha, lo, t) - if hi.is_infinite() { 0.0 } else { oscillatory_tail(alpha, hi, t) };
    cos_part - power_integral(-alpha, lo, hi)
}

/// `∫_X^∞ cos(θx) x^(-β) dx`, `β = 1 + α`, from repeated integration by parts:
/// `∫_X^∞ e^{iθx} g = −e^{iθX} Σ_k (β)_k X^(−β−k) / (iθ)^(k+1)`.
fn oscillatory_tail(alpha: f64, x: f64, t: f64) -> f64 {
    let beta = 1.0 + alpha;
    let phase = Complex64::new(0.0, t * x).exp();
    let i_theta = Complex64::new(0.0, t);
    let mut term = x.powf(-beta) / i_theta; // k = 0
    let mut sum = term;
    let mut prev_mag = term.norm();
    for k in 0..200 {
        let kf = k as f64;
        term = term * ((beta + kf) / (x * i_theta));
        let mag = term.norm();
        if mag > prev_mag {
            break;
        }
        sum += term;
        if mag <= 1e-18 * sum.norm() {
            break;
        }
        prev_mag = mag;
    }
    (-phase * sum).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{LevyMeasure, PowerPiece};
    use statrs::function::gamma::gamma;

    fn stable_closed_form(alpha: f64, scale: f64, theta: f64) -> f64 {
        let t = theta.abs();
        if (alpha - 1.0).abs() < 1e-15 {
            -scale * PI * t
        } else {
            -2.0 * scale * t.powf(alpha) * gamma(1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
        }
    }

    /// Midpoint rule on a fine log grid, split at cosine half-periods.
    fn brute(alpha: f64, scale: f64, lo: f64, hi: f64, theta: f64) -> f64 {
        let n = 4_000_000;
        let la = lo.ln();
        let h = (hi.ln() - la) / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = (la + (i as f64 + 0.5) * h).exp();
            s += ((theta * x).cos() - 1.0) * x.powf(-1.0 - alpha) * x * h;
        }
        2.0 * scale * s
    }

    #[test]
    fn gaussian_only() {
        let c = LevyCharacteristics::wigner(1.0).unwrap();
        assert_eq!(c.levy_exponent(2.0).unwrap(), Complex64::new(-2.0, 0.0));
    }

    #[test]
    fn atom_pair() {
        let c = LevyCharacteristics::new(0.0, LevyMeasure::symmetric_pair(1.0, 1.0).unwrap()).unwrap();
        let v = c.levy_exponent(PI).unwrap();
        assert!((v.re + 2.0).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn truncated_piece_matches_riemann_sum() {
        let alpha = 1.0;
        let c = LevyCharacteristics::new(0.0, LevyMeasure::power_law(alpha, alpha, 0.01, 100.0).unwrap()).unwrap();
        let v = c.levy_exponent(1.0).unwrap().re;
        let oracle = brute(alpha, alpha, 0.01, 100.0, 1.0);
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
    }

    #[test]
    fn stable_matches_closed_form() {
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            let c = LevyCharacteristics::stable(alpha).unwrap();
            for &theta in &[0.3, 1.0, -2.5, 17.0] {
                let v = c.levy_exponent(theta).unwrap().re;
                let oracle = stable_closed_form(alpha, alpha, theta);
                assert!((v - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "alpha {alpha} theta {theta}: {v} vs {oracle}");
            }
        }
    }

    #[test]
    fn piece_with_large_outer_cutoff() {
        let p = PowerPiece::new(0.7, 1.0, 0.5, 1e7);
        let c = LevyCharacteristics::new(0.0, LevyMeasure::new(vec![], vec![p]).unwrap()).unwrap();
        let full = LevyCharacteristics::new(0.0, LevyMeasure::power_law(0.7, 1.0, 0.5, f64::INFINITY).unwrap()).unwrap();
        // the far piece beyond 1e7 contributes about -2·(1e7)^(-0.7)/0.7
        let gap = c.levy_exponent(3.0).unwrap().re - full.levy_exponent(3.0).unwrap().re;
        let expected = 2.0 * 1e7f64.powf(-0.7) / 0.7;
        assert!((gap - expected).abs() < 1e-9, "{gap} vs {expected}");
    }

    #[test]
    fn exponent_is_nonpositive_and_real() {
        let c = LevyCharacteristics::new(0.3, LevyMeasure::power_law(1.2, 0.4, 0.0, 5.0).unwrap()).unwrap();
        for i in 0..40 {
            let theta = -10.0 + 0.5 * i as f64;
            let v = c.levy_exponent(theta).unwrap();
            assert!(v.re <= 0.0);
            assert!(v.im.abs() <= 1e-10);
        }
    }
}
