//! Minimal SVG line plots of the suite's CSV outputs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAX_CURVES: usize = 4;
const COLORS: [&str; MAX_CURVES] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 40.0;
/// Horizontal padding around the part of the data with positive density.
const X_PAD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads a density-like curve from any of the suite's CSV layouts:
/// histograms become step curves, atoms become stems, Stieltjes values
/// become `Im S / π`.
pub fn read_curve(text: &str, label: &str) -> Result<Curve> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Format(format!("{label}: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Format(format!("{label}: {e}")))?;
        let row = rec
            .iter()
            .map(|f| {
                let v: f64 = f.trim().parse().map_err(|_| Error::Format(format!("{label}: `{f}` is not a number")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Format(format!("{label}: non-finite value `{f}`")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format(format!("{label}: no data rows")));
    }
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    let points: Vec<(f64, f64)> = match h.as_slice() {
        ["bin_left", "bin_right", "mass"] => rows
            .iter()
            .flat_map(|r| {
                let d = r[2] / (r[1] - r[0]);
                [(r[0], d), (r[1], d)]
            })
            .collect(),
        ["atom", "weight"] => rows.iter().flat_map(|r| [(r[0], 0.0), (r[0], r[1]), (r[0], 0.0)]).collect(),
        ["x", "density", "mc_err"] => rows.iter().map(|r| (r[0], r[1])).collect(),
        ["x", "y", "re_S", "im_S"] => rows.iter().map(|r| (r[0], r[3] / PI)).collect(),
        _ => return Err(Error::Format(format!("{label}: unrecognized header `{}`", headers.join(",")))),
    };
    if points.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::Format(format!("{label}: x values are not sorted")));
    }
    Ok(Curve {
        label: label.to_string(),
        points,
    })
}

pub fn read_curve_file(path: &Path) -> Result<Curve> {
    let text = std::fs::read_to_string(path)?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    read_curve(&text, label)
}

fn span<I: Iterator<Item = f64>>(it: I) -> Option<(f64, f64)> {
    it.fold(None, |acc, x| {
        Some(match acc {
            None => (x, x),
            Some((a, b)) => (a.min(x), b.max(x)),
        })
    })
}

/// `[lo, hi]` of the x-axis: where any curve is positive, padded on both sides.
pub fn x_range(curves: &[Curve]) -> (f64, f64) {
    let pts = || curves.iter().flat_map(|c| c.points.iter());
    let (lo, hi) = span(pts().filter(|p| p.1 > 0.0).map(|p| p.0))
        .or_else(|| span(pts().map(|p| p.0)))
        .unwrap_or((0.0, 1.0));
    (lo - X_PAD, hi + X_PAD)
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Renders up to four curves with a legend. Output depends only on the inputs.
pub fn render_svg(curves: &[Curve], title: &str) -> Result<String> {
    if curves.is_empty() || curves.len() > MAX_CURVES {
        return Err(Error::Config(format!("plot takes 1 to {MAX_CURVES} curves, got {}", curves.len())));
    }
    let (x0, x1) = x_range(curves);
    let y_top = curves.iter().flat_map(|c| c.points.iter()).map(|p| p.1).fold(0.0, f64::max);
    let y1 = if y_top > 0.0 { 1.05 * y_top } else { 1.0 };
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + ph - y.clamp(0.0, y1) / y1 * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<defs><clipPath id="plot"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}"/></clipPath></defs>"#);
    let _ = writeln!(s, r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in nice_ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, MARGIN_T + ph, MARGIN_T + ph + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_T + ph + 16.0, fmt(t));
    }
    for t in nice_ticks(0.0, y1) {
        let y = sy(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#, MARGIN_L - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_L - 6.0, y + 4.0, fmt(t));
    }
    for (c, color) in curves.iter().zip(COLORS) {
        let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    }
    let lx = WIDTH - MARGIN_R - 170.0;
    for (k, (c, color)) in curves.iter().zip(COLORS).enumerate() {
        let ly = MARGIN_T + 14.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#, lx + 20.0, lx + 26.0, ly + 4.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Reads the CSV files and writes the overlay to `out`.
pub fn emit_plot(inputs: &[&Path], out: &Path, title: &str) -> Result<()> {
    let curves = inputs.iter().map(|p| read_curve_file(p)).collect::<Result<Vec<_>>>()?;
    std::fs::write(out, render_svg(&curves, title)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::semicircle_density;

    fn semicircle_csv(sigma: f64) -> String {
        let mut s = String::from("x,density,mc_err\n");
        for k in 0..=120 {
            let x = -3.0 * sigma + 0.05 * sigma * k as f64;
            s += &format!("{x},{},0\n", semicircle_density(sigma, x));
        }
        s
    }

    #[test]
    fn single_semicircle_axes() {
        for sigma in [1.0, 2.0] {
            let c = read_curve(&semicircle_csv(sigma), "semicircle").unwrap();
            let (lo, hi) = x_range(std::slice::from_ref(&c));
            // the outermost positive samples sit one grid step inside ±2σ
            let step = 0.05 * sigma;
            assert!((lo - (-2.0 * sigma - 0.5)).abs() <= step + 1e-9, "{lo}");
            assert!((hi - (2.0 * sigma + 0.5)).abs() <= step + 1e-9, "{hi}");
            let svg = render_svg(&[c], "semicircle").unwrap();
            assert_eq!(svg.matches("<polyline").count(), 1);
        }
    }

    #[test]
    fn four_curves_four_legend_entries() {
        let hist = "bin_left,bin_right,mass\n-1,0,0.5\n0,1,0.5\n";
        let atoms = "atom,weight\n-1,0.5\n1,0.5\n";
        let st = "x,y,re_S,im_S\n-1,0.1,0.2,0.9\n1,0.1,-0.2,0.9\n";
        let curves = vec![
            read_curve(hist, "esd").unwrap(),
            read_curve(atoms, "pwist").unwrap(),
            read_curve(&semicircle_csv(1.0), "rde").unwrap(),
            read_curve(st, "stieltjes").unwrap(),
        ];
        let svg = render_svg(&curves, "compare").unwrap();
        assert_eq!(svg.matches(r#"class="legend""#).count(), 4);
        assert_eq!(svg, render_svg(&curves, "compare").unwrap());
        let mut five = curves.clone();
        five.push(curves[0].clone());
        assert!(matches!(render_svg(&five, "x"), Err(Error::Config(_))));
    }

    #[test]
    fn malformed_csv() {
        for bad in ["", "x,density,mc_err\n", "a,b\n1,2\n", "x,density,mc_err\n1,zz,0\n", "x,density,mc_err\n1,2\n", "x,density,mc_err\n2,1,0\n1,1,0\n"] {
            assert!(matches!(read_curve(bad, "bad"), Err(Error::Format(_))), "{bad:?}");
        }
    }
}
