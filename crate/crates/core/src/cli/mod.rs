//! Config-driven runner: `levyspec <mode> --config <file> [--out <dir>] [--seed <u64>] [--threads <k>]`.
//!
//! Exit codes: 0 on success, 2 for config or input errors, 3 when a
//! computation fails. Files written by a failed run are removed.

pub mod config;
pub mod plot;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::{ExperimentConfig, GridSpec, Mode, Resolved, SCHEMA_HINT, SCHEMA_VERSION};

use crate::ensembles::{build_entry_law, sample_matrix, sample_nonhermitian};
use crate::error::{Error, Result};
use crate::levy::{dg_check, DgConfig};
use crate::moments::{lsd_moment, moment_bound, trace_moments_mc, write_moment_csv, MomentRow, MomentValue, MomentVector};
use crate::pwist::{grow_pwist, root_spectral_measure_auto, row_count_check, write_neighborhood_json_lines, TreeParams};
use crate::rde::{moments_from_smoothed_density, rde_density, solve_rde, write_density_csv, DensityPoint, RdeParams};
use crate::rng::split_seed;
use crate::spectra::{esd, kolmogorov_distance, kolmogorov_to_cdf, semicircle_cdf, semicircle_density, write_stieltjes_csv, SpectralMeasure};
use crate::wishart::{hermitization_gap, singular_value_esd, squared_semicircle_cdf};
use crate::LevyCharacteristics;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Esd,
    Rde,
    Pwist,
    Moments,
    Compare,
    Wishart,
    Validate,
    /// Overlay CSV outputs in one SVG.
    Plot,
}

#[derive(Debug, Parser)]
#[command(name = "levyspec", version, about = "Spectra of Lévy–Khintchine random matrix ensembles")]
pub struct Args {
    pub command: Command,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (or SVG file for `plot`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// CSV file to plot; repeat up to four times.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
}

impl Command {
    fn mode(self) -> Option<Mode> {
        Some(match self {
            Command::Esd => Mode::Esd,
            Command::Rde => Mode::Rde,
            Command::Pwist => Mode::Pwist,
            Command::Moments => Mode::Moments,
            Command::Compare => Mode::Compare,
            Command::Wishart => Mode::Wishart,
            Command::Validate => Mode::Validate,
            Command::Plot => return None,
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Format(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

/// Independent seeds per pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Matrices = 1,
    Populations = 2,
    Trees = 3,
    TraceMoments = 4,
    Validation = 5,
    Singular = 6,
}

pub fn stage_seed(seed: u64, stage: Stage) -> u64 {
    split_seed(seed, &[stage as u64])
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

/// Files written by the current run, with their hashes.
struct Artifacts {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<FileEntry>,
    seeds: BTreeMap<Stage, u64>,
    lines: Vec<String>,
}

impl Artifacts {
    fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
            seeds: BTreeMap::new(),
            lines: Vec::new(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.path(name), bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    fn write_with<F: FnOnce(&mut Vec<u8>) -> Result<()>>(&mut self, name: &str, f: F) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut buf = serde_json::to_vec_pretty(value)?;
        buf.push(b'\n');
        self.write(name, &buf)
    }

    fn plot(&mut self, name: &str, inputs: &[&str], title: &str) -> Result<()> {
        let curves = inputs
            .iter()
            .map(|f| plot::read_curve_file(&self.path(f)))
            .collect::<Result<Vec<_>>>()?;
        let svg = plot::render_svg(&curves, title)?;
        self.write(name, svg.as_bytes())
    }

    fn seed(&mut self, base: u64, stage: Stage) -> u64 {
        let s = stage_seed(base, stage);
        self.seeds.insert(stage, s);
        s
    }

    fn say(&mut self, line: String) {
        self.lines.push(line);
    }

    fn cleanup(&self) {
        for f in &self.files {
            let _ = std::fs::remove_file(self.path(&f.name));
        }
        let _ = std::fs::remove_file(self.path("manifest.json"));
        if self.created_dir {
            let _ = std::fs::remove_dir(&self.dir);
        }
    }
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(args) {
        Ok(a) => run(&a),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(args: &Args) -> i32 {
    let Some(mode) = args.command.mode() else {
        return run_plot(args);
    };
    let resolved = match load(args, mode) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("levyspec: {e}");
            return EXIT_CONFIG;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("levyspec: cannot start thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut arts = match Artifacts::open(&resolved.out) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("levyspec: cannot create {}: {e}", resolved.out.display());
            return EXIT_NUMERIC;
        }
    };
    let start = Instant::now();
    let outcome = pool.install(|| execute(&resolved, &mut arts)).and_then(|()| {
        let manifest = json!({
            "tool": "levyspec",
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "mode": resolved.mode,
            "config": &resolved,
            "stage_seeds": &arts.seeds,
            "threads": pool.current_num_threads(),
            "wall_time_s": start.elapsed().as_secs_f64(),
            "files": &arts.files,
        });
        let mut buf = serde_json::to_vec_pretty(&manifest)?;
        buf.push(b'\n');
        std::fs::write(arts.path("manifest.json"), buf)?;
        Ok(())
    });
    match outcome {
        Ok(()) => {
            for l in &arts.lines {
                println!("{l}");
            }
            println!("wrote {} files to {}", arts.files.len() + 1, resolved.out.display());
            EXIT_OK
        }
        Err(e) => {
            arts.cleanup();
            eprintln!("levyspec: {e}");
            exit_code(&e)
        }
    }
}

fn load(args: &Args, mode: Mode) -> Result<Resolved> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| Error::Config(format!("--config is required; {SCHEMA_HINT}")))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)?.resolve(mode, args.seed, args.out.clone())
}

fn run_plot(args: &Args) -> i32 {
    let result = (|| {
        if args.inputs.is_empty() {
            return Err(Error::Config("plot needs at least one --input CSV".into()));
        }
        let out = args.out.clone().unwrap_or_else(|| PathBuf::from("plot.svg"));
        let inputs: Vec<&Path> = args.inputs.iter().map(PathBuf::as_path).collect();
        let curves = inputs.iter().map(|p| plot::read_curve_file(p)).collect::<Result<Vec<_>>>();
        // unreadable inputs are input errors, not numeric ones
        let curves = curves.map_err(|e| match e {
            Error::Io(io) => Error::Config(io.to_string()),
            e => e,
        })?;
        let svg = plot::render_svg(&curves, args.title.as_deref().unwrap_or("levyspec"))?;
        std::fs::write(&out, svg)?;
        Ok(out)
    })();
    match result {
        Ok(out) => {
            println!("wrote {}", out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("levyspec: {e}");
            exit_code(&e)
        }
    }
}

fn execute(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    match r.mode {
        Mode::Esd => run_esd(r, arts),
        Mode::Rde => run_rde(r, arts),
        Mode::Pwist => run_pwist(r, arts),
        Mode::Moments => run_moments(r, arts),
        Mode::Compare => run_compare(r, arts),
        Mode::Wishart => run_wishart(r, arts),
        Mode::Validate => run_validate(r, arts),
    }
}

/// `Π = 0`: the limit is the semicircle.
fn is_gaussian(chars: &LevyCharacteristics) -> bool {
    chars.levy().is_zero() && chars.sigma2() > 0.0
}

fn sample_esds(r: &Resolved, arts: &mut Artifacts) -> Result<Vec<SpectralMeasure>> {
    let law = build_entry_law(&r.chars, r.n, r.epsilon)?;
    let seed = arts.seed(r.seed, Stage::Matrices);
    (0..r.reps)
        .into_par_iter()
        .map(|k| esd(&sample_matrix(&law, split_seed(seed, &[k as u64]))))
        .collect()
}

fn grow_root_measures(r: &Resolved, arts: &mut Artifacts) -> Result<(Vec<SpectralMeasure>, crate::pwist::SkeletonTree)> {
    let mut params = TreeParams::defaults_for(&r.chars);
    params.branching = r.branching;
    params.depth = r.depth;
    if let Some(e) = r.epsilon {
        params.epsilon = e;
    }
    let seed = arts.seed(r.seed, Stage::Trees);
    let first = grow_pwist(&r.chars, params, split_seed(seed, &[0]))?;
    let mut measures = vec![root_spectral_measure_auto(&first, r.lanczos_steps)?];
    let rest: Vec<SpectralMeasure> = (1..r.trees)
        .into_par_iter()
        .map(|k| root_spectral_measure_auto(&grow_pwist(&r.chars, params, split_seed(seed, &[k as u64]))?, r.lanczos_steps))
        .collect::<Result<_>>()?;
    measures.extend(rest);
    Ok((measures, first))
}

fn rde_points(r: &Resolved, arts: &mut Artifacts) -> Result<(Vec<f64>, Vec<DensityPoint>)> {
    let xs = r.grid.xs();
    let params = RdeParams {
        pop_size: r.pop_size,
        sweeps: r.sweeps,
        epsilon: r.epsilon,
        ..RdeParams::default()
    };
    let seed = arts.seed(r.seed, Stage::Populations);
    let pts = rde_density(&r.chars, &xs, r.grid.y, params, seed)?;
    Ok((xs, pts))
}

/// Histogram carrying the trapezoid masses of a sampled density, normalized.
fn density_measure(xs: &[f64], density: &[f64]) -> Result<SpectralMeasure> {
    let masses: Vec<f64> = xs
        .windows(2)
        .zip(density.windows(2))
        .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1]).max(0.0))
        .collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numeric("density has no mass on the grid".into()));
    }
    SpectralMeasure::histogram(xs.to_vec(), masses.iter().map(|m| m / total).collect())
}

fn reference_csv(sigma: f64, xs: &[f64]) -> Vec<u8> {
    let mut s = String::from("x,density,mc_err\n");
    for &x in xs {
        s += &format!("{x},{},0\n", semicircle_density(sigma, x));
    }
    s.into_bytes()
}

fn even_moments(mu: &SpectralMeasure, p_max: usize) -> Vec<f64> {
    (1..=p_max).map(|p| mu.moment(2 * p as u32)).collect()
}

fn lsd_values(chars: &LevyCharacteristics, p_max: usize) -> Result<Vec<MomentValue>> {
    (1..=p_max).map(|p| lsd_moment(chars, p)).collect()
}

fn run_esd(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let esds = sample_esds(r, arts)?;
    let avg = SpectralMeasure::average(&esds)?;
    let hist = avg.binned(r.bins, r.grid.min, r.grid.max)?;
    arts.write_with("esd.csv", |w| hist.write_csv(w))?;
    let xs = r.grid.xs();
    let s: Vec<Complex64> = xs.iter().map(|&x| avg.stieltjes(Complex64::new(x, r.grid.y))).collect::<Result<_>>()?;
    arts.write_with("stieltjes.csv", |w| write_stieltjes_csv(&xs, r.grid.y, &s, w))?;
    let ks: Option<Vec<f64>> = is_gaussian(&r.chars).then(|| {
        let sigma = r.chars.sigma();
        esds.iter().map(|m| kolmogorov_to_cdf(m, |x| semicircle_cdf(sigma, x))).collect()
    });
    let mean_ks = ks.as_ref().map(|v| v.iter().sum::<f64>() / v.len() as f64);
    arts.write_json(
        "summary.json",
        &json!({
            "n": r.n,
            "reps": r.reps,
            "even_moments": even_moments(&avg, r.p_max),
            "lsd_moments": lsd_values(&r.chars, r.p_max)?,
            "kolmogorov_to_semicircle": ks,
            "mean_kolmogorov_to_semicircle": mean_ks,
        }),
    )?;
    if let Some(k) = mean_ks {
        arts.say(format!("kolmogorov distance to semicircle (mean over {} reps): {k:.4}", r.reps));
    }
    if r.plot {
        if is_gaussian(&r.chars) {
            arts.write("semicircle.csv", &reference_csv(r.chars.sigma(), &xs))?;
            arts.plot("esd.svg", &["esd.csv", "semicircle.csv"], "ESD")?;
        } else {
            arts.plot("esd.svg", &["esd.csv"], "ESD")?;
        }
    }
    Ok(())
}

fn run_rde(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let (xs, pts) = rde_points(r, arts)?;
    arts.write_with("rde_density.csv", |w| write_density_csv(&pts, w))?;
    let params = RdeParams {
        pop_size: r.pop_size,
        sweeps: r.sweeps,
        epsilon: r.epsilon,
        ..RdeParams::default()
    };
    let z = Complex64::new(0.0, r.grid.y);
    let pop = solve_rde(&r.chars, z, params, split_seed(arts.seeds[&Stage::Populations], &[u64::MAX]))?;
    arts.write_with("rde_population.json", |w| pop.write_snapshot(w))?;
    let dens: Vec<f64> = pts.iter().map(|p| p.density).collect();
    let moments = moments_from_smoothed_density(&xs, &dens, r.grid.y, r.p_max).ok();
    let converged = pts.iter().filter(|p| p.converged).count();
    arts.write_json(
        "summary.json",
        &json!({
            "points": pts.len(),
            "converged_points": converged,
            "resolvent_at_iy": [pop.mean().re, pop.mean().im],
            "even_moments_from_density": moments.map(|m| m[1..].to_vec()),
            "lsd_moments": lsd_values(&r.chars, r.p_max)?,
        }),
    )?;
    arts.say(format!("population dynamics converged at {converged} of {} grid points", pts.len()));
    if r.plot {
        arts.plot("rde.svg", &["rde_density.csv"], "RDE density")?;
    }
    Ok(())
}

fn run_pwist(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let (measures, first) = grow_root_measures(r, arts)?;
    arts.write_with("tree.jsonl", |w| first.write_json_lines(w))?;
    let nb = first.neighborhood(r.radius)?;
    arts.write_with("neighborhood.jsonl", |w| write_neighborhood_json_lines(&nb, Some(&first), w))?;
    let avg = SpectralMeasure::average(&measures)?;
    let hist = avg.binned(r.bins, r.grid.min, r.grid.max)?;
    arts.write_with("pwist_root.csv", |w| hist.write_csv(w))?;
    arts.write_json(
        "summary.json",
        &json!({
            "trees": r.trees,
            "first_tree_nodes": first.len(),
            "neighborhood_vertices": nb.vertices.len(),
            "even_moments": even_moments(&avg, r.p_max),
            "lsd_moments": lsd_values(&r.chars, r.p_max)?,
        }),
    )?;
    arts.say(format!("grew {} trees; first has {} nodes", r.trees, first.len()));
    if r.plot {
        arts.plot("pwist.svg", &["pwist_root.csv"], "root spectral measure")?;
    }
    Ok(())
}

fn run_moments(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let seed = arts.seed(r.seed, Stage::TraceMoments);
    let mc = trace_moments_mc(&r.chars, r.n, 2 * r.p_max as u32, r.reps.max(2), seed)?;
    let radius = r.chars.levy().support_radius();
    let tau = r.tau.or((radius.is_finite()).then_some(radius.max(1.0)));
    let exact = lsd_values(&r.chars, r.p_max)?;
    let rows: Vec<MomentRow> = (1..=r.p_max)
        .map(|p| {
            let est = &mc[2 * p - 1];
            Ok(MomentRow {
                order: 2 * p as u32,
                exact: match exact[p - 1] {
                    MomentValue::Finite(v) => v,
                    MomentValue::Infinite { .. } => f64::INFINITY,
                },
                mc_estimate: est.mean,
                mc_stderr: est.stderr,
                bound: match tau {
                    Some(t) => moment_bound(t, &r.chars, p)?,
                    None => f64::NAN,
                },
            })
        })
        .collect::<Result<_>>()?;
    arts.write_with("moments.csv", |w| write_moment_csv(&rows, w))?;
    let hankel = MomentVector::from_lsd(&r.chars, r.p_max).ok().map(|v| v.hankel_psd());
    arts.write_json("summary.json", &json!({ "rows": rows, "tau": tau, "hankel_psd": hankel }))?;
    for row in &rows {
        arts.say(format!("M_{}: exact {} mc {:.4} ± {:.4}", row.order, row.exact, row.mc_estimate, row.mc_stderr));
    }
    Ok(())
}

fn run_compare(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let esds = sample_esds(r, arts)?;
    let esd_avg = SpectralMeasure::average(&esds)?;
    arts.write_with("esd.csv", |w| esd_avg.binned(r.bins, r.grid.min, r.grid.max)?.write_csv(w))?;
    let (roots, _) = grow_root_measures(r, arts)?;
    let root_avg = SpectralMeasure::average(&roots)?;
    arts.write_with("pwist_root.csv", |w| root_avg.binned(r.bins, r.grid.min, r.grid.max)?.write_csv(w))?;
    let (xs, pts) = rde_points(r, arts)?;
    arts.write_with("rde_density.csv", |w| write_density_csv(&pts, w))?;
    let dens: Vec<f64> = pts.iter().map(|p| p.density).collect();
    let rde_mu = density_measure(&xs, &dens)?;

    let named = [("esd", &esd_avg), ("pwist", &root_avg), ("rde", &rde_mu)];
    let mut table = String::from("left,right,kolmogorov\n");
    let mut pairs = Vec::new();
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            let d = kolmogorov_distance(named[i].1, named[j].1);
            table += &format!("{},{},{d}\n", named[i].0, named[j].0);
            pairs.push(json!({ "left": named[i].0, "right": named[j].0, "kolmogorov": d }));
        }
    }
    arts.write("compare_kolmogorov.csv", table.as_bytes())?;

    let exact = lsd_values(&r.chars, r.p_max)?;
    let rde_m = moments_from_smoothed_density(&xs, &dens, r.grid.y, r.p_max).ok();
    let mut mt = String::from("order,exact,esd,pwist,rde\n");
    for p in 1..=r.p_max {
        let k = 2 * p as u32;
        let ex = match exact[p - 1] {
            MomentValue::Finite(v) => v,
            MomentValue::Infinite { .. } => f64::INFINITY,
        };
        let rde = rde_m.as_ref().map_or(f64::NAN, |m| m[p]);
        mt += &format!("{k},{ex},{},{},{rde}\n", esd_avg.moment(k), root_avg.moment(k));
    }
    arts.write("compare_moments.csv", mt.as_bytes())?;
    arts.write_json("summary.json", &json!({ "kolmogorov": pairs, "lsd_moments": exact }))?;
    for p in &pairs {
        arts.say(format!("kolmogorov {} vs {}: {:.4}", p["left"].as_str().unwrap_or(""), p["right"].as_str().unwrap_or(""), p["kolmogorov"].as_f64().unwrap_or(f64::NAN)));
    }
    if r.plot {
        let mut inputs = vec!["esd.csv", "pwist_root.csv", "rde_density.csv"];
        // semicircle with the limit's variance, for scale
        if let MomentValue::Finite(v) = lsd_moment(&r.chars, 1)? {
            if v > 0.0 {
                arts.write("reference_semicircle.csv", &reference_csv(v.sqrt(), &xs))?;
                inputs.push("reference_semicircle.csv");
            }
        }
        arts.plot("compare.svg", &inputs, "ESD vs tree vs RDE")?;
    }
    Ok(())
}

fn run_wishart(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let law = build_entry_law(&r.chars, r.n, r.epsilon)?;
    let seed = arts.seed(r.seed, Stage::Singular);
    let per: Vec<(SpectralMeasure, f64)> = (0..r.reps)
        .into_par_iter()
        .map(|k| {
            let a = sample_nonhermitian(&law, split_seed(seed, &[k as u64]));
            Ok((singular_value_esd(&a)?.squared()?, hermitization_gap(&a)?))
        })
        .collect::<Result<_>>()?;
    let squares: Vec<SpectralMeasure> = per.iter().map(|p| p.0.clone()).collect();
    let avg = SpectralMeasure::average(&squares)?;
    let hi = avg.support_bounds().1.max(1e-12) * (1.0 + 1e-9);
    arts.write_with("wishart.csv", |w| avg.binned(r.bins, 0.0, hi)?.write_csv(w))?;
    let gap = per.iter().map(|p| p.1).fold(0.0, f64::max);
    let ks: Option<Vec<f64>> = is_gaussian(&r.chars).then(|| {
        let sigma = r.chars.sigma();
        squares.iter().map(|m| kolmogorov_to_cdf(m, |t| squared_semicircle_cdf(sigma, t))).collect()
    });
    arts.write_json("summary.json", &json!({ "n": r.n, "reps": r.reps, "kolmogorov_to_squared_semicircle": ks, "hermitization_gap": gap }))?;
    if let Some(k) = &ks {
        arts.say(format!("kolmogorov distance to squared semicircle (mean): {:.4}", k.iter().sum::<f64>() / k.len() as f64));
    }
    arts.say(format!("largest hermitization vs SVD gap: {gap:.3e}"));
    if r.plot {
        arts.plot("wishart.svg", &["wishart.csv"], "squared singular values")?;
    }
    Ok(())
}

fn run_validate(r: &Resolved, arts: &mut Artifacts) -> Result<()> {
    let seed = arts.seed(r.seed, Stage::Validation);
    let cfg = DgConfig {
        reps: r.dg_reps,
        ..DgConfig::default()
    };
    let report = dg_check(|n| build_entry_law(&r.chars, n, r.epsilon), &r.n_schedule, &r.chars, r.h, seed, &cfg)?;
    arts.write_json("dg_report.json", &report)?;
    let pure_jump = r.chars.sigma2() == 0.0 && r.chars.levy().tail_mass(0.0).is_finite();
    let rows = if pure_jump {
        Some(row_count_check(&r.chars, *r.n_schedule.last().expect("nonempty"), split_seed(seed, &[1]))?)
    } else {
        None
    };
    arts.write_json(
        "summary.json",
        &json!({
            "all_pass": report.all_pass(),
            "trend_ok": report.trend_ok.iter().all(|t| t.1),
            "row_counts": rows,
        }),
    )?;
    for c in &report.criteria {
        arts.say(format!("n={} {:?}: estimate {:.5} target {:.5} ± {:.5} -> {:?}", c.n, c.kind, c.estimate, c.target, c.stderr, c.status));
    }
    Ok(())
}
