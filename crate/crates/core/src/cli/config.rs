//! Experiment config: versioned JSON, validated into a fully defaulted [`Resolved`].

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{CharacteristicsJson, LevyCharacteristics};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Esd,
    Rde,
    Pwist,
    Moments,
    Compare,
    Wishart,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Esd => "esd",
            Mode::Rde => "rde",
            Mode::Pwist => "pwist",
            Mode::Moments => "moments",
            Mode::Compare => "compare",
            Mode::Wishart => "wishart",
            Mode::Validate => "validate",
        }
    }
}

/// Evaluation grid `x = min..=max` (`points` values) at height `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub y: f64,
}

impl GridSpec {
    pub fn xs(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.min + step * k as f64).collect()
    }
}

/// Config file as written by the user. Exactly one of `preset` and
/// `characteristics` must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: Option<u32>,
    pub mode: Option<Mode>,
    /// `wigner`, `wigner(s2)`, `sparse(c)` or `stable(alpha)`.
    pub preset: Option<String>,
    pub characteristics: Option<CharacteristicsJson>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub pop_size: Option<usize>,
    pub sweeps: Option<usize>,
    #[serde(rename = "B")]
    pub branching: Option<usize>,
    #[serde(rename = "H")]
    pub depth: Option<usize>,
    pub trees: Option<usize>,
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub h_exponent: Option<f64>,
    /// Fixed threshold for the validate mode criteria.
    pub h: Option<f64>,
    pub grid: Option<GridSpec>,
    pub bins: Option<usize>,
    pub p_max: Option<usize>,
    pub n_schedule: Option<Vec<usize>>,
    pub dg_reps: Option<usize>,
    pub radius: Option<f64>,
    pub lanczos_steps: Option<usize>,
    pub plot: Option<bool>,
    pub out: Option<PathBuf>,
}

pub const SCHEMA_HINT: &str = r#"expected a JSON object such as
{
  "schema_version": 1,
  "preset": "sparse(5)",            // or "wigner", "wigner(2)", "stable(1.5)", or
                                    // "characteristics": {"sigma2": 1, "atoms": [{"x": 1, "mass": 1}], "power_pieces": []}
  "seed": 7,                        // mandatory here or via --seed
  "n": 1000, "reps": 10,            // matrix size and replicates (esd, moments, wishart, compare)
  "pop_size": 5000, "sweeps": 60,   // population dynamics (rde, compare)
  "B": 50, "H": 6, "trees": 20,     // tree growth (pwist, compare)
  "epsilon": null, "tau": null, "h_exponent": 0.25, "h": 0.5,
  "grid": {"min": -4, "max": 4, "points": 161, "y": 0.05},
  "bins": 100, "p_max": 4, "n_schedule": [1000, 10000], "dg_reps": 200000,
  "radius": 2.0, "lanczos_steps": 40, "plot": true, "out": "out"
}
(comments are illustrative; JSON has none)"#;

/// Every knob with its default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub mode: Mode,
    pub characteristics: CharacteristicsJson,
    #[serde(skip)]
    pub chars: LevyCharacteristics,
    pub seed: u64,
    pub n: usize,
    pub reps: usize,
    pub pop_size: usize,
    pub sweeps: usize,
    #[serde(rename = "B")]
    pub branching: usize,
    #[serde(rename = "H")]
    pub depth: usize,
    pub trees: usize,
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub h_exponent: f64,
    pub h: f64,
    pub grid: GridSpec,
    pub bins: usize,
    pub p_max: usize,
    pub n_schedule: Vec<usize>,
    pub dg_reps: usize,
    pub radius: f64,
    pub lanczos_steps: usize,
    pub plot: bool,
    pub out: PathBuf,
}

pub fn parse_preset(s: &str) -> Result<LevyCharacteristics> {
    let s = s.trim();
    let (name, arg) = match s.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Config(format!("preset `{s}` is missing a closing parenthesis")))?;
            let v: f64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("preset `{s}` has a non-numeric argument")))?;
            (name.trim(), Some(v))
        }
        None => (s, None),
    };
    let need = |what: &str| arg.ok_or_else(|| Error::Config(format!("preset `{name}` needs an argument: {name}({what})")));
    let chars = match name {
        "wigner" => LevyCharacteristics::wigner(arg.unwrap_or(1.0)),
        "sparse" => LevyCharacteristics::sparse(need("c")?),
        "stable" => LevyCharacteristics::stable(need("alpha")?),
        other => return Err(Error::Config(format!("unknown preset `{other}`; known: wigner, sparse(c), stable(alpha)"))),
    };
    chars.map_err(|e| Error::Config(e.to_string()))
}

fn check_range<T: PartialOrd + std::fmt::Display + Copy>(name: &str, v: T, lo: T, hi: T) -> Result<T> {
    if v < lo || v > hi {
        return Err(Error::Config(format!("`{name}` = {v} is outside [{lo}, {hi}]")));
    }
    Ok(v)
}

fn check_positive(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Config(format!("`{name}` must be finite and > 0, got {v}")));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Config(format!("empty config; {SCHEMA_HINT}")));
        }
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}; {SCHEMA_HINT}")))
    }

    /// Applies defaults and range checks. `mode` and `seed` from the command
    /// line take precedence over the file.
    pub fn resolve(&self, mode: Mode, seed: Option<u64>, out: Option<PathBuf>) -> Result<Resolved> {
        if *self == ExperimentConfig::default() {
            return Err(Error::Config(format!("empty config; {SCHEMA_HINT}")));
        }
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::Config(format!("schema_version {v} is not supported (expected {SCHEMA_VERSION})")));
            }
        }
        if let Some(m) = self.mode {
            if m != mode {
                return Err(Error::Config(format!("config is for mode `{}` but `{}` was requested", m.name(), mode.name())));
            }
        }
        let chars = match (&self.preset, &self.characteristics) {
            (Some(p), None) => parse_preset(p)?,
            (None, Some(c)) => LevyCharacteristics::try_from(c.clone()).map_err(|e| Error::Config(e.to_string()))?,
            (Some(_), Some(_)) => return Err(Error::Config("give either `preset` or `characteristics`, not both".into())),
            (None, None) => return Err(Error::Config(format!("missing `preset` or `characteristics`; {SCHEMA_HINT}"))),
        };
        let seed = seed
            .or(self.seed)
            .ok_or_else(|| Error::Config("`seed` is mandatory (config field or --seed)".into()))?;

        let grid = self.grid.unwrap_or(GridSpec {
            min: -4.0,
            max: 4.0,
            points: 161,
            y: 0.05,
        });
        if !(grid.min.is_finite() && grid.max.is_finite() && grid.min < grid.max) {
            return Err(Error::Config("grid needs finite min < max".into()));
        }
        check_range("grid.points", grid.points, 3, 100_001)?;
        check_positive("grid.y", grid.y)?;

        let epsilon = match self.epsilon {
            Some(e) if !(e.is_finite() && e >= 0.0) => return Err(Error::Config(format!("`epsilon` must be finite and >= 0, got {e}"))),
            e => e,
        };
        let tau = self.tau.map(|t| check_positive("tau", t)).transpose()?;
        let h_exponent = self.h_exponent.unwrap_or(0.25);
        if !(h_exponent > 0.0 && h_exponent < 0.5) {
            return Err(Error::Config(format!("`h_exponent` must lie in (0, 0.5), got {h_exponent}")));
        }
        let n_schedule = self.n_schedule.clone().unwrap_or_else(|| vec![1000, 10_000]);
        if n_schedule.is_empty() || n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("`n_schedule` must be nonempty and strictly increasing".into()));
        }
        for &n in &n_schedule {
            check_range("n_schedule entry", n, 2, 100_000_000)?;
        }

        Ok(Resolved {
            mode,
            characteristics: CharacteristicsJson::from(&chars),
            chars,
            seed,
            n: check_range("n", self.n.unwrap_or(1000), 2, 20_000)?,
            reps: check_range("reps", self.reps.unwrap_or(10), 1, 100_000)?,
            pop_size: check_range("pop_size", self.pop_size.unwrap_or(5000), 10, 10_000_000)?,
            sweeps: check_range("sweeps", self.sweeps.unwrap_or(60), 1, 100_000)?,
            branching: check_range("B", self.branching.unwrap_or(50), 1, 10_000)?,
            depth: check_range("H", self.depth.unwrap_or(6), 1, 100)?,
            trees: check_range("trees", self.trees.unwrap_or(20), 1, 100_000)?,
            epsilon,
            tau,
            h_exponent,
            h: check_positive("h", self.h.unwrap_or(0.5))?,
            grid,
            bins: check_range("bins", self.bins.unwrap_or(100), 1, 1_000_000)?,
            p_max: check_range("p_max", self.p_max.unwrap_or(4), 1, crate::moments::MAX_TREE_ORDER)?,
            n_schedule,
            dg_reps: check_range("dg_reps", self.dg_reps.unwrap_or(200_000), 2, 100_000_000)?,
            radius: check_positive("radius", self.radius.unwrap_or(2.0))?,
            lanczos_steps: check_range("lanczos_steps", self.lanczos_steps.unwrap_or(40), 1, 10_000)?,
            plot: self.plot.unwrap_or(true),
            out: out.or_else(|| self.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(parse_preset("wigner").unwrap(), LevyCharacteristics::wigner(1.0).unwrap());
        assert_eq!(parse_preset("sparse(5)").unwrap(), LevyCharacteristics::sparse(5.0).unwrap());
        assert_eq!(parse_preset(" stable( 1.5 ) ").unwrap(), LevyCharacteristics::stable(1.5).unwrap());
        for bad in ["sparse", "stable(2.5)", "sparse(x)", "sparse(3", "cauchy(1)"] {
            assert!(matches!(parse_preset(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn empty_config_gets_schema_hint() {
        for text in ["", "  \n", "{}"] {
            let err = ExperimentConfig::from_json(text)
                .and_then(|c| c.resolve(Mode::Esd, Some(1), None))
                .unwrap_err();
            assert!(err.to_string().contains("schema_version"), "{err}");
        }
    }

    #[test]
    fn seed_is_mandatory() {
        let c = ExperimentConfig::from_json(r#"{"preset": "wigner"}"#).unwrap();
        assert!(c.resolve(Mode::Esd, None, None).is_err());
        assert_eq!(c.resolve(Mode::Esd, Some(4), None).unwrap().seed, 4);
    }

    #[test]
    fn rejects_bad_fields() {
        for text in [
            r#"{"preset": "wigner", "seed": 1, "n": 1}"#,
            r#"{"preset": "wigner", "seed": 1, "h_exponent": 0.5}"#,
            r#"{"preset": "wigner", "seed": 1, "schema_version": 2}"#,
            r#"{"preset": "wigner", "seed": 1, "mode": "rde"}"#,
            r#"{"preset": "wigner", "seed": 1, "grid": {"min": 1, "max": 0, "points": 5, "y": 0.1}}"#,
            r#"{"preset": "wigner", "characteristics": {"sigma2": 1}, "seed": 1}"#,
        ] {
            let r = ExperimentConfig::from_json(text).and_then(|c| c.resolve(Mode::Esd, None, None));
            assert!(matches!(r, Err(Error::Config(_))), "{text}");
        }
        assert!(ExperimentConfig::from_json(r#"{"preset": "wigner", "colour": 1}"#).is_err());
    }

    #[test]
    fn explicit_characteristics() {
        let c = ExperimentConfig::from_json(r#"{"characteristics": {"sigma2": 1, "atoms": [{"x": 1, "mass": 1}]}, "seed": 3, "B": 7}"#).unwrap();
        let r = c.resolve(Mode::Pwist, None, None).unwrap();
        assert_eq!(r.branching, 7);
        assert_eq!(r.chars.levy().tail_mass(0.0), 2.0);
    }
}
