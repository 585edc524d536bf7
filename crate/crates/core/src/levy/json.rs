use serde::{Deserialize, Serialize};

use super::{Atom, LevyCharacteristics, LevyMeasure, PowerPiece};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub x: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerPieceJson {
    pub alpha: f64,
    pub scale: f64,
    pub xmin: f64,
    /// `null` means an untruncated tail.
    pub xmax: Option<f64>,
}

/// Wire form of [`LevyCharacteristics`]; atoms are listed for `x > 0` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacteristicsJson {
    pub sigma2: f64,
    #[serde(default)]
    pub atoms: Vec<AtomJson>,
    #[serde(default)]
    pub power_pieces: Vec<PowerPieceJson>,
}

impl From<&LevyCharacteristics> for CharacteristicsJson {
    fn from(c: &LevyCharacteristics) -> Self {
        Self {
            sigma2: c.sigma2(),
            atoms: c.levy().atoms().iter().map(|a| AtomJson { x: a.x, mass: a.mass }).collect(),
            power_pieces: c
                .levy()
                .pieces()
                .iter()
                .map(|p| PowerPieceJson {
                    alpha: p.alpha,
                    scale: p.scale,
                    xmin: p.xmin,
                    xmax: p.xmax.is_finite().then_some(p.xmax),
                })
                .collect(),
        }
    }
}

impl TryFrom<CharacteristicsJson> for LevyCharacteristics {
    type Error = Error;

    fn try_from(j: CharacteristicsJson) -> Result<Self> {
        let atoms = j.atoms.iter().map(|a| Atom { x: a.x, mass: a.mass }).collect();
        let pieces = j
            .power_pieces
            .iter()
            .map(|p| PowerPiece::new(p.alpha, p.scale, p.xmin, p.xmax.unwrap_or(f64::INFINITY)))
            .collect();
        LevyCharacteristics::new(j.sigma2, LevyMeasure::new(atoms, pieces)?)
    }
}

impl LevyCharacteristics {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CharacteristicsJson::from(self)).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CharacteristicsJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

impl Serialize for LevyCharacteristics {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharacteristicsJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevyCharacteristics {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CharacteristicsJson::deserialize(d)?;
        j.try_into().map_err(serde::de::Error::custom)
    }
}
