//! Corruption identities: which corruption, at what level, with which seed.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("degree not valid for weather corruption '{0}'")]
    DegreeForWeather(CorruptionKind),
    #[error("intensity not valid for gaussian corruption '{0}'")]
    IntensityForGaussian(CorruptionKind),
    #[error("degree {0} outside 0..=5")]
    DegreeRange(i64),
    #[error("unknown corruption kind '{0}'; allowed kinds: gaussian_noise, gaussian_blur, fog, sunflare, snow")]
    UnknownKind(String),
    #[error("unknown level '{0}'; expected low, medium, high or a degree 0-5")]
    UnknownLevel(String),
    #[error("malformed cell key '{0}'; expected 'clean' or '<kind>/<level>'")]
    MalformedCell(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    GaussianNoise,
    GaussianBlur,
    Fog,
    Sunflare,
    Snow,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 5] = [
        CorruptionKind::GaussianNoise,
        CorruptionKind::GaussianBlur,
        CorruptionKind::Fog,
        CorruptionKind::Sunflare,
        CorruptionKind::Snow,
    ];

    /// The weather corruption set aggregated by CmAP/MCmAP.
    pub const WEATHER: [CorruptionKind; 3] = [
        CorruptionKind::Fog,
        CorruptionKind::Sunflare,
        CorruptionKind::Snow,
    ];

    pub fn is_weather(self) -> bool {
        matches!(
            self,
            CorruptionKind::Fog | CorruptionKind::Sunflare | CorruptionKind::Snow
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CorruptionKind::GaussianNoise => "gaussian_noise",
            CorruptionKind::GaussianBlur => "gaussian_blur",
            CorruptionKind::Fog => "fog",
            CorruptionKind::Sunflare => "sunflare",
            CorruptionKind::Snow => "snow",
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CorruptionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SpecError::UnknownKind(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    Low,
    Medium,
    High,
}

impl Intensity {
    pub const ALL: [Intensity; 3] = [Intensity::Low, Intensity::Medium, Intensity::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Intensity::Low => "low",
            Intensity::Medium => "medium",
            Intensity::High => "high",
        }
    }
}

impl fmt::Display for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gaussian perturbation degree, 0 (identity) through 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Degree(u8);

impl Degree {
    pub const MAX: u8 = 5;

    pub fn new(d: u8) -> Result<Self, SpecError> {
        if d <= Self::MAX {
            Ok(Degree(d))
        } else {
            Err(SpecError::DegreeRange(d as i64))
        }
    }

    pub fn all() -> impl Iterator<Item = Degree> {
        (0..=Self::MAX).map(Degree)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Degree {
    type Error = SpecError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        u8::try_from(v)
            .map_err(|_| SpecError::DegreeRange(v))
            .and_then(Degree::new)
    }
}

impl From<Degree> for u8 {
    fn from(d: Degree) -> Self {
        d.0
    }
}

/// Severity of one corruption: an intensity for weather, a degree for gaussian kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Intensity(Intensity),
    Degree(Degree),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Intensity(i) => i.fmt(f),
            Level::Degree(d) => write!(f, "{}", d.0),
        }
    }
}

impl FromStr for Level {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(i) = Intensity::ALL.into_iter().find(|i| i.as_str() == s) {
            return Ok(Level::Intensity(i));
        }
        match s.parse::<u8>() {
            Ok(d) => Degree::new(d).map(Level::Degree),
            Err(_) => Err(SpecError::UnknownLevel(s.into())),
        }
    }
}

fn check_level(kind: CorruptionKind, level: Level) -> Result<(), SpecError> {
    match (kind.is_weather(), level) {
        (true, Level::Degree(_)) => Err(SpecError::DegreeForWeather(kind)),
        (false, Level::Intensity(_)) => Err(SpecError::IntensityForGaussian(kind)),
        _ => Ok(()),
    }
}

/// Fully determines a corrupted output: kind, level and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct CorruptionSpec {
    kind: CorruptionKind,
    level: Level,
    seed: u64,
}

#[derive(Deserialize)]
struct RawSpec {
    kind: CorruptionKind,
    level: Level,
    seed: u64,
}

impl TryFrom<RawSpec> for CorruptionSpec {
    type Error = SpecError;

    fn try_from(r: RawSpec) -> Result<Self, Self::Error> {
        CorruptionSpec::new(r.kind, r.level, r.seed)
    }
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, level: Level, seed: u64) -> Result<Self, SpecError> {
        check_level(kind, level)?;
        Ok(Self { kind, level, seed })
    }

    pub fn kind(&self) -> CorruptionKind {
        self.kind
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn cell(&self) -> CellKey {
        CellKey::Corrupted {
            kind: self.kind,
            level: self.level,
        }
    }
}

/// One evaluation cell: clean data, or a (kind, level) corruption.
///
/// Rendered as `clean` or `<kind>/<level>`, e.g. `fog/high`, `gaussian_blur/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CellKey {
    Clean,
    Corrupted { kind: CorruptionKind, level: Level },
}

impl CellKey {
    pub fn new(kind: CorruptionKind, level: Level) -> Result<Self, SpecError> {
        check_level(kind, level)?;
        Ok(CellKey::Corrupted { kind, level })
    }

    pub fn weather(kind: CorruptionKind, intensity: Intensity) -> Result<Self, SpecError> {
        Self::new(kind, Level::Intensity(intensity))
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellKey::Clean => f.write_str("clean"),
            CellKey::Corrupted { kind, level } => write!(f, "{kind}/{level}"),
        }
    }
}

impl FromStr for CellKey {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "clean" {
            return Ok(CellKey::Clean);
        }
        let (kind, level) = s
            .split_once('/')
            .ok_or_else(|| SpecError::MalformedCell(s.into()))?;
        CellKey::new(kind.parse()?, level.parse()?)
    }
}

impl TryFrom<String> for CellKey {
    type Error = SpecError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CellKey> for String {
    fn from(c: CellKey) -> Self {
        format!("{c}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weather_requires_intensity() {
        let err =
            CorruptionSpec::new(CorruptionKind::Snow, Level::Degree(Degree(3)), 0).unwrap_err();
        assert_eq!(err, SpecError::DegreeForWeather(CorruptionKind::Snow));
        assert!(alloc::format!("{err}").contains("degree not valid for weather corruption"));
        assert!(CorruptionSpec::new(
            CorruptionKind::GaussianBlur,
            Level::Intensity(Intensity::Low),
            0
        )
        .is_err());
    }

    #[test]
    fn degree_range() {
        assert!(Degree::new(5).is_ok());
        assert_eq!(Degree::new(6), Err(SpecError::DegreeRange(6)));
        assert_eq!(Degree::all().count(), 6);
    }

    #[test]
    fn cell_key_text_form() {
        for s in ["clean", "fog/high", "snow/low", "gaussian_blur/0", "gaussian_noise/5"] {
            let k: CellKey = s.parse().unwrap();
            assert_eq!(alloc::format!("{k}"), s);
        }
        assert!(matches!(
            "rain/high".parse::<CellKey>(),
            Err(SpecError::UnknownKind(_))
        ));
        assert!("fog/3".parse::<CellKey>().is_err());
        assert!("fog".parse::<CellKey>().is_err());
    }

    #[test]
    fn unknown_kind_lists_allowed() {
        let msg = alloc::format!("{}", "rain".parse::<CorruptionKind>().unwrap_err());
        assert!(msg.contains("fog") && msg.contains("gaussian_noise"));
    }
}
