//! Run configuration files.
//!
//! ```toml
//! preset = "revised-high"   # optional: original-low | original-high | revised-low | revised-high
//! init = "random"           # random | swinger | rotary | walker-follower | file:<path>
//! resolution = 500          # snapshot width and height in pixels
//!
//! [world]
//! side = 5000.0
//! particles = 10000
//! random_active = 100
//!
//! [eco]                     # any EcoConfig field; overrides the preset
//! competition = "majority_relative"
//! add_rate = 0.5
//! [eco.mutation]
//! transmission = 0.1
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use swarmchem::eco::{Condition, EcoConfig, InitialKind, WorldSpec};
use swarmchem::metrics::DEFAULT_RESOLUTION;
use swarmchem::{designs, parse_recipe, Recipe};

use crate::LabError;

/// Where the initial active particles come from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InitSpec {
    Random,
    /// One of the bundled example designs.
    Builtin(String),
    /// A recipe file in the text format.
    File(PathBuf),
}

impl InitSpec {
    /// Short label safe for directory names.
    pub fn label(&self) -> String {
        match self {
            InitSpec::Random => "random".into(),
            InitSpec::Builtin(name) => name.clone(),
            InitSpec::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into()),
        }
    }

    /// Loads the recipe of a designed init; `None` for random.
    pub fn recipe(&self) -> Result<Option<Recipe>, LabError> {
        match self {
            InitSpec::Random => Ok(None),
            InitSpec::Builtin(name) => designs::by_name(name)
                .map(Some)
                .ok_or_else(|| LabError::Config(format!("unknown design `{name}`"))),
            InitSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
                parse_recipe(&text)
                    .map(Some)
                    .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn initial_kind(&self) -> Result<InitialKind, LabError> {
        Ok(match self.recipe()? {
            None => InitialKind::Random,
            Some(r) => InitialKind::Designed(Some(Arc::new(r))),
        })
    }
}

impl FromStr for InitSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "random" {
            Ok(InitSpec::Random)
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(InitSpec::File(PathBuf::from(path)))
        } else if designs::NAMES.contains(&s) {
            Ok(InitSpec::Builtin(s.to_string()))
        } else {
            Err(LabError::Config(format!(
                "unknown init `{s}` (expected random, {}, or file:<path>)",
                designs::NAMES.join(", ")
            )))
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Random => f.write_str("random"),
            InitSpec::Builtin(name) => f.write_str(name),
            InitSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl Serialize for InitSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Option<Condition>,
    pub init: InitSpec,
    pub resolution: u32,
    pub world: WorldSpec,
    pub eco: EcoConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_preset(None)
    }
}

impl RunConfig {
    pub fn from_preset(preset: Option<Condition>) -> Self {
        Self {
            preset,
            init: InitSpec::Random,
            resolution: DEFAULT_RESOLUTION,
            world: WorldSpec::default(),
            eco: preset.map(Condition::config).unwrap_or_default(),
        }
    }

    /// Label used in manifests and summaries: the preset name or `custom`.
    pub fn condition_name(&self) -> String {
        self.preset.map(|c| c.name().to_string()).unwrap_or_else(|| "custom".into())
    }

    /// Parses a config file. `[eco]` and `[world]` are overlays: keys not
    /// given keep the preset's (or the default) value.
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.to_string()))?;
        let preset = match table.remove("preset") {
            None => None,
            Some(toml::Value::String(s)) => Some(s.parse::<Condition>().map_err(|e| LabError::Config(e.to_string()))?),
            Some(v) => return Err(LabError::Config(format!("preset must be a string, got {v}"))),
        };
        let mut cfg = Self::from_preset(preset);
        if let Some(v) = table.remove("init") {
            let s = v
                .as_str()
                .ok_or_else(|| LabError::Config("init must be a string".into()))?;
            cfg.init = s.parse()?;
        }
        if let Some(v) = table.remove("resolution") {
            cfg.resolution = v
                .as_integer()
                .filter(|&r| r > 0 && r <= 8192)
                .ok_or_else(|| LabError::Config(format!("resolution must be in 1..=8192, got {v}")))?
                as u32;
        }
        if let Some(v) = table.remove("world") {
            cfg.world = overlay(&cfg.world, v, "world")?;
        }
        if let Some(v) = table.remove("eco") {
            cfg.eco = overlay(&cfg.eco, v, "eco")?;
        }
        if let Some(key) = table.keys().next() {
            return Err(LabError::Config(format!("unknown key `{key}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), LabError> {
        self.eco.validate().map_err(|e| LabError::Config(e.to_string()))?;
        let w = &self.world;
        if !(w.side > 0.0 && w.side.is_finite()) {
            return Err(LabError::Config(format!("world.side must be positive, got {}", w.side)));
        }
        if w.particles == 0 {
            return Err(LabError::Config("world.particles must be positive".into()));
        }
        Ok(())
    }
}

/// Merges `patch` into the serialized form of `base`, recursively, and
/// deserializes the result. Unknown keys are rejected.
fn overlay<T>(base: &T, patch: toml::Value, section: &str) -> Result<T, LabError>
where
    T: Serialize + for<'de> Deserialize<'de>,
{
    let mut merged = toml::Value::try_from(base).map_err(|e| LabError::Config(e.to_string()))?;
    merge(&mut merged, patch, section)?;
    merged
        .try_into()
        .map_err(|e: toml::de::Error| LabError::Config(format!("[{section}]: {e}")))
}

fn merge(base: &mut toml::Value, patch: toml::Value, path: &str) -> Result<(), LabError> {
    match (base, patch) {
        (toml::Value::Table(b), toml::Value::Table(p)) => {
            for (k, v) in p {
                let sub = format!("{path}.{k}");
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v, &sub)?,
                    // optional fields serialize to nothing when unset
                    None if is_optional(&sub) => {
                        b.insert(k, v);
                    }
                    None => return Err(LabError::Config(format!("unknown key `{sub}`"))),
                }
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

fn is_optional(path: &str) -> bool {
    path == "eco.perturbation.interval"
}
