// Copyright 2026 The madelung authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

//! Run configuration documents.
//!
//! ```json
//! {"preset": "rocksalt", "method": "wolf", "s": 1, "grid": "10:40:31", "out": "wolf.csv"}
//! ```
//!
//! A cell is given either by `preset` or by an inline `cell` definition. `grid` is a
//! list of extents, an object `{"min", "max", "count"}` or the string `min:max:count`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crystal::CellDefinition;
use crate::trunc::SeriesMethod;
use crate::{wolf, Error, Preset, Result, UnitCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ewald,
    Sphere,
    Cube,
    Wolf,
    WolfDamped,
    Zeta,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ewald => "ewald",
            Method::Sphere => "sphere",
            Method::Cube => "cube",
            Method::Wolf => "wolf",
            Method::WolfDamped => "wolf_damped",
            Method::Zeta => "zeta",
        }
    }

    /// The truncated estimator behind a sweep method.
    pub fn series_method(self) -> Option<SeriesMethod> {
        match self {
            Method::Sphere => Some(SeriesMethod::Sphere),
            Method::Cube => Some(SeriesMethod::Cube),
            Method::Wolf => Some(SeriesMethod::Wolf),
            Method::WolfDamped => Some(SeriesMethod::WolfDamped),
            Method::Ewald | Method::Zeta => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Ewald, Method::Sphere, Method::Cube, Method::Wolf, Method::WolfDamped, Method::Zeta]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// Extents of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub enum GridSpec {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GridRepr {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
    Text(String),
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        match repr {
            GridRepr::List(v) => Ok(GridSpec::List(v)),
            GridRepr::Range { min, max, count } => Ok(GridSpec::Range { min, max, count }),
            GridRepr::Text(s) => s.parse(),
        }
    }
}

impl From<GridSpec> for GridRepr {
    fn from(grid: GridSpec) -> Self {
        match grid {
            GridSpec::List(v) => GridRepr::List(v),
            GridSpec::Range { min, max, count } => GridRepr::Range { min, max, count },
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `min:max:count`, a single extent, or a comma-separated list.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse grid '{text}'"));
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [min, max, count] => Ok(GridSpec::Range {
                min: min.parse().map_err(|_| bad())?,
                max: max.parse().map_err(|_| bad())?,
                count: count.parse().map_err(|_| bad())?,
            }),
            [list] => list
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(GridSpec::List),
            _ => Err(bad()),
        }
    }
}

impl GridSpec {
    /// Concrete extents for `method` on `cell`. Ranges become shell-avoiding radii for
    /// sphere-based methods and evenly spaced integers for cubes.
    pub fn resolve(&self, cell: &UnitCell, method: Method) -> Result<Vec<f64>> {
        match *self {
            GridSpec::List(ref v) => Ok(v.clone()),
            GridSpec::Range { min, max, count } => {
                if method == Method::Cube {
                    if !(min >= 1.0 && max >= min) || count == 0 {
                        return Err(Error::InvalidArgument(format!("invalid cube range {min}:{max}:{count}")));
                    }
                    let mut out: Vec<f64> = (0..count)
                        .map(|k| {
                            let t = if count == 1 { min } else { min + (max - min) * k as f64 / (count - 1) as f64 };
                            t.round()
                        })
                        .collect();
                    out.dedup();
                    Ok(out)
                } else {
                    wolf::sampling_radii(cell, min, max, count)
                }
            }
        }
    }

    /// The one extent of a single-point grid.
    pub fn single(&self) -> Option<f64> {
        match self {
            GridSpec::List(v) if v.len() == 1 => Some(v[0]),
            GridSpec::Range { min, max, count: 1 } if min == max => Some(*min),
            _ => None,
        }
    }
}

/// Where the cell of a run comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CellSource {
    Preset(Preset),
    Inline(CellDefinition),
}

/// Document form of [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellDefinition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Fractional offset p for single zeta evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 3]>,
}

pub const DEFAULT_TOL: f64 = 1e-12;

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: CellSource,
    pub cell: UnitCell,
    pub method: Method,
    pub s: f64,
    pub alpha: Option<f64>,
    pub grid: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub p: Option<[f64; 3]>,
}

impl RunConfig {
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let source = match (&file.preset, &file.cell) {
            (Some(name), None) => CellSource::Preset(name.parse()?),
            (None, Some(def)) => CellSource::Inline(def.clone()),
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument("give either a preset or a cell, not both".into()))
            }
            (None, None) => return Err(Error::InvalidArgument("no cell: set a preset or a cell".into())),
        };
        let cell = match &source {
            CellSource::Preset(p) => p.cell(),
            CellSource::Inline(def) => def.build()?,
        };
        let config = RunConfig {
            source,
            cell,
            method: file.method.unwrap_or(Method::Ewald),
            s: file.s.unwrap_or(1.0),
            alpha: file.alpha,
            grid: file.grid.clone(),
            out: file.out.clone(),
            tol: file.tol.unwrap_or(DEFAULT_TOL),
            p: file.p,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_file(&self) -> ConfigFile {
        let (preset, cell) = match &self.source {
            CellSource::Preset(p) => (Some(p.name().to_string()), None),
            CellSource::Inline(def) => (None, Some(def.clone())),
        };
        ConfigFile {
            preset,
            cell,
            method: Some(self.method),
            s: Some(self.s),
            alpha: self.alpha,
            grid: self.grid.clone(),
            out: self.out.clone(),
            tol: Some(self.tol),
            p: self.p,
        }
    }

    /// Method and parameter compatibility.
    pub fn validate(&self) -> Result<()> {
        let m = self.method;
        if !self.s.is_finite() {
            return Err(Error::InvalidArgument(format!("s must be finite, got {}", self.s)));
        }
        match (m, self.alpha) {
            (Method::WolfDamped, None) => {
                return Err(Error::InvalidArgument("wolf_damped requires alpha".into()))
            }
            (Method::WolfDamped | Method::Ewald, Some(a)) if !(a > 0.0 && a.is_finite()) => {
                return Err(Error::InvalidArgument(format!("alpha must be positive, got {a}")))
            }
            (Method::WolfDamped | Method::Ewald, _) => {}
            (_, Some(_)) => {
                return Err(Error::InvalidArgument(format!("alpha is only valid with ewald or wolf_damped, not {m}")))
            }
            (_, None) => {}
        }
        if self.grid.is_some() && m.series_method().is_none() {
            return Err(Error::InvalidArgument(format!("{m} takes no grid")));
        }
        if matches!(m, Method::Ewald | Method::Wolf | Method::WolfDamped) && self.s != 1.0 {
            return Err(Error::InvalidArgument(format!("{m} is defined for s = 1 only")));
        }
        if self.p.is_some() && m != Method::Zeta {
            return Err(Error::InvalidArgument("an offset p is only valid with the zeta method".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }
}

/// Problems loading a configuration document.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub fn parse_config(text: &str, path: &Path) -> std::result::Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_config_file(path: &Path) -> std::result::Result<ConfigFile, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, path)
}

/// Reads and validates a configuration document.
pub fn load_config(path: &Path) -> std::result::Result<RunConfig, ConfigError> {
    Ok(RunConfig::from_file(&read_config_file(path)?)?)
}

pub fn save_config(config: &RunConfig, path: &Path) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&config.to_file()).expect("config serializes");
    std::fs::write(path, text + "\n")
}
