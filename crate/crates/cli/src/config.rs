//! Run configuration: compiled-in defaults, an optional TOML file, and
//! `--set key=value` overrides, merged in that order.

use std::path::Path;

use kitwpa_core::analysis::FomConfig;
use kitwpa_core::critical_field::AlphaScaling;
use kitwpa_core::materials::{Environment, Material};
use kitwpa_core::microstrip::Geometry;
use kitwpa_core::network::{CellLayout, Device, ModelOptions};
use kitwpa_core::noise::{NoiseModel, StripGeometry};
use kitwpa_core::Execution;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

/// Evenly spaced grid, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Grid {
            start,
            stop,
            points,
        }
    }

    pub fn values(&self, name: &str) -> Result<Vec<f64>, String> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(format!("sweep.{name}: need points >= 1 and finite limits"));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        if self.stop <= self.start {
            return Err(format!("sweep.{name}: stop must exceed start"));
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FieldAxis {
    Perp,
    Par,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSweep {
    pub axis: FieldAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsnrSweep {
    /// Temperature grid [K].
    pub temperature: Grid,
    /// Signal frequency for the single-frequency mode [Hz].
    pub f_signal: f64,
    /// Average the dB value over `band` instead of using `f_signal`.
    pub band_average: bool,
    pub band: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    pub frequency: Grid,
    pub temperature: Grid,
    pub field: FieldSweep,
    pub bandgap: Grid,
    pub dsnr: DsnrSweep,
}

/// Lossy-cascade noise estimate inputs [K].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cascade {
    pub t_amp: f64,
    pub t_effective: f64,
    pub t_attenuator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// Zero-field Tc [K]; 0 takes it from the B = 0 sample of the data.
    pub tc0: f64,
    pub scaling: AlphaScaling,
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub run: RunOptions,
    pub strip: Material,
    pub ground: Material,
    pub geometry: Geometry,
    pub layout: CellLayout,
    pub model: ModelOptions,
    pub environment: Environment,
    pub noise: NoiseModel,
    pub cascade: Cascade,
    pub vortex: StripGeometry,
    pub fit: FitOptions,
    pub fom: FomConfig,
    pub sweep: Sweeps,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            run: RunOptions {
                execution: Execution::default(),
            },
            strip: Material::nbtin(),
            ground: Material::nb(),
            geometry: Geometry::default(),
            layout: CellLayout::default(),
            model: ModelOptions::default(),
            environment: Environment::at_temperature(0.05),
            noise: NoiseModel::default(),
            cascade: Cascade {
                t_amp: 3.0,
                t_effective: 13.0,
                t_attenuator: 4.0,
            },
            vortex: StripGeometry::default(),
            fit: FitOptions {
                tc0: 0.0,
                scaling: AlphaScaling::ZeroTcField,
                max_iters: 500,
            },
            fom: FomConfig::default(),
            sweep: Sweeps {
                frequency: Grid::new(4e9, 8e9, 200),
                temperature: Grid::new(0.05, 9.2, 20),
                field: FieldSweep {
                    axis: FieldAxis::Perp,
                    start: 0.0,
                    stop: 1.5,
                    points: 16,
                },
                bandgap: Grid::new(1e9, 20e9, 1901),
                dsnr: DsnrSweep {
                    temperature: Grid::new(0.05, 5.0, 100),
                    f_signal: 6e9,
                    band_average: false,
                    band: Grid::new(4e9, 8e9, 41),
                },
            },
        }
    }
}

impl Config {
    pub fn device(&self) -> Device {
        Device {
            strip: self.strip.clone(),
            ground: self.ground.clone(),
            geometry: self.geometry.clone(),
            layout: self.layout.clone(),
            options: self.model.clone(),
        }
    }

    /// Resolved configuration as TOML text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Recursively overlay `over` onto `base`, refusing keys the defaults lack.
///
/// Tagged-enum tables (those with a `kind` key) are replaced whole so that
/// variant-specific fields can be supplied.
fn merge(base: &mut Table, over: Table, prefix: &str) -> Result<(), String> {
    for (key, value) in over {
        let path = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match (base.get_mut(&key), value) {
            (None, _) => return Err(format!("unknown config key '{path}'")),
            (Some(Value::Table(b)), Value::Table(o)) if !b.contains_key("kind") => {
                merge(b, o, &path)?
            }
            (Some(Value::Table(_)), Value::Table(o)) => {
                base.insert(key, Value::Table(o));
            }
            (Some(Value::Table(_)), _) => return Err(format!("config key '{path}' is a table")),
            (Some(slot), v) => *slot = v,
        }
    }
    Ok(())
}

/// Parse the right-hand side of `--set`: TOML syntax, else a bare string.
fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Turn `a.b.c=value` into a nested single-entry table.
fn override_table(assignment: &str) -> Result<Table, String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("--set expects key=value, got '{assignment}'"))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("--set: malformed key '{path}'"));
    }
    let mut value = parse_value(raw.trim());
    for key in keys.iter().skip(1).rev() {
        let mut t = Table::new();
        t.insert((*key).to_string(), value);
        value = Value::Table(t);
    }
    let mut top = Table::new();
    top.insert(keys[0].to_string(), value);
    Ok(top)
}

/// Build the effective configuration. Errors are usage errors.
pub fn resolve(file: Option<&Path>, overrides: &[String]) -> Result<Config, String> {
    let mut base: Table = toml::to_string(&Config::default())
        .expect("default config serializes")
        .parse()
        .expect("default config parses");
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
        let user: Table = text
            .parse()
            .map_err(|e| format!("config '{}': {e}", path.display()))?;
        merge(&mut base, user, "")?;
    }
    for assignment in overrides {
        merge(&mut base, override_table(assignment)?, "")?;
    }
    Value::Table(base)
        .try_into()
        .map_err(|e: toml::de::Error| format!("invalid configuration: {e}"))
}
