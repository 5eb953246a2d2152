//! Textual dataset and defining-function specifications.
//!
//! Dataset syntax: `name` or `name:key=value,key=value`. Names and keys:
//!
//! * `gaussians8` — `radius` (4), `std` (0.2)
//! * `gaussians25` — `spacing` (2), `std` (0.05)
//! * `swiss-roll` — `noise` (0.1)
//! * `half-moons` — `noise` (0.05)
//! * `circle` — `radius` (2), `noise` (0.05)
//! * `normal` — `dim` (2), `std` (1), `mean` (origin; semicolon-separated,
//!   e.g. `mean=3;0;0`)
//!
//! Every name also accepts `n` (sample count) and `seed`. When omitted they
//! are filled from the run's defaults, and the run manifest records the
//! fully resolved form.

use std::collections::BTreeMap;
use std::str::FromStr;

use gsw_core::{DatasetKind, DatasetSpec, DefiningFunction};

use crate::CliError;

/// A dataset request as written on the command line: the distribution plus
/// optionally pinned sample count and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudSpec {
    pub kind: DatasetKind,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

impl CloudSpec {
    /// Fill unpinned fields and produce a concrete sampling request.
    pub fn resolve(&self, default_n: usize, default_seed: u64) -> DatasetSpec {
        DatasetSpec::new(
            self.kind.clone(),
            self.n.unwrap_or(default_n),
            self.seed.unwrap_or(default_seed),
        )
    }

    /// Canonical fully pinned string form; parses back to an equal spec.
    pub fn render_resolved(&self, n: usize, seed: u64) -> String {
        let body = match &self.kind {
            DatasetKind::Gaussians8 { radius, std } => {
                format!("gaussians8:radius={radius},std={std}")
            }
            DatasetKind::Gaussians25 { spacing, std } => {
                format!("gaussians25:spacing={spacing},std={std}")
            }
            DatasetKind::SwissRoll { noise } => format!("swiss-roll:noise={noise}"),
            DatasetKind::HalfMoons { noise } => format!("half-moons:noise={noise}"),
            DatasetKind::Circle { radius, noise } => {
                format!("circle:radius={radius},noise={noise}")
            }
            DatasetKind::IsotropicGaussian { dim, mean, std } => {
                let mut body = format!("normal:dim={dim},std={std}");
                if let Some(mean) = mean {
                    let parts: Vec<String> = mean.iter().map(|v| v.to_string()).collect();
                    body.push_str(&format!(",mean={}", parts.join(";")));
                }
                body
            }
        };
        format!("{body},n={n},seed={seed}")
    }
}

impl FromStr for CloudSpec {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let (name, args) = match text.split_once(':') {
            Some((name, args)) => (name.trim(), args),
            None => (text.trim(), ""),
        };
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for part in args.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError(format!("dataset `{text}`: expected key=value, got `{part}`")))?;
            map.insert(key.trim(), value.trim());
        }

        let mut take_f64 = |key: &str, default: f64| -> Result<f64, CliError> {
            match map.remove(key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|e| CliError(format!("dataset `{text}`: bad {key}: {e}"))),
                None => Ok(default),
            }
        };

        let kind = match name {
            "gaussians8" => DatasetKind::Gaussians8 {
                radius: take_f64("radius", 4.0)?,
                std: take_f64("std", 0.2)?,
            },
            "gaussians25" => DatasetKind::Gaussians25 {
                spacing: take_f64("spacing", 2.0)?,
                std: take_f64("std", 0.05)?,
            },
            "swiss-roll" => DatasetKind::SwissRoll {
                noise: take_f64("noise", 0.1)?,
            },
            "half-moons" => DatasetKind::HalfMoons {
                noise: take_f64("noise", 0.05)?,
            },
            "circle" => DatasetKind::Circle {
                radius: take_f64("radius", 2.0)?,
                noise: take_f64("noise", 0.05)?,
            },
            "normal" => {
                let std = take_f64("std", 1.0)?;
                let dim: usize = match map.remove("dim") {
                    Some(raw) => raw
                        .parse()
                        .map_err(|e| CliError(format!("dataset `{text}`: bad dim: {e}")))?,
                    None => 2,
                };
                let mean = match map.remove("mean") {
                    Some(raw) => {
                        let parts: Result<Vec<f64>, _> =
                            raw.split(';').map(|v| v.trim().parse()).collect();
                        Some(parts.map_err(|e| {
                            CliError(format!("dataset `{text}`: bad mean: {e}"))
                        })?)
                    }
                    None => None,
                };
                DatasetKind::IsotropicGaussian { dim, mean, std }
            }
            other => {
                return Err(CliError(format!(
                    "unknown dataset `{other}` (expected gaussians8, gaussians25, \
                     swiss-roll, half-moons, circle, or normal)"
                )))
            }
        };

        let n = match map.remove("n") {
            Some(raw) => Some(
                raw.parse()
                    .map_err(|e| CliError(format!("dataset `{text}`: bad n: {e}")))?,
            ),
            None => None,
        };
        let seed = match map.remove("seed") {
            Some(raw) => Some(
                raw.parse()
                    .map_err(|e| CliError(format!("dataset `{text}`: bad seed: {e}")))?,
            ),
            None => None,
        };
        if let Some(key) = map.keys().next() {
            return Err(CliError(format!("dataset `{text}`: unknown key `{key}`")));
        }
        Ok(CloudSpec { kind, n, seed })
    }
}

/// Build a defining function from the `--defining-fn`, `--degree`, and
/// `--radius` flag values.
pub fn defining_function(
    family: &str,
    degree: usize,
    radius: f64,
    data_dim: usize,
) -> Result<DefiningFunction, CliError> {
    match family {
        "linear" => Ok(DefiningFunction::linear(data_dim)?),
        "circular" => Ok(DefiningFunction::circular(data_dim, radius)?),
        "poly" => Ok(DefiningFunction::poly_homogeneous(data_dim, degree)?),
        other => Err(CliError(format!(
            "unknown defining function `{other}` (expected linear, circular, or poly)"
        ))),
    }
}
