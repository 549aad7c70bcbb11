//! Experimental profile files and sampled profiles.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileKind {
    /// Centerline axial velocity, m/s.
    Velocity,
    /// Wall pressure, Pa.
    Pressure,
}

impl ProfileKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Velocity => "velocity",
            ProfileKind::Pressure => "pressure",
        }
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "velocity" => Ok(ProfileKind::Velocity),
            "pressure" => Ok(ProfileKind::Pressure),
            _ => Err(Error::invalid(format!("unknown profile kind '{s}'"))),
        }
    }
}

/// Axial samples `(z, value)` sorted by `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub kind: ProfileKind,
    pub samples: Vec<(f64, f64)>,
}

impl Profile {
    pub fn z_range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.0, self.samples.last()?.0))
    }

    /// Piecewise-linear value at `z`, `None` outside the sampled range.
    pub fn interpolate(&self, z: f64) -> Option<f64> {
        interpolate(&self.samples, z)
    }
}

const RANGE_TOL: f64 = 1e-12;

pub(crate) fn interpolate(samples: &[(f64, f64)], z: f64) -> Option<f64> {
    let (first, last) = (samples.first()?, samples.last()?);
    if z < first.0 - RANGE_TOL || z > last.0 + RANGE_TOL {
        return None;
    }
    if samples.len() == 1 {
        return Some(first.1);
    }
    let i = samples.partition_point(|s| s.0 <= z).clamp(1, samples.len() - 1);
    let (a, b) = (samples[i - 1], samples[i]);
    let s = ((z - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
    Some(a.1 + s * (b.1 - a.1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalDataset {
    pub label: String,
    pub kind: ProfileKind,
    /// Dimensional samples sorted by strictly increasing `z`.
    pub samples: Vec<(f64, f64)>,
    /// Pressure offset already subtracted, if aligned.
    pub offset: Option<f64>,
}

impl ExperimentalDataset {
    pub fn profile(&self) -> Profile {
        Profile {
            kind: self.kind,
            samples: self.samples.clone(),
        }
    }
}

/// Parses two numeric columns separated by whitespace or commas, with at
/// most one leading header line. Samples are sorted by `z`; repeated `z`
/// values are averaged.
pub fn parse_experimental(text: &str, kind: ProfileKind, label: &str, source: &str) -> Result<ExperimentalDataset> {
    let mut raw = Vec::new();
    let mut seen_data = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 && v.iter().all(|x| x.is_finite()) => {
                raw.push((v[0], v[1]));
                seen_data = true;
            }
            None if !seen_data && i == first_content_line(text) => {}
            _ => {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line: i + 1,
                    message: format!("expected two numeric columns, got '{line}'"),
                })
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let mut j = i;
        let mut sum = 0.0;
        while j < raw.len() && raw[j].0 == raw[i].0 {
            sum += raw[j].1;
            j += 1;
        }
        samples.push((raw[i].0, sum / (j - i) as f64));
        i = j;
    }
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{source}: {} distinct samples, need at least 2",
            samples.len()
        )));
    }
    Ok(ExperimentalDataset {
        label: label.to_string(),
        kind,
        samples,
        offset: None,
    })
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .unwrap_or(0)
}

pub fn load_experimental(path: &Path, kind: ProfileKind) -> Result<ExperimentalDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_experimental(&text, kind, &label, &path.display().to_string())
}

/// Subtracts the interpolated value at `reference_z` from every sample.
pub fn align_pressure_offset(dataset: &ExperimentalDataset, reference_z: f64) -> Result<ExperimentalDataset> {
    let shift = interpolate(&dataset.samples, reference_z).ok_or_else(|| {
        Error::invalid(format!("reference z = {reference_z} lies outside dataset '{}'", dataset.label))
    })?;
    let mut out = dataset.clone();
    for s in &mut out.samples {
        s.1 -= shift;
    }
    out.offset = Some(dataset.offset.unwrap_or(0.0) + shift);
    Ok(out)
}
