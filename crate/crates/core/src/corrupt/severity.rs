//! Per-kind severity parameters.
//!
//! Every kind owns one or more named parameters, each a 5-entry vector indexed
//! by severity 1..=5. Parameters must move monotonically in their declared
//! direction of increasing distortion, and between any two adjacent levels at
//! least one parameter of the kind must move strictly.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::CorruptionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamDef {
    pub name: &'static str,
    pub direction: Direction,
    /// Inclusive bounds on every entry.
    pub range: (f64, f64),
    pub defaults: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeverityError {
    #[error("{kind} has no parameter named `{name}`")]
    UnknownParam { kind: CorruptionKind, name: String },
    #[error("{kind}.{name}[{level}] = {value} outside [{min}, {max}]")]
    OutOfRange { kind: CorruptionKind, name: &'static str, level: usize, value: f64, min: f64, max: f64 },
    #[error("{kind}.{name} is not monotone {direction:?} between severities {from} and {to}")]
    NotMonotone { kind: CorruptionKind, name: &'static str, direction: Direction, from: usize, to: usize },
    #[error("{kind}: severities {from} and {to} have identical parameters")]
    Stalled { kind: CorruptionKind, from: usize, to: usize },
}

const fn inc(name: &'static str, range: (f64, f64), defaults: [f64; 5]) -> ParamDef {
    ParamDef { name, direction: Direction::Increasing, range, defaults }
}

const fn dec(name: &'static str, range: (f64, f64), defaults: [f64; 5]) -> ParamDef {
    ParamDef { name, direction: Direction::Decreasing, range, defaults }
}

const GAUSSIAN_NOISE: &[ParamDef] = &[inc("sigma", (0.0, 10.0), [0.08, 0.12, 0.18, 0.26, 0.38])];
const SHOT_NOISE: &[ParamDef] = &[dec("photons", (0.01, 1.0e6), [60.0, 25.0, 12.0, 5.0, 3.0])];
const IMPULSE_NOISE: &[ParamDef] = &[inc("amount", (0.0, 1.0), [0.03, 0.06, 0.09, 0.17, 0.27])];
const SPECKLE_NOISE: &[ParamDef] = &[inc("sigma", (0.0, 10.0), [0.15, 0.2, 0.35, 0.45, 0.6])];
const DEFOCUS_BLUR: &[ParamDef] = &[
    inc("radius", (0.0, 64.0), [3.0, 4.0, 6.0, 8.0, 10.0]),
    inc("alias_sigma", (0.0, 8.0), [0.1, 0.5, 0.5, 0.5, 0.5]),
];
const GAUSSIAN_BLUR: &[ParamDef] = &[inc("sigma", (0.0, 64.0), [1.0, 2.0, 3.0, 4.0, 6.0])];
const GLASS_BLUR: &[ParamDef] = &[
    inc("sigma", (0.0, 16.0), [0.7, 0.9, 1.0, 1.1, 1.5]),
    inc("max_delta", (0.0, 32.0), [1.0, 2.0, 2.0, 3.0, 4.0]),
    inc("iterations", (0.0, 16.0), [1.0, 1.0, 2.0, 2.0, 2.0]),
];
const MOTION_BLUR: &[ParamDef] = &[
    inc("radius", (0.0, 128.0), [10.0, 15.0, 15.0, 15.0, 20.0]),
    inc("sigma", (0.1, 128.0), [3.0, 5.0, 8.0, 12.0, 15.0]),
];
const ZOOM_BLUR: &[ParamDef] = &[
    inc("max_zoom", (1.0, 4.0), [1.11, 1.16, 1.21, 1.26, 1.31]),
    inc("step", (0.001, 1.0), [0.01, 0.01, 0.02, 0.02, 0.03]),
];
const FOG: &[ParamDef] = &[
    inc("strength", (0.0, 16.0), [1.5, 2.0, 2.5, 3.0, 3.5]),
    dec("decay", (1.0, 16.0), [2.0, 2.0, 2.0, 2.0, 2.0]),
];
const SNOW: &[ParamDef] = &[
    inc("density", (0.0, 1.0), [0.004, 0.008, 0.012, 0.018, 0.025]),
    inc("length", (1.0, 64.0), [4.0, 6.0, 8.0, 10.0, 12.0]),
    inc("whiten", (0.0, 1.0), [0.15, 0.3, 0.3, 0.35, 0.45]),
];
const SPATTER: &[ParamDef] = &[
    dec("threshold", (-8.0, 8.0), [1.6, 1.3, 1.0, 0.7, 0.4]),
    inc("opacity", (0.0, 1.0), [0.4, 0.45, 0.5, 0.55, 0.6]),
    inc("scale", (0.5, 32.0), [3.0, 3.0, 3.0, 3.0, 3.0]),
];
const BRIGHTNESS: &[ParamDef] = &[inc("delta", (-1.0, 1.0), [0.1, 0.2, 0.3, 0.4, 0.5])];
const CONTRAST: &[ParamDef] = &[dec("factor", (0.0, 1.0), [0.4, 0.3, 0.2, 0.1, 0.05])];
const SATURATE: &[ParamDef] = &[inc("factor", (1.0, 100.0), [2.0, 3.0, 5.0, 8.0, 12.0])];
const PIXELATE: &[ParamDef] = &[dec("factor", (0.001, 1.0), [0.6, 0.5, 0.4, 0.3, 0.25])];
const JPEG_COMPRESSION: &[ParamDef] = &[dec("quality", (1.0, 100.0), [25.0, 18.0, 15.0, 10.0, 7.0])];
const ELASTIC_TRANSFORM: &[ParamDef] = &[
    inc("alpha", (0.0, 64.0), [2.0, 3.5, 5.0, 6.5, 8.0]),
    dec("smoothing", (0.5, 64.0), [6.0, 6.0, 6.0, 6.0, 6.0]),
];

/// Parameter schema of `kind`.
pub fn param_defs(kind: CorruptionKind) -> &'static [ParamDef] {
    use CorruptionKind::*;
    match kind {
        GaussianNoise => GAUSSIAN_NOISE,
        ShotNoise => SHOT_NOISE,
        ImpulseNoise => IMPULSE_NOISE,
        SpeckleNoise => SPECKLE_NOISE,
        DefocusBlur => DEFOCUS_BLUR,
        GaussianBlur => GAUSSIAN_BLUR,
        GlassBlur => GLASS_BLUR,
        MotionBlur => MOTION_BLUR,
        ZoomBlur => ZOOM_BLUR,
        Fog => FOG,
        Snow => SNOW,
        Spatter => SPATTER,
        Brightness => BRIGHTNESS,
        Contrast => CONTRAST,
        Saturate => SATURATE,
        Pixelate => PIXELATE,
        JpegCompression => JPEG_COMPRESSION,
        ElasticTransform => ELASTIC_TRANSFORM,
    }
}

/// Severity parameters for all eighteen kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct SeverityTable {
    values: Vec<Vec<[f64; 5]>>,
}

impl Default for SeverityTable {
    fn default() -> Self {
        Self {
            values: CorruptionKind::ALL
                .iter()
                .map(|k| param_defs(*k).iter().map(|d| d.defaults).collect())
                .collect(),
        }
    }
}

impl SeverityTable {
    fn slot(kind: CorruptionKind, name: &str) -> Option<usize> {
        param_defs(kind).iter().position(|d| d.name == name)
    }

    /// Full 5-level vector of one parameter.
    pub fn values(&self, kind: CorruptionKind, name: &str) -> Option<[f64; 5]> {
        Self::slot(kind, name).map(|i| self.values[kind.index()][i])
    }

    /// Value at `severity` in 1..=5. Panics on an unknown name or severity 0,
    /// both of which are programming errors inside the kernels.
    pub(crate) fn at(&self, kind: CorruptionKind, name: &str, severity: u8) -> f64 {
        let i = Self::slot(kind, name).expect("parameter declared in schema");
        self.values[kind.index()][i][usize::from(severity) - 1]
    }

    /// Replaces one parameter vector; the whole kind is re-validated and the
    /// table is left untouched on error.
    pub fn set(&mut self, kind: CorruptionKind, name: &str, values: [f64; 5]) -> Result<(), SeverityError> {
        self.set_many(kind, &[(name, values)])
    }

    /// Replaces several parameters of one kind at once, validating only the
    /// final combination.
    pub fn set_many(&mut self, kind: CorruptionKind, params: &[(&str, [f64; 5])]) -> Result<(), SeverityError> {
        let mut candidate = self.values[kind.index()].clone();
        for (name, values) in params {
            let i = Self::slot(kind, name)
                .ok_or_else(|| SeverityError::UnknownParam { kind, name: name.to_string() })?;
            candidate[i] = *values;
        }
        validate_kind(kind, &candidate)?;
        self.values[kind.index()] = candidate;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SeverityError> {
        for kind in CorruptionKind::ALL {
            validate_kind(kind, &self.values[kind.index()])?;
        }
        Ok(())
    }
}

fn validate_kind(kind: CorruptionKind, values: &[[f64; 5]]) -> Result<(), SeverityError> {
    let defs = param_defs(kind);
    for (def, v) in defs.iter().zip(values) {
        for (level, &x) in v.iter().enumerate() {
            if !(def.range.0..=def.range.1).contains(&x) {
                return Err(SeverityError::OutOfRange {
                    kind,
                    name: def.name,
                    level: level + 1,
                    value: x,
                    min: def.range.0,
                    max: def.range.1,
                });
            }
        }
        for s in 0..4 {
            let ok = match def.direction {
                Direction::Increasing => v[s + 1] >= v[s],
                Direction::Decreasing => v[s + 1] <= v[s],
            };
            if !ok {
                return Err(SeverityError::NotMonotone {
                    kind,
                    name: def.name,
                    direction: def.direction,
                    from: s + 1,
                    to: s + 2,
                });
            }
        }
    }
    for s in 0..4 {
        if values.iter().all(|v| v[s + 1] == v[s]) {
            return Err(SeverityError::Stalled { kind, from: s + 1, to: s + 2 });
        }
    }
    Ok(())
}
