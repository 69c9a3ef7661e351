//! Seeded image corruptions.
//!
//! Eighteen kinds in four families (noise, blur, weather, digital), each with
//! five severity levels configured by a [`SeverityTable`]. Severity 0 is the
//! identity. All kernels work on normalized `[0, 1]` samples and quantize once
//! at the end (clamp, scale by 255, round half to even), and every random
//! draw comes from a [`rng::Stream`] keyed by seed, kind, severity and element
//! index, so results never depend on evaluation order.

mod blur;
mod buffer;
mod digital;
mod jpeg;
mod noise;
pub mod rng;
pub mod severity;
mod weather;

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::Image;
pub use severity::{param_defs, Direction, ParamDef, SeverityError, SeverityTable};

pub const MAX_SEVERITY: u8 = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorruptError {
    #[error("unknown corruption kind `{0}`")]
    UnknownKind(String),
    #[error("severity {0} outside 0..=5")]
    InvalidSeverity(u8),
    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error(transparent)]
    Severity(#[from] SeverityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    GaussianNoise,
    ShotNoise,
    ImpulseNoise,
    SpeckleNoise,
    DefocusBlur,
    GaussianBlur,
    GlassBlur,
    MotionBlur,
    ZoomBlur,
    Fog,
    Snow,
    Spatter,
    Brightness,
    Contrast,
    Saturate,
    Pixelate,
    JpegCompression,
    ElasticTransform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Noise,
    Blur,
    Weather,
    Digital,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 18] = [
        Self::GaussianNoise,
        Self::ShotNoise,
        Self::ImpulseNoise,
        Self::SpeckleNoise,
        Self::DefocusBlur,
        Self::GaussianBlur,
        Self::GlassBlur,
        Self::MotionBlur,
        Self::ZoomBlur,
        Self::Fog,
        Self::Snow,
        Self::Spatter,
        Self::Brightness,
        Self::Contrast,
        Self::Saturate,
        Self::Pixelate,
        Self::JpegCompression,
        Self::ElasticTransform,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Self::GaussianNoise => "gaussian_noise",
            Self::ShotNoise => "shot_noise",
            Self::ImpulseNoise => "impulse_noise",
            Self::SpeckleNoise => "speckle_noise",
            Self::DefocusBlur => "defocus_blur",
            Self::GaussianBlur => "gaussian_blur",
            Self::GlassBlur => "glass_blur",
            Self::MotionBlur => "motion_blur",
            Self::ZoomBlur => "zoom_blur",
            Self::Fog => "fog",
            Self::Snow => "snow",
            Self::Spatter => "spatter",
            Self::Brightness => "brightness",
            Self::Contrast => "contrast",
            Self::Saturate => "saturate",
            Self::Pixelate => "pixelate",
            Self::JpegCompression => "jpeg_compression",
            Self::ElasticTransform => "elastic_transform",
        }
    }

    /// Position in [`CorruptionKind::ALL`]; also the kind tag of random streams.
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn family(self) -> Family {
        match self {
            Self::GaussianNoise | Self::ShotNoise | Self::ImpulseNoise | Self::SpeckleNoise => Family::Noise,
            Self::DefocusBlur | Self::GaussianBlur | Self::GlassBlur | Self::MotionBlur | Self::ZoomBlur => {
                Family::Blur
            }
            Self::Fog | Self::Snow | Self::Spatter => Family::Weather,
            Self::Brightness
            | Self::Contrast
            | Self::Saturate
            | Self::Pixelate
            | Self::JpegCompression
            | Self::ElasticTransform => Family::Digital,
        }
    }

    /// Kinds that move pixels around rather than changing their values.
    pub const fn is_geometric(self) -> bool {
        matches!(self, Self::GlassBlur | Self::ZoomBlur | Self::Pixelate | Self::ElasticTransform)
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionKind {
    type Err = CorruptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CorruptError::UnknownKind(s.to_string()))
    }
}

/// One perturbation instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub severity: u8,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, severity: u8, seed: u64) -> Result<Self, CorruptError> {
        if severity > MAX_SEVERITY {
            return Err(CorruptError::InvalidSeverity(severity));
        }
        Ok(Self { kind, severity, seed })
    }
}

/// Per-call context handed to the kernels.
pub(crate) struct Ctx<'a> {
    pub spec: CorruptionSpec,
    pub table: &'a SeverityTable,
}

impl Ctx<'_> {
    pub fn param(&self, name: &str) -> f64 {
        self.table.at(self.spec.kind, name, self.spec.severity)
    }

    /// Stream private to this severity (per-sample noise).
    pub fn stream(&self, id: u32) -> rng::Stream {
        rng::Stream::new(self.spec.seed, self.spec.kind.index() as u8, self.spec.severity, id)
    }

    /// Stream shared by all severities of the kind. Scene-level draws (blur
    /// direction, fog pattern, flake layout, displacement fields) come from
    /// here, so a higher severity is the same disturbance at a larger strength.
    pub fn scene_stream(&self, id: u32) -> rng::Stream {
        rng::Stream::new(self.spec.seed, self.spec.kind.index() as u8, 0, id)
    }
}

/// Applies one corruption. Output has the input's dimensions, and identical
/// `(img, spec, table)` always produce identical bytes.
pub fn apply_corruption(img: &Image, spec: CorruptionSpec, table: &SeverityTable) -> Result<Image, CorruptError> {
    if spec.severity > MAX_SEVERITY {
        return Err(CorruptError::InvalidSeverity(spec.severity));
    }
    if spec.severity == 0 {
        return Ok(img.clone());
    }
    let ctx = Ctx { spec, table };
    use CorruptionKind::*;
    let out = match spec.kind {
        GaussianNoise => noise::gaussian(img, &ctx),
        ShotNoise => noise::shot(img, &ctx),
        ImpulseNoise => noise::impulse(img, &ctx),
        SpeckleNoise => noise::speckle(img, &ctx),
        DefocusBlur => blur::defocus(img, &ctx),
        GaussianBlur => blur::gaussian(img, &ctx),
        GlassBlur => blur::glass(img, &ctx),
        MotionBlur => blur::motion(img, &ctx),
        ZoomBlur => blur::zoom(img, &ctx),
        Fog => weather::fog(img, &ctx),
        Snow => weather::snow(img, &ctx),
        Spatter => weather::spatter(img, &ctx),
        Brightness => digital::brightness(img, &ctx),
        Contrast => digital::contrast(img, &ctx),
        Saturate => digital::saturate(img, &ctx),
        Pixelate => digital::pixelate(img, &ctx),
        JpegCompression => jpeg::round_trip(img, ctx.param("quality")),
        ElasticTransform => digital::elastic(img, &ctx),
    };
    debug_assert_eq!(out.dims(), img.dims());
    Ok(out)
}

/// Peak signal-to-noise ratio in dB with peak 255; `+inf` for identical images.
pub fn distortion_psnr(clean: &Image, corrupted: &Image) -> Result<f64, CorruptError> {
    if clean.dims() != corrupted.dims() {
        return Err(CorruptError::DimensionMismatch { left: clean.dims(), right: corrupted.dims() });
    }
    let sse: u64 = clean
        .as_bytes()
        .iter()
        .zip(corrupted.as_bytes())
        .map(|(a, b)| {
            let d = i64::from(*a) - i64::from(*b);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / clean.as_bytes().len() as f64;
    Ok(10.0 * libm::log10(255.0 * 255.0 / mse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn textured(w: u32, h: u32) -> Image {
        Image::from_fn(w, h, |x, y| {
            let v = ((x * 7 + y * 13) % 97) as u8;
            [v + 60, (x * 3 % 200) as u8 + 20, (y * 5 % 180) as u8 + 40]
        })
        .unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        assert_eq!(CorruptionKind::ALL.len(), 18);
        for (i, k) in CorruptionKind::ALL.iter().enumerate() {
            assert_eq!(k.index(), i);
            assert_eq!(k.as_str().parse::<CorruptionKind>().unwrap(), *k);
        }
        assert_eq!(
            "frost".parse::<CorruptionKind>(),
            Err(CorruptError::UnknownKind("frost".into()))
        );
    }

    #[test]
    fn named_kinds_present() {
        for name in ["zoom_blur", "brightness", "jpeg_compression"] {
            assert!(name.parse::<CorruptionKind>().is_ok());
        }
    }

    #[test]
    fn severity_zero_is_identity() {
        let img = textured(40, 30);
        let table = SeverityTable::default();
        for kind in CorruptionKind::ALL {
            for seed in [0, 99] {
                let out = apply_corruption(&img, CorruptionSpec { kind, severity: 0, seed }, &table).unwrap();
                assert_eq!(out, img, "{kind}");
            }
        }
    }

    #[test]
    fn invalid_severity_rejected() {
        let img = textured(8, 8);
        let spec = CorruptionSpec { kind: CorruptionKind::Fog, severity: 6, seed: 0 };
        assert_eq!(
            apply_corruption(&img, spec, &SeverityTable::default()),
            Err(CorruptError::InvalidSeverity(6))
        );
        assert!(CorruptionSpec::new(CorruptionKind::Fog, 9, 0).is_err());
    }

    #[test]
    fn every_kind_preserves_shape_and_is_deterministic() {
        // Odd sizes exercise partial JPEG blocks and pixelate remainders.
        let img = textured(37, 23);
        let table = SeverityTable::default();
        for kind in CorruptionKind::ALL {
            for severity in 1..=5 {
                let spec = CorruptionSpec { kind, severity, seed: 3 };
                let a = apply_corruption(&img, spec, &table).unwrap();
                let b = apply_corruption(&img, spec, &table).unwrap();
                assert_eq!(a.dims(), img.dims(), "{kind} s{severity}");
                assert_eq!(a, b, "{kind} s{severity}");
            }
        }
    }

    #[test]
    fn brightness_matches_scalar_formula() {
        let img = Image::from_fn(16, 16, |x, y| [(x * 16) as u8, (y * 16) as u8, ((x + y) * 8) as u8]).unwrap();
        let deltas = [0.10, 0.20, 0.30, 0.40, 0.50];
        for (s, delta) in (1..=5).zip(deltas) {
            let spec = CorruptionSpec { kind: CorruptionKind::Brightness, severity: s, seed: 1 };
            let out = apply_corruption(&img, spec, &SeverityTable::default()).unwrap();
            let expected: Vec<u8> = img
                .as_bytes()
                .iter()
                .map(|v| libm::rint((f64::from(*v) + delta * 255.0).clamp(0.0, 255.0)) as u8)
                .collect();
            assert_eq!(out.as_bytes(), &expected[..], "severity {s}");
        }
    }

    #[test]
    fn psnr_examples() {
        let a = textured(10, 10);
        assert_eq!(distortion_psnr(&a, &a).unwrap(), f64::INFINITY);
        let b = Image::filled(4, 4, [10, 10, 10]).unwrap();
        let c = Image::filled(4, 4, [11, 11, 11]).unwrap();
        let expected = 10.0 * libm::log10(255.0 * 255.0);
        assert!((distortion_psnr(&b, &c).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 48.1308).abs() < 1e-4);
        assert!(matches!(distortion_psnr(&a, &b), Err(CorruptError::DimensionMismatch { .. })));
    }

    #[test]
    fn gaussian_noise_psnr_drops_with_severity() {
        let img = textured(64, 64);
        let t = SeverityTable::default();
        let psnr = |s| {
            let spec = CorruptionSpec { kind: CorruptionKind::GaussianNoise, severity: s, seed: 5 };
            distortion_psnr(&img, &apply_corruption(&img, spec, &t).unwrap()).unwrap()
        };
        assert!(psnr(5) < psnr(1));
    }
}
