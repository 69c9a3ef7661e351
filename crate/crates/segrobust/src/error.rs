use std::path::PathBuf;

use segrobust_core::corrupt::{CorruptError, SeverityError};
use segrobust_core::maskalg::MaskAlgError;
use segrobust_core::raster::{RasterError, RleError};
use segrobust_core::segment::SegmentError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: unreadable image: {source}", path.display())]
    UnreadableFile { path: PathBuf, source: image::ImageError },
    #[error("no ground-truth mask for frame `{0}`")]
    MissingGroundTruth(String),
    #[error("frame `{stem}`: expected {expected:?}, found {found:?}")]
    DimensionMismatch { stem: String, expected: (u32, u32), found: (u32, u32) },
    #[error("frame stem `{0}` appears more than once")]
    DuplicateFrame(String),
    #[error("corpus at {} has no frames", .0.display())]
    EmptyCorpus(PathBuf),
    #[error("{}: schema error: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{}: mask {id}: {source}", path.display())]
    Rle { path: PathBuf, id: u32, source: RleError },
    #[error("{}: duplicate mask id {id}", path.display())]
    DuplicateMaskId { path: PathBuf, id: u32 },
    #[error("{}: mask {id} declares area {declared} but decodes to {actual}", path.display())]
    AreaMismatch { path: PathBuf, id: u32, declared: u64, actual: u64 },
    #[error("no mask document at {}", .0.display())]
    MissingMaskDocument(PathBuf),
    #[error("no records in {}", .0.display())]
    NoRecords(PathBuf),
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}:{line}: {source}", path.display())]
    Json { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Corrupt(#[from] CorruptError),
    #[error(transparent)]
    Severity(#[from] SeverityError),
    #[error(transparent)]
    MaskAlg(#[from] MaskAlgError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
