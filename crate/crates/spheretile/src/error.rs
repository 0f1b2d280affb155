//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A tile scheme violates the ordering constraints on its cut latitudes.
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    /// A value lies outside the mathematical domain of an operation.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// No ordered cut tuple exists for the requested tile count and overlap.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    /// A planned tile would have zero or negative extent.
    #[error("degenerate tile: {0}")]
    DegenerateTile(String),

    /// A pixel coordinate lies outside the raster it addresses.
    #[error("coordinate ({x}, {y}) outside {width}x{height} raster")]
    OutOfBounds {
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },

    /// Source/destination images do not match the geometry they are used with.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A reconstruction is missing one of the tiles its scheme requires.
    #[error("missing tile: {0}")]
    MissingTile(String),

    /// Canvas dimensions disagree with the layout manifest.
    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        got_w: u32,
        got_h: u32,
    },

    #[error("empty sample set")]
    EmptySampleSet,

    /// Rate-quality curves need at least four points for the cubic fit.
    #[error("rate curve needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    /// The two rate-quality curves share no quality interval.
    #[error("quality ranges do not overlap: [{a_lo:.3}, {a_hi:.3}] vs [{b_lo:.3}, {b_hi:.3}]")]
    NoQualityOverlap {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },

    /// Malformed structured input (manifest, CSV, weight table).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("png decode error: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png encode error: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
