//! Latitude-tile segmentation for omnidirectional video frames.
//!
//! A sphere is cut along latitude lines into an equator band, rings and two
//! pole caps, each flattened into a compact raster. Compared to plain
//! equirectangular or cubic projection this wastes far fewer pixels at the
//! same minimum on-sphere sample density. The crate covers the whole
//! pipeline:
//!
//! - [`scheme`] — segmentation schemes and their exact flattened-area model,
//!   including equirectangular/cubic baselines for comparison.
//! - [`optimizer`] — constrained minimization of the area over the cut
//!   latitudes, with or without overlap margins between tiles.
//! - [`geometry`] — coordinate conventions, sphere transforms and the
//!   bilinear resampler shared by every projection.
//! - [`projector`] — pixel mappings for equirectangular, cube-face and tile
//!   rasters, the remap engine, and overlap blending for seam-free
//!   reconstruction.
//! - [`layout`] — shelf-packing of tiles into one rectangular canvas plus the
//!   JSON manifest that records every placement.
//! - [`metrics`] — sphere-aware quality metrics: S-PSNR, latitude-weighted
//!   L-PSNR and Bjontegaard delta rate.
//! - [`io`] — PNG / binary PPM / raw YUV 4:2:0 reading and writing.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p spheretile --example optimize_scheme
//! cargo run --release -p spheretile --example compare_area
//! cargo run --release -p spheretile --example area_curves
//! cargo run --release -p spheretile --example project_tiles
//! cargo run --release -p spheretile --example roundtrip_quality
//! cargo run --release -p spheretile --example overlap_blend
//! cargo run --release -p spheretile --example pack_canvas
//! cargo run --release -p spheretile --example cubemap
//! cargo run --release -p spheretile --example sphere_metrics
//! cargo run --release -p spheretile --example bd_rate
//! ```
//!
//! A thin `spheretile` binary exposes the same operations as subcommands
//! (`optimize`, `project`, `unproject`, `metrics`, `compare-area`).
//!
//! ## Quick start
//!
//! ```
//! use spheretile::optimizer::optimize_cuts;
//! use spheretile::projector::{plan_tiles, DensityRule};
//! use spheretile::scheme::PoleStyle;
//!
//! // best 5-tile segmentation with 0.5% overlap
//! let result = optimize_cuts(2, PoleStyle::SquarePole, 0.005).unwrap();
//! assert!(result.converged);
//!
//! // raster plan at the density of a 1024-row equirectangular source
//! let tiles = plan_tiles(&result.scheme, DensityRule::from_equirect_height(1024)).unwrap();
//! assert_eq!(tiles.len(), 5);
//! ```

pub mod error;
pub mod geometry;
pub mod io;
pub mod layout;
pub mod metrics;
pub mod optimizer;
pub mod projector;
pub mod scheme;

pub use error::{Error, Result};
pub use geometry::{ColorModel, PixelCoord, PlanarImage, SphericalCoord};
pub use layout::{compose_canvas, pack, unpack, LayoutManifest, Placement, Rotation};
pub use metrics::{
    bd_rate, build_sampleset, lpsnr, spsnr, RateQualityPoint, SampleSet, WeightTable,
};
pub use optimizer::{best_tilecount, optimize_cuts, OptimizationResult};
pub use projector::{
    blend_overlaps, plan_tiles, remap, tile_forward, tile_inverse, DensityRule, SourceProjection,
    TargetPlan, TileGeometry, TileKind,
};
pub use scheme::{
    baseline_ratio, hemisphere_area, yu_pole_area, AreaReport, BaselineProjection, PoleStyle,
    TileScheme,
};
