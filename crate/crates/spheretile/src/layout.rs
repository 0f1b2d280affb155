//! Packing of tile rasters into a single rectangular canvas, plus the
//! manifest that records every placement so downstream tools never have to
//! infer layout.
//!
//! Packing is deterministic shelf packing: the equator band forms the top
//! shelf at full canvas width, remaining tiles are normalized to
//! wider-than-tall (90-degree rotation), sorted tallest-first and placed
//! first-fit into shelves. Canvas dimensions round up to multiples of 8.

use crate::error::{Error, Result};
use crate::geometry::{ColorModel, PlanarImage};
use crate::projector::{Hemisphere, TileGeometry, TileKind, TileShape};
use crate::scheme::{PoleStyle, TileScheme};

use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MANIFEST_VERSION: u32 = 1;

/// Quarter-turn rotation applied to a tile when placed in the canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub fn degrees(&self) -> u32 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    pub fn from_degrees(deg: u32) -> Result<Self> {
        match deg {
            0 => Ok(Rotation::R0),
            90 => Ok(Rotation::R90),
            180 => Ok(Rotation::R180),
            270 => Ok(Rotation::R270),
            other => Err(Error::Parse(format!(
                "rotation must be 0/90/180/270, got {other}"
            ))),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Rotation::R0 => Rotation::R0,
            Rotation::R90 => Rotation::R270,
            Rotation::R180 => Rotation::R180,
            Rotation::R270 => Rotation::R90,
        }
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let deg = u32::deserialize(d)?;
        Rotation::from_degrees(deg).map_err(serde::de::Error::custom)
    }
}

/// Compact string form of a tile kind, used in manifests and file names.
pub fn kind_code(kind: &TileKind) -> String {
    match kind {
        TileKind::EquatorBand => "equator".into(),
        TileKind::Ring {
            hemisphere: Hemisphere::North,
            index,
        } => format!("ring-n-{index}"),
        TileKind::Ring {
            hemisphere: Hemisphere::South,
            index,
        } => format!("ring-s-{index}"),
        TileKind::PoleCap {
            hemisphere: Hemisphere::North,
        } => "cap-n".into(),
        TileKind::PoleCap {
            hemisphere: Hemisphere::South,
        } => "cap-s".into(),
    }
}

/// Parses the string form produced by [`kind_code`].
pub fn kind_parse(code: &str) -> Result<TileKind> {
    if code == "equator" {
        return Ok(TileKind::EquatorBand);
    }
    if code == "cap-n" {
        return Ok(TileKind::PoleCap {
            hemisphere: Hemisphere::North,
        });
    }
    if code == "cap-s" {
        return Ok(TileKind::PoleCap {
            hemisphere: Hemisphere::South,
        });
    }
    if let Some(rest) = code.strip_prefix("ring-n-") {
        let index = rest.parse().map_err(|_| bad_kind(code))?;
        return Ok(TileKind::Ring {
            hemisphere: Hemisphere::North,
            index,
        });
    }
    if let Some(rest) = code.strip_prefix("ring-s-") {
        let index = rest.parse().map_err(|_| bad_kind(code))?;
        return Ok(TileKind::Ring {
            hemisphere: Hemisphere::South,
            index,
        });
    }
    Err(bad_kind(code))
}

fn bad_kind(code: &str) -> Error {
    Error::Parse(format!("unknown tile kind {code:?}"))
}

/// One tile's location in the packed canvas. `w`/`h` are the dimensions as
/// placed (after rotation); latitudes include the overlap extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub id: usize,
    #[serde(serialize_with = "ser_kind", deserialize_with = "de_kind")]
    pub kind: TileKind,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub rot: Rotation,
    pub lat_lo_deg: f64,
    pub lat_hi_deg: f64,
}

fn ser_kind<S: serde::Serializer>(k: &TileKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&kind_code(k))
}

fn de_kind<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<TileKind, D::Error> {
    let code = String::deserialize(d)?;
    kind_parse(&code).map_err(serde::de::Error::custom)
}

/// Scheme parameters as stored in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRecord {
    pub cuts_deg: Vec<f64>,
    pub pole: String,
    pub sigma: f64,
}

impl SchemeRecord {
    pub fn from_scheme(scheme: &TileScheme) -> Self {
        Self {
            cuts_deg: scheme.cuts().iter().map(|c| c.to_degrees()).collect(),
            pole: match scheme.pole() {
                PoleStyle::CirclePole => "circle".into(),
                PoleStyle::SquarePole => "square".into(),
            },
            sigma: scheme.sigma(),
        }
    }

    pub fn to_scheme(&self) -> Result<TileScheme> {
        let pole = match self.pole.as_str() {
            "circle" => PoleStyle::CirclePole,
            "square" => PoleStyle::SquarePole,
            other => return Err(Error::Parse(format!("unknown pole style {other:?}"))),
        };
        TileScheme::from_degrees(&self.cuts_deg, pole, self.sigma)
    }
}

/// Where every tile sits in the packed canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutManifest {
    pub version: u32,
    pub canvas_w: u32,
    pub canvas_h: u32,
    pub density_ppr: f64,
    pub scheme: SchemeRecord,
    pub placements: Vec<Placement>,
}

impl LayoutManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: LayoutManifest = serde_json::from_str(text)?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Parse(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                m.version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_scheme(&self) -> Result<TileScheme> {
        self.scheme.to_scheme()
    }

    /// Tile geometries in id order, reconstructed from the recorded
    /// placements (dimensions un-rotated back to the tile's own orientation).
    pub fn tile_geometries(&self) -> Result<Vec<TileGeometry>> {
        let mut sorted: Vec<&Placement> = self.placements.iter().collect();
        sorted.sort_by_key(|p| p.id);
        for (expect, p) in sorted.iter().enumerate() {
            if p.id != expect {
                return Err(Error::Parse(format!(
                    "placements must cover tile ids 0..{} exactly, missing id {expect}",
                    self.placements.len()
                )));
            }
        }
        Ok(sorted
            .iter()
            .map(|p| {
                let (w, h) = match p.rot {
                    Rotation::R90 | Rotation::R270 => (p.h, p.w),
                    _ => (p.w, p.h),
                };
                TileGeometry {
                    id: p.id,
                    kind: p.kind,
                    lat_lo: p.lat_lo_deg.to_radians(),
                    lat_hi: p.lat_hi_deg.to_radians(),
                    width_px: w,
                    height_px: h,
                    shape: match p.kind {
                        TileKind::PoleCap { .. } => TileShape::DiscInSquare,
                        _ => TileShape::Rect,
                    },
                    density: self.density_ppr,
                }
            })
            .collect())
    }

    /// Pixels covered by placed tiles.
    pub fn placed_area(&self) -> u64 {
        self.placements
            .iter()
            .map(|p| p.w as u64 * p.h as u64)
            .sum()
    }

    /// Layout overhead: (canvas - tiles) / tiles.
    pub fn waste_ratio(&self) -> f64 {
        let canvas = self.canvas_w as u64 * self.canvas_h as u64;
        let tiles = self.placed_area();
        (canvas - tiles) as f64 / tiles as f64
    }
}

fn round_up_8(v: u32) -> u32 {
    v.div_ceil(8) * 8
}

/// Packs tile rasters into one canvas and returns the manifest describing
/// every placement.
pub fn pack(tiles: &[TileGeometry], scheme: &TileScheme) -> Result<LayoutManifest> {
    if tiles.is_empty() {
        return Err(Error::GeometryMismatch(
            "cannot pack an empty tile list".into(),
        ));
    }
    let density = tiles[0].density;

    // normalized orientation: wider than tall
    let oriented: Vec<(usize, u32, u32, Rotation)> = tiles
        .iter()
        .map(|t| {
            if t.height_px > t.width_px {
                (t.id, t.height_px, t.width_px, Rotation::R90)
            } else {
                (t.id, t.width_px, t.height_px, Rotation::R0)
            }
        })
        .collect();

    // canvas width: the widest oriented tile, which for any real plan is the
    // equator band (full circumference, wider than tall)
    let band = tiles.iter().find(|t| t.kind == TileKind::EquatorBand);
    let canvas_w = round_up_8(oriented.iter().map(|&(_, w, _, _)| w).max().unwrap());

    struct Shelf {
        y: u32,
        height: u32,
        cursor: u32,
    }
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut bottom = 0u32;
    let mut placements: Vec<Placement> = Vec::new();

    let mut place = |id: usize, w: u32, h: u32, rot: Rotation, shelves: &mut Vec<Shelf>| {
        let slot = shelves
            .iter_mut()
            .find(|s| h <= s.height && s.cursor + w <= canvas_w);
        let (x, y) = match slot {
            Some(s) => {
                let at = (s.cursor, s.y);
                s.cursor += w;
                at
            }
            None => {
                let s = Shelf {
                    y: bottom,
                    height: h,
                    cursor: w,
                };
                bottom += h;
                let at = (0, s.y);
                shelves.push(s);
                at
            }
        };
        let tile = &tiles[id];
        placements.push(Placement {
            id,
            kind: tile.kind,
            x,
            y,
            w,
            h,
            rot,
            lat_lo_deg: tile.lat_lo.to_degrees(),
            lat_hi_deg: tile.lat_hi.to_degrees(),
        });
    };

    let mut rest: Vec<&(usize, u32, u32, Rotation)> = Vec::new();
    for entry in &oriented {
        if band.is_some_and(|b| b.id == entry.0) {
            place(entry.0, entry.1, entry.2, entry.3, &mut shelves);
        } else {
            rest.push(entry);
        }
    }
    rest.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    for &&(id, w, h, rot) in &rest {
        place(id, w, h, rot, &mut shelves);
    }

    // id lookups in `place` assume ids are dense indexes into `tiles`
    debug_assert!(tiles.iter().enumerate().all(|(i, t)| t.id == i));

    Ok(LayoutManifest {
        version: MANIFEST_VERSION,
        canvas_w,
        canvas_h: round_up_8(bottom),
        density_ppr: density,
        scheme: SchemeRecord::from_scheme(scheme),
        placements,
    })
}

/// Renders the packed canvas from per-tile images.
pub fn compose_canvas(manifest: &LayoutManifest, tiles: &[PlanarImage]) -> Result<PlanarImage> {
    if tiles.len() != manifest.placements.len() {
        return Err(Error::MissingTile(format!(
            "manifest has {} placements, got {} tile images",
            manifest.placements.len(),
            tiles.len()
        )));
    }
    let color = tiles.first().map(|t| t.color()).unwrap_or(ColorModel::Gray);
    let mut canvas = PlanarImage::new(manifest.canvas_w, manifest.canvas_h, color);
    let fill = color.black_fill();
    for plane in 0..canvas.plane_count() {
        canvas.plane_mut(plane).fill(fill[plane]);
    }
    for p in &manifest.placements {
        let tile = tiles.get(p.id).ok_or_else(|| {
            Error::MissingTile(format!("no tile image for placement id {}", p.id))
        })?;
        let rotated = rotate(tile, p.rot);
        if rotated.width() != p.w || rotated.height() != p.h {
            return Err(Error::GeometryMismatch(format!(
                "tile {} is {}x{} after rotation, placement says {}x{}",
                p.id,
                rotated.width(),
                rotated.height(),
                p.w,
                p.h
            )));
        }
        if p.x + p.w > canvas.width() || p.y + p.h > canvas.height() {
            return Err(Error::GeometryMismatch(format!(
                "placement {} exceeds canvas bounds",
                p.id
            )));
        }
        for plane in 0..canvas.plane_count() {
            for y in 0..p.h {
                for x in 0..p.w {
                    canvas.put(plane, p.x + x, p.y + y, rotated.get(plane, x, y));
                }
            }
        }
    }
    Ok(canvas)
}

/// Extracts per-tile images from a packed canvas; exact inverse of
/// [`compose_canvas`].
pub fn unpack(canvas: &PlanarImage, manifest: &LayoutManifest) -> Result<Vec<PlanarImage>> {
    if canvas.width() != manifest.canvas_w || canvas.height() != manifest.canvas_h {
        return Err(Error::DimensionMismatch {
            expected_w: manifest.canvas_w,
            expected_h: manifest.canvas_h,
            got_w: canvas.width(),
            got_h: canvas.height(),
        });
    }
    let mut sorted: Vec<&Placement> = manifest.placements.iter().collect();
    sorted.sort_by_key(|p| p.id);
    sorted
        .iter()
        .map(|p| {
            if p.x + p.w > canvas.width() || p.y + p.h > canvas.height() {
                return Err(Error::GeometryMismatch(format!(
                    "placement {} exceeds canvas bounds",
                    p.id
                )));
            }
            let mut cut = PlanarImage::new(p.w, p.h, canvas.color());
            for plane in 0..canvas.plane_count() {
                for y in 0..p.h {
                    for x in 0..p.w {
                        cut.put(plane, x, y, canvas.get(plane, p.x + x, p.y + y));
                    }
                }
            }
            Ok(rotate(&cut, p.rot.inverse()))
        })
        .collect()
}

/// Quarter-turn image rotation (clockwise for `R90`).
pub fn rotate(img: &PlanarImage, rot: Rotation) -> PlanarImage {
    let (w, h) = (img.width(), img.height());
    match rot {
        Rotation::R0 => img.clone(),
        Rotation::R90 => {
            let mut out = PlanarImage::new(h, w, img.color());
            for plane in 0..img.plane_count() {
                for y in 0..w {
                    for x in 0..h {
                        out.put(plane, x, y, img.get(plane, y, h - 1 - x));
                    }
                }
            }
            out
        }
        Rotation::R180 => {
            let mut out = PlanarImage::new(w, h, img.color());
            for plane in 0..img.plane_count() {
                for y in 0..h {
                    for x in 0..w {
                        out.put(plane, x, y, img.get(plane, w - 1 - x, h - 1 - y));
                    }
                }
            }
            out
        }
        Rotation::R270 => {
            let mut out = PlanarImage::new(h, w, img.color());
            for plane in 0..img.plane_count() {
                for y in 0..w {
                    for x in 0..h {
                        out.put(plane, x, y, img.get(plane, w - 1 - y, x));
                    }
                }
            }
            out
        }
    }
}
