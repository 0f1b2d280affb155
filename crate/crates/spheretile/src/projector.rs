//! Forward and inverse pixel mappings for the three sphere representations
//! (equirectangular, tangent-cube faces, latitude tiles) plus the remap
//! engine and overlap blending.
//!
//! Tile rasters are laid out north-up. Rings and the equator band map
//! longitude linearly across their width and latitude linearly across their
//! height. Pole caps are azimuthal-equidistant discs inside a square canvas:
//! the radial pixel distance from the canvas center is `density * (pi/2 -
//! |lat|)`, and square corners beyond the disc rim carry no scene content
//! (black fill). Cap azimuth orientation: longitude -pi points toward the
//! raster's up direction, increasing counterclockwise on the north cap and
//! clockwise on the south cap, which keeps the cap rim longitude-continuous
//! with the adjacent ring edge.

use crate::error::{Error, Result};
use crate::geometry::{
    bilinear_sample, equirect_to_sphere, sphere_to_equirect, wrap_lon, ColorModel, PixelCoord,
    PlanarImage, SphericalCoord,
};
use crate::scheme::TileScheme;

use rayon::prelude::*;
use std::f64::consts::PI;

/// On-sphere sampling density in pixels per radian, identical for every tile
/// of a scheme so the minimum sample density matches across representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRule {
    pixels_per_radian: f64,
}

impl DensityRule {
    pub fn new(pixels_per_radian: f64) -> Result<Self> {
        if !(pixels_per_radian.is_finite() && pixels_per_radian > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "density must be positive, got {pixels_per_radian}"
            )));
        }
        Ok(Self { pixels_per_radian })
    }

    /// Density implied by an equirectangular source: `height / pi`.
    pub fn from_equirect_height(height: u32) -> Self {
        Self {
            pixels_per_radian: height as f64 / PI,
        }
    }

    pub fn pixels_per_radian(&self) -> f64 {
        self.pixels_per_radian
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    North,
    South,
}

/// Which piece of the sphere a tile carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileKind {
    EquatorBand,
    /// `index`-th ring out from the equator band (1-based); spans cut
    /// latitudes `index - 1` to `index`.
    Ring {
        hemisphere: Hemisphere,
        index: usize,
    },
    PoleCap {
        hemisphere: Hemisphere,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileShape {
    Rect,
    DiscInSquare,
}

/// Raster geometry of one tile, including its overlap extension.
#[derive(Debug, Clone, PartialEq)]
pub struct TileGeometry {
    pub id: usize,
    pub kind: TileKind,
    /// Latitude range covered by the raster, overlap extension included.
    pub lat_lo: f64,
    pub lat_hi: f64,
    pub width_px: u32,
    pub height_px: u32,
    pub shape: TileShape,
    /// Pixels per radian; fixes the cap radial mapping independently of the
    /// rounded canvas size.
    pub density: f64,
}

impl TileGeometry {
    /// Disc radius in pixels for cap tiles.
    fn cap_rim_px(&self) -> f64 {
        self.density * (self.lat_hi - self.lat_lo)
    }
}

/// Rounds a pixel extent up to the next even integer; values within 1e-6 of
/// an integer snap to it first so exact analytic sizes survive float noise.
fn round_up_even(x: f64) -> u32 {
    let nearest = x.round();
    let v = if (x - nearest).abs() < 1e-6 {
        nearest
    } else {
        x.ceil()
    };
    let v = v as u32;
    let v = if v % 2 == 1 { v + 1 } else { v };
    v.max(2)
}

/// Plans the `2n + 1` tile rasters for a scheme at the given density.
///
/// Tile ids are assigned in a fixed order: 0 is the equator band, `1..n-1`
/// the north rings from the equator outward, `n` the north cap, followed by
/// the mirrored south rings and the south cap.
pub fn plan_tiles(scheme: &TileScheme, density: DensityRule) -> Result<Vec<TileGeometry>> {
    let cuts = scheme.cuts();
    let n = cuts.len();
    let sigma = scheme.sigma();
    let d = density.pixels_per_radian();
    let ext = sigma * PI / 2.0;

    for j in 1..n {
        if cuts[j] - cuts[j - 1] <= sigma * PI {
            return Err(Error::DegenerateTile(format!(
                "cuts {:.4} and {:.4} rad are closer than the overlap band ({:.4} rad)",
                cuts[j - 1],
                cuts[j],
                sigma * PI
            )));
        }
    }

    let mut tiles = Vec::with_capacity(2 * n + 1);

    let band_hi = cuts[0] + ext;
    tiles.push(TileGeometry {
        id: 0,
        kind: TileKind::EquatorBand,
        lat_lo: -band_hi,
        lat_hi: band_hi,
        width_px: round_up_even(d * 2.0 * PI),
        height_px: round_up_even(d * 2.0 * band_hi),
        shape: TileShape::Rect,
        density: d,
    });

    let ring_geom = |j: usize| -> (f64, f64, u32, u32) {
        let lo = cuts[j - 1] - ext;
        let hi = cuts[j] + ext;
        let w = round_up_even(d * 2.0 * PI * cuts[j - 1].cos());
        let h = round_up_even(d * (hi - lo));
        (lo, hi, w, h)
    };
    let cap_extent = PI / 2.0 - cuts[n - 1] + ext;
    let cap_side = round_up_even(2.0 * d * cap_extent);

    for j in 1..n {
        let (lo, hi, w, h) = ring_geom(j);
        tiles.push(TileGeometry {
            id: j,
            kind: TileKind::Ring {
                hemisphere: Hemisphere::North,
                index: j,
            },
            lat_lo: lo,
            lat_hi: hi,
            width_px: w,
            height_px: h,
            shape: TileShape::Rect,
            density: d,
        });
    }
    tiles.push(TileGeometry {
        id: n,
        kind: TileKind::PoleCap {
            hemisphere: Hemisphere::North,
        },
        lat_lo: PI / 2.0 - cap_extent,
        lat_hi: PI / 2.0,
        width_px: cap_side,
        height_px: cap_side,
        shape: TileShape::DiscInSquare,
        density: d,
    });
    for j in 1..n {
        let (lo, hi, w, h) = ring_geom(j);
        tiles.push(TileGeometry {
            id: n + j,
            kind: TileKind::Ring {
                hemisphere: Hemisphere::South,
                index: j,
            },
            lat_lo: -hi,
            lat_hi: -lo,
            width_px: w,
            height_px: h,
            shape: TileShape::Rect,
            density: d,
        });
    }
    tiles.push(TileGeometry {
        id: 2 * n,
        kind: TileKind::PoleCap {
            hemisphere: Hemisphere::South,
        },
        lat_lo: -PI / 2.0,
        lat_hi: -(PI / 2.0 - cap_extent),
        width_px: cap_side,
        height_px: cap_side,
        shape: TileShape::DiscInSquare,
        density: d,
    });

    Ok(tiles)
}

/// Maps a tile raster position to the sphere; `Ok(None)` marks black-fill
/// (cap corners outside the disc rim).
pub fn tile_inverse(tile: &TileGeometry, p: PixelCoord) -> Result<Option<SphericalCoord>> {
    if !(p.x >= 0.0 && p.x <= tile.width_px as f64 && p.y >= 0.0 && p.y <= tile.height_px as f64) {
        return Err(Error::OutOfBounds {
            x: p.x,
            y: p.y,
            width: tile.width_px,
            height: tile.height_px,
        });
    }
    Ok(tile_inverse_unchecked(tile, p))
}

fn tile_inverse_unchecked(tile: &TileGeometry, p: PixelCoord) -> Option<SphericalCoord> {
    match tile.shape {
        TileShape::Rect => {
            let lon = 2.0 * PI * (p.x / tile.width_px as f64) - PI;
            let lat = tile.lat_hi - (p.y / tile.height_px as f64) * (tile.lat_hi - tile.lat_lo);
            Some(SphericalCoord::new(lat, lon))
        }
        TileShape::DiscInSquare => {
            let cx = tile.width_px as f64 / 2.0;
            let cy = tile.height_px as f64 / 2.0;
            let dx = p.x - cx;
            let dy = p.y - cy;
            let rho_px = (dx * dx + dy * dy).sqrt();
            if rho_px > tile.cap_rim_px() {
                return None;
            }
            let north = matches!(
                tile.kind,
                TileKind::PoleCap {
                    hemisphere: Hemisphere::North
                }
            );
            if rho_px == 0.0 {
                let lat = if north { PI / 2.0 } else { -PI / 2.0 };
                return Some(SphericalCoord::new(lat, 0.0));
            }
            let rho = rho_px / tile.density;
            let psi = dx.atan2(-dy);
            let (lat, lon) = if north {
                (PI / 2.0 - rho, wrap_lon(-PI - psi))
            } else {
                (-PI / 2.0 + rho, wrap_lon(psi - PI))
            };
            Some(SphericalCoord::new(lat, lon))
        }
    }
}

/// Maps a sphere position into a tile's raster; exact inverse of
/// [`tile_inverse`] for positions the tile covers.
pub fn tile_forward(tile: &TileGeometry, s: SphericalCoord) -> PixelCoord {
    match tile.shape {
        TileShape::Rect => {
            let x = (s.lon() + PI) / (2.0 * PI) * tile.width_px as f64;
            let y = (tile.lat_hi - s.lat()) / (tile.lat_hi - tile.lat_lo) * tile.height_px as f64;
            PixelCoord::new(x, y)
        }
        TileShape::DiscInSquare => {
            let north = matches!(
                tile.kind,
                TileKind::PoleCap {
                    hemisphere: Hemisphere::North
                }
            );
            let (rho, psi) = if north {
                ((PI / 2.0 - s.lat()) * tile.density, wrap_lon(-PI - s.lon()))
            } else {
                ((s.lat() + PI / 2.0) * tile.density, wrap_lon(s.lon() + PI))
            };
            let cx = tile.width_px as f64 / 2.0;
            let cy = tile.height_px as f64 / 2.0;
            PixelCoord::new(cx + rho * psi.sin(), cy - rho * psi.cos())
        }
    }
}

// ---------------------------------------------------------------------------
// Tangent-cube faces
// ---------------------------------------------------------------------------

/// Face order: +x, -x, +y, -y, +z (north), -z (south).
pub const CUBE_FACE_COUNT: usize = 6;

// (axis, right, down) basis per face.
const CUBE_BASES: [([f64; 3], [f64; 3], [f64; 3]); 6] = [
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]),
    ([-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]),
    ([0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]),
    ([0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]),
    ([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
    ([0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]),
];

/// Face edge length matching the density rule at the face center, where the
/// tangent plane's angular density `dx/dtheta` equals `side/2`.
pub fn cube_face_side(density: DensityRule) -> u32 {
    round_up_even(2.0 * density.pixels_per_radian())
}

/// Sphere position to (face index, face pixel position).
pub fn cube_forward(s: SphericalCoord, side: u32) -> (usize, PixelCoord) {
    let v = s.to_unit_vector();
    let (ax, ay, az) = (v[0].abs(), v[1].abs(), v[2].abs());
    let face = if ax >= ay && ax >= az {
        if v[0] >= 0.0 {
            0
        } else {
            1
        }
    } else if ay >= az {
        if v[1] >= 0.0 {
            2
        } else {
            3
        }
    } else if v[2] >= 0.0 {
        4
    } else {
        5
    };
    let (a, r, dn) = CUBE_BASES[face];
    let dot = |p: [f64; 3], q: [f64; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    let t = dot(v, a);
    let u = dot(v, r) / t;
    let w = dot(v, dn) / t;
    let half = side as f64 / 2.0;
    (face, PixelCoord::new((u + 1.0) * half, (w + 1.0) * half))
}

/// Face pixel position back to the sphere.
pub fn cube_inverse(face: usize, side: u32, p: PixelCoord) -> SphericalCoord {
    let (a, r, dn) = CUBE_BASES[face];
    let u = 2.0 * p.x / side as f64 - 1.0;
    let w = 2.0 * p.y / side as f64 - 1.0;
    let dir = [
        a[0] + u * r[0] + w * dn[0],
        a[1] + u * r[1] + w * dn[1],
        a[2] + u * r[2] + w * dn[2],
    ];
    SphericalCoord::from_unit_vector(dir)
}

// ---------------------------------------------------------------------------
// Remap engine
// ---------------------------------------------------------------------------

/// A decoded source that can be bilinearly sampled at any sphere position.
pub enum SourceProjection<'a> {
    Equirect(&'a PlanarImage),
    /// 6 equally sized square faces in +x, -x, +y, -y, +z, -z order.
    CubeFaces(&'a [PlanarImage]),
    Tiles {
        images: &'a [PlanarImage],
        geoms: &'a [TileGeometry],
        scheme: &'a TileScheme,
        /// Blend across overlap bands instead of hard-switching at borders.
        blend: bool,
    },
}

/// What to render from a source.
pub enum TargetPlan<'a> {
    Equirect { width: u32, height: u32 },
    CubeFaces { side: u32 },
    Tiles { geoms: &'a [TileGeometry] },
}

/// Renders every raster of `dst` by inverse-mapping each destination pixel
/// center to the sphere and bilinearly sampling `src` there. Black-fill
/// destination pixels become Y=0/Cb=Cr=128 (or black RGB). Deterministic
/// regardless of thread count.
pub fn remap(src: &SourceProjection, dst: &TargetPlan) -> Result<Vec<PlanarImage>> {
    let sampler = Sampler::new(src)?;
    match dst {
        TargetPlan::Equirect { width, height } => {
            let (w, h) = (*width, *height);
            Ok(vec![render(w, h, &sampler, |p| {
                Some(equirect_to_sphere(p, w, h))
            })])
        }
        TargetPlan::CubeFaces { side } => {
            let side = *side;
            Ok((0..CUBE_FACE_COUNT)
                .map(|face| {
                    render(side, side, &sampler, move |p| {
                        Some(cube_inverse(face, side, p))
                    })
                })
                .collect())
        }
        TargetPlan::Tiles { geoms } => Ok(geoms
            .iter()
            .map(|t| {
                render(t.width_px, t.height_px, &sampler, |p| {
                    tile_inverse_unchecked(t, p)
                })
            })
            .collect()),
    }
}

/// Reconstructs an equirectangular frame from decoded tiles, linearly
/// blending the shared `sigma*pi` band at every internal border so encoder
/// seams fade instead of stepping.
pub fn blend_overlaps(
    tiles: &[PlanarImage],
    scheme: &TileScheme,
    density: DensityRule,
    width: u32,
    height: u32,
) -> Result<PlanarImage> {
    let geoms = plan_tiles(scheme, density)?;
    let src = SourceProjection::Tiles {
        images: tiles,
        geoms: &geoms,
        scheme,
        blend: true,
    };
    Ok(remap(&src, &TargetPlan::Equirect { width, height })?.remove(0))
}

enum Sampler<'a> {
    Equirect(&'a PlanarImage),
    Cube {
        faces: &'a [PlanarImage],
        side: u32,
    },
    Tiles {
        images: &'a [PlanarImage],
        geoms: &'a [TileGeometry],
        cuts: &'a [f64],
        sigma: f64,
        blend: bool,
    },
}

impl<'a> Sampler<'a> {
    fn new(src: &'a SourceProjection<'a>) -> Result<Self> {
        match src {
            SourceProjection::Equirect(img) => Ok(Sampler::Equirect(img)),
            SourceProjection::CubeFaces(faces) => {
                if faces.len() != CUBE_FACE_COUNT {
                    return Err(Error::GeometryMismatch(format!(
                        "cube source needs 6 faces, got {}",
                        faces.len()
                    )));
                }
                let side = faces[0].width();
                for f in faces.iter() {
                    if f.width() != side || f.height() != side {
                        return Err(Error::GeometryMismatch(
                            "cube faces must be equal squares".into(),
                        ));
                    }
                }
                Ok(Sampler::Cube { faces, side })
            }
            SourceProjection::Tiles {
                images,
                geoms,
                scheme,
                blend,
            } => {
                if images.len() != geoms.len() {
                    return Err(Error::MissingTile(format!(
                        "scheme needs {} tiles, got {}",
                        geoms.len(),
                        images.len()
                    )));
                }
                for (img, geom) in images.iter().zip(geoms.iter()) {
                    if img.width() != geom.width_px || img.height() != geom.height_px {
                        return Err(Error::GeometryMismatch(format!(
                            "tile {} is {}x{}, geometry says {}x{}",
                            geom.id,
                            img.width(),
                            img.height(),
                            geom.width_px,
                            geom.height_px
                        )));
                    }
                }
                Ok(Sampler::Tiles {
                    images,
                    geoms,
                    cuts: scheme.cuts(),
                    sigma: scheme.sigma(),
                    blend: *blend,
                })
            }
        }
    }

    fn color(&self) -> ColorModel {
        match self {
            Sampler::Equirect(img) => img.color(),
            Sampler::Cube { faces, .. } => faces[0].color(),
            Sampler::Tiles { images, .. } => images[0].color(),
        }
    }

    fn sample(&self, s: SphericalCoord) -> [f64; 3] {
        match self {
            Sampler::Equirect(img) => {
                bilinear_sample(img, sphere_to_equirect(s, img.width(), img.height()), true)
            }
            Sampler::Cube { faces, side } => {
                let (face, p) = cube_forward(s, *side);
                bilinear_sample(&faces[face], p, false)
            }
            Sampler::Tiles {
                images,
                geoms,
                cuts,
                sigma,
                blend,
            } => {
                if *blend && *sigma > 0.0 {
                    if let Some((border, upper, lower)) = border_band(cuts, *sigma, s.lat()) {
                        let ext = sigma * PI / 2.0;
                        let w = ((s.lat() - (border - ext)) / (2.0 * ext)).clamp(0.0, 1.0);
                        if w >= 1.0 {
                            return sample_tile(&images[upper], &geoms[upper], s);
                        }
                        if w <= 0.0 {
                            return sample_tile(&images[lower], &geoms[lower], s);
                        }
                        let a = sample_tile(&images[upper], &geoms[upper], s);
                        let b = sample_tile(&images[lower], &geoms[lower], s);
                        return [
                            w * a[0] + (1.0 - w) * b[0],
                            w * a[1] + (1.0 - w) * b[1],
                            w * a[2] + (1.0 - w) * b[2],
                        ];
                    }
                }
                let id = owner_tile(cuts, s.lat());
                sample_tile(&images[id], &geoms[id], s)
            }
        }
    }
}

/// Tile id owning a latitude under the hard-border rule: the band owns
/// `|lat| < cuts[0]`, ring `j` owns `cuts[j-1] <= |lat| < cuts[j]`, the cap
/// owns the rest. Ids follow the [`plan_tiles`] order.
fn owner_tile(cuts: &[f64], lat: f64) -> usize {
    let n = cuts.len();
    let a = lat.abs();
    let j = cuts.iter().position(|&c| a < c);
    match j {
        Some(0) => 0,
        Some(j) => {
            if lat >= 0.0 {
                j
            } else {
                n + j
            }
        }
        None => {
            if lat >= 0.0 {
                n
            } else {
                2 * n
            }
        }
    }
}

/// If `lat` falls in the `sigma*pi` overlap band of some internal border,
/// returns `(border latitude, tile above, tile below)`.
fn border_band(cuts: &[f64], sigma: f64, lat: f64) -> Option<(f64, usize, usize)> {
    let n = cuts.len();
    let ext = sigma * PI / 2.0;
    for (j, &c) in cuts.iter().enumerate() {
        if (lat - c).abs() <= ext {
            let upper = if j + 1 == n { n } else { j + 1 };
            let lower = if j == 0 { 0 } else { j };
            return Some((c, upper, lower));
        }
        if (lat + c).abs() <= ext {
            let upper = if j == 0 { 0 } else { n + j };
            let lower = if j + 1 == n { 2 * n } else { n + j + 1 };
            return Some((-c, upper, lower));
        }
    }
    None
}

/// Bilinear sample inside one tile. Rect tiles wrap horizontally (full
/// longitude) and clamp vertically; cap tiles mask out taps whose centers
/// lie beyond the disc rim and renormalize, so corner fill never bleeds into
/// reconstructions.
fn sample_tile(img: &PlanarImage, geom: &TileGeometry, s: SphericalCoord) -> [f64; 3] {
    let p = tile_forward(geom, s);
    match geom.shape {
        TileShape::Rect => bilinear_sample(img, p, true),
        TileShape::DiscInSquare => {
            let w = img.width() as i64;
            let h = img.height() as i64;
            let u = p.x - 0.5;
            let v = p.y - 0.5;
            let x0 = u.floor();
            let y0 = v.floor();
            let fx = u - x0;
            let fy = v - y0;
            let x0 = x0 as i64;
            let y0 = y0 as i64;
            let cx = w as f64 / 2.0;
            let cy = h as f64 / 2.0;
            let rim = geom.cap_rim_px();

            let mut acc = [0.0f64; 3];
            let mut wsum = 0.0;
            for (dx, dy, wgt) in [
                (0i64, 0i64, (1.0 - fx) * (1.0 - fy)),
                (1, 0, fx * (1.0 - fy)),
                (0, 1, (1.0 - fx) * fy),
                (1, 1, fx * fy),
            ] {
                let tx = (x0 + dx).clamp(0, w - 1);
                let ty = (y0 + dy).clamp(0, h - 1);
                let px = tx as f64 + 0.5 - cx;
                let py = ty as f64 + 0.5 - cy;
                if (px * px + py * py).sqrt() > rim {
                    continue;
                }
                for plane in 0..img.plane_count() {
                    acc[plane] += wgt * img.get(plane, tx as u32, ty as u32) as f64;
                }
                wsum += wgt;
            }
            if wsum > 0.0 {
                for lane in &mut acc {
                    *lane /= wsum;
                }
                acc
            } else {
                bilinear_sample(img, p, false)
            }
        }
    }
}

fn render(
    width: u32,
    height: u32,
    src: &Sampler,
    inverse: impl Fn(PixelCoord) -> Option<SphericalCoord> + Sync,
) -> PlanarImage {
    let color = src.color();
    let fill = color.black_fill();
    let planes_n = color.plane_count();

    let rows: Vec<Vec<[u8; 3]>> = (0..height)
        .into_par_iter()
        .map(|y| {
            (0..width)
                .map(|x| {
                    let p = PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5);
                    match inverse(p) {
                        None => fill,
                        Some(s) => {
                            let v = src.sample(s);
                            [quantize(v[0]), quantize(v[1]), quantize(v[2])]
                        }
                    }
                })
                .collect()
        })
        .collect();

    let mut out = PlanarImage::new(width, height, color);
    for (y, row) in rows.iter().enumerate() {
        for (x, px) in row.iter().enumerate() {
            for plane in 0..planes_n {
                out.put(plane, x as u32, y as u32, px[plane]);
            }
        }
    }
    out
}

fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}
