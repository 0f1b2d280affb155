//! Angle conventions, sphere/plane coordinate transforms and the bilinear
//! resampler shared by every projection in the crate.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * Latitude is in radians in `[-pi/2, +pi/2]`, positive north.
//! * Longitude is in radians, normalized to the half-open range `[-pi, +pi)`.
//! * Pixel coordinates are continuous; sample `i` occupies the center
//!   `i + 0.5`, which makes forward/inverse mappings exactly inverse and
//!   resolution independent.

use crate::error::{Error, Result};

use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoord {
    lat: f64,
    lon: f64,
}

impl SphericalCoord {
    /// Builds a coordinate, clamping latitude to `[-pi/2, pi/2]` and wrapping
    /// longitude into `[-pi, pi)`.
    pub fn new(lat: f64, lon: f64) -> Self {
        debug_assert!(lat.is_finite() && lon.is_finite());
        Self {
            lat: lat.clamp(-PI / 2.0, PI / 2.0),
            lon: wrap_lon(lon),
        }
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// Unit direction vector (x toward lon 0, y toward lon +pi/2, z north).
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let (sin_lat, cos_lat) = self.lat.sin_cos();
        let (sin_lon, cos_lon) = self.lon.sin_cos();
        [cos_lat * cos_lon, cos_lat * sin_lon, sin_lat]
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let lat = (v[2] / norm).clamp(-1.0, 1.0).asin();
        let lon = v[1].atan2(v[0]);
        Self::new(lat, lon)
    }
}

/// Wraps a longitude into `[-pi, pi)`.
pub fn wrap_lon(lon: f64) -> f64 {
    let w = (lon + PI).rem_euclid(TAU) - PI;
    // rem_euclid can land on TAU for inputs a hair below a period boundary
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// A continuous position on a raster, in pixel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord {
    pub x: f64,
    pub y: f64,
}

impl PixelCoord {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Channel layout of a [`PlanarImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorModel {
    Gray,
    Rgb,
    /// Y, Cb, Cr held at full resolution; 4:2:0 subsampling is an I/O concern.
    Ycbcr,
}

impl ColorModel {
    pub fn plane_count(&self) -> usize {
        match self {
            ColorModel::Gray => 1,
            ColorModel::Rgb | ColorModel::Ycbcr => 3,
        }
    }

    /// Fill used for pixels that carry no scene content (pole-cap corners).
    pub fn black_fill(&self) -> [u8; 3] {
        match self {
            ColorModel::Gray => [0, 0, 0],
            ColorModel::Rgb => [0, 0, 0],
            ColorModel::Ycbcr => [0, 128, 128],
        }
    }
}

/// An 8-bit image stored as 1 (gray) or 3 full-resolution planes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarImage {
    width: u32,
    height: u32,
    color: ColorModel,
    planes: Vec<Vec<u8>>,
}

impl PlanarImage {
    /// Zero-filled image. Panics if `width` or `height` is zero.
    pub fn new(width: u32, height: u32, color: ColorModel) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        let size = width as usize * height as usize;
        Self {
            width,
            height,
            color,
            planes: vec![vec![0; size]; color.plane_count()],
        }
    }

    pub fn new_gray(width: u32, height: u32) -> Self {
        Self::new(width, height, ColorModel::Gray)
    }

    /// Builds a gray image from a per-pixel function of (x, y).
    pub fn from_fn_gray(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut img = Self::new_gray(width, height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                img.planes[0][(y * width + x) as usize] = v;
            }
        }
        img
    }

    /// Wraps existing planes. Every plane must hold exactly `width*height` samples.
    pub fn from_planes(
        width: u32,
        height: u32,
        color: ColorModel,
        planes: Vec<Vec<u8>>,
    ) -> Result<Self> {
        if width < 1 || height < 1 {
            return Err(Error::GeometryMismatch(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if planes.len() != color.plane_count() {
            return Err(Error::GeometryMismatch(format!(
                "expected {} planes, got {}",
                color.plane_count(),
                planes.len()
            )));
        }
        let size = width as usize * height as usize;
        if planes.iter().any(|p| p.len() != size) {
            return Err(Error::GeometryMismatch(format!(
                "every plane must hold {size} samples"
            )));
        }
        Ok(Self {
            width,
            height,
            color,
            planes,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn color(&self) -> ColorModel {
        self.color
    }

    pub fn plane_count(&self) -> usize {
        self.planes.len()
    }

    pub fn plane(&self, i: usize) -> &[u8] {
        &self.planes[i]
    }

    pub fn plane_mut(&mut self, i: usize) -> &mut [u8] {
        &mut self.planes[i]
    }

    pub fn get(&self, plane: usize, x: u32, y: u32) -> u8 {
        self.planes[plane][(y * self.width + x) as usize]
    }

    pub fn put(&mut self, plane: usize, x: u32, y: u32, value: u8) {
        let w = self.width;
        self.planes[plane][(y * w + x) as usize] = value;
    }

    /// Converts to a single-plane luma image (BT.601 for RGB sources).
    pub fn to_luma(&self) -> PlanarImage {
        match self.color {
            ColorModel::Gray => self.clone(),
            ColorModel::Ycbcr => PlanarImage {
                width: self.width,
                height: self.height,
                color: ColorModel::Gray,
                planes: vec![self.planes[0].clone()],
            },
            ColorModel::Rgb => {
                let luma = self.planes[0]
                    .iter()
                    .zip(&self.planes[1])
                    .zip(&self.planes[2])
                    .map(|((&r, &g), &b)| {
                        let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
                        y.round().clamp(0.0, 255.0) as u8
                    })
                    .collect();
                PlanarImage {
                    width: self.width,
                    height: self.height,
                    color: ColorModel::Gray,
                    planes: vec![luma],
                }
            }
        }
    }
}

/// Maps an equirectangular pixel position to the sphere (plate carrée).
///
/// The input is clamped to the `[0,w] x [0,h]` rectangle; the image center
/// maps to the equator/prime-meridian point.
pub fn equirect_to_sphere(p: PixelCoord, w: u32, h: u32) -> SphericalCoord {
    debug_assert!(w >= 1 && h >= 1);
    let x = p.x.clamp(0.0, w as f64);
    let y = p.y.clamp(0.0, h as f64);
    let lon = TAU * (x / w as f64) - PI;
    let lat = PI / 2.0 - PI * (y / h as f64);
    SphericalCoord::new(lat, lon)
}

/// Inverse of [`equirect_to_sphere`].
pub fn sphere_to_equirect(s: SphericalCoord, w: u32, h: u32) -> PixelCoord {
    let x = (s.lon() + PI) / TAU * w as f64;
    let y = (PI / 2.0 - s.lat()) / PI * h as f64;
    PixelCoord::new(x, y)
}

/// Bilinear sample of one plane at a continuous position.
///
/// Texels sit at centers `i + 0.5`. Rows clamp at the top and bottom edges
/// (no wrap across the poles); columns wrap when `wrap_x` is set (full
/// 360-degree sources) and clamp otherwise. Out-of-range positions clamp, so
/// sampling never fails.
pub fn bilinear_sample_plane(img: &PlanarImage, plane: usize, p: PixelCoord, wrap_x: bool) -> f64 {
    let w = img.width as i64;
    let h = img.height as i64;
    let data = &img.planes[plane];

    let u = p.x - 0.5;
    let v = p.y.clamp(0.0, img.height as f64) - 0.5;
    let x0 = u.floor();
    let y0 = v.floor();
    let fx = u - x0;
    let fy = v - y0;
    let x0 = x0 as i64;
    let y0 = y0 as i64;

    let col = |x: i64| -> i64 {
        if wrap_x {
            x.rem_euclid(w)
        } else {
            x.clamp(0, w - 1)
        }
    };
    let row = |y: i64| -> i64 { y.clamp(0, h - 1) };

    let (xa, xb) = (col(x0), col(x0 + 1));
    let (ya, yb) = (row(y0), row(y0 + 1));
    let at = |x: i64, y: i64| data[(y * w + x) as usize] as f64;

    let top = at(xa, ya) * (1.0 - fx) + at(xb, ya) * fx;
    let bot = at(xa, yb) * (1.0 - fx) + at(xb, yb) * fx;
    top * (1.0 - fy) + bot * fy
}

/// Bilinear sample of every plane; unused lanes stay zero.
pub fn bilinear_sample(img: &PlanarImage, p: PixelCoord, wrap_x: bool) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, lane) in out.iter_mut().enumerate().take(img.plane_count()) {
        *lane = bilinear_sample_plane(img, i, p, wrap_x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn equirect_center_is_origin() {
        let s = equirect_to_sphere(PixelCoord::new(1024.0, 512.0), 2048, 1024);
        assert_close(s.lat(), 0.0, 1e-15);
        assert_close(s.lon(), 0.0, 1e-15);
    }

    #[test]
    fn equirect_top_left_is_north_pole_edge() {
        let s = equirect_to_sphere(PixelCoord::new(0.0, 0.0), 640, 320);
        assert_close(s.lat(), PI / 2.0, 1e-15);
        assert_close(s.lon(), -PI, 1e-15);
    }

    #[test]
    fn equirect_linear_mapping() {
        let (w, h) = (4000, 2000);
        let s = equirect_to_sphere(PixelCoord::new(3.0 * w as f64 / 4.0, h as f64 / 4.0), w, h);
        assert_close(s.lat(), PI / 4.0, 1e-12);
        assert_close(s.lon(), PI / 2.0, 1e-12);
    }

    #[test]
    fn sphere_to_equirect_center_and_pole() {
        let (w, h) = (9104, 4552);
        let p = sphere_to_equirect(SphericalCoord::new(0.0, 0.0), w, h);
        assert_close(p.x, w as f64 / 2.0, 1e-9);
        assert_close(p.y, h as f64 / 2.0, 1e-9);

        let top = sphere_to_equirect(SphericalCoord::new(PI / 2.0, 1.234), w, h);
        assert_close(top.y, 0.0, 1e-12);
    }

    #[test]
    fn transforms_are_mutually_inverse() {
        // Deterministic LCG stand-in for 1000 random coordinates.
        let (w, h) = (1920, 960);
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let eps = 1e-6;
        let mut max_err: f64 = 0.0;
        for _ in 0..1000 {
            let lat = (next() - 0.5) * (PI - 2.0 * eps);
            let lon = (next() - 0.5) * TAU * 0.9999;
            let s = SphericalCoord::new(lat, lon);
            let round = equirect_to_sphere(sphere_to_equirect(s, w, h), w, h);
            max_err = max_err.max((round.lat() - lat).abs());
            max_err = max_err.max((round.lon() - lon).abs());
        }
        assert!(max_err < 1e-12, "max round-trip error {max_err}");
    }

    #[test]
    fn wrap_lon_half_open() {
        assert_close(wrap_lon(PI), -PI, 0.0);
        assert_close(wrap_lon(-PI), -PI, 0.0);
        assert_close(wrap_lon(3.0 * PI), -PI, 1e-15);
        assert_close(wrap_lon(PI / 2.0 + TAU), PI / 2.0, 1e-12);
        assert!(wrap_lon(PI - 1e-18) < PI);
    }

    #[test]
    fn bilinear_at_pixel_center_is_exact() {
        let img = PlanarImage::from_fn_gray(5, 4, |x, y| (x * 10 + y) as u8);
        for y in 0..4 {
            for x in 0..5 {
                let v = bilinear_sample_plane(
                    &img,
                    0,
                    PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5),
                    false,
                );
                assert_close(v, (x * 10 + y) as f64, 0.0);
            }
        }
    }

    #[test]
    fn bilinear_constant_image() {
        let img = PlanarImage::from_fn_gray(7, 3, |_, _| 93);
        for &(x, y) in &[(0.0, 0.0), (3.3, 1.7), (7.0, 3.0), (0.1, 2.9)] {
            let v = bilinear_sample_plane(&img, 0, PixelCoord::new(x, y), true);
            assert_close(v, 93.0, 1e-12);
        }
    }

    #[test]
    fn bilinear_midway_with_wrap() {
        // 2x1 image {10, 20}: midway between the two centers.
        let mut img = PlanarImage::new_gray(2, 1);
        img.put(0, 0, 0, 10);
        img.put(0, 1, 0, 20);
        let v = bilinear_sample_plane(&img, 0, PixelCoord::new(1.0, 0.5), true);
        assert_close(v, 15.0, 1e-12);
        // Wrapping midpoint between center 1.5 and center 0.5 (one period up).
        let v = bilinear_sample_plane(&img, 0, PixelCoord::new(2.0, 0.5), true);
        assert_close(v, 15.0, 1e-12);
    }

    #[test]
    fn bilinear_wrap_period() {
        let img = PlanarImage::from_fn_gray(9, 2, |x, y| (x * 7 + y * 3) as u8);
        for i in 0..40 {
            let x = i as f64 * 0.23;
            let p0 = bilinear_sample_plane(&img, 0, PixelCoord::new(x, 0.9), true);
            let p1 = bilinear_sample_plane(&img, 0, PixelCoord::new(x + 9.0, 0.9), true);
            assert_close(p0, p1, 1e-12);
        }
    }

    #[test]
    fn bilinear_is_convex() {
        let img = PlanarImage::from_fn_gray(6, 5, |x, y| (x * 31 + y * 17 % 255) as u8);
        let mut state: u64 = 12345;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = PixelCoord::new(next() * 6.0, next() * 5.0);
            let v = bilinear_sample_plane(&img, 0, p, false);
            assert!((0.0..=255.0).contains(&v));
            // convexity against the 4 support texels (centers at i + 0.5)
            let x0 = ((p.x - 0.5).floor() as i64).clamp(0, 5);
            let y0 = ((p.y - 0.5).floor() as i64).clamp(0, 4);
            let xs = [x0, (x0 + 1).min(5)];
            let ys = [y0, (y0 + 1).min(4)];
            let mut lo = f64::MAX;
            let mut hi = f64::MIN;
            for &sx in &xs {
                for &sy in &ys {
                    let t = img.get(0, sx as u32, sy as u32) as f64;
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
            }
            assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{v} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn luma_conversion() {
        let mut img = PlanarImage::new(2, 1, ColorModel::Rgb);
        img.put(0, 0, 0, 255);
        img.put(1, 0, 0, 0);
        img.put(2, 0, 0, 0);
        let l = img.to_luma();
        assert_eq!(l.get(0, 0, 0), 76); // 0.299 * 255
        assert_eq!(l.plane_count(), 1);
    }
}
