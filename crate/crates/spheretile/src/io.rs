//! Image file I/O: PNG, binary PPM/PGM, and raw planar YUV 4:2:0 frames.
//!
//! YUV chroma is upsampled to full resolution on load (bilinear) and
//! downsampled on save (2x2 mean); everything in memory works on
//! full-resolution planes. PNG/PPM carry gray or RGB samples, so YCbCr
//! images are converted with full-range BT.601 when saved to those formats.

use crate::error::{Error, Result};
use crate::geometry::{bilinear_sample_plane, ColorModel, PixelCoord, PlanarImage};

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
    Yuv420,
}

/// Picks a format from the file extension: png, ppm/pgm, yuv.
pub fn format_for_path(path: &Path) -> Result<ImageFormat> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => Ok(ImageFormat::Png),
        Some("ppm") | Some("pgm") => Ok(ImageFormat::Ppm),
        Some("yuv") => Ok(ImageFormat::Yuv420),
        other => Err(Error::UnsupportedFormat(format!(
            "cannot infer image format from extension {other:?} (use .png, .ppm, .pgm or .yuv)"
        ))),
    }
}

/// Loads an image; `yuv_size` is required for raw .yuv frames.
pub fn load_image(path: &Path, yuv_size: Option<(u32, u32)>) -> Result<PlanarImage> {
    match format_for_path(path)? {
        ImageFormat::Png => load_png(path),
        ImageFormat::Ppm => load_ppm(path),
        ImageFormat::Yuv420 => {
            let (w, h) = yuv_size.ok_or_else(|| {
                Error::UnsupportedFormat("raw YUV input needs an explicit size (W x H)".into())
            })?;
            load_yuv420(path, w, h)
        }
    }
}

/// Saves an image in the format implied by the extension.
pub fn save_image(path: &Path, img: &PlanarImage) -> Result<()> {
    match format_for_path(path)? {
        ImageFormat::Png => save_png(path, img),
        ImageFormat::Ppm => save_ppm(path, img),
        ImageFormat::Yuv420 => save_yuv420(path, img),
    }
}

fn load_png(path: &Path) -> Result<PlanarImage> {
    let decoder = png::Decoder::new(File::open(path)?);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "only 8-bit PNG is supported, got {:?}",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width, info.height);
    let size = w as usize * h as usize;
    let data = &buf[..info.buffer_size()];
    match info.color_type {
        png::ColorType::Grayscale => {
            PlanarImage::from_planes(w, h, ColorModel::Gray, vec![data.to_vec()])
        }
        png::ColorType::GrayscaleAlpha => {
            let plane = data.chunks_exact(2).map(|px| px[0]).collect();
            PlanarImage::from_planes(w, h, ColorModel::Gray, vec![plane])
        }
        png::ColorType::Rgb => {
            let mut planes: Vec<Vec<u8>> = (0..3).map(|_| Vec::with_capacity(size)).collect();
            for px in data.chunks_exact(3) {
                for (plane, v) in planes.iter_mut().zip(px) {
                    plane.push(*v);
                }
            }
            PlanarImage::from_planes(w, h, ColorModel::Rgb, planes)
        }
        png::ColorType::Rgba => {
            let mut planes: Vec<Vec<u8>> = (0..3).map(|_| Vec::with_capacity(size)).collect();
            for px in data.chunks_exact(4) {
                for (plane, v) in planes.iter_mut().zip(&px[..3]) {
                    plane.push(*v);
                }
            }
            PlanarImage::from_planes(w, h, ColorModel::Rgb, planes)
        }
        other => Err(Error::UnsupportedFormat(format!(
            "PNG color type {other:?}"
        ))),
    }
}

fn save_png(path: &Path, img: &PlanarImage) -> Result<()> {
    let rgbish;
    let img = match img.color() {
        ColorModel::Ycbcr => {
            rgbish = ycbcr_to_rgb(img);
            &rgbish
        }
        _ => img,
    };
    let file = BufWriter::new(File::create(path)?);
    let mut encoder = png::Encoder::new(file, img.width(), img.height());
    encoder.set_depth(png::BitDepth::Eight);
    match img.color() {
        ColorModel::Gray => {
            encoder.set_color(png::ColorType::Grayscale);
            let mut writer = encoder.write_header()?;
            writer.write_image_data(img.plane(0))?;
        }
        _ => {
            encoder.set_color(png::ColorType::Rgb);
            let mut writer = encoder.write_header()?;
            writer.write_image_data(&interleave3(img))?;
        }
    }
    Ok(())
}

fn interleave3(img: &PlanarImage) -> Vec<u8> {
    let size = img.width() as usize * img.height() as usize;
    let mut out = Vec::with_capacity(size * 3);
    for i in 0..size {
        out.push(img.plane(0)[i]);
        out.push(img.plane(1)[i]);
        out.push(img.plane(2)[i]);
    }
    out
}

fn load_ppm(path: &Path) -> Result<PlanarImage> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;

    let mut token = |bytes: &[u8]| -> Result<String> {
        // skip whitespace and '#' comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PNM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token(&bytes)?;
    let channels = match magic.as_str() {
        "P5" => 1usize,
        "P6" => 3usize,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "expected binary PNM magic P5/P6, got {other:?}"
            )))
        }
    };
    let w: u32 = token(&bytes)?
        .parse()
        .map_err(|_| Error::Parse("bad PNM width".into()))?;
    let h: u32 = token(&bytes)?
        .parse()
        .map_err(|_| Error::Parse("bad PNM height".into()))?;
    let maxval: u32 = token(&bytes)?
        .parse()
        .map_err(|_| Error::Parse("bad PNM maxval".into()))?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "PNM maxval {maxval} (only 255)"
        )));
    }
    pos += 1; // single whitespace after maxval
    let size = w as usize * h as usize;
    let need = size * channels;
    let data = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::Parse("PNM payload shorter than header promises".into()))?;
    if channels == 1 {
        PlanarImage::from_planes(w, h, ColorModel::Gray, vec![data.to_vec()])
    } else {
        let mut planes: Vec<Vec<u8>> = (0..3).map(|_| Vec::with_capacity(size)).collect();
        for px in data.chunks_exact(3) {
            for (plane, v) in planes.iter_mut().zip(px) {
                plane.push(*v);
            }
        }
        PlanarImage::from_planes(w, h, ColorModel::Rgb, planes)
    }
}

fn save_ppm(path: &Path, img: &PlanarImage) -> Result<()> {
    let rgbish;
    let img = match img.color() {
        ColorModel::Ycbcr => {
            rgbish = ycbcr_to_rgb(img);
            &rgbish
        }
        _ => img,
    };
    let mut out = BufWriter::new(File::create(path)?);
    match img.color() {
        ColorModel::Gray => {
            write!(out, "P5\n{} {}\n255\n", img.width(), img.height())?;
            out.write_all(img.plane(0))?;
        }
        _ => {
            write!(out, "P6\n{} {}\n255\n", img.width(), img.height())?;
            out.write_all(&interleave3(img))?;
        }
    }
    Ok(())
}

fn load_yuv420(path: &Path, w: u32, h: u32) -> Result<PlanarImage> {
    if w == 0 || h == 0 || !w.is_multiple_of(2) || !h.is_multiple_of(2) {
        return Err(Error::UnsupportedFormat(format!(
            "YUV 4:2:0 needs positive even dimensions, got {w}x{h}"
        )));
    }
    let y_size = w as usize * h as usize;
    let c_size = y_size / 4;
    let frame = y_size + 2 * c_size;
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < frame {
        return Err(Error::Parse(format!(
            "file holds {} bytes, one {w}x{h} 4:2:0 frame needs {frame}",
            bytes.len()
        )));
    }
    // frame 0 of a possibly multi-frame file
    let y = bytes[..y_size].to_vec();
    let cb = &bytes[y_size..y_size + c_size];
    let cr = &bytes[y_size + c_size..frame];
    let cb_full = upsample_chroma(cb, w, h);
    let cr_full = upsample_chroma(cr, w, h);
    PlanarImage::from_planes(w, h, ColorModel::Ycbcr, vec![y, cb_full, cr_full])
}

fn save_yuv420(path: &Path, img: &PlanarImage) -> Result<()> {
    let (w, h) = (img.width(), img.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::UnsupportedFormat(format!(
            "YUV 4:2:0 needs even dimensions, image is {w}x{h}"
        )));
    }
    let ycc;
    let img = match img.color() {
        ColorModel::Ycbcr => img,
        ColorModel::Rgb => {
            ycc = rgb_to_ycbcr(img);
            &ycc
        }
        ColorModel::Gray => {
            let size = w as usize * h as usize;
            ycc = PlanarImage::from_planes(
                w,
                h,
                ColorModel::Ycbcr,
                vec![img.plane(0).to_vec(), vec![128; size], vec![128; size]],
            )?;
            &ycc
        }
    };
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(ycc_y(img))?;
    out.write_all(&downsample_chroma(img.plane(1), w, h))?;
    out.write_all(&downsample_chroma(img.plane(2), w, h))?;
    Ok(())
}

fn ycc_y(img: &PlanarImage) -> &[u8] {
    img.plane(0)
}

/// Bilinear upsample of a half-resolution chroma plane; chroma sample (i, j)
/// is centered on the 2x2 luma block it came from.
fn upsample_chroma(chroma: &[u8], w: u32, h: u32) -> Vec<u8> {
    let cw = w / 2;
    let ch = h / 2;
    let small = PlanarImage::from_planes(cw, ch, ColorModel::Gray, vec![chroma.to_vec()])
        .expect("chroma plane size");
    let mut out = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h {
        for x in 0..w {
            let p = PixelCoord::new((x as f64 + 0.5) / 2.0, (y as f64 + 0.5) / 2.0);
            let v = bilinear_sample_plane(&small, 0, p, false);
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

/// 2x2 mean with round-half-up.
fn downsample_chroma(plane: &[u8], w: u32, h: u32) -> Vec<u8> {
    let w = w as usize;
    let mut out = Vec::with_capacity(w * h as usize / 4);
    for y in (0..h as usize).step_by(2) {
        for x in (0..w).step_by(2) {
            let sum = plane[y * w + x] as u32
                + plane[y * w + x + 1] as u32
                + plane[(y + 1) * w + x] as u32
                + plane[(y + 1) * w + x + 1] as u32;
            out.push(((sum + 2) / 4) as u8);
        }
    }
    out
}

/// Full-range BT.601 RGB to YCbCr.
pub fn rgb_to_ycbcr(img: &PlanarImage) -> PlanarImage {
    assert_eq!(img.color(), ColorModel::Rgb);
    let size = img.width() as usize * img.height() as usize;
    let mut planes: Vec<Vec<u8>> = (0..3).map(|_| Vec::with_capacity(size)).collect();
    for i in 0..size {
        let r = img.plane(0)[i] as f64;
        let g = img.plane(1)[i] as f64;
        let b = img.plane(2)[i] as f64;
        let y = 0.299 * r + 0.587 * g + 0.114 * b;
        let cb = 128.0 + (b - y) * 0.564;
        let cr = 128.0 + (r - y) * 0.713;
        planes[0].push(y.round().clamp(0.0, 255.0) as u8);
        planes[1].push(cb.round().clamp(0.0, 255.0) as u8);
        planes[2].push(cr.round().clamp(0.0, 255.0) as u8);
    }
    PlanarImage::from_planes(img.width(), img.height(), ColorModel::Ycbcr, planes)
        .expect("same-size planes")
}

/// Full-range BT.601 YCbCr to RGB.
pub fn ycbcr_to_rgb(img: &PlanarImage) -> PlanarImage {
    assert_eq!(img.color(), ColorModel::Ycbcr);
    let size = img.width() as usize * img.height() as usize;
    let mut planes: Vec<Vec<u8>> = (0..3).map(|_| Vec::with_capacity(size)).collect();
    for i in 0..size {
        let y = img.plane(0)[i] as f64;
        let cb = img.plane(1)[i] as f64 - 128.0;
        let cr = img.plane(2)[i] as f64 - 128.0;
        let r = y + 1.402 * cr;
        let g = y - 0.344136 * cb - 0.714136 * cr;
        let b = y + 1.772 * cb;
        planes[0].push(r.round().clamp(0.0, 255.0) as u8);
        planes[1].push(g.round().clamp(0.0, 255.0) as u8);
        planes[2].push(b.round().clamp(0.0, 255.0) as u8);
    }
    PlanarImage::from_planes(img.width(), img.height(), ColorModel::Rgb, planes)
        .expect("same-size planes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("spheretile-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn gray_pattern() -> PlanarImage {
        PlanarImage::from_fn_gray(12, 8, |x, y| (x * 19 + y * 31) as u8)
    }

    fn rgb_pattern() -> PlanarImage {
        let mut img = PlanarImage::new(6, 4, ColorModel::Rgb);
        for y in 0..4 {
            for x in 0..6 {
                img.put(0, x, y, (x * 40) as u8);
                img.put(1, x, y, (y * 60) as u8);
                img.put(2, x, y, (x * 10 + y * 20) as u8);
            }
        }
        img
    }

    #[test]
    fn png_round_trip() {
        for (name, img) in [("g.png", gray_pattern()), ("c.png", rgb_pattern())] {
            let path = tmp(name);
            save_image(&path, &img).unwrap();
            let back = load_image(&path, None).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn ppm_round_trip() {
        for (name, img) in [("g.pgm", gray_pattern()), ("c.ppm", rgb_pattern())] {
            let path = tmp(name);
            save_image(&path, &img).unwrap();
            let back = load_image(&path, None).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn yuv_round_trip_preserves_luma_exactly() {
        let (w, h) = (16u32, 8u32);
        let size = (w * h) as usize;
        let y: Vec<u8> = (0..size).map(|i| (i * 7 % 251) as u8).collect();
        let img = PlanarImage::from_planes(
            w,
            h,
            ColorModel::Ycbcr,
            vec![y.clone(), vec![90; size], vec![160; size]],
        )
        .unwrap();
        let path = tmp("f.yuv");
        save_image(&path, &img).unwrap();
        assert_eq!(
            std::fs::metadata(&path).unwrap().len(),
            (size + size / 2) as u64
        );
        let back = load_image(&path, Some((w, h))).unwrap();
        assert_eq!(back.plane(0), &y[..]);
        // constant chroma survives subsample/upsample exactly
        assert!(back.plane(1).iter().all(|&v| v == 90));
        assert!(back.plane(2).iter().all(|&v| v == 160));
    }

    #[test]
    fn yuv_needs_size_and_even_dims() {
        let path = tmp("f2.yuv");
        std::fs::write(&path, vec![0u8; 24]).unwrap();
        assert!(load_image(&path, None).is_err());
        assert!(load_image(&path, Some((3, 2))).is_err());
        assert!(load_image(&path, Some((64, 64))).is_err()); // too short
        assert!(load_image(&path, Some((4, 2))).is_ok());
    }

    #[test]
    fn unknown_extension_is_rejected() {
        assert!(format_for_path(Path::new("x.tiff")).is_err());
        assert!(format_for_path(Path::new("x")).is_err());
    }

    #[test]
    fn malformed_ppm_is_rejected() {
        let path = tmp("bad.ppm");
        std::fs::write(&path, b"P3\n2 2\n255\n...").unwrap();
        assert!(load_image(&path, None).is_err());
        std::fs::write(&path, b"P6\n4 4\n255\nxx").unwrap();
        assert!(load_image(&path, None).is_err());
    }

    #[test]
    fn color_conversion_round_trip_is_tight() {
        let img = rgb_pattern();
        let back = ycbcr_to_rgb(&rgb_to_ycbcr(&img));
        for plane in 0..3 {
            for (a, b) in img.plane(plane).iter().zip(back.plane(plane)) {
                assert!((*a as i16 - *b as i16).abs() <= 2, "{a} vs {b}");
            }
        }
    }
}
