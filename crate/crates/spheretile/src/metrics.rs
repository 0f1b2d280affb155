//! Sphere-aware quality metrics: S-PSNR over a uniform sphere sample set,
//! latitude-weighted L-PSNR, and the Bjontegaard delta rate over
//! (bitrate, quality) curves.
//!
//! Both PSNR variants bilinearly sample the reference and the test frame at
//! every sphere sample point's equirectangular position, so the two frames
//! may differ in resolution (the reference is normally the denser ground
//! truth). Accumulation is chunked in a fixed order, which keeps results
//! bit-identical run to run.

use crate::error::{Error, Result};
use crate::geometry::{
    bilinear_sample_plane, sphere_to_equirect, wrap_lon, PlanarImage, SphericalCoord,
};

use std::f64::consts::PI;
use std::path::Path;

/// Default sphere sample count for the PSNR metrics.
pub const DEFAULT_SAMPLE_COUNT: usize = 655_362;

const CHUNK: usize = 4096;

/// Approximately uniform sample points on the sphere.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<SphericalCoord>,
}

impl SampleSet {
    /// Wraps caller-provided points; rejects sets smaller than 2 or with
    /// exact duplicates.
    pub fn from_points(points: Vec<SphericalCoord>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::EmptySampleSet);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            (points[a].lat(), points[a].lon())
                .partial_cmp(&(points[b].lat(), points[b].lon()))
                .unwrap()
        });
        for w in order.windows(2) {
            let (a, b) = (points[w[0]], points[w[1]]);
            if a.lat() == b.lat() && a.lon() == b.lon() {
                return Err(Error::Parse(format!(
                    "duplicate sample point (lat {}, lon {})",
                    a.lat(),
                    a.lon()
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[SphericalCoord] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Fibonacci-lattice sample set: latitudes take the `n` midpoints of a
/// uniform partition of z = sin(lat), longitudes advance by the golden
/// angle. Uniform per-band density, no duplicates, poles excluded.
pub fn build_sampleset(n: usize) -> Result<SampleSet> {
    if n < 2 {
        return Err(Error::EmptySampleSet);
    }
    let golden_angle = PI * (3.0 - 5.0f64.sqrt());
    let points = (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            SphericalCoord::new(z.asin(), wrap_lon(i as f64 * golden_angle))
        })
        .collect();
    Ok(SampleSet { points })
}

/// Latitude-to-weight function tabulated at 1-degree steps from -90 to +90,
/// normalized so the mean tabulated weight is 1. Lookups interpolate
/// linearly between neighboring entries.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    entries: [f64; 181],
}

impl WeightTable {
    fn normalized(mut entries: [f64; 181]) -> Result<Self> {
        if entries.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Parse("weights must be finite and >= 0".into()));
        }
        let mean = entries.iter().sum::<f64>() / 181.0;
        if mean <= 0.0 {
            return Err(Error::Parse("weight table must not be all zero".into()));
        }
        for w in &mut entries {
            *w /= mean;
        }
        Ok(Self { entries })
    }

    pub fn uniform() -> Self {
        Self {
            entries: [1.0; 181],
        }
    }

    /// cos(latitude), the default stand-in for unpublished viewing-frequency
    /// tables.
    pub fn cos_latitude() -> Self {
        let mut entries = [0.0; 181];
        for (i, w) in entries.iter_mut().enumerate() {
            *w = (i as f64 - 90.0).to_radians().cos().max(0.0);
        }
        Self::normalized(entries).expect("cos table is valid")
    }

    /// Builds the table from sparse (latitude_degrees, weight) pairs,
    /// linearly interpolating missing degrees and extending flat past the
    /// outermost entries.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Parse("weight table needs at least 2 entries".into()));
        }
        let mut sorted = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in &sorted {
            if !(pair.0 >= -90.0 && pair.0 <= 90.0) {
                return Err(Error::Parse(format!(
                    "latitude {} outside [-90, 90]",
                    pair.0
                )));
            }
        }
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse(format!("duplicate latitude {}", w[0].0)));
            }
        }
        let mut entries = [0.0; 181];
        for (i, entry) in entries.iter_mut().enumerate() {
            let deg = i as f64 - 90.0;
            *entry = if deg <= sorted[0].0 {
                sorted[0].1
            } else if deg >= sorted[sorted.len() - 1].0 {
                sorted[sorted.len() - 1].1
            } else {
                let hi = sorted.iter().position(|p| p.0 >= deg).unwrap();
                let (d0, w0) = sorted[hi - 1];
                let (d1, w1) = sorted[hi];
                let f = (deg - d0) / (d1 - d0);
                w0 + f * (w1 - w0)
            };
        }
        Self::normalized(entries)
    }

    /// Parses a plain-text table: one "latitude_degrees weight" pair per
    /// line, '#' starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected \"latitude_degrees weight\"",
                    lineno + 1
                )));
            };
            let lat: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad latitude {a:?}", lineno + 1)))?;
            let w: f64 = b
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad weight {b:?}", lineno + 1)))?;
            pairs.push((lat, w));
        }
        Self::from_pairs(&pairs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Weight at an arbitrary latitude (radians).
    pub fn weight(&self, lat: f64) -> f64 {
        let deg = (lat.to_degrees() + 90.0).clamp(0.0, 180.0);
        let i = deg.floor() as usize;
        if i >= 180 {
            return self.entries[180];
        }
        let f = deg - i as f64;
        if f == 0.0 {
            self.entries[i]
        } else {
            self.entries[i] * (1.0 - f) + self.entries[i + 1] * f
        }
    }

    pub fn entries(&self) -> &[f64; 181] {
        &self.entries
    }
}

fn weighted_mse(
    reference: &PlanarImage,
    test: &PlanarImage,
    samples: &SampleSet,
    plane: usize,
    weight: &dyn Fn(f64) -> f64,
) -> (f64, f64) {
    let (rw, rh) = (reference.width(), reference.height());
    let (tw, th) = (test.width(), test.height());
    let mut err_total = 0.0;
    let mut weight_total = 0.0;
    for chunk in samples.points().chunks(CHUNK) {
        let mut err = 0.0;
        let mut wsum = 0.0;
        for s in chunk {
            let a = bilinear_sample_plane(reference, plane, sphere_to_equirect(*s, rw, rh), true);
            let b = bilinear_sample_plane(test, plane, sphere_to_equirect(*s, tw, th), true);
            let w = weight(s.lat());
            let d = a - b;
            err += w * d * d;
            wsum += w;
        }
        err_total += err;
        weight_total += wsum;
    }
    (err_total, weight_total)
}

fn mse_to_db(mse: f64) -> f64 {
    if mse <= 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// Sphere PSNR over the luma plane, all sample positions weighted equally.
/// Identical frames yield `f64::INFINITY`.
pub fn spsnr(reference: &PlanarImage, test: &PlanarImage, samples: &SampleSet) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let (err, wsum) = weighted_mse(reference, test, samples, 0, &|_| 1.0);
    Ok(mse_to_db(err / wsum))
}

/// Latitude-weighted sphere PSNR; a uniform table reduces this to [`spsnr`].
pub fn lpsnr(
    reference: &PlanarImage,
    test: &PlanarImage,
    samples: &SampleSet,
    weights: &WeightTable,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let (err, wsum) = weighted_mse(reference, test, samples, 0, &|lat| weights.weight(lat));
    if wsum <= 0.0 {
        return Err(Error::OutOfDomain(
            "weight table is zero at every sample latitude".into(),
        ));
    }
    Ok(mse_to_db(err / wsum))
}

/// S-PSNR over all three planes with 6:1:1 luma/chroma weighting.
pub fn spsnr_chroma_weighted(
    reference: &PlanarImage,
    test: &PlanarImage,
    samples: &SampleSet,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if reference.plane_count() != 3 || test.plane_count() != 3 {
        return Err(Error::GeometryMismatch(
            "chroma-weighted metric needs 3-plane images".into(),
        ));
    }
    let mut mse = [0.0; 3];
    for (plane, slot) in mse.iter_mut().enumerate() {
        let (err, wsum) = weighted_mse(reference, test, samples, plane, &|_| 1.0);
        *slot = err / wsum;
    }
    Ok(mse_to_db((6.0 * mse[0] + mse[1] + mse[2]) / 8.0))
}

/// One point of a rate-distortion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQualityPoint {
    pub bitrate_kbps: f64,
    pub quality_db: f64,
}

/// Bjontegaard delta rate of `test` against `anchor`, in percent: average
/// bitrate difference at equal quality; negative means `test` is cheaper.
///
/// Each curve's log10(bitrate) is fit with a cubic polynomial of quality and
/// the difference is integrated over the common quality interval.
pub fn bd_rate(anchor: &[RateQualityPoint], test: &[RateQualityPoint]) -> Result<f64> {
    let fa = CubicFit::fit(anchor)?;
    let fb = CubicFit::fit(test)?;
    let lo = fa.q_min.max(fb.q_min);
    let hi = fa.q_max.min(fb.q_max);
    if !(hi > lo) {
        return Err(Error::NoQualityOverlap {
            a_lo: fa.q_min,
            a_hi: fa.q_max,
            b_lo: fb.q_min,
            b_hi: fb.q_max,
        });
    }
    let delta = (fb.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
    Ok((10.0f64.powf(delta) - 1.0) * 100.0)
}

/// Least-squares cubic of log10(bitrate) as a function of quality, in a
/// centered/scaled basis for conditioning.
struct CubicFit {
    coeffs: [f64; 4],
    center: f64,
    scale: f64,
    q_min: f64,
    q_max: f64,
}

impl CubicFit {
    fn fit(points: &[RateQualityPoint]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::TooFewPoints(points.len()));
        }
        for p in points {
            if !(p.bitrate_kbps > 0.0 && p.bitrate_kbps.is_finite() && p.quality_db.is_finite()) {
                return Err(Error::OutOfDomain(format!(
                    "rate point ({}, {}) is not a positive finite pair",
                    p.bitrate_kbps, p.quality_db
                )));
            }
        }
        let q_min = points.iter().map(|p| p.quality_db).fold(f64::MAX, f64::min);
        let q_max = points.iter().map(|p| p.quality_db).fold(f64::MIN, f64::max);
        if !(q_max > q_min) {
            return Err(Error::OutOfDomain(
                "rate curve spans zero quality range".into(),
            ));
        }
        let center = (q_min + q_max) / 2.0;
        let scale = (q_max - q_min) / 2.0;

        // normal equations in the scaled variable
        let mut gram = [[0.0f64; 4]; 4];
        let mut rhs = [0.0f64; 4];
        for p in points {
            let x = (p.quality_db - center) / scale;
            let y = p.bitrate_kbps.log10();
            let powers = [1.0, x, x * x, x * x * x];
            for j in 0..4 {
                rhs[j] += y * powers[j];
                for k in 0..4 {
                    gram[j][k] += powers[j] * powers[k];
                }
            }
        }
        let coeffs = solve4(gram, rhs).ok_or_else(|| {
            Error::OutOfDomain("degenerate rate curve (repeated quality values)".into())
        })?;
        Ok(Self {
            coeffs,
            center,
            scale,
            q_min,
            q_max,
        })
    }

    /// Integral of the fitted polynomial over `[lo, hi]` in quality units.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let anti = |q: f64| {
            let x = (q - self.center) / self.scale;
            let c = &self.coeffs;
            // scale * (c0 x + c1 x^2/2 + c2 x^3/3 + c3 x^4/4)
            self.scale
                * (c[0] * x
                    + c[1] * x * x / 2.0
                    + c[2] * x * x * x / 3.0
                    + c[3] * x * x * x * x / 4.0)
        };
        anti(hi) - anti(lo)
    }
}

/// Gaussian elimination with partial pivoting for the 4x4 normal equations.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot =
            (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut v = b[col];
        for k in col + 1..4 {
            v -= a[col][k] * x[k];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

/// Parses an RD-curve CSV with the exact header `bitrate_kbps,psnr_db`.
pub fn parse_rd_csv(text: &str) -> Result<Vec<RateQualityPoint>> {
    let mut lines = text.lines();
    let header = lines.next().map(str::trim).unwrap_or_default();
    if header != "bitrate_kbps,psnr_db" {
        return Err(Error::Parse(format!(
            "expected header \"bitrate_kbps,psnr_db\", got {header:?}"
        )));
    }
    let mut points = Vec::new();
    for (lineno, raw) in lines.enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected two columns",
                lineno + 2
            )));
        };
        let bitrate: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad bitrate {a:?}", lineno + 2)))?;
        let quality: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad psnr {b:?}", lineno + 2)))?;
        points.push(RateQualityPoint {
            bitrate_kbps: bitrate,
            quality_db: quality,
        });
    }
    Ok(points)
}

pub fn load_rd_csv(path: &Path) -> Result<Vec<RateQualityPoint>> {
    parse_rd_csv(&std::fs::read_to_string(path)?)
}
