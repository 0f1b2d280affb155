//! Tile segmentation schemes and their exact area model.
//!
//! A scheme cuts each hemisphere at ascending latitudes `theta_1 < ... <
//! theta_n`, producing `2n + 1` tiles: one band across the equator, `n - 1`
//! rings per hemisphere and two pole caps. Flattened, a ring between
//! `theta_{i-1}` and `theta_i` becomes a rectangle of width `2*pi*r*
//! cos(theta_{i-1})` (its equator-side circumference) and height
//! `r*(theta_i - theta_{i-1})`; a cap becomes a disc of radius
//! `r*(pi/2 - theta_n)`, optionally accounted as its bounding square when the
//! corners are black-filled for codec compatibility.
//!
//! Overlap is expressed as `sigma`, the fraction of total frame height each
//! internal border is extended by on *each* side (`sigma * pi / 2` radians),
//! so a shared overlap band spans `sigma * pi` radians and every interior
//! ring gains `sigma * pi` of height.

use crate::error::{Error, Result};
use crate::optimizer;

use std::f64::consts::PI;

/// How the pole-cap disc is accounted (and rasterized).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleStyle {
    /// Only the disc itself counts toward area.
    CirclePole,
    /// The disc's bounding square counts, corners black-filled.
    SquarePole,
}

impl PoleStyle {
    fn coefficient(&self) -> f64 {
        match self {
            PoleStyle::CirclePole => PI,
            PoleStyle::SquarePole => 4.0,
        }
    }
}

/// A validated segmentation scheme: ascending cut latitudes, pole style and
/// overlap fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct TileScheme {
    cuts: Vec<f64>,
    pole: PoleStyle,
    sigma: f64,
}

impl TileScheme {
    /// Validates `sigma*pi/2 < cuts[0] < ... < cuts[n-1] < pi/2 - sigma*pi/2`.
    pub fn new(cuts: Vec<f64>, pole: PoleStyle, sigma: f64) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::InvalidScheme(
                "at least one cut latitude required".into(),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidScheme(format!(
                "overlap fraction must be finite and >= 0, got {sigma}"
            )));
        }
        if cuts.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidScheme("cut latitudes must be finite".into()));
        }
        let ext = sigma * PI / 2.0;
        if cuts[0] <= ext {
            return Err(Error::InvalidScheme(format!(
                "cut 1 ({:.4} rad) must exceed the lower bound sigma*pi/2 ({:.4} rad)",
                cuts[0], ext
            )));
        }
        for i in 1..cuts.len() {
            if cuts[i] <= cuts[i - 1] {
                return Err(Error::InvalidScheme(format!(
                    "cut {} ({:.4} rad) must exceed cut {} ({:.4} rad)",
                    i + 1,
                    cuts[i],
                    i,
                    cuts[i - 1]
                )));
            }
        }
        let hi = PI / 2.0 - ext;
        if *cuts.last().unwrap() >= hi {
            return Err(Error::InvalidScheme(format!(
                "cut {} ({:.4} rad) must stay below the upper bound pi/2 - sigma*pi/2 ({:.4} rad)",
                cuts.len(),
                cuts.last().unwrap(),
                hi
            )));
        }
        Ok(Self { cuts, pole, sigma })
    }

    pub fn from_degrees(cuts_deg: &[f64], pole: PoleStyle, sigma: f64) -> Result<Self> {
        Self::new(
            cuts_deg.iter().map(|d| d.to_radians()).collect(),
            pole,
            sigma,
        )
    }

    /// Cut latitudes in radians, ascending, northern hemisphere.
    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn pole(&self) -> PoleStyle {
        self.pole
    }

    /// Overlap fraction of total height (0.005 = 0.5% overlap).
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Number of cuts per hemisphere.
    pub fn cut_count(&self) -> usize {
        self.cuts.len()
    }

    /// Total tiles: `2n + 1`.
    pub fn tile_count(&self) -> usize {
        2 * self.cuts.len() + 1
    }
}

/// Flattened area of one hemisphere's tiles and the derived sphere ratio
/// (unit radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaReport {
    pub hemisphere_area: f64,
    pub total_area: f64,
    pub ratio_to_sphere: f64,
}

impl AreaReport {
    fn from_hemisphere(hemisphere: f64) -> Self {
        let total = 2.0 * hemisphere;
        Self {
            hemisphere_area: hemisphere,
            total_area: total,
            ratio_to_sphere: total / (4.0 * PI),
        }
    }

    /// Ratio as a rounded integer percentage, as quoted in comparisons.
    pub fn percent(&self) -> i64 {
        (self.ratio_to_sphere * 100.0).round() as i64
    }
}

/// Flattened tile area of one hemisphere.
///
/// The equator band contributes half its area to each hemisphere, so the
/// full frame is exactly twice this value. With zero overlap this is the
/// plain ring/pole sum; a positive overlap extends the band term by
/// `sigma*pi/2`, every interior ring by `sigma*pi` and the pole extent by
/// `sigma*pi/2`, all through the same expression.
pub fn hemisphere_area(s: &TileScheme) -> AreaReport {
    AreaReport::from_hemisphere(hemisphere_area_raw(&s.cuts, s.pole, s.sigma))
}

/// Area evaluation on raw cut arrays; shared with the optimizer, which
/// evaluates candidate tuples long before they become validated schemes.
pub(crate) fn hemisphere_area_raw(cuts: &[f64], pole: PoleStyle, sigma: f64) -> f64 {
    let ext = sigma * PI / 2.0;
    let theta_p = *cuts.last().unwrap();
    let mut area = pole_area(pole, theta_p, sigma);
    area += 2.0 * PI * (cuts[0] + ext);
    for i in 1..cuts.len() {
        area += 2.0 * PI * cuts[i - 1].cos() * (cuts[i] - cuts[i - 1] + sigma * PI);
    }
    area
}

/// Pole-cap area (disc or bounding square) with overlap extension.
pub fn pole_area(pole: PoleStyle, theta_p: f64, sigma: f64) -> f64 {
    let extent = PI / 2.0 - theta_p + sigma * PI / 2.0;
    pole.coefficient() * extent * extent
}

/// Pole area under the latitude-resize construction used by earlier tile
/// work: the cap band keeps the full circumference at its lower edge,
/// `2*pi*(pi/2 - theta_p)*cos(theta_p)`, which exceeds both disc and square
/// accounting everywhere in `(0, pi/2)`.
pub fn yu_pole_area(theta_p: f64) -> Result<f64> {
    if !(theta_p > 0.0 && theta_p < PI / 2.0) {
        return Err(Error::OutOfDomain(format!(
            "pole latitude must lie in (0, pi/2), got {theta_p}"
        )));
    }
    Ok(2.0 * PI * (PI / 2.0 - theta_p) * theta_p.cos())
}

/// Whole-sphere baseline projections used for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineProjection {
    Equirectangular,
    Cubic,
}

/// Area ratio of a baseline projection at matched minimum sample density:
/// `pi/2` for equirectangular, `6/pi` for the tangent cube.
pub fn baseline_ratio(projection: BaselineProjection) -> f64 {
    match projection {
        BaselineProjection::Equirectangular => PI / 2.0,
        BaselineProjection::Cubic => 6.0 / PI,
    }
}

/// Sphere-area ratio of an equal-latitude-division scheme with the
/// full-circumference pole accounting of [`yu_pole_area`] (the historical
/// baseline the optimized schemes are compared against).
pub fn yu_equal_division_ratio(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain("need at least one cut".into()));
    }
    let step = PI / 2.0 / (n + 1) as f64;
    let cuts: Vec<f64> = (1..=n).map(|i| i as f64 * step).collect();
    let mut area = yu_pole_area(cuts[n - 1])?;
    area += 2.0 * PI * cuts[0];
    for i in 1..n {
        area += 2.0 * PI * cuts[i - 1].cos() * (cuts[i] - cuts[i - 1]);
    }
    Ok(2.0 * area / (4.0 * PI))
}

/// Minimal achievable area ratio per cut count `n = 1..=n_max`, for plotting
/// area-versus-tile-count curves. Each entry solves the full optimization.
pub fn area_vs_tilecount(n_max: usize, pole: PoleStyle, sigma: f64) -> Result<Vec<(usize, f64)>> {
    if n_max < 1 {
        return Err(Error::OutOfDomain("n_max must be >= 1".into()));
    }
    (1..=n_max)
        .map(|n| {
            Ok((
                n,
                optimizer::optimize_cuts(n, pole, sigma)?
                    .area
                    .ratio_to_sphere,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn square_pole_single_cut_area() {
        // cuts=[45 deg], square pole, no overlap:
        // 4*(pi/4)^2 + 2*pi*(pi/4)
        let s = TileScheme::from_degrees(&[45.0], PoleStyle::SquarePole, 0.0).unwrap();
        let report = hemisphere_area(&s);
        let expected = 4.0 * (PI / 4.0).powi(2) + 2.0 * PI * (PI / 4.0);
        assert_close(report.hemisphere_area, expected, 1e-12);
        assert_close(report.hemisphere_area, 7.4022, 5e-4);
        assert_close(report.ratio_to_sphere, 3.0 * PI / 8.0, 1e-12);
        assert_close(report.ratio_to_sphere, 1.178, 5e-4);
    }

    #[test]
    fn proposed_five_tile_matches_113_percent() {
        let s = TileScheme::from_degrees(&[35.07, 53.17], PoleStyle::SquarePole, 0.0).unwrap();
        let report = hemisphere_area(&s);
        assert_close(report.ratio_to_sphere, 1.134, 1e-3);
        assert_eq!(report.percent(), 113);
    }

    #[test]
    fn circle_pole_single_cut_area() {
        let theta = 32.70f64.to_radians();
        let s = TileScheme::new(vec![theta], PoleStyle::CirclePole, 0.0).unwrap();
        let report = hemisphere_area(&s);
        let expected = PI * (PI / 2.0 - theta).powi(2) + 2.0 * PI * theta;
        assert_close(report.hemisphere_area, expected, 1e-12);
        assert_close(report.hemisphere_area, 6.728, 1e-3);
    }

    #[test]
    fn yu_pole_values() {
        assert_close(
            yu_pole_area(PI / 4.0).unwrap(),
            2.0 * PI * (PI / 4.0) * (PI / 4.0).cos(),
            1e-12,
        );
        assert_close(yu_pole_area(PI / 4.0).unwrap(), 3.4894, 5e-4);
        assert_close(yu_pole_area(PI / 3.0).unwrap(), PI * PI / 6.0, 1e-12);
        assert!(yu_pole_area(0.0).is_err());
        assert!(yu_pole_area(PI / 2.0).is_err());
    }

    #[test]
    fn pole_accounting_ordering_at_45_degrees() {
        let theta = PI / 4.0;
        let yu = yu_pole_area(theta).unwrap();
        let square = pole_area(PoleStyle::SquarePole, theta, 0.0);
        let circle = pole_area(PoleStyle::CirclePole, theta, 0.0);
        assert_close(yu, 3.489, 1e-3);
        assert_close(square, 2.467, 1e-3);
        assert_close(circle, 1.937, 1e-3);
        assert!(yu > square && square > circle);
    }

    #[test]
    fn yu_pole_dominates_square_pole_on_grid() {
        let mut theta = 0.01;
        while theta < PI / 2.0 - 0.01 {
            let yu = yu_pole_area(theta).unwrap();
            let square = pole_area(PoleStyle::SquarePole, theta, 0.0);
            assert!(yu > square, "yu {yu} <= square {square} at theta {theta}");
            theta += 0.005;
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // published rounded values
    fn baseline_ratios() {
        let eq = baseline_ratio(BaselineProjection::Equirectangular);
        let cube = baseline_ratio(BaselineProjection::Cubic);
        assert_close(eq, 1.5708, 1e-4);
        assert_eq!((eq * 100.0).round() as i64, 157);
        assert_close(cube, 1.9099, 1e-4);
        let cube_pct = (cube * 100.0).round() as i64;
        assert!((190..=191).contains(&cube_pct));
    }

    #[test]
    fn yu_equal_division_five_tiles() {
        // cuts 30/60 deg with the full-circumference pole: ~123.9%
        let ratio = yu_equal_division_ratio(2).unwrap();
        assert_close(ratio, PI * (3.0 + 3.0f64.sqrt()) / 12.0, 1e-12);
        assert_close(ratio, 1.239, 1e-3);
    }

    #[test]
    fn validation_names_the_violated_bound() {
        let err = TileScheme::new(vec![0.001], PoleStyle::SquarePole, 0.01).unwrap_err();
        assert!(err.to_string().contains("cut 1"), "{err}");
        let err = TileScheme::new(vec![0.5, 0.4], PoleStyle::SquarePole, 0.0).unwrap_err();
        assert!(err.to_string().contains("cut 2"), "{err}");
        let err = TileScheme::new(vec![1.57], PoleStyle::SquarePole, 0.01).unwrap_err();
        assert!(err.to_string().contains("upper bound"), "{err}");
        assert!(TileScheme::new(vec![], PoleStyle::SquarePole, 0.0).is_err());
        assert!(TileScheme::new(vec![0.5], PoleStyle::SquarePole, -0.1).is_err());
    }

    #[test]
    fn area_is_strictly_increasing_in_sigma() {
        let cuts = vec![35.07f64.to_radians(), 53.17f64.to_radians()];
        let mut last = 0.0;
        for &sigma in &[0.0, 0.001, 0.003, 0.005, 0.007] {
            let s = TileScheme::new(cuts.clone(), PoleStyle::SquarePole, sigma).unwrap();
            let area = hemisphere_area(&s).hemisphere_area;
            assert!(area > last, "area {area} not above {last} at sigma {sigma}");
            last = area;
        }
    }

    #[test]
    fn circle_pole_below_square_pole_for_same_cuts() {
        for &sigma in &[0.0, 0.005] {
            let cuts = vec![0.5, 0.9];
            let sq = TileScheme::new(cuts.clone(), PoleStyle::SquarePole, sigma).unwrap();
            let ci = TileScheme::new(cuts, PoleStyle::CirclePole, sigma).unwrap();
            assert!(hemisphere_area(&ci).hemisphere_area < hemisphere_area(&sq).hemisphere_area);
        }
    }

    #[test]
    fn area_vs_tilecount_curves() {
        let flat = area_vs_tilecount(2, PoleStyle::SquarePole, 0.0).unwrap();
        assert_eq!(flat[0].0, 1);
        assert_close(flat[0].1, 1.178, 1e-3);
        assert_eq!(flat[1].0, 2);
        assert_close(flat[1].1, 1.134, 1e-3);

        // without overlap the ratio keeps approaching 1 from above
        let long = area_vs_tilecount(16, PoleStyle::SquarePole, 0.0).unwrap();
        for pair in long.windows(2) {
            assert!(pair[1].1 <= pair[0].1 + 1e-12);
        }
        assert!(long.last().unwrap().1 > 1.0);
        assert!(long.last().unwrap().1 < 1.04);

        // heavier overlap costs area at every tile count
        let light = area_vs_tilecount(8, PoleStyle::SquarePole, 0.001).unwrap();
        let heavy = area_vs_tilecount(8, PoleStyle::SquarePole, 0.007).unwrap();
        for ((_, a), (_, b)) in light.iter().zip(&heavy) {
            assert!(b > a);
        }
    }

    #[test]
    fn total_is_twice_hemisphere() {
        let s = TileScheme::from_degrees(&[30.0, 60.0], PoleStyle::CirclePole, 0.002).unwrap();
        let report = hemisphere_area(&s);
        assert_close(report.total_area, 2.0 * report.hemisphere_area, 0.0);
        assert_close(report.ratio_to_sphere, report.total_area / (4.0 * PI), 0.0);
    }
}
