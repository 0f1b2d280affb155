//! Flattened-area comparison of four sphere representations at the same
//! minimum on-sphere sample density.

use spheretile::optimizer::optimize_cuts;
use spheretile::scheme::{
    baseline_ratio, hemisphere_area, yu_equal_division_ratio, BaselineProjection, PoleStyle,
};

fn main() -> spheretile::Result<()> {
    let proposed = optimize_cuts(2, PoleStyle::SquarePole, 0.0)?;
    let rows = [
        (
            "equirectangular",
            baseline_ratio(BaselineProjection::Equirectangular),
        ),
        (
            "cubic (6 tangent faces)",
            baseline_ratio(BaselineProjection::Cubic),
        ),
        ("5-tile, equal division", yu_equal_division_ratio(2)?),
        (
            "5-tile, optimized cuts",
            hemisphere_area(&proposed.scheme).ratio_to_sphere,
        ),
    ];
    println!("{:<26} {:>8} {:>9}", "projection", "ratio", "percent");
    for (name, ratio) in rows {
        println!(
            "{name:<26} {ratio:>8.4} {:>8}%",
            (ratio * 100.0).round() as i64
        );
    }
    println!(
        "\noptimized cuts: {:?} deg",
        proposed
            .scheme
            .cuts()
            .iter()
            .map(|c| (c.to_degrees() * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
    Ok(())
}
