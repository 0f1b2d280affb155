//! Optimal cut latitudes for 3- and 5-tile schemes at several overlaps,
//! printed as a table alongside the flattened-area ratio.

use spheretile::optimizer::optimize_cuts;
use spheretile::scheme::PoleStyle;

fn main() -> spheretile::Result<()> {
    println!(
        "{:<10} {:<8} {:>9} {:>22} {:>8}",
        "tiles", "pole", "overlap", "cuts (deg)", "ratio"
    );
    for pole in [PoleStyle::CirclePole, PoleStyle::SquarePole] {
        for n in [1usize, 2] {
            for overlap_pct in [0.0, 0.3, 0.5] {
                let result = optimize_cuts(n, pole, overlap_pct / 100.0)?;
                let cuts: Vec<String> = result
                    .scheme
                    .cuts()
                    .iter()
                    .map(|c| format!("{:.2}", c.to_degrees()))
                    .collect();
                println!(
                    "{:<10} {:<8} {:>8}% {:>22} {:>8.4}",
                    2 * n + 1,
                    match pole {
                        PoleStyle::CirclePole => "circle",
                        PoleStyle::SquarePole => "square",
                    },
                    overlap_pct,
                    cuts.join(", "),
                    result.area.ratio_to_sphere
                );
            }
        }
    }
    Ok(())
}
