//! Minimal area ratio as a function of tile count, with and without
//! overlap: more cuts help until the per-tile overlap overhead wins.

use spheretile::optimizer::best_tilecount;
use spheretile::scheme::{area_vs_tilecount, PoleStyle};

fn main() -> spheretile::Result<()> {
    let n_max = 20;

    println!("area ratio vs cut count (square pole):");
    println!("{:>4} {:>10} {:>10} {:>10}", "n", "0%", "0.3%", "0.5%");
    let flat = area_vs_tilecount(n_max, PoleStyle::SquarePole, 0.0)?;
    let mid = area_vs_tilecount(n_max, PoleStyle::SquarePole, 0.003)?;
    let wide = area_vs_tilecount(n_max, PoleStyle::SquarePole, 0.005)?;
    for ((n, a), ((_, b), (_, c))) in flat.iter().zip(mid.iter().zip(&wide)) {
        println!("{n:>4} {a:>10.4} {b:>10.4} {c:>10.4}");
    }

    println!("\nbest tile count per overlap:");
    for step in 1..=7 {
        let sigma = step as f64 * 0.001;
        let best = best_tilecount(sigma, PoleStyle::SquarePole, 25)?;
        println!(
            "  {:.1}% overlap -> {} tiles (ratio {:.4})",
            sigma * 100.0,
            best.scheme.tile_count(),
            best.area.ratio_to_sphere
        );
    }
    Ok(())
}
