//! Bjontegaard delta rate on rate-distortion curves, including the CSV form
//! the CLI consumes.

use spheretile::metrics::{bd_rate, parse_rd_csv, RateQualityPoint};

fn main() -> spheretile::Result<()> {
    let curve = |pts: &[(f64, f64)]| -> Vec<RateQualityPoint> {
        pts.iter()
            .map(|&(r, q)| RateQualityPoint {
                bitrate_kbps: r,
                quality_db: q,
            })
            .collect()
    };

    // four QP points per curve, as in typical HEVC sweeps
    let anchor = curve(&[
        (980.0, 31.8),
        (2100.0, 34.9),
        (4350.0, 38.2),
        (8900.0, 41.3),
    ]);
    let improved = curve(&[
        (800.0, 31.5),
        (1700.0, 35.1),
        (3600.0, 38.4),
        (7600.0, 41.0),
    ]);
    println!("improved vs anchor: {:+.2}%", bd_rate(&anchor, &improved)?);

    let pricier: Vec<RateQualityPoint> = anchor
        .iter()
        .map(|p| RateQualityPoint {
            bitrate_kbps: p.bitrate_kbps * 1.10,
            ..*p
        })
        .collect();
    println!("+10% bitrate shift: {:+.2}%", bd_rate(&anchor, &pricier)?);
    println!("curve vs itself:    {:+.2}%", bd_rate(&anchor, &anchor)?);

    // same computation from the CSV format
    let csv = "bitrate_kbps,psnr_db\n980,31.8\n2100,34.9\n4350,38.2\n8900,41.3\n";
    let parsed = parse_rd_csv(csv)?;
    println!(
        "parsed CSV ({} points) vs anchor: {:+.2}%",
        parsed.len(),
        bd_rate(&anchor, &parsed)?
    );
    Ok(())
}
