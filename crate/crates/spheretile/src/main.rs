//! Thin command-line front end; all real work happens in the library.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spheretile::error::Error;
use spheretile::geometry::PlanarImage;
use spheretile::io::{load_image, save_image};
use spheretile::layout::{compose_canvas, kind_code, pack, unpack, LayoutManifest, SchemeRecord};
use spheretile::metrics::{
    bd_rate, build_sampleset, load_rd_csv, lpsnr, spsnr, spsnr_chroma_weighted, WeightTable,
    DEFAULT_SAMPLE_COUNT,
};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{
    blend_overlaps, plan_tiles, remap, DensityRule, SourceProjection, TargetPlan,
};
use spheretile::scheme::{
    baseline_ratio, hemisphere_area, yu_equal_division_ratio, BaselineProjection, PoleStyle,
    TileScheme,
};

use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spheretile",
    version,
    about = "Latitude-tile segmentation, remapping, packing and sphere metrics for 360 video frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the area-minimizing cut latitudes for a tile count and overlap
    Optimize(OptimizeArgs),
    /// Split an equirectangular frame into tiles (optionally packed)
    Project(ProjectArgs),
    /// Rebuild an equirectangular frame from a packed canvas or tile files
    Unproject(UnprojectArgs),
    /// Sphere-aware quality metrics
    Metrics {
        #[command(subcommand)]
        metric: MetricCommand,
    },
    /// Compare flattened area across projections at equal sample density
    CompareArea(CompareAreaArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PoleArg {
    Circle,
    Square,
}

impl From<PoleArg> for PoleStyle {
    fn from(p: PoleArg) -> Self {
        match p {
            PoleArg::Circle => PoleStyle::CirclePole,
            PoleArg::Square => PoleStyle::SquarePole,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InFormat {
    Equirect,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Total tile count (odd, >= 3)
    #[arg(long)]
    tiles: u32,
    #[arg(long, value_enum, default_value = "square")]
    pole: PoleArg,
    /// Overlap in percent of frame height (0.5 means 0.5%)
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    input: PathBuf,
    /// WxH of raw .yuv input frames, e.g. 4096x2048
    #[arg(long, value_parser = parse_size)]
    size: Option<(u32, u32)>,
    #[arg(long, value_enum, default_value = "equirect")]
    in_format: InFormat,
    /// Scheme JSON file ({"cuts_deg": [...], "pole": "...", "sigma": ...} or a manifest)
    #[arg(long, conflicts_with_all = ["tiles", "cuts"])]
    scheme: Option<PathBuf>,
    /// Total tile count for an optimized scheme
    #[arg(long)]
    tiles: Option<u32>,
    /// Explicit cut latitudes in degrees, e.g. 35.07,53.17
    #[arg(long, value_delimiter = ',', conflicts_with = "tiles")]
    cuts: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "square")]
    pole: PoleArg,
    /// Overlap in percent of frame height
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long)]
    output: PathBuf,
    /// Pack all tiles into one canvas image
    #[arg(long)]
    pack: bool,
    /// Tile/canvas file format
    #[arg(long, default_value = "png")]
    format: String,
    /// External encoder template run on every written raster;
    /// {input}/{output} are substituted
    #[arg(long)]
    encoder_cmd: Option<String>,
}

#[derive(Args)]
struct UnprojectArgs {
    /// Packed canvas image, or a directory of tile files from `project`
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    /// Blend the overlap bands instead of hard-switching at borders
    #[arg(long)]
    blend: bool,
}

#[derive(Subcommand)]
enum MetricCommand {
    /// Sphere PSNR, all positions weighted equally
    Spsnr(PsnrArgs),
    /// Latitude-weighted sphere PSNR
    Lpsnr(PsnrArgs),
    /// Bjontegaard delta rate between two RD-curve CSVs
    Bdrate(BdrateArgs),
}

#[derive(Args)]
struct PsnrArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// WxH of a raw .yuv reference frame
    #[arg(long, value_parser = parse_size)]
    ref_size: Option<(u32, u32)>,
    /// WxH of a raw .yuv test frame
    #[arg(long, value_parser = parse_size)]
    test_size: Option<(u32, u32)>,
    /// Sphere sample count
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    samples: usize,
    /// Weight table file (lpsnr only); defaults to cos(latitude)
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Include chroma with 6:1:1 weighting (spsnr only)
    #[arg(long)]
    chroma: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BdrateArgs {
    #[arg(long)]
    anchor: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareAreaArgs {
    #[arg(long)]
    json: bool,
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        // parameter-level rejections are usage errors per the exit-code contract
        match e {
            Error::Infeasible(_) | Error::InvalidScheme(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize(args) => cmd_optimize(args),
        Command::Project(args) => cmd_project(args),
        Command::Unproject(args) => cmd_unproject(args),
        Command::Metrics { metric } => match metric {
            MetricCommand::Spsnr(args) => cmd_psnr(args, false),
            MetricCommand::Lpsnr(args) => cmd_psnr(args, true),
            MetricCommand::Bdrate(args) => cmd_bdrate(args),
        },
        Command::CompareArea(args) => cmd_compare_area(args),
    }
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let h = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    Ok((w, h))
}

fn cut_count_from_tiles(tiles: u32) -> Result<usize, CliError> {
    if tiles < 3 || tiles.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "tile count must be odd and >= 3 (an equator band plus mirrored rings and caps), got {tiles}"
        )));
    }
    Ok(((tiles - 1) / 2) as usize)
}

fn overlap_to_sigma(percent: f64) -> Result<f64, CliError> {
    if !(percent.is_finite() && percent >= 0.0) {
        return Err(CliError::Usage(format!(
            "overlap percentage must be finite and >= 0, got {percent}"
        )));
    }
    Ok(percent / 100.0)
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn round2(v: f64) -> f64 {
    (v * 1e2).round() / 1e2
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("report serialization")
    );
}

#[derive(Serialize)]
struct OptimizeReport {
    tiles: u32,
    pole: &'static str,
    overlap_percent: f64,
    cuts_deg: Vec<f64>,
    area_ratio: f64,
    converged: bool,
}

fn pole_name(p: PoleStyle) -> &'static str {
    match p {
        PoleStyle::CirclePole => "circle",
        PoleStyle::SquarePole => "square",
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let n = cut_count_from_tiles(args.tiles)?;
    let sigma = overlap_to_sigma(args.overlap)?;
    let result = optimize_cuts(n, args.pole.into(), sigma)?;
    let cuts_deg: Vec<f64> = result
        .scheme
        .cuts()
        .iter()
        .map(|c| round2(c.to_degrees()))
        .collect();
    if args.json {
        print_json(&OptimizeReport {
            tiles: args.tiles,
            pole: pole_name(args.pole.into()),
            overlap_percent: args.overlap,
            cuts_deg,
            area_ratio: round4(result.area.ratio_to_sphere),
            converged: result.converged,
        });
    } else {
        let angles: Vec<String> = cuts_deg
            .iter()
            .enumerate()
            .map(|(i, d)| format!("\u{3b8}{}={:.2}\u{b0}", i + 1, d))
            .collect();
        println!("{}", angles.join(" "));
        println!(
            "area ratio: {:.4} ({}% of sphere area)",
            result.area.ratio_to_sphere,
            result.area.percent()
        );
        if !result.converged {
            println!("warning: solver did not certify convergence");
        }
    }
    Ok(())
}

fn scheme_from_args(args: &ProjectArgs) -> Result<TileScheme, CliError> {
    let sigma = overlap_to_sigma(args.overlap)?;
    if let Some(path) = &args.scheme {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(e.into()))?;
        // a full manifest also carries a scheme block
        if let Ok(manifest) = LayoutManifest::from_json(&text) {
            return Ok(manifest.to_scheme()?);
        }
        let record: SchemeRecord =
            serde_json::from_str(&text).map_err(|e| CliError::Runtime(e.into()))?;
        return Ok(record.to_scheme()?);
    }
    if let Some(cuts) = &args.cuts {
        return Ok(TileScheme::from_degrees(cuts, args.pole.into(), sigma)?);
    }
    if let Some(tiles) = args.tiles {
        let n = cut_count_from_tiles(tiles)?;
        return Ok(optimize_cuts(n, args.pole.into(), sigma)?.scheme);
    }
    Err(CliError::Usage(
        "provide a scheme: --scheme FILE, --cuts d1,d2,... or --tiles N".into(),
    ))
}

fn run_encoder(template: &str, input: &Path) -> Result<(), CliError> {
    let output = input.with_extension("hevc");
    let cmd = template
        .replace("{input}", &input.display().to_string())
        .replace("{output}", &output.display().to_string());
    let status = std::process::Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .status()
        .map_err(|e| CliError::Runtime(e.into()))?;
    if !status.success() {
        return Err(CliError::Runtime(Error::Parse(format!(
            "encoder command failed with {status}: {cmd}"
        ))));
    }
    Ok(())
}

fn cmd_project(args: ProjectArgs) -> Result<(), CliError> {
    let source = load_image(&args.input, args.size)?;
    let scheme = scheme_from_args(&args)?;
    let density = DensityRule::from_equirect_height(source.height());
    let geoms = plan_tiles(&scheme, density)?;
    let tiles = remap(
        &SourceProjection::Equirect(&source),
        &TargetPlan::Tiles { geoms: &geoms },
    )?;
    let manifest = pack(&geoms, &scheme)?;

    std::fs::create_dir_all(&args.output).map_err(|e| CliError::Runtime(e.into()))?;
    let ext = args.format.to_ascii_lowercase();
    if !matches!(ext.as_str(), "png" | "ppm" | "pgm" | "yuv") {
        return Err(CliError::Usage(format!(
            "unsupported --format {ext:?} (png, ppm, pgm or yuv)"
        )));
    }

    let mut written = Vec::new();
    if args.pack {
        let canvas = compose_canvas(&manifest, &tiles)?;
        let path = args.output.join(format!("canvas.{ext}"));
        save_image(&path, &canvas)?;
        println!("wrote {}", path.display());
        written.push(path);
    } else {
        for (img, geom) in tiles.iter().zip(&geoms) {
            let path = args.output.join(format!(
                "tile_{:02}_{}.{ext}",
                geom.id,
                kind_code(&geom.kind)
            ));
            save_image(&path, img)?;
            println!("wrote {}", path.display());
            written.push(path);
        }
    }
    let manifest_path = args.output.join("manifest.json");
    manifest.save(&manifest_path)?;
    println!("wrote {}", manifest_path.display());

    if let Some(template) = &args.encoder_cmd {
        for path in &written {
            run_encoder(template, path)?;
        }
    }
    Ok(())
}

fn load_tiles_from_dir(
    dir: &Path,
    manifest: &LayoutManifest,
) -> Result<Vec<PlanarImage>, CliError> {
    let geoms = manifest.tile_geometries()?;
    geoms
        .iter()
        .map(|geom| {
            let stem = format!("tile_{:02}_{}", geom.id, kind_code(&geom.kind));
            for ext in ["png", "ppm", "pgm", "yuv"] {
                let path = dir.join(format!("{stem}.{ext}"));
                if path.exists() {
                    let size = Some((geom.width_px, geom.height_px));
                    return Ok(load_image(&path, size)?);
                }
            }
            Err(CliError::Runtime(Error::MissingTile(format!(
                "no {stem}.{{png,ppm,pgm,yuv}} in {}",
                dir.display()
            ))))
        })
        .collect()
}

fn cmd_unproject(args: UnprojectArgs) -> Result<(), CliError> {
    let manifest = LayoutManifest::load(&args.manifest)?;
    let scheme = manifest.to_scheme()?;
    let geoms = manifest.tile_geometries()?;
    let density = DensityRule::new(manifest.density_ppr)?;

    let tiles = if args.input.is_dir() {
        load_tiles_from_dir(&args.input, &manifest)?
    } else {
        let canvas = load_image(&args.input, Some((manifest.canvas_w, manifest.canvas_h)))?;
        unpack(&canvas, &manifest)?
    };

    let frame = if args.blend {
        blend_overlaps(&tiles, &scheme, density, args.width, args.height)?
    } else {
        remap(
            &SourceProjection::Tiles {
                images: &tiles,
                geoms: &geoms,
                scheme: &scheme,
                blend: false,
            },
            &TargetPlan::Equirect {
                width: args.width,
                height: args.height,
            },
        )?
        .remove(0)
    };
    save_image(&args.output, &frame)?;
    println!("wrote {}", args.output.display());
    Ok(())
}

#[derive(Serialize)]
struct PsnrReport {
    metric: &'static str,
    samples: usize,
    value_db: serde_json::Value,
}

fn db_value(db: f64) -> serde_json::Value {
    if db.is_finite() {
        serde_json::json!(round4(db))
    } else {
        serde_json::json!("inf")
    }
}

fn format_db(db: f64) -> String {
    if db.is_finite() {
        format!("{db:.4} dB")
    } else {
        "inf".into()
    }
}

fn cmd_psnr(args: PsnrArgs, latitude_weighted: bool) -> Result<(), CliError> {
    let reference = load_image(&args.reference, args.ref_size)?;
    let test = load_image(&args.test, args.test_size)?;
    if args.samples < 2 {
        return Err(CliError::Usage("need at least 2 sphere samples".into()));
    }
    let samples = build_sampleset(args.samples)?;

    let (name, db) = if latitude_weighted {
        let table = match &args.weights {
            Some(path) => WeightTable::load(path)?,
            None => WeightTable::cos_latitude(),
        };
        (
            "lpsnr",
            lpsnr(&reference.to_luma(), &test.to_luma(), &samples, &table)?,
        )
    } else if args.chroma {
        ("spsnr", spsnr_chroma_weighted(&reference, &test, &samples)?)
    } else {
        (
            "spsnr",
            spsnr(&reference.to_luma(), &test.to_luma(), &samples)?,
        )
    };

    if args.json {
        print_json(&PsnrReport {
            metric: name,
            samples: args.samples,
            value_db: db_value(db),
        });
    } else {
        let label = if latitude_weighted {
            "L-PSNR"
        } else {
            "S-PSNR"
        };
        println!("{label}: {}", format_db(db));
    }
    Ok(())
}

#[derive(Serialize)]
struct BdrateReport {
    bd_rate_percent: f64,
}

fn cmd_bdrate(args: BdrateArgs) -> Result<(), CliError> {
    let anchor = load_rd_csv(&args.anchor)?;
    let test = load_rd_csv(&args.test)?;
    let value = bd_rate(&anchor, &test)?;
    if args.json {
        print_json(&BdrateReport {
            bd_rate_percent: round4(value),
        });
    } else {
        println!("BD-rate: {value:+.2}%");
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareAreaReport {
    equirect: f64,
    cubic: f64,
    yu_5_tile: f64,
    proposed_5_tile: f64,
}

fn cmd_compare_area(args: CompareAreaArgs) -> Result<(), CliError> {
    let equirect = baseline_ratio(BaselineProjection::Equirectangular);
    let cubic = baseline_ratio(BaselineProjection::Cubic);
    let yu = yu_equal_division_ratio(2)?;
    let proposed_scheme = optimize_cuts(2, PoleStyle::SquarePole, 0.0)?.scheme;
    let proposed = hemisphere_area(&proposed_scheme).ratio_to_sphere;

    if args.json {
        print_json(&CompareAreaReport {
            equirect: round4(equirect),
            cubic: round4(cubic),
            yu_5_tile: round4(yu),
            proposed_5_tile: round4(proposed),
        });
    } else {
        println!("{:<28} {:>8} {:>9}", "projection", "ratio", "percent");
        for (name, ratio) in [
            ("equirectangular", equirect),
            ("cubic", cubic),
            ("5-tile equal division (Yu)", yu),
            ("5-tile optimized (square)", proposed),
        ] {
            println!(
                "{name:<28} {ratio:>8.4} {:>8}%",
                (ratio * 100.0).round() as i64
            );
        }
    }
    Ok(())
}
