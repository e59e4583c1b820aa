//! Command-line front end: enhance, synth, metrics and bench.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod bench;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_ev_list, FileConfig};
use stackfuse::enhance::BilateralParams;
use stackfuse::exposure::{synth_exposure_stack, Approach, ExposureCompConfig, DEFAULT_EPSILON};
use stackfuse::fusion::FusionRegistry;
use stackfuse::image::{LuminanceMap, RgbImage};
use stackfuse::io::{load_image_auto, save_image_auto, ImageFormat};
use stackfuse::metrics::{mean_de2000, statistical_naturalness, MetricReport};
use stackfuse::pipeline::{self, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "stackfuse",
    version,
    about = "Single-image exposure stack synthesis and multi-exposure fusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance one photo: synthesize pseudo exposures and fuse them
    Enhance(EnhanceArgs),
    /// Map an HDR image to a clamped LDR exposure stack
    Synth(SynthArgs),
    /// Quality metrics for an image or image pair
    Metrics(MetricsArgs),
    /// Run scenes from a manifest and tabulate metric results
    Bench(BenchArgs),
}

#[derive(Args)]
struct EnhanceArgs {
    /// Input image (png/ppm/hdr/pfm)
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output image (png/ppm)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Exposure estimation approach: 'a' (needs --ev) or 'b'
    #[arg(long)]
    approach: Option<String>,
    /// Exposure value of the input image in EV units (approach A)
    #[arg(long, allow_hyphen_values = true)]
    ev: Option<f64>,
    /// Comma-separated target EVs for the pseudo exposures
    #[arg(long, allow_hyphen_values = true)]
    evs: Option<String>,
    /// Spatial sigma of the bilateral filter, in pixels
    #[arg(long)]
    sigma_spatial: Option<f64>,
    /// Range sigma of the bilateral filter, in luminance units
    #[arg(long)]
    sigma_range: Option<f64>,
    /// Bilateral window truncation radius, in pixels
    #[arg(long)]
    window_radius: Option<usize>,
    /// Luminance floor for geometric means
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fusion backend name
    #[arg(long)]
    fusion: Option<String>,
    /// Also write the enhanced luminance and each pseudo exposure
    #[arg(long)]
    emit_intermediates: bool,
    /// key=value config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// HDR input image (.hdr/.pfm)
    #[arg(short, long)]
    input: PathBuf,
    /// Output stem; members are written as <stem>_ev<EV>.png
    #[arg(short, long)]
    output: PathBuf,
    /// Comma-separated EVs of the stack members
    #[arg(long, allow_hyphen_values = true, default_value = "-1,0,1")]
    evs: String,
    /// Luminance floor for the geometric-mean anchor
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct MetricsArgs {
    /// Which metrics to emit
    #[arg(long, value_parser = ["ciede2000", "naturalness", "all"], default_value = "all")]
    which: String,
    /// Image under test
    image_a: PathBuf,
    /// Reference image (required for ciede2000)
    image_b: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Scene manifest: one scene per line as key=value tokens
    #[arg(long)]
    manifest: PathBuf,
    /// Write the result table here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }
}

impl From<stackfuse::io::IoError> for CliError {
    fn from(e: stackfuse::io::IoError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enhance(args) => cmd_enhance(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Bench(args) => bench::cmd_bench(args.manifest, args.output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_enhance(args: EnhanceArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path).map_err(CliError::usage)?,
        None => FileConfig::default(),
    };

    let input = args
        .input
        .or_else(|| file.get("input").map(PathBuf::from))
        .ok_or_else(|| CliError::usage("missing --input (or 'input' in the config file)"))?;
    let output = args
        .output
        .or_else(|| file.get("output").map(PathBuf::from))
        .ok_or_else(|| CliError::usage("missing --output (or 'output' in the config file)"))?;

    let approach = match args
        .approach
        .as_deref()
        .or_else(|| file.get("approach"))
        .unwrap_or("b")
        .parse::<Approach>()
    {
        Ok(approach) => approach,
        Err(e) => return Err(CliError::usage(e)),
    };
    let known_ev = match args.ev {
        Some(ev) => Some(ev),
        None => file
            .get_parsed::<f64>("ev")
            .map_err(CliError::usage)?,
    };
    if approach == Approach::A && known_ev.is_none() {
        return Err(CliError::usage(
            "approach A is only available when the input's exposure value is known; pass --ev",
        ));
    }

    let evs_raw = args.evs.as_deref().or_else(|| file.get("evs"));
    let target_evs = match evs_raw {
        Some(raw) => parse_ev_list(raw).map_err(CliError::usage)?,
        None => stackfuse::exposure::DEFAULT_TARGET_EVS.to_vec(),
    };

    let epsilon = match args.epsilon {
        Some(v) => v,
        None => file
            .get_parsed::<f64>("epsilon")
            .map_err(CliError::usage)?
            .unwrap_or(DEFAULT_EPSILON),
    };

    let sigma_spatial = match args.sigma_spatial {
        Some(v) => v,
        None => file
            .get_parsed::<f64>("sigma_spatial")
            .map_err(CliError::usage)?
            .unwrap_or(stackfuse::enhance::DEFAULT_SIGMA_SPATIAL),
    };
    let sigma_range = match args.sigma_range {
        Some(v) => v,
        None => file
            .get_parsed::<f64>("sigma_range")
            .map_err(CliError::usage)?
            .unwrap_or(stackfuse::enhance::DEFAULT_SIGMA_RANGE),
    };
    let window_radius = match args.window_radius {
        Some(v) => Some(v),
        None => file
            .get_parsed::<usize>("window_radius")
            .map_err(CliError::usage)?,
    };
    let bilateral = match window_radius {
        Some(radius) => BilateralParams::new(sigma_spatial, sigma_range, radius),
        None => BilateralParams::with_default_radius(sigma_spatial, sigma_range),
    }
    .map_err(|e| CliError::usage(e.to_string()))?;

    let fusion_backend = args
        .fusion
        .or_else(|| file.get("fusion").map(str::to_string))
        .unwrap_or_else(|| "mertens".to_string());

    let emit_intermediates = args.emit_intermediates
        || matches!(file.get("emit_intermediates"), Some("true") | Some("1"));

    let config = PipelineConfig {
        exposure: ExposureCompConfig {
            approach,
            known_ev,
            target_evs,
            epsilon,
            ..Default::default()
        },
        bilateral,
        fusion_backend,
    };

    let img = load_image_auto(&input)?;
    let registry = FusionRegistry::with_builtins();
    let out = pipeline::run(&img, &config, &registry)
        .map_err(|e| CliError::runtime(e.to_string()))?;

    save_image_auto(&out.fused, &output)?;

    if emit_intermediates {
        let lc_path = sibling_path(&output, "_lc");
        save_image_auto(&luminance_to_rgb(&out.enhanced_luminance), &lc_path)?;
        for member in out.pseudo_exposures.members() {
            let path = sibling_path(&output, &format!("_ev{:+.1}", member.ev));
            save_image_auto(&member.image, &path)?;
        }
    }
    Ok(())
}

/// `<dir>/<stem><suffix>.png` next to `base`.
fn sibling_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    base.with_file_name(format!("{stem}{suffix}.png"))
}

fn luminance_to_rgb(map: &LuminanceMap) -> RgbImage {
    RgbImage::from_pixels(
        map.width(),
        map.height(),
        map.values().iter().map(|&v| [v, v, v]).collect(),
    )
    .expect("map dimensions are valid")
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let evs = parse_ev_list(&args.evs).map_err(CliError::usage)?;
    let format = ImageFormat::from_path(&args.input);
    if !matches!(format, Some(ImageFormat::RadianceHdr | ImageFormat::Pfm)) {
        return Err(CliError::runtime(format!(
            "synth needs an HDR input (.hdr or .pfm), got {}",
            args.input.display()
        )));
    }
    let hdr = load_image_auto(&args.input)?;
    let stack = synth_exposure_stack(&hdr, &evs, args.epsilon)
        .map_err(|e| CliError::runtime(e.to_string()))?;

    let stem = args.output.to_string_lossy().into_owned();
    for member in stack.members() {
        let path = PathBuf::from(format!("{stem}_ev{:+.1}.png", member.ev));
        stackfuse::io::save_image(&member.image, &path, ImageFormat::Png8)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let image_a = load_image_auto(&args.image_a)?;
    let image_b = match &args.image_b {
        Some(path) => Some(load_image_auto(path)?),
        None => None,
    };

    let mut report = MetricReport {
        image_a: args.image_a.display().to_string(),
        image_b: args.image_b.as_ref().map(|p| p.display().to_string()),
        ..Default::default()
    };

    if matches!(args.which.as_str(), "ciede2000" | "all") {
        let reference = image_b.as_ref().ok_or_else(|| {
            CliError::usage("ciede2000 needs two images: <image_a> <image_b>")
        })?;
        let value = mean_de2000(&image_a, reference)
            .map_err(|e| CliError::usage(e.to_string()))?;
        report.mean_de2000 = Some(value);
    }
    if matches!(args.which.as_str(), "naturalness" | "all") {
        report.statistical_naturalness = Some(statistical_naturalness(&image_a));
    }

    println!("{report}");
    Ok(())
}
