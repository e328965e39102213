use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bendseg::contour::{bend_contours, BendConfig};
use bendseg::hover::{postprocess, HoVerMaps, PostprocessConfig};
use bendseg::loss::{total_loss, LossConfig, PixelLoss};
use bendseg::metrics::evaluate;
use bendseg::raster::{
    decode_binary, decode_labels, decode_scalar, encode_labels, encode_labels_8bit, encode_scalar, LabelMap,
};
use bendseg::synth::{gen_scene, SceneParams};
use clap::{Parser, Subcommand};

/// Ellipse semi-axis range used by `synth`.
const SYNTH_RADII: (f64, f64) = (6.0, 10.0);

#[derive(Parser)]
#[command(name = "bendseg", version, about = "Contour bending energy, segmentation metrics and nuclei splitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bending loss of a binary mask.
    Bend {
        #[arg(long)]
        mask: PathBuf,
        /// Energy assigned at 180° reversals.
        #[arg(long)]
        cap: Option<f64>,
        /// Per-point energies as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// 8-bit PGM with contour pixels binned by energy.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Data term plus weighted bending term of a prediction.
    Loss {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_kind)]
        l1: PixelLoss,
    },
    /// AJI, Dice, RQ, SQ and PQ of a predicted label map.
    Metrics {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Split a probability map into instances using its distance maps.
    Postprocess {
        #[arg(long)]
        prob: PathBuf,
        #[arg(long = "hover-h")]
        hover_h: PathBuf,
        #[arg(long = "hover-v")]
        hover_v: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long = "min-size")]
        min_size: Option<usize>,
    },
    /// Write a synthetic scene: gt.pgm, prob.sf32, hover_h.sf32, hover_v.sf32.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        count: usize,
        #[arg(long = "overlap-pairs")]
        overlap_pairs: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn parse_kind(s: &str) -> Result<PixelLoss, String> {
    s.parse::<PixelLoss>().map_err(|e| e.to_string())
}

enum Failure {
    Io(String),
    Lib(bendseg::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Lib(bendseg::Error::Format { .. }) => 2,
            Failure::Lib(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

impl From<bendseg::Error> for Failure {
    fn from(e: bendseg::Error) -> Self {
        Failure::Lib(e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

/// Decodes `path`, naming the file in format errors.
fn load<T>(path: &Path, decode: fn(&[u8]) -> bendseg::Result<T>) -> Result<T, Failure> {
    decode(&read(path)?).map_err(|e| match e {
        bendseg::Error::Format { .. } => Failure::Io(format!("{}: {e}", path.display())),
        other => Failure::Lib(other),
    })
}

fn overlay_value(be: f64) -> u32 {
    match be {
        b if b >= 4.8 => 250,
        b if b >= 1.7 => 200,
        b if b >= 0.85 => 150,
        b if b >= 0.14 => 100,
        _ => 50,
    }
}

fn bend(mask: &Path, cap: Option<f64>, csv: Option<&Path>, overlay: Option<&Path>) -> Result<String, Failure> {
    let mask = load(mask, decode_binary)?;
    let defaults = BendConfig::default();
    let cfg = BendConfig::new(cap.unwrap_or(defaults.be_cap), defaults.epsilon)?;
    let report = bend_contours(&mask, &cfg);

    if let Some(path) = csv {
        let mut out = String::from("contour_id,point_index,x,y,be\n");
        for (id, c) in report.contours.iter().enumerate() {
            for (i, (p, be)) in c.points.iter().zip(&c.per_point_be).enumerate() {
                writeln!(out, "{id},{i},{},{},{be:.6}", p.x, p.y).unwrap();
            }
        }
        write(path, out.as_bytes())?;
    }
    if let Some(path) = overlay {
        let (w, _) = mask.dims();
        let mut peak = vec![None::<f64>; mask.len()];
        for c in report.contours.iter().filter(|c| c.is_measured()) {
            for (p, &be) in c.points.iter().zip(&c.per_point_be) {
                let slot = &mut peak[p.y as usize * w + p.x as usize];
                *slot = Some(slot.map_or(be, |v: f64| v.max(be)));
            }
        }
        let image = LabelMap::new(w, mask.height(), peak.iter().map(|v| v.map_or(0, overlay_value)).collect())?;
        write(path, &encode_labels_8bit(&image)?)?;
    }
    Ok(format!("m={} l_bend={:.6}", report.m, report.loss))
}

fn loss(pred: &Path, gt: &Path, alpha: f64, kind: PixelLoss) -> Result<String, Failure> {
    let pred = load(pred, decode_scalar)?;
    let gt = load(gt, decode_binary)?;
    let out = total_loss(&pred, &gt, &LossConfig::new(alpha, kind)?, &BendConfig::default())?;
    Ok(format!("l1={:.6} l_bend={:.6} total={:.6}", out.l1, out.l_bend, out.total))
}

fn metrics(gt: &Path, pred: &Path, json: Option<&Path>) -> Result<String, Failure> {
    let gt = load(gt, decode_labels)?;
    let pred = load(pred, decode_labels)?;
    let report = evaluate(&gt, &pred)?.to_json();
    if let Some(path) = json {
        write(path, format!("{report}\n").as_bytes())?;
    }
    Ok(report)
}

fn split(
    prob: &Path,
    hover_h: &Path,
    hover_v: &Path,
    out: &Path,
    tau: Option<f64>,
    min_size: Option<usize>,
) -> Result<String, Failure> {
    let prob = load(prob, decode_scalar)?;
    let maps = HoVerMaps::new(load(hover_h, decode_scalar)?, load(hover_v, decode_scalar)?)?;
    let defaults = PostprocessConfig::default();
    let cfg = PostprocessConfig {
        edge_threshold: tau.unwrap_or(defaults.edge_threshold),
        min_marker_size: min_size.unwrap_or(defaults.min_marker_size),
        ..defaults
    };
    let labels = postprocess(&prob, &maps, &cfg)?;
    write(out, &encode_labels(&labels)?)?;
    Ok(format!("instances={}", labels.instance_count()))
}

fn synth(out: &Path, params: SceneParams) -> Result<String, Failure> {
    let scene = gen_scene(&params)?;
    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("cannot create {}: {e}", out.display())))?;
    write(&out.join("gt.pgm"), &encode_labels(&scene.gt)?)?;
    write(&out.join("prob.sf32"), &encode_scalar(&scene.prob)?)?;
    write(&out.join("hover_h.sf32"), &encode_scalar(&scene.hover.horizontal)?)?;
    write(&out.join("hover_v.sf32"), &encode_scalar(&scene.hover.vertical)?)?;
    Ok(format!("instances={}", scene.gt.instance_count()))
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Bend { mask, cap, csv, overlay } => bend(&mask, cap, csv.as_deref(), overlay.as_deref()),
        Command::Loss { pred, gt, alpha, l1 } => loss(&pred, &gt, alpha, l1),
        Command::Metrics { gt, pred, json } => metrics(&gt, &pred, json.as_deref()),
        Command::Postprocess { prob, hover_h, hover_v, out, tau, min_size } => {
            split(&prob, &hover_h, &hover_v, &out, tau, min_size)
        }
        Command::Synth { out, width, height, count, overlap_pairs, seed } => synth(
            &out,
            SceneParams {
                width,
                height,
                count,
                radius_range: SYNTH_RADII,
                overlap_pairs,
                seed,
            },
        ),
    };
    match result {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
