//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error (including a
//! failed table reproduction), 3 degenerate computation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dataset::{emit_report, parse_session, BundledTable, ReportFormat, Session};
use crate::error::Error;
use crate::estimation::{propagate_uncertainty, DistributionSummary, ObjectSpec, RoundingMode};
use crate::golden::reproduce;
use crate::optics::LensSpec;
use crate::rounding::format_fixed;
use crate::sensor::CameraSpec;
use crate::simulation::{synthesize_session, BenchScene, CameraPosition, NoiseSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lensfocus",
    version,
    about = "Focal length of a thin lens from two-position photographs of its virtual image"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regenerate a bundled table and check every published cell.
    Reproduce {
        /// 1 = concave lens, 2 = convex lens.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        table: u32,
    },
    /// Estimate focal lengths from a session file.
    Estimate {
        session: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a synthetic session file to standard output.
    #[command(allow_negative_numbers = true)]
    Simulate {
        /// Focal length of the lens under test, cm (signed).
        #[arg(long = "f")]
        focal: f64,
        /// Object distance from the lens, cm (negative).
        #[arg(long = "u")]
        distance: f64,
        /// Object width, cm.
        #[arg(long = "O")]
        width: f64,
        /// Camera focal length, cm.
        #[arg(long)]
        fc: f64,
        /// Pixel pitch, µm.
        #[arg(long)]
        pitch: f64,
        /// Camera positions as D1:D pairs, comma separated (cm).
        #[arg(long, value_parser = parse_positions)]
        positions: Positions,
        /// Uniform noise half-widths: pixels, D (cm), u (cm).
        #[arg(long, value_parser = parse_noise)]
        noise: Option<NoiseHalfWidths>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra distance from the nominal camera position to its lens, cm.
        #[arg(long, default_value_t = 0.0)]
        camera_offset: f64,
    },
    /// Monte Carlo focal-length distributions for each row of a session.
    Uncertainty {
        session: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Uniform noise half-widths: pixels, D (cm), u (cm).
        #[arg(long, value_parser = parse_noise)]
        noise: Option<NoiseHalfWidths>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Table,
}

impl From<Mode> for RoundingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => RoundingMode::FullPrecision,
            Mode::Table => RoundingMode::TableReproduction,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Plotdata,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::TextTable,
            Format::Csv => ReportFormat::Csv,
            Format::Plotdata => ReportFormat::PlotData,
        }
    }
}

#[derive(Debug, Clone)]
struct Positions(Vec<CameraPosition>);

#[derive(Debug, Clone, Copy)]
struct NoiseHalfWidths([f64; 3]);

impl NoiseHalfWidths {
    fn to_spec(self, seed: u64) -> NoiseSpec {
        let [px, d, u] = self.0;
        NoiseSpec {
            pixel_halfwidth: px,
            d_halfwidth: d,
            u_halfwidth: u,
            seed,
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_positions(s: &str) -> Result<Positions, String> {
    s.split(',')
        .map(|pair| {
            let (d1, d) = pair
                .split_once(':')
                .ok_or_else(|| format!("position `{pair}` is not of the form D1:D"))?;
            Ok(CameraPosition {
                d1_cm: parse_f64(d1)?,
                d_cm: parse_f64(d)?,
            })
        })
        .collect::<Result<Vec<_>, String>>()
        .map(Positions)
}

fn parse_noise(s: &str) -> Result<NoiseHalfWidths, String> {
    let parts: Vec<f64> = s.split(',').map(parse_f64).collect::<Result<_, _>>()?;
    let [px, d, u] = parts[..] else {
        return Err(format!("expected three half-widths px,D,u, got `{s}`"));
    };
    if parts.iter().any(|h| *h < 0.0) {
        return Err("noise half-widths must be non-negative".into());
    }
    Ok(NoiseHalfWidths([px, d, u]))
}

/// A failure carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_degenerate() {
            EXIT_DEGENERATE
        } else {
            EXIT_DATA
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load_session(path: &PathBuf) -> Result<Session, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_session(&text).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };

    let result = match cli.command {
        Command::Reproduce { table } => cmd_reproduce(table),
        Command::Estimate {
            session,
            mode,
            format,
        } => cmd_estimate(&session, mode.into(), format.into()),
        Command::Simulate {
            focal,
            distance,
            width,
            fc,
            pitch,
            positions,
            noise,
            seed,
            camera_offset,
        } => cmd_simulate(
            focal,
            distance,
            width,
            fc,
            pitch,
            positions.0,
            noise.map(|n| n.to_spec(seed)),
            camera_offset,
        ),
        Command::Uncertainty {
            session,
            trials,
            seed,
            noise,
        } => cmd_uncertainty(&session, trials, seed, noise),
    };

    match result {
        Ok((out, code)) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_reproduce(table: u32) -> Result<(String, i32), Failure> {
    let table = BundledTable::from_number(table).ok_or(Failure {
        code: EXIT_USAGE,
        message: format!("no bundled table {table}"),
    })?;
    let repro = reproduce(table)?;
    let code = if repro.matches() { EXIT_OK } else { EXIT_DATA };
    Ok((repro.report, code))
}

fn cmd_estimate(
    path: &PathBuf,
    mode: RoundingMode,
    format: ReportFormat,
) -> Result<(String, i32), Failure> {
    let session = load_session(path)?;
    let aggregate = session.aggregate(mode)?;
    Ok((emit_report(&aggregate, format), EXIT_OK))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    focal: f64,
    distance: f64,
    width: f64,
    fc: f64,
    pitch: f64,
    positions: Vec<CameraPosition>,
    noise: Option<NoiseSpec>,
    camera_offset: f64,
) -> Result<(String, i32), Failure> {
    let scene = BenchScene {
        lens: LensSpec::new(focal)?,
        object: ObjectSpec::new(width, distance)?,
        camera: CameraSpec::new(fc, pitch, "simulated")?,
        positions,
        camera_offset_cm: camera_offset,
    };
    let session = synthesize_session(&scene, noise.as_ref())?;
    let mut out = format!("# synthetic session: f = {focal} cm\n");
    out.push_str(&crate::dataset::serialize_session(&session));
    Ok((out, EXIT_OK))
}

fn summary_line(
    out: &mut String,
    label: &str,
    nominal: Option<f64>,
    s: &DistributionSummary,
    failed: usize,
) {
    let nominal = nominal.map_or_else(|| "-".to_string(), |f| format_fixed(f, 4));
    let _ = writeln!(
        out,
        "{label:>6}  {nominal:>9}  {:>9}  {:>7}  {:>9}  {:>9}  {:>9}  {:>6}  {failed:>6}",
        format_fixed(s.mean_f, 4),
        format_fixed(s.sd_f, 4),
        format_fixed(s.q025, 4),
        format_fixed(s.q500, 4),
        format_fixed(s.q975, 4),
        s.n,
    );
}

fn cmd_uncertainty(
    path: &PathBuf,
    trials: usize,
    seed: u64,
    noise: Option<NoiseHalfWidths>,
) -> Result<(String, i32), Failure> {
    let session = load_session(path)?;
    let noise = noise.map_or_else(|| NoiseSpec::with_seed(seed), |n| n.to_spec(seed));
    let nominal = session.estimate(RoundingMode::FullPrecision)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# Monte Carlo: trials = {trials}, seed = {seed}, half-widths: pixel = {}, D = {} cm, u = {} cm",
        noise.pixel_halfwidth, noise.d_halfwidth, noise.u_halfwidth
    );
    let _ = writeln!(
        out,
        "{:>6}  {:>9}  {:>9}  {:>7}  {:>9}  {:>9}  {:>9}  {:>6}  {:>6}",
        "obs", "f_nominal", "mean_f", "sd_f", "q2.5", "q50", "q97.5", "n", "failed"
    );

    let mut pooled = Vec::with_capacity(trials * session.rows.len());
    let mut pooled_failed = 0;
    for (row, est) in session.rows.iter().zip(&nominal) {
        let row_noise = NoiseSpec {
            seed: noise.seed.wrapping_add(u64::from(row.obs_no)),
            ..noise
        };
        let mc = propagate_uncertainty(&session.camera, &session.object, row, &row_noise, trials)?;
        summary_line(
            &mut out,
            &row.obs_no.to_string(),
            Some(est.focal_length_cm),
            &mc.summary,
            mc.failed,
        );
        pooled.extend_from_slice(&mc.samples);
        pooled_failed += mc.failed;
    }
    let pooled_summary = DistributionSummary::from_samples(&pooled)?;
    summary_line(&mut out, "pooled", None, &pooled_summary, pooled_failed);
    Ok((out, EXIT_OK))
}
