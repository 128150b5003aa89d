//! Per-row measurement pipeline and aggregation over a session.
//!
//! One observation row is turned into a focal length as follows:
//!
//! ```text
//! pixel counts -> sensor widths I1, I2 -> virtual-image width I (two positions)
//!              -> magnification m = I / O -> f = u / (1/m - 1)
//! ```
//!
//! [`RoundingMode::TableReproduction`] rounds the intermediates the way
//! published tables display them (I1, I2 to 4 dp, I to 2 dp, f to 1 dp) so
//! the published cells come out exactly. [`RoundingMode::FullPrecision`]
//! keeps every intermediate unrounded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optics::{
    focal_from_magnification, width_two_position, LensKind, Magnification, SignedDistance,
    TransverseWidth,
};
use crate::rounding::round_half_away;
use crate::sensor::{pixel_span_to_width, pixels_to_width, CameraSpec, PixelCount};
use crate::simulation::NoiseSpec;

/// The real object: its width `O` and its signed distance `u` from the lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectSpec {
    width: TransverseWidth,
    distance: SignedDistance,
}

impl ObjectSpec {
    pub fn new(width_cm: f64, distance_cm: f64) -> Result<Self> {
        let width = TransverseWidth::new(width_cm)?;
        let distance = SignedDistance::new(distance_cm)?;
        if distance_cm >= 0.0 {
            return Err(Error::InvalidInput(format!(
                "object distance must be negative for a real object, got {distance_cm}"
            )));
        }
        Ok(ObjectSpec { width, distance })
    }

    pub fn width(&self) -> TransverseWidth {
        self.width
    }

    pub fn distance(&self) -> SignedDistance {
        self.distance
    }
}

/// One table row: camera distance from the lens at the first position, the
/// displacement to the second position, and the pixel counts at each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationRow {
    pub obs_no: u32,
    pub d1_cm: f64,
    pub pixel1: PixelCount,
    pub d_cm: f64,
    pub pixel2: PixelCount,
}

impl ObservationRow {
    pub fn validate(&self) -> Result<()> {
        if self.obs_no == 0 {
            return Err(Error::InvalidInput("obs_no must be positive".into()));
        }
        if !(self.d1_cm.is_finite() && self.d1_cm >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "D1 must be finite and non-negative, got {}",
                self.d1_cm
            )));
        }
        if !self.d_cm.is_finite() {
            return Err(Error::InvalidInput("D must be finite".into()));
        }
        if self.d_cm == 0.0 {
            return Err(Error::DegenerateObservation(
                "zero displacement between positions".into(),
            ));
        }
        if self.pixel1 == self.pixel2 {
            return Err(Error::DegenerateObservation(
                "identical pixel counts at both positions".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RoundingMode {
    #[default]
    FullPrecision,
    TableReproduction,
}

/// Result of the pipeline for one observation row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub obs: ObservationRow,
    pub i1_cm: f64,
    pub i2_cm: f64,
    /// Width of the virtual image.
    pub width_cm: f64,
    pub magnification: f64,
    pub focal_length_cm: f64,
    pub mode: RoundingMode,
}

/// Sensor widths at the two camera positions, before any quantization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorObservation {
    pub i1: TransverseWidth,
    pub d_cm: f64,
    pub i2: TransverseWidth,
}

struct Intermediates {
    i1: f64,
    i2: f64,
    width: f64,
    m: f64,
    f: f64,
}

fn run_pipeline(
    camera_focal_cm: f64,
    object: &ObjectSpec,
    kind: Option<LensKind>,
    sensor: &SensorObservation,
    mode: RoundingMode,
) -> Result<Intermediates> {
    let table = mode == RoundingMode::TableReproduction;
    let (mut i1, mut i2) = (sensor.i1, sensor.i2);
    if table {
        i1 = TransverseWidth::new(round_half_away(i1.get(), 4)).map_err(|_| Error::ZeroWidth)?;
        i2 = TransverseWidth::new(round_half_away(i2.get(), 4)).map_err(|_| Error::ZeroWidth)?;
    }

    let mut width = width_two_position(sensor.d_cm, camera_focal_cm, i1, i2)?.get();
    if table {
        width = round_half_away(width, 2);
    }

    let m = Magnification::new(width / object.width().get())?;
    let mut f = focal_from_magnification(object.distance(), m)?.get();
    if table {
        f = round_half_away(f, 1);
    }

    if let Some(declared) = kind {
        if LensKind::from_focal_length(f) != Some(declared) {
            return Err(Error::InconsistentKind {
                declared,
                focal_length: f,
            });
        }
    }

    Ok(Intermediates {
        i1: i1.get(),
        i2: i2.get(),
        width,
        m: m.get(),
        f,
    })
}

/// Runs the pipeline on one observation row.
///
/// When `kind` is given, the sign of the estimated focal length must agree
/// with it.
pub fn estimate_row(
    camera: &CameraSpec,
    object: &ObjectSpec,
    kind: Option<LensKind>,
    obs: &ObservationRow,
    mode: RoundingMode,
) -> Result<EstimateRow> {
    obs.validate()?;
    let pitch = camera.pixel_pitch_um();
    let sensor = SensorObservation {
        i1: pixels_to_width(obs.pixel1, pitch)?,
        d_cm: obs.d_cm,
        i2: pixels_to_width(obs.pixel2, pitch)?,
    };
    let r = run_pipeline(camera.focal_length_cm(), object, kind, &sensor, mode)?;
    Ok(EstimateRow {
        obs: *obs,
        i1_cm: r.i1,
        i2_cm: r.i2,
        width_cm: r.width,
        magnification: r.m,
        focal_length_cm: r.f,
        mode,
    })
}

/// Focal length from unquantized sensor widths (full precision).
pub fn estimate_from_widths(
    camera_focal_cm: f64,
    object: &ObjectSpec,
    sensor: &SensorObservation,
) -> Result<f64> {
    run_pipeline(
        camera_focal_cm,
        object,
        None,
        sensor,
        RoundingMode::FullPrecision,
    )
    .map(|r| r.f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub n: usize,
    pub mean_f: f64,
    /// Standard error of the mean: sample standard deviation / sqrt(n).
    pub sem_f: f64,
    pub per_row: Vec<EstimateRow>,
}

pub fn aggregate(rows: &[EstimateRow]) -> Result<AggregateResult> {
    let focal: Vec<f64> = rows.iter().map(|r| r.focal_length_cm).collect();
    let (mean_f, sd) = mean_and_sd(&focal)?;
    Ok(AggregateResult {
        n: rows.len(),
        mean_f,
        sem_f: sd / (rows.len() as f64).sqrt(),
        per_row: rows.to_vec(),
    })
}

/// Mean and sample standard deviation (n - 1 denominator).
fn mean_and_sd(values: &[f64]) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1) as f64).sqrt()))
}

/// Linear-interpolation quantile of sorted data, `p` in [0, 1].
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summary statistics of a Monte Carlo focal-length sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean_f: f64,
    pub sd_f: f64,
    pub q025: f64,
    pub q500: f64,
    pub q975: f64,
}

impl DistributionSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let (mean_f, sd_f) = mean_and_sd(samples)?;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(DistributionSummary {
            n: samples.len(),
            mean_f,
            sd_f,
            q025: quantile_sorted(&sorted, 0.025),
            q500: quantile_sorted(&sorted, 0.5),
            q975: quantile_sorted(&sorted, 0.975),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub samples: Vec<f64>,
    pub failed: usize,
    pub summary: DistributionSummary,
}

pub const MIN_TRIALS: usize = 100;

fn jitter(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    if half_width > 0.0 {
        rng.random_range(-half_width..=half_width)
    } else {
        0.0
    }
}

/// Propagates bounded input errors to the focal length by Monte Carlo.
///
/// Each trial perturbs both pixel counts, the displacement and the object
/// distance by independent uniform draws within the half-widths of `noise`,
/// then runs the full-precision pipeline. Trials that hit a degenerate
/// configuration are dropped; more than 1% dropped aborts the run.
pub fn propagate_uncertainty(
    camera: &CameraSpec,
    object: &ObjectSpec,
    obs: &ObservationRow,
    noise: &NoiseSpec,
    trials: usize,
) -> Result<MonteCarloResult> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    noise.validate()?;
    obs.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let pitch = camera.pixel_pitch_um();
    let fc = camera.focal_length_cm();
    let mut samples = Vec::with_capacity(trials);
    let mut failed = 0;

    for _ in 0..trials {
        let p1 = f64::from(obs.pixel1.get()) + jitter(&mut rng, noise.pixel_halfwidth);
        let p2 = f64::from(obs.pixel2.get()) + jitter(&mut rng, noise.pixel_halfwidth);
        let d = obs.d_cm + jitter(&mut rng, noise.d_halfwidth);
        let u = object.distance().get() + jitter(&mut rng, noise.u_halfwidth);

        let trial = || -> Result<f64> {
            let perturbed = ObjectSpec::new(object.width().get(), u)?;
            let sensor = SensorObservation {
                i1: pixel_span_to_width(p1, pitch)?,
                d_cm: d,
                i2: pixel_span_to_width(p2, pitch)?,
            };
            estimate_from_widths(fc, &perturbed, &sensor)
        };
        match trial() {
            Ok(f) => samples.push(f),
            Err(_) => failed += 1,
        }
    }

    if failed * 100 > trials {
        return Err(Error::TooManyFailures { failed, trials });
    }
    let summary = DistributionSummary::from_samples(&samples)?;
    Ok(MonteCarloResult {
        samples,
        failed,
        summary,
    })
}
