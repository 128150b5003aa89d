//! Forward model of the bench: the lens under test forms a virtual image of
//! the object, and a thin-lens camera at two positions images that virtual
//! image onto a pixelated sensor.
//!
//! Used as an independent oracle for the estimation pipeline and to generate
//! synthetic sessions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Session;
use crate::error::{Error, Result};
use crate::estimation::{
    estimate_from_widths, estimate_row, ObjectSpec, ObservationRow, RoundingMode, SensorObservation,
};
use crate::optics::{
    image_distance, magnification_from_distances, LensKind, LensSpec, SignedDistance,
    TransverseWidth,
};
use crate::sensor::{sensor_image_width, width_to_pixels, CameraSpec, PixelCount};

/// Half-widths of the uniform input errors, plus the generator seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub pixel_halfwidth: f64,
    pub d_halfwidth: f64,
    pub u_halfwidth: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const DEFAULT_PIXEL_HALFWIDTH: f64 = 0.5;
    pub const DEFAULT_D_HALFWIDTH: f64 = 0.05;
    pub const DEFAULT_U_HALFWIDTH: f64 = 0.05;

    pub fn with_seed(seed: u64) -> Self {
        NoiseSpec {
            pixel_halfwidth: Self::DEFAULT_PIXEL_HALFWIDTH,
            d_halfwidth: Self::DEFAULT_D_HALFWIDTH,
            u_halfwidth: Self::DEFAULT_U_HALFWIDTH,
            seed,
        }
    }

    pub fn zero(seed: u64) -> Self {
        NoiseSpec {
            pixel_halfwidth: 0.0,
            d_halfwidth: 0.0,
            u_halfwidth: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, h) in [
            ("pixel", self.pixel_halfwidth),
            ("D", self.d_halfwidth),
            ("u", self.u_halfwidth),
        ] {
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} noise half-width must be finite and non-negative, got {h}"
                )));
            }
        }
        Ok(())
    }
}

/// Camera distance from the lens at the first position and the displacement
/// to the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPosition {
    pub d1_cm: f64,
    pub d_cm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchScene {
    pub lens: LensSpec,
    pub object: ObjectSpec,
    pub camera: CameraSpec,
    pub positions: Vec<CameraPosition>,
    /// Constant extra distance between the nominal camera position and the
    /// camera lens's principal plane. Zero by default.
    pub camera_offset_cm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualImage {
    pub distance: SignedDistance,
    pub width: TransverseWidth,
}

/// Position and width of the virtual image the lens forms of the object.
pub fn virtual_image(lens: &LensSpec, object: &ObjectSpec) -> Result<VirtualImage> {
    let u = object.distance();
    let v = image_distance(u, lens.focal_length())?;
    let m = magnification_from_distances(u, v)?.get();
    if v.get() >= 0.0 || m <= 0.0 {
        return Err(Error::NotVirtual(format!(
            "object at {} cm, f = {} cm gives image at {} cm",
            u.get(),
            lens.focal_length().get(),
            v.get()
        )));
    }
    Ok(VirtualImage {
        distance: v,
        width: TransverseWidth::new(m * object.width().get())?,
    })
}

impl BenchScene {
    pub fn validate(&self) -> Result<VirtualImage> {
        if !self.camera_offset_cm.is_finite() {
            return Err(Error::InvalidInput("camera offset must be finite".into()));
        }
        if self.lens.kind() == LensKind::Convex
            && self.object.distance().get().abs() >= self.lens.focal_length().get()
        {
            return Err(Error::NotVirtual(
                "object is not within the focal distance of the convex lens".into(),
            ));
        }
        let image = virtual_image(&self.lens, &self.object)?;
        for i in 0..self.positions.len() {
            self.camera_distances(i, &image)?;
        }
        Ok(image)
    }

    fn position(&self, index: usize) -> Result<CameraPosition> {
        self.positions.get(index).copied().ok_or_else(|| {
            Error::InvalidInput(format!(
                "position index {index} out of range ({} positions)",
                self.positions.len()
            ))
        })
    }

    fn camera_distances(&self, index: usize, image: &VirtualImage) -> Result<(f64, f64)> {
        let p = self.position(index)?;
        if p.d_cm == 0.0 {
            return Err(Error::DegenerateObservation(
                "zero displacement between positions".into(),
            ));
        }
        let base = p.d1_cm + self.camera_offset_cm + image.distance.get().abs();
        let (near, far) = (base, base + p.d_cm);
        let fc = self.camera.focal_length_cm();
        if near <= fc || far <= fc {
            return Err(Error::DegenerateGeometry(format!(
                "camera at position {index} cannot focus on the virtual image"
            )));
        }
        Ok((near, far))
    }

    /// Exact sensor widths at the two camera positions of `index`.
    pub fn sensor_widths(&self, index: usize) -> Result<SensorObservation> {
        let image = self.validate()?;
        let (d1, d2) = self.camera_distances(index, &image)?;
        let fc = self.camera.focal_length_cm();
        Ok(SensorObservation {
            i1: sensor_image_width(image.width, d1, fc)?,
            d_cm: self.position(index)?.d_cm,
            i2: sensor_image_width(image.width, d2, fc)?,
        })
    }
}

fn perturb(rng: &mut ChaCha8Rng, value: f64, half_width: f64) -> f64 {
    if half_width > 0.0 {
        value + rng.random_range(-half_width..=half_width)
    } else {
        value
    }
}

fn row_rng(noise: &NoiseSpec, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Pixel counts a camera would record at the two positions of `index`.
///
/// Without noise the counts are the nearest whole pixels. With noise, each
/// count is perturbed uniformly by up to `pixel_halfwidth` before rounding
/// and the recorded displacement by up to `d_halfwidth`.
pub fn synthesize_observation(
    scene: &BenchScene,
    index: usize,
    noise: Option<&NoiseSpec>,
) -> Result<ObservationRow> {
    let widths = scene.sensor_widths(index)?;
    let pos = scene.position(index)?;
    let pitch = scene.camera.pixel_pitch_um();
    let mut pixel1 = width_to_pixels(widths.i1, pitch)?;
    let mut pixel2 = width_to_pixels(widths.i2, pitch)?;
    let mut d_cm = pos.d_cm;

    if let Some(noise) = noise {
        noise.validate()?;
        let mut rng = row_rng(noise, index);
        let jittered = |rng: &mut ChaCha8Rng, w: TransverseWidth| -> Result<PixelCount> {
            let exact = w.get() * crate::sensor::UM_PER_CM / pitch;
            let noisy = perturb(rng, exact, noise.pixel_halfwidth).round();
            if noisy < 0.0 || noisy > f64::from(u32::MAX) {
                return Err(Error::InvalidInput(format!("{noisy} pixels out of range")));
            }
            Ok(PixelCount(noisy as u32))
        };
        pixel1 = jittered(&mut rng, widths.i1)?;
        pixel2 = jittered(&mut rng, widths.i2)?;
        d_cm = perturb(&mut rng, d_cm, noise.d_halfwidth);
    }

    let row = ObservationRow {
        obs_no: index as u32 + 1,
        d1_cm: pos.d1_cm,
        pixel1,
        d_cm,
        pixel2,
    };
    row.validate()?;
    if pixel1.get() == 0 || pixel2.get() == 0 {
        return Err(Error::ZeroWidth);
    }
    Ok(row)
}

/// A full synthetic session, one row per scene position. With noise, the
/// recorded object distance is also perturbed by up to `u_halfwidth`.
pub fn synthesize_session(scene: &BenchScene, noise: Option<&NoiseSpec>) -> Result<Session> {
    if scene.positions.is_empty() {
        return Err(Error::InvalidInput("scene has no camera positions".into()));
    }
    let rows = (0..scene.positions.len())
        .map(|i| synthesize_observation(scene, i, noise))
        .collect::<Result<Vec<_>>>()?;
    let mut object = scene.object;
    if let Some(noise) = noise {
        // stream 0 is reserved for session-level draws
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let u = perturb(&mut rng, object.distance().get(), noise.u_halfwidth);
        object = ObjectSpec::new(object.width().get(), u)?;
    }
    Session::new(scene.camera.clone(), object, scene.lens.kind(), rows)
}

/// True focal length and the focal length recovered by the full-precision
/// pipeline from a synthesized observation.
///
/// With `quantize = false` the exact sensor widths are fed to the pipeline;
/// otherwise they are first rounded to whole pixels.
pub fn round_trip(scene: &BenchScene, index: usize, quantize: bool) -> Result<(f64, f64)> {
    let f_true = scene.lens.focal_length().get();
    let f_est = if quantize {
        let obs = synthesize_observation(scene, index, None)?;
        estimate_row(
            &scene.camera,
            &scene.object,
            None,
            &obs,
            RoundingMode::FullPrecision,
        )?
        .focal_length_cm
    } else {
        let widths = scene.sensor_widths(index)?;
        estimate_from_widths(scene.camera.focal_length_cm(), &scene.object, &widths)?
    };
    Ok((f_true, f_est))
}
