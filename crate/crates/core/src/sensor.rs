//! Camera sensor model: pixel counts to physical widths and back, and the
//! camera lens treated as a thin lens forming a real image on the sensor.

use crate::error::{Error, Result};
use crate::optics::TransverseWidth;

/// Microns per centimeter.
pub const UM_PER_CM: f64 = 1.0e4;

#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    focal_length_cm: f64,
    pixel_pitch_um: f64,
    model_label: String,
}

impl CameraSpec {
    pub fn new(
        focal_length_cm: f64,
        pixel_pitch_um: f64,
        model_label: impl Into<String>,
    ) -> Result<Self> {
        if !(focal_length_cm.is_finite() && focal_length_cm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "camera focal length must be positive, got {focal_length_cm}"
            )));
        }
        if !(pixel_pitch_um.is_finite() && pixel_pitch_um > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pixel pitch must be positive, got {pixel_pitch_um}"
            )));
        }
        Ok(CameraSpec {
            focal_length_cm,
            pixel_pitch_um,
            model_label: model_label.into(),
        })
    }

    pub fn focal_length_cm(&self) -> f64 {
        self.focal_length_cm
    }

    pub fn pixel_pitch_um(&self) -> f64 {
        self.pixel_pitch_um
    }

    pub fn model_label(&self) -> &str {
        &self.model_label
    }
}

/// A pixel count read off a photograph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PixelCount(pub u32);

impl PixelCount {
    pub fn get(self) -> u32 {
        self.0
    }
}

fn check_pitch(pitch_um: f64) -> Result<()> {
    if pitch_um.is_finite() && pitch_um > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "pixel pitch must be positive, got {pitch_um}"
        )))
    }
}

/// Physical sensor width covered by `count` pixels of pitch `pitch_um`, in cm.
pub fn pixels_to_width(count: PixelCount, pitch_um: f64) -> Result<TransverseWidth> {
    if count.0 == 0 {
        return Err(Error::ZeroWidth);
    }
    pixel_span_to_width(f64::from(count.0), pitch_um)
}

/// Like [`pixels_to_width`] for a fractional pixel span (used when pixel
/// counts are perturbed continuously).
pub fn pixel_span_to_width(pixels: f64, pitch_um: f64) -> Result<TransverseWidth> {
    check_pitch(pitch_um)?;
    if !pixels.is_finite() || pixels <= 0.0 {
        return Err(Error::ZeroWidth);
    }
    TransverseWidth::new(pixels * pitch_um / UM_PER_CM)
}

/// Width of the real image the camera lens forms on the sensor of an object
/// of width `object` at distance `distance_cm` from the camera lens:
/// `object · f_c / (d - f_c)`.
pub fn sensor_image_width(
    object: TransverseWidth,
    distance_cm: f64,
    camera_focal_cm: f64,
) -> Result<TransverseWidth> {
    if !(camera_focal_cm.is_finite() && camera_focal_cm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "camera focal length must be positive, got {camera_focal_cm}"
        )));
    }
    if !distance_cm.is_finite() || distance_cm <= camera_focal_cm {
        return Err(Error::DegenerateGeometry(format!(
            "object at {distance_cm} cm is inside the camera focal length {camera_focal_cm} cm"
        )));
    }
    TransverseWidth::new(object.get() * camera_focal_cm / (distance_cm - camera_focal_cm))
}

/// Nearest whole pixel count for a sensor width, ties away from zero.
pub fn width_to_pixels(width: TransverseWidth, pitch_um: f64) -> Result<PixelCount> {
    check_pitch(pitch_um)?;
    let px = (width.get() * UM_PER_CM / pitch_um).round();
    if px > f64::from(u32::MAX) {
        return Err(Error::InvalidInput(format!(
            "{px} pixels exceeds the representable range"
        )));
    }
    Ok(PixelCount(px as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(x: f64) -> TransverseWidth {
        TransverseWidth::new(x).unwrap()
    }

    #[test]
    fn pixels_to_width_examples() {
        let i1 = pixels_to_width(PixelCount(1211), 1.7).unwrap().get();
        assert!((i1 - 0.205_87).abs() < 1e-15);
        assert_eq!(crate::rounding::format_fixed(i1, 4), "0.2059");
        assert!((pixels_to_width(PixelCount(425), 1.4).unwrap().get() - 0.0595).abs() < 1e-15);
        assert_eq!(pixels_to_width(PixelCount(10_000), 1.0).unwrap().get(), 1.0);
        assert_eq!(pixels_to_width(PixelCount(0), 1.0), Err(Error::ZeroWidth));
        assert!(pixels_to_width(PixelCount(3), 0.0).is_err());
    }

    #[test]
    fn sensor_image_width_examples() {
        // independent evaluation: 3.7617 * 0.532 / (10.2308 - 0.532)
        let s = sensor_image_width(w(3.7617), 3.6 + 6.6308, 0.532)
            .unwrap()
            .get();
        assert!((s - 0.206_337_320_080_834_7).abs() < 1e-12);
        assert!((s - 0.2059).abs() / 0.2059 < 0.003);

        let s = sensor_image_width(w(2.5), 2.0 * 0.6, 0.6).unwrap().get();
        assert!((s - 2.5).abs() < 1e-15);

        let s = sensor_image_width(w(1.0), 1000.0, 0.5).unwrap().get();
        assert!((s - 0.000_500_250_125_062_531_2).abs() < 1e-15);

        assert!(matches!(
            sensor_image_width(w(1.0), 0.5, 0.5),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn width_to_pixels_examples() {
        assert_eq!(
            width_to_pixels(w(0.205_870), 1.7).unwrap(),
            PixelCount(1211)
        );
        assert_eq!(width_to_pixels(w(1.0), 1.0).unwrap(), PixelCount(10_000));
        assert_eq!(width_to_pixels(w(0.0595), 1.4).unwrap(), PixelCount(425));
        // exact half pixel rounds up
        assert_eq!(width_to_pixels(w(2.5e-4), 1.0).unwrap(), PixelCount(3));
    }

    proptest! {
        #[test]
        fn quantization_round_trip(width in 1e-3..5.0f64, pitch in 0.5..5.0f64) {
            let px = width_to_pixels(w(width), pitch).unwrap();
            prop_assume!(px.0 > 0);
            let back = pixels_to_width(px, pitch).unwrap().get();
            prop_assert!((back - width).abs() <= 0.5 * pitch / UM_PER_CM * (1.0 + 1e-12));
        }

        #[test]
        fn linear_in_count(n in 1u32..100_000, k in 1u32..20, pitch in 0.5..5.0f64) {
            let a = pixels_to_width(PixelCount(n * k), pitch).unwrap().get();
            let b = f64::from(k) * pixels_to_width(PixelCount(n), pitch).unwrap().get();
            prop_assert!(((a - b) / b).abs() < 1e-12);
        }

        #[test]
        fn pitch_scale_invariance(n in 1u32..100_000, k in 1u32..20, pitch in 0.5..5.0f64) {
            let a = pixels_to_width(PixelCount(n), pitch).unwrap().get();
            let b = pixels_to_width(PixelCount(n * k), pitch / f64::from(k)).unwrap().get();
            prop_assert!(((a - b) / a).abs() < 1e-12);
        }
    }
}
