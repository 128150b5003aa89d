//! Signed thin-lens algebra.
//!
//! Sign convention: distances are measured from the lens, real-object
//! distances are negative, and the thin-lens relation reads
//! `1/v - 1/u = 1/f`. Convex lenses have `f > 0`, concave lenses `f < 0`.
//! A virtual image lies on the object side (`v < 0`) with `m = v/u > 0`.
//!
//! All lengths are centimeters.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A signed distance along the optical axis, in cm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SignedDistance(f64);

impl SignedDistance {
    pub fn new(cm: f64) -> Result<Self> {
        if !cm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "distance must be finite, got {cm}"
            )));
        }
        Ok(SignedDistance(cm))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A dimensionless, signed transverse magnification.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Magnification(f64);

impl Magnification {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput(format!(
                "magnification must be finite, got {m}"
            )));
        }
        Ok(Magnification(m))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Magnitude of a transverse size (object, virtual image or sensor image), in cm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TransverseWidth(f64);

impl TransverseWidth {
    pub fn new(cm: f64) -> Result<Self> {
        if !cm.is_finite() || cm <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "width must be finite and positive, got {cm}"
            )));
        }
        Ok(TransverseWidth(cm))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LensKind {
    Convex,
    Concave,
}

impl LensKind {
    /// The kind implied by the sign of a focal length.
    pub fn from_focal_length(f: f64) -> Option<Self> {
        if f > 0.0 {
            Some(LensKind::Convex)
        } else if f < 0.0 {
            Some(LensKind::Concave)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LensKind::Convex => "convex",
            LensKind::Concave => "concave",
        }
    }
}

impl fmt::Display for LensKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LensKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(LensKind::Convex),
            "concave" => Ok(LensKind::Concave),
            other => Err(Error::InvalidInput(format!(
                "lens kind must be `convex` or `concave`, got `{other}`"
            ))),
        }
    }
}

/// The lens under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSpec {
    focal_length: SignedDistance,
    kind: LensKind,
}

impl LensSpec {
    /// Builds a lens whose kind follows from the sign of `focal_length_cm`.
    pub fn new(focal_length_cm: f64) -> Result<Self> {
        let focal_length = SignedDistance::new(focal_length_cm)?;
        let kind = LensKind::from_focal_length(focal_length_cm)
            .ok_or_else(|| Error::InvalidInput("focal length must be nonzero".into()))?;
        Ok(LensSpec { focal_length, kind })
    }

    /// Builds a lens and checks the declared kind against the focal-length sign.
    pub fn with_kind(focal_length_cm: f64, kind: LensKind) -> Result<Self> {
        let lens = Self::new(focal_length_cm)?;
        if lens.kind != kind {
            return Err(Error::InconsistentKind {
                declared: kind,
                focal_length: focal_length_cm,
            });
        }
        Ok(lens)
    }

    pub fn focal_length(&self) -> SignedDistance {
        self.focal_length
    }

    pub fn kind(&self) -> LensKind {
        self.kind
    }
}

fn finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::DegenerateGeometry(format!("{what} is not finite")))
    }
}

/// Image distance `v` from `1/v - 1/u = 1/f`, i.e. `v = u·f / (u + f)`.
pub fn image_distance(u: SignedDistance, f: SignedDistance) -> Result<SignedDistance> {
    let (u, f) = (u.get(), f.get());
    if u == 0.0 {
        return Err(Error::InvalidInput(
            "object distance must be nonzero".into(),
        ));
    }
    if f == 0.0 {
        return Err(Error::InvalidInput("focal length must be nonzero".into()));
    }
    if u + f == 0.0 {
        return Err(Error::DegenerateGeometry(
            "object at the focal point: image at infinity".into(),
        ));
    }
    SignedDistance::new(finite(u * f / (u + f), "image distance")?)
}

/// `m = v / u`.
pub fn magnification_from_distances(u: SignedDistance, v: SignedDistance) -> Result<Magnification> {
    if u.get() == 0.0 {
        return Err(Error::InvalidInput(
            "object distance must be nonzero".into(),
        ));
    }
    Magnification::new(finite(v.get() / u.get(), "magnification")?)
}

/// `m = 1 / (1 + u/f)`.
pub fn magnification_from_object_and_focal(
    u: SignedDistance,
    f: SignedDistance,
) -> Result<Magnification> {
    let (u, f) = (u.get(), f.get());
    if f == 0.0 {
        return Err(Error::InvalidInput("focal length must be nonzero".into()));
    }
    if u + f == 0.0 {
        return Err(Error::DegenerateGeometry(
            "object at the focal point: magnification unbounded".into(),
        ));
    }
    Magnification::new(finite(1.0 / (1.0 + u / f), "magnification")?)
}

/// Recovers the focal length from object distance and magnification:
/// `f = u / (1/m - 1)`.
pub fn focal_from_magnification(u: SignedDistance, m: Magnification) -> Result<SignedDistance> {
    let (u, m) = (u.get(), m.get());
    if u == 0.0 {
        return Err(Error::InvalidInput(
            "object distance must be nonzero".into(),
        ));
    }
    if m == 0.0 {
        return Err(Error::DegenerateMagnification("m = 0".into()));
    }
    let denom = 1.0 / m - 1.0;
    if m == 1.0 || denom == 0.0 {
        return Err(Error::DegenerateMagnification(
            "m = 1: focal length unbounded".into(),
        ));
    }
    let f = u / denom;
    if !f.is_finite() {
        return Err(Error::DegenerateMagnification(format!(
            "focal length not finite for m = {m}"
        )));
    }
    SignedDistance::new(f)
}

/// Camera displacement between two positions from the camera's
/// magnifications of the same object: `D = f_c·(1/m2 - 1/m1)`.
pub fn displacement_from_magnifications(
    camera_focal_cm: f64,
    m1: Magnification,
    m2: Magnification,
) -> Result<SignedDistance> {
    if !(camera_focal_cm.is_finite() && camera_focal_cm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "camera focal length must be positive, got {camera_focal_cm}"
        )));
    }
    if m1.get() == 0.0 || m2.get() == 0.0 {
        return Err(Error::DegenerateMagnification(
            "camera magnification is zero".into(),
        ));
    }
    let d = camera_focal_cm * (1.0 / m2.get() - 1.0 / m1.get());
    SignedDistance::new(finite(d, "displacement")?)
}

/// Width of an object photographed from two positions a distance `D` apart
/// along the line of sight, from the two sensor image widths:
/// `I = |D| / (f_c·|1/I2 - 1/I1|)`.
///
/// Symmetric under swapping the positions and negating `D`.
pub fn width_two_position(
    displacement_cm: f64,
    camera_focal_cm: f64,
    i1: TransverseWidth,
    i2: TransverseWidth,
) -> Result<TransverseWidth> {
    if !displacement_cm.is_finite() {
        return Err(Error::InvalidInput("displacement must be finite".into()));
    }
    if !(camera_focal_cm.is_finite() && camera_focal_cm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "camera focal length must be positive, got {camera_focal_cm}"
        )));
    }
    if displacement_cm == 0.0 {
        return Err(Error::DegenerateObservation(
            "zero displacement between positions".into(),
        ));
    }
    let spread = (1.0 / i2.get() - 1.0 / i1.get()).abs();
    if i1 == i2 || spread == 0.0 {
        return Err(Error::DegenerateObservation(
            "identical sensor widths at both positions".into(),
        ));
    }
    let width = displacement_cm.abs() / (camera_focal_cm * spread);
    if !width.is_finite() {
        return Err(Error::DegenerateObservation(
            "image width not finite".into(),
        ));
    }
    TransverseWidth::new(width)
}
