//! Focal lengths of thin lenses from smartphone photographs of their
//! virtual images.
//!
//! The lens under test forms a virtual image of a ruler. A camera photographs
//! that virtual image from two positions a known distance apart along its line
//! of sight; the two sensor image widths give the width of the virtual image,
//! hence the magnification, hence the focal length.
//!
//! Modules:
//! - [`optics`]: signed thin-lens algebra and the two-position width relation.
//! - [`sensor`]: pixel counts, pixel pitch and the camera's real image.
//! - [`estimation`]: the per-row pipeline, aggregation and Monte Carlo errors.
//! - [`simulation`]: forward model of the bench, used as a test oracle.
//! - [`dataset`]: session files, bundled datasets and reports.
//! - [`golden`]: regeneration of the bundled tables against published cells.
//! - [`cli`]: the `lensfocus` command line.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod estimation;
pub mod golden;
pub mod optics;
pub mod rounding;
pub mod sensor;
pub mod simulation;

pub use dataset::{
    emit_report, parse_session, serialize_session, BundledTable, ReportFormat, Session,
};
pub use error::{Error, ParseError, Result};
pub use estimation::{
    aggregate, estimate_row, propagate_uncertainty, AggregateResult, EstimateRow, ObjectSpec,
    ObservationRow, RoundingMode,
};
pub use optics::{LensKind, LensSpec, Magnification, SignedDistance, TransverseWidth};
pub use sensor::{CameraSpec, PixelCount};
pub use simulation::{BenchScene, CameraPosition, NoiseSpec};
