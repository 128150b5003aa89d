//! Session files, bundled datasets and report emission.
//!
//! A session file is a `key = value` header followed by an
//! `[observations]` marker and a CSV body:
//!
//! ```text
//! # comment
//! camera_model = Apple iPhone 12 Pro Max
//! camera_fc_cm = 0.532
//! pixel_pitch_um = 1.7
//! object_width_cm = 5.0
//! object_distance_cm = -8.8
//! lens_kind = concave
//! [observations]
//! obs_no,D1_cm,pixel1,D_cm,pixel2
//! 1,3.6,1211,21.6,376
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};
use crate::estimation::{
    aggregate, estimate_row, AggregateResult, EstimateRow, ObjectSpec, ObservationRow, RoundingMode,
};
use crate::optics::LensKind;
use crate::rounding::format_fixed;
use crate::sensor::{CameraSpec, PixelCount};

pub const OBSERVATIONS_MARKER: &str = "[observations]";
pub const CSV_HEADER: &str = "obs_no,D1_cm,pixel1,D_cm,pixel2";

const KEY_MODEL: &str = "camera_model";
const KEY_FC: &str = "camera_fc_cm";
const KEY_PITCH: &str = "pixel_pitch_um";
const KEY_WIDTH: &str = "object_width_cm";
const KEY_DISTANCE: &str = "object_distance_cm";
const KEY_KIND: &str = "lens_kind";

const REQUIRED_KEYS: [&str; 6] = [
    KEY_MODEL,
    KEY_FC,
    KEY_PITCH,
    KEY_WIDTH,
    KEY_DISTANCE,
    KEY_KIND,
];

/// A camera, an object, the declared lens kind, and the observation rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub camera: CameraSpec,
    pub object: ObjectSpec,
    pub lens_kind: LensKind,
    pub rows: Vec<ObservationRow>,
}

impl Session {
    pub fn new(
        camera: CameraSpec,
        object: ObjectSpec,
        lens_kind: LensKind,
        rows: Vec<ObservationRow>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput(
                "session has no observation rows".into(),
            ));
        }
        for pair in rows.windows(2) {
            if pair[1].obs_no <= pair[0].obs_no {
                return Err(Error::InvalidInput(format!(
                    "obs_no must be unique and ascending ({} after {})",
                    pair[1].obs_no, pair[0].obs_no
                )));
            }
        }
        for row in &rows {
            row.validate()?;
        }
        Ok(Session {
            camera,
            object,
            lens_kind,
            rows,
        })
    }

    pub fn estimate(&self, mode: RoundingMode) -> Result<Vec<EstimateRow>> {
        self.rows
            .iter()
            .map(|row| estimate_row(&self.camera, &self.object, Some(self.lens_kind), row, mode))
            .collect()
    }

    pub fn aggregate(&self, mode: RoundingMode) -> Result<AggregateResult> {
        aggregate(&self.estimate(mode)?)
    }
}

/// The two datasets shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundledTable {
    /// Concave lens, iPhone 12 Pro Max.
    Concave,
    /// Convex lens, iPhone 12 mini.
    Convex,
}

impl BundledTable {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(BundledTable::Concave),
            2 => Some(BundledTable::Convex),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            BundledTable::Concave => 1,
            BundledTable::Convex => 2,
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            BundledTable::Concave => "table1.session",
            BundledTable::Convex => "table2.session",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            BundledTable::Concave => include_str!("../data/table1.session"),
            BundledTable::Convex => include_str!("../data/table2.session"),
        }
    }

    pub fn session(self) -> Session {
        parse_session(self.text()).expect("bundled session files are valid")
    }
}

fn parse_number(line: usize, what: &str, text: &str) -> std::result::Result<f64, ParseError> {
    let value: f64 = text
        .parse()
        .map_err(|_| ParseError::new(line, format!("{what}: `{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(ParseError::new(
            line,
            format!("{what}: `{text}` is not finite"),
        ));
    }
    Ok(value)
}

fn parse_integer(line: usize, what: &str, text: &str) -> std::result::Result<u32, ParseError> {
    text.parse().map_err(|_| {
        ParseError::new(
            line,
            format!("{what}: `{text}` is not a non-negative integer"),
        )
    })
}

/// Turns a domain validation error into a parse error at `line`.
fn at_line(line: usize) -> impl Fn(Error) -> ParseError {
    move |e| ParseError::new(line, e.to_string())
}

/// Parses and validates a session file.
pub fn parse_session(text: &str) -> std::result::Result<Session, ParseError> {
    let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut marker_line = None;

    for (n, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == OBSERVATIONS_MARKER {
            marker_line = Some(n);
            break;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::new(
                n,
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if !REQUIRED_KEYS.contains(&key) {
            return Err(ParseError::new(n, format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = header.insert(key, (n, value)) {
            return Err(ParseError::new(
                n,
                format!("duplicate key `{key}` (first given on line {first})"),
            ));
        }
    }

    let last_line = text.lines().count().max(1);
    let Some(marker_line) = marker_line else {
        return Err(ParseError::new(
            last_line,
            format!("missing `{OBSERVATIONS_MARKER}` section"),
        ));
    };
    for key in REQUIRED_KEYS {
        if !header.contains_key(key) {
            return Err(ParseError::new(
                marker_line,
                format!("missing required key `{key}`"),
            ));
        }
    }

    let (fc_line, fc) = header[KEY_FC];
    let fc = parse_number(fc_line, KEY_FC, fc)?;
    let (pitch_line, pitch) = header[KEY_PITCH];
    let pitch = parse_number(pitch_line, KEY_PITCH, pitch)?;
    let camera = CameraSpec::new(fc, pitch, header[KEY_MODEL].1)
        .map_err(at_line(fc_line.max(pitch_line)))?;

    let (w_line, width) = header[KEY_WIDTH];
    let width = parse_number(w_line, KEY_WIDTH, width)?;
    let (u_line, distance) = header[KEY_DISTANCE];
    let distance = parse_number(u_line, KEY_DISTANCE, distance)?;
    let object = ObjectSpec::new(width, distance).map_err(at_line(w_line.max(u_line)))?;

    let (k_line, kind) = header[KEY_KIND];
    let lens_kind: LensKind = kind.parse().map_err(at_line(k_line))?;

    let mut seen_header = false;
    let mut rows: Vec<ObservationRow> = Vec::new();
    for (n, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(ParseError::new(
                    n,
                    format!("expected CSV header `{CSV_HEADER}`"),
                ));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(ParseError::new(
                n,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let row = ObservationRow {
            obs_no: parse_integer(n, "obs_no", fields[0])?,
            d1_cm: parse_number(n, "D1_cm", fields[1])?,
            pixel1: PixelCount(parse_integer(n, "pixel1", fields[2])?),
            d_cm: parse_number(n, "D_cm", fields[3])?,
            pixel2: PixelCount(parse_integer(n, "pixel2", fields[4])?),
        };
        if let Some(prev) = rows.last() {
            if rows.iter().any(|r| r.obs_no == row.obs_no) {
                return Err(ParseError::new(
                    n,
                    format!("duplicate obs_no {}", row.obs_no),
                ));
            }
            if row.obs_no < prev.obs_no {
                return Err(ParseError::new(
                    n,
                    format!(
                        "obs_no {} is not ascending (after {})",
                        row.obs_no, prev.obs_no
                    ),
                ));
            }
        }
        row.validate().map_err(at_line(n))?;
        rows.push(row);
    }

    if !seen_header {
        return Err(ParseError::new(
            last_line,
            format!("missing CSV header `{CSV_HEADER}`"),
        ));
    }
    if rows.is_empty() {
        return Err(ParseError::new(last_line, "no observation rows"));
    }

    Session::new(camera, object, lens_kind, rows).map_err(at_line(last_line))
}

/// Writes a session in the format [`parse_session`] reads. Numbers use the
/// shortest representation that round-trips.
pub fn serialize_session(session: &Session) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{KEY_MODEL} = {}", session.camera.model_label());
    let _ = writeln!(out, "{KEY_FC} = {}", session.camera.focal_length_cm());
    let _ = writeln!(out, "{KEY_PITCH} = {}", session.camera.pixel_pitch_um());
    let _ = writeln!(out, "{KEY_WIDTH} = {}", session.object.width().get());
    let _ = writeln!(out, "{KEY_DISTANCE} = {}", session.object.distance().get());
    let _ = writeln!(out, "{KEY_KIND} = {}", session.lens_kind);
    let _ = writeln!(out, "{OBSERVATIONS_MARKER}");
    let _ = writeln!(out, "{CSV_HEADER}");
    for r in &session.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.obs_no,
            r.d1_cm,
            r.pixel1.get(),
            r.d_cm,
            r.pixel2.get()
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    Csv,
    PlotData,
}

/// Footer line of a text report, e.g. `mean f = -26.9 ± 0.06 cm`.
pub fn mean_footer(result: &AggregateResult) -> String {
    format!(
        "mean f = {} ± {} cm",
        format_fixed(result.mean_f, 1),
        format_fixed(result.sem_f, 2)
    )
}

/// Display cells of one row in table column order:
/// obs, D1, pixel 1, I1, D, pixel 2, I2, I, f (or -f for a diverging lens).
pub fn display_cells(row: &EstimateRow, negate_f: bool) -> [String; 9] {
    let f = if negate_f {
        -row.focal_length_cm
    } else {
        row.focal_length_cm
    };
    [
        row.obs.obs_no.to_string(),
        format_fixed(row.obs.d1_cm, 1),
        row.obs.pixel1.get().to_string(),
        format_fixed(row.i1_cm, 4),
        format_fixed(row.obs.d_cm, 1),
        row.obs.pixel2.get().to_string(),
        format_fixed(row.i2_cm, 4),
        format_fixed(row.width_cm, 2),
        format_fixed(f, 1),
    ]
}

fn text_table(result: &AggregateResult) -> String {
    // diverging lens: tabulate -f so the column reads positive
    let negate = result.mean_f < 0.0;
    let f_col = if negate { "-f" } else { "f" };
    let headers = ["obs", "D1", "pixel1", "I1", "D", "pixel2", "I2", "I", f_col];
    let units = ["no.", "cm", "", "cm", "cm", "", "cm", "cm", "cm"];
    let body: Vec<[String; 9]> = result
        .per_row
        .iter()
        .map(|r| display_cells(r, negate))
        .collect();

    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for cells in &body {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.len());
        }
    }

    let mut out = String::new();
    let mut push = |cells: &[&str]| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    };
    push(&headers);
    push(&units);
    for cells in &body {
        let refs: Vec<&str> = cells.iter().map(String::as_str).collect();
        push(&refs);
    }
    let _ = writeln!(out, "n = {}", result.n);
    let _ = writeln!(out, "{}", mean_footer(result));
    out
}

fn csv(result: &AggregateResult) -> String {
    let mut out = String::from("obs_no,D1_cm,pixel1,I1_cm,D_cm,pixel2,I2_cm,I_cm,m,f_cm\n");
    for r in &result.per_row {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.obs.obs_no,
            r.obs.d1_cm,
            r.obs.pixel1.get(),
            r.i1_cm,
            r.obs.d_cm,
            r.obs.pixel2.get(),
            r.i2_cm,
            r.width_cm,
            r.magnification,
            r.focal_length_cm
        );
    }
    out
}

fn plot_data(result: &AggregateResult) -> String {
    let mut out = String::from("# D_cm f_cm\n");
    for r in &result.per_row {
        let _ = writeln!(out, "{} {}", r.obs.d_cm, r.focal_length_cm);
    }
    out.push_str("\n\n# D1_cm I_cm\n");
    for r in &result.per_row {
        let _ = writeln!(out, "{} {}", r.obs.d1_cm, r.width_cm);
    }
    out
}

/// Renders an aggregate. `TextTable` follows the published column layout and
/// display rounding, `Csv` is full precision, and `PlotData` emits two
/// whitespace-separated series, `(D, f)` and `(D1, I)`, separated by two
/// blank lines.
pub fn emit_report(result: &AggregateResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::TextTable => text_table(result),
        ReportFormat::Csv => csv(result),
        ReportFormat::PlotData => plot_data(result),
    }
}
