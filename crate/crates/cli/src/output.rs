//! Table rendering. CSV uses LF line endings and the header names below are
//! a stable interface; JSON is pretty-printed with a trailing newline.

use anyhow::Result;
use serde::Serialize;

use crate::config::Format;

/// Frozen CSV header of a row type.
pub trait Columns: Serialize {
    const COLUMNS: &'static [&'static str];
}

#[derive(Debug, Serialize)]
pub struct SolveRow {
    pub alpha: f64,
    pub z: f64,
    pub y_star: f64,
    pub tag: String,
    pub margin_h: f64,
    pub verified: bool,
}

impl Columns for SolveRow {
    const COLUMNS: &'static [&'static str] = &["alpha", "z", "y_star", "tag", "margin_h", "verified"];
}

/// One candidate pair for games with more than two actions.
#[derive(Debug, Serialize)]
pub struct PairRow {
    pub alpha: f64,
    pub source: &'static str,
    pub index: usize,
    pub majority: usize,
    pub mu: String,
    pub mu_r: String,
    pub verified: bool,
    pub detail: String,
}

impl Columns for PairRow {
    const COLUMNS: &'static [&'static str] = &["alpha", "source", "index", "majority", "mu", "mu_r", "verified", "detail"];
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub z: f64,
    pub tag: String,
}

impl Columns for SweepRow {
    const COLUMNS: &'static [&'static str] = &["alpha", "z", "tag"];
}

#[derive(Debug, Default, Serialize)]
pub struct WelfareRow {
    pub kind: &'static str,
    pub alpha: f64,
    pub z: Option<f64>,
    pub y_star: Option<f64>,
    pub u_rational: Option<f64>,
    pub u_irrational: Option<f64>,
    pub herding: Option<bool>,
    pub quantity: Option<&'static str>,
    pub value: Option<String>,
}

impl Columns for WelfareRow {
    const COLUMNS: &'static [&'static str] = &[
        "kind", "alpha", "z", "y_star", "u_rational", "u_irrational", "herding", "quantity", "value",
    ];
}

#[derive(Debug, Serialize)]
pub struct CrossCheckRow {
    pub game: String,
    pub alpha: f64,
    pub resolution: u32,
    pub status: &'static str,
    pub z: f64,
    pub cluster: Option<usize>,
    pub distance: Option<f64>,
}

impl Columns for CrossCheckRow {
    const COLUMNS: &'static [&'static str] = &["game", "alpha", "resolution", "status", "z", "cluster", "distance"];
}

pub fn csv<T: Columns>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(T::COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Rows in either format.
pub fn table<T: Columns>(rows: &[T], format: Format) -> Result<String> {
    match format {
        Format::Csv => csv(rows),
        Format::Json => json(rows),
    }
}

/// Space-separated weights.
pub fn weights(w: &[f64]) -> String {
    w.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}
