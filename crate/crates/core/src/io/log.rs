//! The placement log: a JSON document holding everything needed to
//! re-verify or re-render a run without re-running it.
//!
//! Reals are written with the shortest decimal that parses back to the same
//! double, so `read(write(log)) == log` bit for bit. Records are written one
//! per line to keep logs diff-able.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::{OrientedBox, PlacedSquare, Rect};
use crate::numerics::{power_neg, Exponent};
use crate::packer::{FrameStats, MonitorSummary, PackingReport};

pub const FORMAT_VERSION: u32 = 1;

pub const SEED_DESCRIPTION: &str =
    "S1, S2, S3 side by side on the bottom edge from x = 0; residuals: strip right of S3, gap above S2, gap above S3";
pub const TIE_BREAK: &str = "smallest (width, height, creation id)";

#[derive(Debug, Error)]
pub enum LogError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed log at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("log format version {found} not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("invalid log contents: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for LogError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            return LogError::Io(e.into());
        }
        LogError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

type Extra = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format_version: u32,
    pub t: f64,
    pub n_max: u64,
    pub container: Rect,
    pub zeta_value: Option<f64>,
    pub seed: String,
    pub tie_break: String,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRecord {
    pub n: u64,
    pub side: f64,
    pub x0: f64,
    pub y0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFooter {
    pub failed_at: Option<u64>,
    pub conservation_defect: f64,
    pub monitors: MonitorSummary,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementLog {
    pub header: LogHeader,
    pub records: Vec<SquareRecord>,
    pub residuals: Vec<ResidualRecord>,
    pub footer: LogFooter,
    #[serde(flatten, default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: Extra,
}

impl PlacementLog {
    pub fn from_report(report: &PackingReport) -> Self {
        PlacementLog {
            header: LogHeader {
                format_version: FORMAT_VERSION,
                t: report.t.get(),
                n_max: report.n_max,
                container: report.container,
                zeta_value: report.zeta,
                seed: SEED_DESCRIPTION.to_string(),
                tie_break: TIE_BREAK.to_string(),
                extra: Extra::new(),
            },
            records: report
                .placements
                .iter()
                .map(|p| SquareRecord {
                    n: p.n,
                    side: p.side,
                    x0: p.rect.x0,
                    y0: p.rect.y0,
                })
                .collect(),
            residuals: report
                .residuals
                .iter()
                .map(|b| ResidualRecord {
                    x0: b.rect.x0,
                    y0: b.rect.y0,
                    dx: b.rect.dx,
                    dy: b.rect.dy,
                })
                .collect(),
            footer: LogFooter {
                failed_at: report.failed_at,
                conservation_defect: report.conservation_defect,
                monitors: report.summary.clone(),
                extra: Extra::new(),
            },
            extra: Extra::new(),
        }
    }

    /// Rebuilds a report without a trace. Residual ids are renumbered from 0
    /// in log order.
    pub fn to_report(&self) -> Result<PackingReport, LogError> {
        let t = Exponent::new(self.header.t).map_err(|e| LogError::Invalid(e.to_string()))?;
        let summary = self.footer.monitors.clone();
        Ok(PackingReport {
            t,
            n_max: self.header.n_max,
            container: self.header.container,
            zeta: self.header.zeta_value,
            placements: self
                .records
                .iter()
                .map(|r| PlacedSquare::at(r.n, r.side, r.x0, r.y0))
                .collect(),
            residuals: self
                .residuals
                .iter()
                .enumerate()
                .map(|(i, r)| OrientedBox {
                    rect: Rect::new(r.x0, r.y0, r.dx, r.dy),
                    id: i as u64,
                })
                .collect(),
            failed_at: self.footer.failed_at,
            trace: Vec::new(),
            frames: FrameStats {
                frames: summary.frames_checked,
                ..FrameStats::default()
            },
            summary,
            conservation_defect: self.footer.conservation_defect,
        })
    }

    /// Keys this version does not know, as dotted paths.
    pub fn unknown_fields(&self) -> Vec<String> {
        let top = self.extra.keys().cloned();
        let header = self.header.extra.keys().map(|k| format!("header.{k}"));
        let footer = self.footer.extra.keys().map(|k| format!("footer.{k}"));
        top.chain(header).chain(footer).collect()
    }

    /// Problems with the record sequence: records out of order, gaps in a
    /// run that did not fail, or sides that differ from `n^-t`.
    pub fn consistency_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let t = match Exponent::new(self.header.t) {
            Ok(t) => t,
            Err(e) => return vec![e.to_string()],
        };
        let mut prev = 0;
        for r in &self.records {
            if r.n <= prev {
                issues.push(format!("record n = {} follows n = {prev}", r.n));
            } else if r.n != prev + 1 && self.footer.failed_at.is_none() {
                issues.push(format!("gap before n = {}", r.n));
            }
            if r.side != power_neg(r.n, t) {
                issues.push(format!("side of n = {} is {} not n^-t", r.n, r.side));
            }
            prev = r.n;
        }
        issues
    }
}

/// Serializes `log` to `out`, one record per line.
pub fn write_placement_log<W: Write>(log: &PlacementLog, mut out: W) -> Result<(), LogError> {
    fn list<W: Write, T: Serialize>(out: &mut W, items: &[T]) -> Result<(), LogError> {
        if items.is_empty() {
            return Ok(writeln!(out, "[],")?);
        }
        writeln!(out, "[")?;
        for (i, item) in items.iter().enumerate() {
            let sep = if i + 1 < items.len() { "," } else { "" };
            writeln!(out, "    {}{sep}", serde_json::to_string(item)?)?;
        }
        Ok(writeln!(out, "  ],")?)
    }

    writeln!(out, "{{")?;
    writeln!(
        out,
        "  \"header\": {},",
        serde_json::to_string(&log.header)?
    )?;
    write!(out, "  \"records\": ")?;
    list(&mut out, &log.records)?;
    write!(out, "  \"residuals\": ")?;
    list(&mut out, &log.residuals)?;
    write!(out, "  \"footer\": {}", serde_json::to_string(&log.footer)?)?;
    for (k, v) in &log.extra {
        write!(
            out,
            ",\n  {}: {}",
            serde_json::to_string(k)?,
            serde_json::to_string(v)?
        )?;
    }
    writeln!(out, "\n}}")?;
    out.flush()?;
    Ok(())
}

/// Parses a log, checking the format version first.
pub fn read_placement_log<R: Read>(mut input: R) -> Result<PlacementLog, LogError> {
    #[derive(Deserialize)]
    struct Probe {
        header: ProbeHeader,
    }
    #[derive(Deserialize)]
    struct ProbeHeader {
        format_version: u32,
    }

    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let probe: Probe = serde_json::from_str(&text)?;
    if probe.header.format_version != FORMAT_VERSION {
        return Err(LogError::VersionMismatch {
            found: probe.header.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let log: PlacementLog = serde_json::from_str(&text)?;
    for field in log.unknown_fields() {
        log::warn!("ignoring unknown log field {field}");
    }
    Ok(log)
}

pub fn write_log(report: &PackingReport, path: &Path) -> Result<(), LogError> {
    let file = File::create(path)?;
    write_placement_log(&PlacementLog::from_report(report), BufWriter::new(file))
}

pub fn read_log(path: &Path) -> Result<PackingReport, LogError> {
    read_placement_log(BufReader::new(File::open(path)?))?.to_report()
}
