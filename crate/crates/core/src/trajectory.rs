//! Trajectory records: per-step rows, run metadata and their file formats.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::ForceModelSpec;
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::integrator::SolverOptions;
use crate::minkowski::FourVector;
use crate::worldline::{SampledCurve, WorldlineState};

/// Fixed CSV column order. The squared acceleration is `a_sq` so that it
/// does not collide with the component `a2`.
pub const CSV_COLUMNS: [&str; 20] = [
    "tau",
    "x0",
    "x1",
    "x2",
    "x3",
    "u0",
    "u1",
    "u2",
    "u3",
    "a0",
    "a1",
    "a2",
    "a3",
    "epsilon",
    "epsilon_dot",
    "a_sq",
    "fL2",
    "m_b",
    "larmor_residual",
    "g_norm_residual",
];

/// One accepted integration step with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub tau: f64,
    pub x: FourVector,
    pub u: FourVector,
    pub a: FourVector,
    pub epsilon: f64,
    pub epsilon_dot: f64,
    /// `eta(a, a)`.
    pub a2: f64,
    /// `eta(f, f)` of the Lorentz force used by the model.
    pub fl2: f64,
    /// Bare mass; `None` where the ledger is degenerate.
    pub m_b: Option<f64>,
    /// `m g(a, u) + (2/3) e^2 a^2`.
    pub larmor_residual: f64,
    /// `g(u, u) + 1`, or `eta(u, u) + 1` for models normalized under `eta`.
    pub g_norm_residual: f64,
}

impl TrajectoryRow {
    pub fn state(&self) -> WorldlineState {
        WorldlineState::new(self.tau, self.x, self.u, self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    UniformStratumEntry,
    UniformStratumExit,
    MaxaccelBreach,
    RunawayAbort,
    NoConvergence,
    /// Isolated zero of `eps_dot`, crossed by continuity.
    ContinuationPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub tau: f64,
    pub detail: String,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Aborted { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub model: ForceModelSpec,
    pub field: FieldSpec,
    pub options: SolverOptions,
    pub code_version: String,
    pub events: Vec<Event>,
    pub termination: Termination,
    /// Largest relative velocity rescale applied by the renormalization.
    pub max_renorm_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub rows: Vec<TrajectoryRow>,
    pub meta: TrajectoryMeta,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(line: usize, what: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("trajectory CSV line {line}: {what}"))
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }

    /// Largest `epsilon` over the run.
    pub fn epsilon0(&self) -> f64 {
        self.rows.iter().map(|r| r.epsilon).fold(0.0, f64::max)
    }

    pub fn positions(&self) -> Result<SampledCurve> {
        SampledCurve::new(
            self.rows.iter().map(|r| (r.tau, r.x)).collect(),
            self.meta.model.model.name(),
        )
    }

    /// Velocity samples as a curve, for extracting realized acceleration and jerk.
    pub fn velocities(&self) -> Result<SampledCurve> {
        SampledCurve::new(
            self.rows.iter().map(|r| (r.tau, r.u)).collect(),
            "velocity",
        )
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.meta.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        write_rows_csv(&self.rows, w)
    }

    pub fn write_files(&self, csv_path: &Path) -> std::io::Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(csv_path)?);
        self.write_csv(f).map_err(std::io::Error::other)?;
        let meta = serde_json::to_string_pretty(&self.meta).map_err(std::io::Error::other)?;
        std::fs::write(meta_path(csv_path), meta + "\n")
    }

    pub fn read_files(csv_path: &Path) -> Result<Self> {
        let rows = read_rows_csv(
            std::fs::File::open(csv_path).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        )?;
        let text = std::fs::read_to_string(meta_path(csv_path))
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let meta = serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(TrajectoryRecord { rows, meta })
    }
}

/// Sidecar metadata path: `run.csv` -> `run.meta.json`.
pub fn meta_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn write_rows_csv<W: Write>(rows: &[TrajectoryRow], w: W) -> Result<(), csv::Error> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for r in rows {
        let mut rec = Vec::with_capacity(CSV_COLUMNS.len());
        rec.push(fmt(r.tau));
        for v in [r.x, r.u, r.a] {
            rec.extend(v.0.iter().map(|c| fmt(*c)));
        }
        rec.push(fmt(r.epsilon));
        rec.push(fmt(r.epsilon_dot));
        rec.push(fmt(r.a2));
        rec.push(fmt(r.fl2));
        rec.push(r.m_b.map(fmt).unwrap_or_default());
        rec.push(fmt(r.larmor_residual));
        rec.push(fmt(r.g_norm_residual));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_rows_csv<R: Read>(r: R) -> Result<Vec<TrajectoryRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(|e| parse_err(1, e))?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(parse_err(1, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e))?;
        if rec.len() != CSV_COLUMNS.len() {
            return Err(parse_err(line, format!("{} fields", rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| parse_err(line, format!("{}: {e}", CSV_COLUMNS[k])))
        };
        let vec4 = |k: usize| -> Result<FourVector> {
            Ok(FourVector([num(k)?, num(k + 1)?, num(k + 2)?, num(k + 3)?]))
        };
        let m_b = if rec[17].trim().is_empty() {
            None
        } else {
            Some(num(17)?)
        };
        rows.push(TrajectoryRow {
            tau: num(0)?,
            x: vec4(1)?,
            u: vec4(5)?,
            a: vec4(9)?,
            epsilon: num(13)?,
            epsilon_dot: num(14)?,
            a2: num(15)?,
            fl2: num(16)?,
            m_b,
            larmor_residual: num(18)?,
            g_norm_residual: num(19)?,
        });
    }
    for (i, w) in rows.windows(2).enumerate() {
        if w[1].tau <= w[0].tau {
            return Err(parse_err(i + 3, "tau is not strictly increasing"));
        }
    }
    Ok(rows)
}
