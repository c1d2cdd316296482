//! Result file (JSON) and plot data (CSV).

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::OutcomeBox;
use crate::driver::{IterationRecord, SolveResult, WeakPoint};
use crate::error::{QvpError, Result};
use crate::scalarize::Direction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub m: Vec<f64>,
    #[serde(rename = "M")]
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub epsilon: f64,
    pub direction: Vec<f64>,
    #[serde(rename = "box")]
    pub outcome_box: BoxRecord,
    #[serde(rename = "V_eps")]
    pub v_eps: Vec<Vec<f64>>,
    #[serde(rename = "Y_WN")]
    pub y_wn: Vec<WeakPoint>,
    pub final_gap: f64,
    pub iterations: usize,
    pub scalarizations: usize,
    pub wall_time_s: f64,
    pub log: Vec<IterationRecord>,
}

impl From<&SolveResult> for ResultFile {
    fn from(r: &SolveResult) -> Self {
        Self {
            epsilon: r.epsilon,
            direction: r.direction.as_slice().to_vec(),
            outcome_box: BoxRecord {
                m: r.outcome_box.lower.clone(),
                upper: r.outcome_box.upper.clone(),
            },
            v_eps: r.v_eps.clone(),
            y_wn: r.y_wn.clone(),
            final_gap: r.final_gap,
            iterations: r.iterations,
            scalarizations: r.scalarizations,
            wall_time_s: r.wall_time_s,
            log: r.log.clone(),
        }
    }
}

impl TryFrom<ResultFile> for SolveResult {
    type Error = QvpError;

    fn try_from(f: ResultFile) -> Result<Self> {
        Ok(Self {
            epsilon: f.epsilon,
            direction: Direction::new(f.direction)?,
            outcome_box: OutcomeBox::new(f.outcome_box.m, f.outcome_box.upper)?,
            v_eps: f.v_eps,
            y_wn: f.y_wn,
            final_gap: f.final_gap,
            iterations: f.iterations,
            scalarizations: f.scalarizations,
            wall_time_s: f.wall_time_s,
            log: f.log,
        })
    }
}

pub fn to_json(result: &SolveResult) -> String {
    serde_json::to_string_pretty(&ResultFile::from(result)).expect("result serializes")
}

pub fn from_json(text: &str) -> Result<SolveResult> {
    let file: ResultFile =
        serde_json::from_str(text).map_err(|e| QvpError::InvalidProblem(format!("result file: {e}")))?;
    file.try_into()
}

pub fn write_json(result: &SolveResult, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, to_json(result) + "\n")
}

pub fn read_json(path: impl AsRef<Path>) -> Result<SolveResult> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| QvpError::InvalidProblem(format!("{}: {e}", path.as_ref().display())))?;
    from_json(&text)
}

fn header(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}{i}"))
}

/// Writes `front.csv` (w, f and x per weakly nondominated point) and
/// `vertices.csv` (the vertices of the outer approximation) into `dir`.
pub fn write_csv(result: &SolveResult, dir: impl AsRef<Path>) -> io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let p = result.direction.len();
    let n = result.y_wn.first().map_or(0, |e| e.x.len());

    let mut front = csv::Writer::from_path(dir.join("front.csv"))?;
    front.write_record(header("w", p).chain(header("f", p)).chain(header("x", n)))?;
    for e in &result.y_wn {
        front.write_record(e.w.iter().chain(&e.f).chain(&e.x).map(f64::to_string))?;
    }
    front.flush()?;

    let mut vertices = csv::Writer::from_path(dir.join("vertices.csv"))?;
    vertices.write_record(header("v", p))?;
    for v in &result.v_eps {
        vertices.write_record(v.iter().map(f64::to_string))?;
    }
    vertices.flush()
}
