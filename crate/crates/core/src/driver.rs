//! Main outer-approximation loop.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{assemble_box, OutcomeBox};
use crate::copolyblock::{euclidean_distance, weakly_below, VertexSet};
use crate::error::{QvpError, Result};
use crate::problem::QvpProblem;
use crate::scalarize::{solve_chebyshev, Direction, ScalarizationResult, SolverSettings};

pub const DEFAULT_MAX_SCALARIZATIONS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Oldest unclassified vertex first.
    #[default]
    Fifo,
    /// Unclassified vertex with the largest gap first.
    MaxGap,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub epsilon: f64,
    /// Falls back to the problem's own direction, then to `e`.
    pub direction: Option<Direction>,
    pub selection: Selection,
    pub workers: usize,
    pub settings: SolverSettings,
    pub max_scalarizations: usize,
}

impl SolveOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            direction: None,
            selection: Selection::Fifo,
            workers: 1,
            settings: SolverSettings::default(),
            max_scalarizations: DEFAULT_MAX_SCALARIZATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakPoint {
    pub w: Vec<f64>,
    pub f: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Accepted,
    Cut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub v: Vec<f64>,
    pub t: f64,
    pub w: Vec<f64>,
    pub action: Action,
}

#[derive(Debug, Clone)]
pub struct SolveState {
    pub vertices: VertexSet,
    /// Sequence numbers of vertices classified into `V_eps`.
    pub accepted: BTreeSet<u64>,
    /// `w_v` for every vertex scalarized so far.
    pub recorded: BTreeMap<u64, Vec<f64>>,
    pub y_wn: Vec<WeakPoint>,
    pub iterations: usize,
    pub scalarizations: usize,
    pub log: Vec<IterationRecord>,
    round_gap: f64,
}

impl SolveState {
    pub fn new(vertices: VertexSet) -> Self {
        Self {
            vertices,
            accepted: BTreeSet::new(),
            recorded: BTreeMap::new(),
            y_wn: Vec::new(),
            iterations: 0,
            scalarizations: 0,
            log: Vec::new(),
            round_gap: 0.0,
        }
    }

    pub fn unclassified(&self) -> Vec<u64> {
        self.vertices
            .iter()
            .map(|(s, _)| s)
            .filter(|s| !self.accepted.contains(s))
            .collect()
    }

    pub fn v_eps(&self) -> Vec<Vec<f64>> {
        self.accepted
            .iter()
            .filter_map(|s| self.vertices.get(*s).map(<[f64]>::to_vec))
            .collect()
    }

    fn push_weak_point(&mut self, r: &ScalarizationResult) {
        let tau = self.vertices.tolerance();
        let duplicate = self
            .y_wn
            .iter()
            .any(|e| e.f.iter().zip(&r.f).all(|(a, b)| (a - b).abs() <= tau));
        if !duplicate {
            self.y_wn.push(WeakPoint {
                w: r.w.clone(),
                f: r.f.clone(),
                x: r.x.clone(),
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub current_gap: f64,
    pub scalarizations: usize,
    pub vertices: usize,
    pub accepted: usize,
}

/// Progress snapshot: the largest gap seen this round or still standing on
/// a current vertex, plus counts.
pub fn gap_report(state: &SolveState) -> GapReport {
    GapReport {
        current_gap: state.round_gap.max(state.vertices.gap(&state.recorded)),
        scalarizations: state.scalarizations,
        vertices: state.vertices.len(),
        accepted: state.accepted.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub epsilon: f64,
    pub direction: Direction,
    pub outcome_box: OutcomeBox,
    pub v_eps: Vec<Vec<f64>>,
    pub y_wn: Vec<WeakPoint>,
    pub final_gap: f64,
    pub iterations: usize,
    pub scalarizations: usize,
    pub wall_time_s: f64,
    pub log: Vec<IterationRecord>,
}

impl SolveResult {
    /// `V_eps` as a copolyblock inside the box.
    pub fn upper_set(&self) -> VertexSet {
        VertexSet::from_points(&self.outcome_box.lower, &self.outcome_box.upper, self.v_eps.clone())
    }
}

pub fn initial_vertex_set(outcome_box: &OutcomeBox) -> VertexSet {
    VertexSet::initial(&outcome_box.lower, &outcome_box.upper)
}

pub fn solve(problem: &QvpProblem, options: &SolveOptions) -> Result<SolveResult> {
    solve_with_observer(problem, options, |_, _| {})
}

/// Runs the loop, calling `observer` after every applied iteration.
pub fn solve_with_observer<F>(problem: &QvpProblem, options: &SolveOptions, mut observer: F) -> Result<SolveResult>
where
    F: FnMut(&SolveState, &IterationRecord),
{
    let started = Instant::now();
    if !(options.epsilon > 0.0 && options.epsilon.is_finite()) {
        return Err(QvpError::InvalidProblem(format!(
            "epsilon must be positive, got {}",
            options.epsilon
        )));
    }
    if options.workers == 0 {
        return Err(QvpError::InvalidProblem("workers must be at least 1".into()));
    }
    let p = problem.num_objectives();
    let direction = options
        .direction
        .clone()
        .or_else(|| problem.direction().cloned())
        .unwrap_or_else(|| Direction::ones(p));
    if direction.len() != p {
        return Err(QvpError::DimensionMismatch {
            what: "direction",
            expected: p,
            got: direction.len(),
        });
    }

    let outcome_box = assemble_box(problem, &options.settings.oracle)?;
    let mut state = SolveState::new(initial_vertex_set(&outcome_box));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| QvpError::InvalidProblem(format!("thread pool: {e}")))?;

    let scalarize = |seqs: &[u64], vertices: &VertexSet| -> Result<Vec<ScalarizationResult>> {
        let run = |s: &u64| {
            let v = vertices.get(*s).expect("pending vertex present");
            solve_chebyshev(problem, v, &direction, Some(&outcome_box.lower), &options.settings)
        };
        if options.workers == 1 || seqs.len() == 1 {
            seqs.iter().map(run).collect()
        } else {
            pool.install(|| seqs.par_iter().map(run).collect())
        }
    };

    let mut cache: BTreeMap<u64, ScalarizationResult> = BTreeMap::new();
    loop {
        let pending = state.unclassified();
        if pending.is_empty() {
            break;
        }
        let budget = options.max_scalarizations.saturating_sub(state.scalarizations);
        state.round_gap = 0.0;
        match options.selection {
            Selection::Fifo => {
                // Vertices are only ever removed when cut themselves, so a
                // round over the pending list equals one-at-a-time FIFO.
                if budget == 0 {
                    return Err(QvpError::IterationCapExceeded(options.max_scalarizations));
                }
                let batch = &pending[..pending.len().min(budget)];
                let results = scalarize(batch, &state.vertices)?;
                state.scalarizations += results.len();
                for (seq, r) in batch.iter().zip(results) {
                    let rec = apply(&mut state, *seq, r, &direction, options.epsilon)?;
                    observer(&state, &rec);
                }
            }
            Selection::MaxGap => {
                let missing: Vec<u64> = pending.iter().copied().filter(|s| !cache.contains_key(s)).collect();
                if missing.len() > budget {
                    return Err(QvpError::IterationCapExceeded(options.max_scalarizations));
                }
                let results = scalarize(&missing, &state.vertices)?;
                state.scalarizations += results.len();
                cache.extend(missing.into_iter().zip(results));
                let mut best = pending[0];
                for s in &pending {
                    if cache[s].t > cache[&best].t {
                        best = *s;
                    }
                }
                let r = cache.remove(&best).expect("cached scalarization");
                let rec = apply(&mut state, best, r, &direction, options.epsilon)?;
                observer(&state, &rec);
            }
        }
    }

    let final_gap = state
        .accepted
        .iter()
        .filter_map(|s| {
            let v = state.vertices.get(*s)?;
            state.recorded.get(s).map(|w| euclidean_distance(w, v))
        })
        .fold(0.0, f64::max);
    Ok(SolveResult {
        epsilon: options.epsilon,
        direction,
        v_eps: state.v_eps(),
        y_wn: state.y_wn,
        final_gap,
        iterations: state.iterations,
        scalarizations: state.scalarizations,
        wall_time_s: started.elapsed().as_secs_f64(),
        log: state.log,
        outcome_box,
    })
}

fn apply(
    state: &mut SolveState,
    seq: u64,
    r: ScalarizationResult,
    direction: &Direction,
    epsilon: f64,
) -> Result<IterationRecord> {
    let v = state
        .vertices
        .get(seq)
        .ok_or(QvpError::VertexNotInSet(seq))?
        .to_vec();
    state.push_weak_point(&r);
    let gap = r.gap(direction);
    let action = if gap <= epsilon {
        state.accepted.insert(seq);
        state.recorded.insert(seq, r.w.clone());
        Action::Accepted
    } else {
        state.vertices.cut(seq, &r.w)?;
        Action::Cut
    };
    state.round_gap = state.round_gap.max(gap);
    let rec = IterationRecord {
        k: state.iterations,
        v,
        t: r.t,
        w: r.w,
        action,
    };
    log::debug!("k={} t={:.6} {:?}", rec.k, rec.t, rec.action);
    state.iterations += 1;
    state.log.push(rec.clone());
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EsMembership {
    InEs,
    NotInEs,
    Unknown,
}

/// Sufficient test for membership of `x` in the approximate solution set.
pub fn es_membership(
    result: &SolveResult,
    problem: &QvpProblem,
    x: &[f64],
    settings: &SolverSettings,
) -> Result<EsMembership> {
    let n = problem.num_variables();
    if x.len() != n {
        return Err(QvpError::DimensionMismatch {
            what: "decision point",
            expected: n,
            got: x.len(),
        });
    }
    if problem.feasible_set().violation(x)? > settings.oracle.tol_feas {
        return Ok(EsMembership::NotInEs);
    }
    let fx = problem.evaluate(x)?;
    let upper_set = result.upper_set();
    let tau = upper_set.tolerance();
    let upper = &result.outcome_box.upper;

    let mut candidates = Vec::new();
    if weakly_below(&fx, upper, tau) {
        candidates.push(result.outcome_box.clip(&fx));
    }
    for e in &result.y_wn {
        for y in [&e.f, &e.w] {
            if weakly_below(&fx, y, tau) && weakly_below(y, upper, tau) {
                candidates.push(y.clone());
            }
        }
    }
    let qualifies = |y: &Vec<f64>| {
        upper_set.contains(y)
            && !upper_set.iter().any(|(_, u)| {
                u.iter()
                    .zip(y)
                    .all(|(uj, yj)| *uj < yj - result.epsilon - tau)
            })
    };
    Ok(if candidates.iter().any(qualifies) {
        EsMembership::InEs
    } else {
        EsMembership::Unknown
    })
}
