//! The enclosing box `[m, M]` of the outcome set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QvpError, Result};
use crate::model::{ObjectiveFunction, TAU_DEN};
use crate::oracle::{check_feasible_robust, minimize_linear, FeasibilityOutcome, OracleSettings};
use crate::problem::QvpProblem;
use crate::scalarize::{solve_chebyshev, Direction, SolverSettings};

/// Absolute bisection tolerance on each ideal-point coordinate.
pub const IDEAL_TOL: f64 = 1e-6;

/// Where a corner of the box came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Computed,
    Simplex,
    User,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_source: BoundSource,
    pub upper_source: BoundSource,
}

impl OutcomeBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self {
            lower,
            upper,
            lower_source: BoundSource::User,
            upper_source: BoundSource::User,
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(QvpError::DimensionMismatch {
                what: "box corners",
                expected: self.lower.len(),
                got: self.upper.len(),
            });
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(QvpError::DegenerateBox {
                m: self.lower.clone(),
                upper: self.upper.clone(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// `‖M - m‖_∞`.
    pub fn span(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max)
    }

    /// `min(y, M)` componentwise.
    pub fn clip(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.upper).map(|(a, b)| a.min(*b)).collect()
    }
}

/// Simplex `Δ ⊇ S` with vertices `α⁰, …, αⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<Vec<f64>>,
    /// `max ⟨e, x⟩` over the feasible set.
    pub cap: f64,
}

impl Simplex {
    pub fn base(&self) -> &[f64] {
        &self.vertices[0]
    }
}

/// Minimizes one objective over the feasible set by bisection on its level.
/// Returns a certified lower end of the final bracket and the witness at
/// the upper end.
pub fn minimize_objective(
    problem: &QvpProblem,
    f: &ObjectiveFunction,
    oracle: &OracleSettings,
) -> Result<(f64, Vec<f64>)> {
    let set = problem.feasible_set();
    let feasible_at = |level: f64| -> Result<Option<Vec<f64>>> {
        Ok(
            match check_feasible_robust(set, std::slice::from_ref(&f.sublevel(level)), oracle)? {
                FeasibilityOutcome::Feasible { x, .. } => Some(x),
                FeasibilityOutcome::Infeasible { .. } => None,
            },
        )
    };

    let mut x = problem.start_point().to_vec();
    let mut hi = f.evaluate(&x)?;
    let mut delta = hi.abs().max(1.0);
    let mut lo = None;
    for _ in 0..200 {
        let level = hi - delta;
        match feasible_at(level)? {
            Some(y) => {
                hi = f.evaluate(&y)?.min(level);
                x = y;
                delta *= 2.0;
            }
            None => {
                lo = Some(level);
                break;
            }
        }
    }
    let mut lo = lo.ok_or_else(|| QvpError::InvalidProblem("objective is unbounded below".into()))?;
    while hi - lo > IDEAL_TOL {
        let mid = 0.5 * (lo + hi);
        match feasible_at(mid)? {
            Some(y) => {
                hi = f.evaluate(&y)?.min(mid);
                x = y;
            }
            None => lo = mid,
        }
    }
    Ok((lo, x))
}

/// Ideal point `m` with one minimizing witness per objective.
pub fn ideal_point(problem: &QvpProblem, oracle: &OracleSettings) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let solved: Vec<(f64, Vec<f64>)> = problem
        .objectives()
        .par_iter()
        .map(|f| minimize_objective(problem, f, oracle))
        .collect::<Result<_>>()?;
    Ok(solved.into_iter().unzip())
}

/// Builds the simplex from coordinate minima and the maximum coordinate sum.
pub fn enclosing_simplex(problem: &QvpProblem, oracle: &OracleSettings) -> Result<Simplex> {
    let set = problem.feasible_set();
    let n = set.dim();
    let tol = 1e-10;
    let base: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut c = vec![0.0; n];
            c[j] = 1.0;
            minimize_linear(&c, set, tol, oracle).map(|(_, v)| v)
        })
        .collect::<Result<_>>()?;
    let (_, neg_cap) = minimize_linear(&vec![-1.0; n], set, tol, oracle)?;
    let cap = -neg_cap;
    let total: f64 = base.iter().sum();
    let mut vertices = vec![base.clone()];
    for j in 0..n {
        let mut v = base.clone();
        v[j] = cap - (total - base[j]);
        vertices.push(v);
    }
    Ok(Simplex { vertices, cap })
}

/// Upper corner `M_i = max_{x ∈ V(Δ)} f_i(x)`.
pub fn simplex_bound(problem: &QvpProblem, oracle: &OracleSettings) -> Result<(Simplex, Vec<f64>)> {
    let simplex = enclosing_simplex(problem, oracle)?;
    let mut upper = Vec::with_capacity(problem.num_objectives());
    for (i, f) in problem.objectives().iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for (k, vertex) in simplex.vertices.iter().enumerate() {
            if let Some(den) = f.denominator(vertex) {
                if den <= TAU_DEN {
                    return Err(QvpError::DenominatorNonPositiveOnSimplex {
                        objective: i,
                        vertex: k,
                    });
                }
            }
            best = best.max(f.evaluate(vertex)?);
        }
        upper.push(best);
    }
    Ok((simplex, upper))
}

/// Assembles `[m, M]`, preferring values supplied with the problem.
pub fn assemble_box(problem: &QvpProblem, oracle: &OracleSettings) -> Result<OutcomeBox> {
    let (lower, lower_source) = match problem.box_lower() {
        Some(m) => (m.to_vec(), BoundSource::User),
        None => (ideal_point(problem, oracle)?.0, BoundSource::Computed),
    };
    let (upper, upper_source) = match problem.box_upper() {
        Some(u) => (u.to_vec(), BoundSource::User),
        None => (simplex_bound(problem, oracle)?.1, BoundSource::Simplex),
    };
    let outcome_box = OutcomeBox {
        lower,
        upper,
        lower_source,
        upper_source,
    };
    outcome_box.validate()?;
    Ok(outcome_box)
}

/// Like [`assemble_box`], but fails with
/// [`QvpError::DegenerateIdealAttained`] when `m` itself is an outcome, in
/// which case it is the only nondominated point.
pub fn make_box(problem: &QvpProblem, settings: &SolverSettings) -> Result<OutcomeBox> {
    let outcome_box = assemble_box(problem, &settings.oracle)?;
    let p = problem.num_objectives();
    let probe = solve_chebyshev(
        problem,
        &outcome_box.lower,
        &Direction::ones(p),
        Some(&outcome_box.lower),
        settings,
    )?;
    if probe.t <= degenerate_threshold(settings) {
        return Err(QvpError::DegenerateIdealAttained {
            m: outcome_box.lower,
            witness: probe.x,
        });
    }
    Ok(outcome_box)
}

/// Largest `t_m` still read as "the ideal point is attained".
pub fn degenerate_threshold(settings: &SolverSettings) -> f64 {
    10.0 * (settings.tol_scalar + IDEAL_TOL)
}
