//! Weighted Chebyshev scalarization along a fixed direction.
//!
//! For a reference point `v` and direction `d > 0` the problem
//! `min_x max_j (f_j(x) - v_j) / d_j` over the feasible set is solved by
//! bisection on `t`: each trial asks whether the convex system
//! `{x ∈ S : f_j(x) ≤ v_j + t d_j for all j}` is feasible. The optimal value
//! `t_v` locates `w_v = v + t_v d` on the boundary of the upward-extended
//! outcome set, and the last feasible witness is a weakly efficient
//! solution.

use serde::{Deserialize, Serialize};

use crate::error::{QvpError, Result};
use crate::model::SublevelConstraint;
use crate::oracle::{check_feasible_robust, FeasibilityOutcome, OracleSettings};
use crate::problem::QvpProblem;

/// A strictly positive direction in outcome space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() || d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(QvpError::NonPositiveDirection);
        }
        Ok(Self(d))
    }

    /// The all-ones direction.
    pub fn ones(p: usize) -> Self {
        Self(vec![1.0; p])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = QvpError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// Numerical tolerances shared by every solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub oracle: OracleSettings,
    /// Final bisection bracket width on `t`.
    pub tol_scalar: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            oracle: OracleSettings::default(),
            tol_scalar: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarizationResult {
    /// Weakly efficient witness `x_v`.
    pub x: Vec<f64>,
    /// `f(x_v)`.
    pub f: Vec<f64>,
    /// Optimal value `t_v`.
    pub t: f64,
    /// `w_v = v + t_v d`.
    pub w: Vec<f64>,
    pub bracket_width: f64,
    pub bisection_steps: usize,
}

impl ScalarizationResult {
    /// `‖w_v - v‖₂`.
    pub fn gap(&self, d: &Direction) -> f64 {
        self.t.abs() * d.norm()
    }
}

/// `max_j (f_j(x) - v_j) / d_j`.
pub fn chebyshev_value(problem: &QvpProblem, x: &[f64], v: &[f64], d: &Direction) -> Result<f64> {
    let f = problem.evaluate(x)?;
    Ok(chebyshev_of_outcome(&f, v, d))
}

pub(crate) fn chebyshev_of_outcome(f: &[f64], v: &[f64], d: &Direction) -> f64 {
    f.iter()
        .zip(v)
        .zip(d.as_slice())
        .map(|((fj, vj), dj)| (fj - vj) / dj)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sublevel_system(problem: &QvpProblem, v: &[f64], d: &Direction, t: f64) -> Vec<SublevelConstraint> {
    problem
        .objectives()
        .iter()
        .zip(v)
        .zip(d.as_slice())
        .map(|((f, vj), dj)| f.sublevel(vj + t * dj))
        .collect()
}

/// Whether some feasible `x` has `f(x) ≤ v + t d` (within the oracle
/// tolerance), with the witness when it does.
pub fn level_feasible(
    problem: &QvpProblem,
    v: &[f64],
    d: &Direction,
    t: f64,
    oracle: &OracleSettings,
) -> Result<Option<Vec<f64>>> {
    let system = sublevel_system(problem, v, d, t);
    Ok(match check_feasible_robust(problem.feasible_set(), &system, oracle)? {
        FeasibilityOutcome::Feasible { x, .. } => Some(x),
        FeasibilityOutcome::Infeasible { .. } => None,
    })
}

const MAX_EXPANSIONS: usize = 200;

/// Solves the Chebyshev scalarization at `v`.
///
/// `lower` is a componentwise lower bound on the outcome set (the ideal
/// point or anything below it); it fixes the bottom of the bisection
/// bracket at `max_j (lower_j - v_j) / d_j`. Without it the bracket is
/// found by doubling steps downward from the start point's value.
pub fn solve_chebyshev(
    problem: &QvpProblem,
    v: &[f64],
    d: &Direction,
    lower: Option<&[f64]>,
    settings: &SolverSettings,
) -> Result<ScalarizationResult> {
    let p = problem.num_objectives();
    for (what, len) in [("reference point", v.len()), ("direction", d.len())] {
        if len != p {
            return Err(QvpError::DimensionMismatch {
                what,
                expected: p,
                got: len,
            });
        }
    }
    let oracle = &settings.oracle;
    let mut x_best = problem.start_point().to_vec();
    let mut t_hi = chebyshev_value(problem, &x_best, v, d)?;
    let mut steps = 0;

    let mut t_lo = match lower {
        Some(m) => {
            if m.len() != p {
                return Err(QvpError::DimensionMismatch {
                    what: "lower bound",
                    expected: p,
                    got: m.len(),
                });
            }
            chebyshev_of_outcome(m, v, d)
        }
        None => {
            let mut delta = t_hi.abs().max(1.0);
            let mut found = None;
            for _ in 0..MAX_EXPANSIONS {
                let trial = t_hi - delta;
                match level_feasible(problem, v, d, trial, oracle)? {
                    Some(x) => {
                        t_hi = chebyshev_value(problem, &x, v, d)?.min(trial);
                        x_best = x;
                        delta *= 2.0;
                    }
                    None => {
                        found = Some(trial);
                        break;
                    }
                }
            }
            found.ok_or_else(|| QvpError::InvalidProblem("objectives are unbounded below".into()))?
        }
    };

    if t_hi < t_lo {
        // a computed ideal point may sit a bisection tolerance above the true one
        let slack = 100.0 * settings.tol_scalar * (1.0 + t_lo.abs());
        if t_lo - t_hi > slack {
            return Err(QvpError::BracketInversion { t_lo, t_hi });
        }
        t_lo = t_hi;
    }

    while t_hi - t_lo > settings.tol_scalar {
        let mid = 0.5 * (t_lo + t_hi);
        match level_feasible(problem, v, d, mid, oracle)? {
            Some(x) => {
                t_hi = chebyshev_value(problem, &x, v, d)?.min(mid);
                x_best = x;
            }
            None => t_lo = mid,
        }
        steps += 1;
    }

    let f = problem.evaluate(&x_best)?;
    let attained = chebyshev_of_outcome(&f, v, d);
    if attained > t_hi + settings.tol_scalar {
        log::warn!(
            "scalarization witness exceeds its level: {attained} > {t_hi} + {}",
            settings.tol_scalar
        );
    }
    let w = v
        .iter()
        .zip(d.as_slice())
        .map(|(vj, dj)| vj + t_hi * dj)
        .collect();
    Ok(ScalarizationResult {
        x: x_best,
        f,
        t: t_hi,
        w,
        bracket_width: t_hi - t_lo,
        bisection_steps: steps,
    })
}

/// Weakly efficient solution and weakly nondominated point generated from `v`.
pub fn generate_wes(
    problem: &QvpProblem,
    v: &[f64],
    d: &Direction,
    lower: Option<&[f64]>,
    settings: &SolverSettings,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = solve_chebyshev(problem, v, d, lower, settings)?;
    Ok((r.x, r.w))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub weakly_efficient: bool,
    /// Optimal value of the scalarization at `f(x*)`; zero for weakly
    /// efficient points, negative otherwise.
    pub t: f64,
    pub dominating: Vec<f64>,
}

/// Tests weak efficiency of `x` by scalarizing at `f(x)`.
pub fn verify_wes(
    problem: &QvpProblem,
    x: &[f64],
    d: &Direction,
    settings: &SolverSettings,
) -> Result<Verification> {
    let violation = problem.feasible_set().violation(x)?;
    if violation > settings.oracle.tol_feas {
        return Err(QvpError::InfeasiblePoint { violation });
    }
    let v = problem.evaluate(x)?;
    let r = solve_chebyshev(problem, &v, d, None, settings)?;
    Ok(Verification {
        weakly_efficient: r.t.abs() <= settings.tol_scalar,
        t: r.t,
        dominating: r.x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Affine, FeasibleSet, ObjectiveFunction};

    fn identity_square() -> QvpProblem {
        let f = |j: usize| {
            let mut a = vec![0.0, 0.0];
            a[j] = 1.0;
            ObjectiveFunction::LinearFractional {
                num: Affine::new(a, 0.0),
                den: Affine::new(vec![0.0, 0.0], 1.0),
            }
        };
        QvpProblem::new(
            vec![f(0), f(1)],
            FeasibleSet::from_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            &OracleSettings::default(),
        )
        .unwrap()
    }

    #[test]
    fn direction_must_be_positive() {
        assert!(Direction::new(vec![1.0, 0.0]).is_err());
        assert!(Direction::new(vec![]).is_err());
        assert!(Direction::new(vec![0.2, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn identity_toy_scalarization() {
        let p = identity_square();
        let d = Direction::ones(2);
        let s = SolverSettings::default();
        for lower in [Some(&[0.0, 0.0][..]), None] {
            let r = solve_chebyshev(&p, &[-0.5, -0.5], &d, lower, &s).unwrap();
            assert!((r.t - 0.5).abs() < 2e-6, "{}", r.t);
            assert!(r.w.iter().all(|w| w.abs() < 2e-6));
            assert!(r.x.iter().all(|x| x.abs() < 1e-5), "{:?}", r.x);
        }
    }

    #[test]
    fn verify_toy_points() {
        let p = identity_square();
        let d = Direction::ones(2);
        let s = SolverSettings::default();
        let interior = verify_wes(&p, &[0.5, 0.5], &d, &s).unwrap();
        assert!(!interior.weakly_efficient);
        assert!((interior.t + 0.5).abs() < 2e-6);
        let edge = verify_wes(&p, &[0.0, 0.7], &d, &s).unwrap();
        assert!(edge.weakly_efficient, "t = {}", edge.t);
    }

    #[test]
    fn verify_rejects_infeasible_point() {
        let p = identity_square();
        let err = verify_wes(&p, &[2.0, 0.0], &Direction::ones(2), &SolverSettings::default()).unwrap_err();
        assert!(matches!(err, QvpError::InfeasiblePoint { .. }));
    }

    #[test]
    fn nondominated_reference_gives_zero() {
        let p = identity_square();
        let (x, w) = generate_wes(&p, &[0.0, 0.4], &Direction::ones(2), None, &SolverSettings::default()).unwrap();
        assert!((w[0] - 0.0).abs() < 2e-6 && (w[1] - 0.4).abs() < 2e-6, "{w:?}");
        assert!(p.feasible_set().violation(&x).unwrap() <= 1e-7);
    }

    #[test]
    fn bracket_halves() {
        let p = identity_square();
        let s = SolverSettings::default();
        let v = [-3.0, -1.0];
        let r = solve_chebyshev(&p, &v, &Direction::ones(2), Some(&[0.0, 0.0]), &s).unwrap();
        let t_lo = 3.0;
        let t_hi = chebyshev_value(&p, p.start_point(), &v, &Direction::ones(2)).unwrap();
        let bound = ((t_hi - t_lo) / s.tol_scalar).log2().ceil().max(0.0) as usize;
        assert!(r.bisection_steps <= bound, "{} > {bound}", r.bisection_steps);
        assert!((r.t - 3.0).abs() < 2e-6);
    }
}
