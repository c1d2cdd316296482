//! Feasibility and linear minimization over systems of convex constraints.
//!
//! Both operations work on the max-violation function
//! `Φ(x) = max_i g_i(x)` taken over the feasible set's own constraints and
//! any extra sublevel constraints. The default method is a deep-cut
//! ellipsoid scheme started from a ball that encloses the feasible set: it
//! terminates as soon as some center has `Φ ≤ tol_feas`, or once the
//! linearization bound proves that no point of the current ellipsoid can
//! reach that level. The second route is the classical projected
//! subgradient iteration with steps `α₀/√k`.

use crate::error::{QvpError, Result};
use crate::model::{dot, ConvexConstraint, FeasibleSet, SublevelConstraint};

/// Which numerical method decides feasibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMethod {
    #[default]
    Ellipsoid,
    ProjectedSubgradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSettings {
    /// A point is feasible when `Φ(x) ≤ tol_feas`.
    pub tol_feas: f64,
    /// Maximum number of iterations per call.
    pub budget: usize,
    pub method: OracleMethod,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            tol_feas: 1e-7,
            budget: 50_000,
            method: OracleMethod::Ellipsoid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityOutcome {
    Feasible {
        x: Vec<f64>,
        violation: f64,
    },
    /// `certified` is true when the method proved that `Φ > tol_feas`
    /// everywhere; otherwise the budget ran out.
    Infeasible {
        best_violation: f64,
        certified: bool,
    },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Self::Feasible { x, .. } => Some(x),
            Self::Infeasible { .. } => None,
        }
    }
}

const DIVERGENCE_NORM: f64 = 1e12;

struct System<'a> {
    n: usize,
    base: &'a [ConvexConstraint],
    extra: Vec<&'a ConvexConstraint>,
}

impl<'a> System<'a> {
    fn new(set: &'a FeasibleSet, extra: &'a [SublevelConstraint]) -> Result<Option<Self>> {
        let n = set.dim();
        let mut refs = Vec::with_capacity(extra.len());
        for c in extra {
            match c {
                SublevelConstraint::Infeasible => return Ok(None),
                SublevelConstraint::Convex(c) => {
                    if c.dim() != n {
                        return Err(QvpError::DimensionMismatch {
                            what: "sublevel constraint",
                            expected: n,
                            got: c.dim(),
                        });
                    }
                    refs.push(c);
                }
            }
        }
        Ok(Some(Self {
            n,
            base: set.constraints(),
            extra: refs,
        }))
    }

    fn get(&self, i: usize) -> &ConvexConstraint {
        if i < self.base.len() {
            &self.base[i]
        } else {
            self.extra[i - self.base.len()]
        }
    }

    /// `Φ(x)` and the index of a maximizing constraint.
    #[inline]
    fn phi(&self, x: &[f64]) -> (f64, usize) {
        let mut worst = f64::NEG_INFINITY;
        let mut arg = usize::MAX;
        let all = self.base.iter().chain(self.extra.iter().copied());
        for (i, c) in all.enumerate() {
            let v = c.value(x);
            if v > worst || v.is_nan() {
                worst = v;
                arg = i;
                if v.is_nan() {
                    break;
                }
            }
        }
        (worst, arg)
    }
}

/// Decides whether the feasible set intersected with `extra` contains a
/// point with max violation at most `settings.tol_feas`.
pub fn check_feasible(
    set: &FeasibleSet,
    extra: &[SublevelConstraint],
    settings: &OracleSettings,
) -> Result<FeasibilityOutcome> {
    if settings.budget == 0 {
        return Err(QvpError::InvalidProblem("oracle budget must be at least 1".into()));
    }
    let Some(sys) = System::new(set, extra)? else {
        return Ok(FeasibilityOutcome::Infeasible {
            best_violation: f64::INFINITY,
            certified: true,
        });
    };
    if sys.base.is_empty() && sys.extra.is_empty() {
        let mut c = set.enclosing_ball().0.to_vec();
        set.clamp_to_bounds(&mut c);
        return Ok(FeasibilityOutcome::Feasible { x: c, violation: 0.0 });
    }
    match settings.method {
        OracleMethod::Ellipsoid => Ok(ellipsoid(set, &sys, settings)),
        OracleMethod::ProjectedSubgradient => projected_subgradient(set, &sys, settings),
    }
}

fn ellipsoid(set: &FeasibleSet, sys: &System, settings: &OracleSettings) -> FeasibilityOutcome {
    let n = sys.n;
    let tol = settings.tol_feas;
    let (lo, hi) = (set.lower(), set.upper());
    let (center, radius) = set.enclosing_ball();
    let radius = radius * 1.01 + 1e-9;

    let mut x = center.to_vec();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        p[i * n + i] = radius * radius;
    }
    let mut g = vec![0.0; n];
    let mut pg = vec![0.0; n];
    let mut best = f64::INFINITY;
    let nf = n as f64;

    for _ in 0..settings.budget {
        // bounds are the domain: Φ is only evaluated at centers inside them
        let mut bound_cut = None;
        let mut worst = 0.0;
        for j in 0..n {
            if lo[j] - x[j] > worst {
                worst = lo[j] - x[j];
                bound_cut = Some((j, -1.0));
            }
            if x[j] - hi[j] > worst {
                worst = x[j] - hi[j];
                bound_cut = Some((j, 1.0));
            }
        }
        let depth;
        if let Some((j, sign)) = bound_cut {
            g.iter_mut().for_each(|v| *v = 0.0);
            g[j] = sign;
            depth = if sign > 0.0 { x[j] - hi[j] } else { lo[j] - x[j] };
        } else {
            let (phi, idx) = sys.phi(&x);
            if phi.is_nan() {
                break;
            }
            best = best.min(phi);
            if phi <= tol {
                return FeasibilityOutcome::Feasible {
                    x,
                    violation: phi.max(0.0),
                };
            }
            sys.get(idx).gradient_into(&x, &mut g);
            if g.iter().all(|&v| v == 0.0) {
                // x minimizes the active constraint, whose value already exceeds tol
                return FeasibilityOutcome::Infeasible {
                    best_violation: best,
                    certified: true,
                };
            }
            depth = phi - tol;
        }
        for i in 0..n {
            pg[i] = dot(&p[i * n..(i + 1) * n], &g);
        }
        let gpg = dot(&g, &pg);
        if !(gpg > 0.0) || !gpg.is_finite() {
            break;
        }
        let s = gpg.sqrt();
        let alpha = (depth / s).max(-1.0 / nf + 1e-12);
        if alpha >= 1.0 {
            return FeasibilityOutcome::Infeasible {
                best_violation: best,
                certified: true,
            };
        }
        let step = (1.0 + nf * alpha) / (nf + 1.0);
        for i in 0..n {
            x[i] -= step * pg[i] / s;
        }
        if n == 1 {
            let shrink = 0.5 * (1.0 - alpha);
            p[0] *= shrink * shrink;
        } else {
            let scale = nf * nf * (1.0 - alpha * alpha) / (nf * nf - 1.0);
            let rank = 2.0 * (1.0 + nf * alpha) / ((nf + 1.0) * (1.0 + alpha)) / gpg;
            for i in 0..n {
                for j in i..n {
                    let v = scale * (p[i * n + j] - rank * pg[i] * pg[j]);
                    p[i * n + j] = v;
                    p[j * n + i] = v;
                }
            }
        }
        if (0..n).any(|i| !(p[i * n + i] > 0.0)) {
            break;
        }
    }
    FeasibilityOutcome::Infeasible {
        best_violation: best,
        certified: false,
    }
}

fn projected_subgradient(
    set: &FeasibleSet,
    sys: &System,
    settings: &OracleSettings,
) -> Result<FeasibilityOutcome> {
    let n = sys.n;
    let (lo, hi) = set.bounding_box();
    let mut x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let alpha0 = 0.5
        * lo.iter()
            .zip(&hi)
            .map(|(l, h)| (h - l).powi(2))
            .sum::<f64>()
            .sqrt()
            .max(1e-12);
    let mut g = vec![0.0; n];
    let mut best = f64::INFINITY;
    for k in 1..=settings.budget {
        let (phi, idx) = sys.phi(&x);
        best = best.min(phi);
        if phi <= settings.tol_feas {
            return Ok(FeasibilityOutcome::Feasible { x, violation: phi.max(0.0) });
        }
        sys.get(idx).gradient_into(&x, &mut g);
        let norm = dot(&g, &g).sqrt();
        if norm == 0.0 {
            return Ok(FeasibilityOutcome::Infeasible {
                best_violation: best,
                certified: true,
            });
        }
        let step = alpha0 / (k as f64).sqrt() / norm;
        for j in 0..n {
            x[j] = (x[j] - step * g[j]).clamp(lo[j], hi[j]);
        }
        let xnorm = dot(&x, &x).sqrt();
        if xnorm > DIVERGENCE_NORM {
            return Err(QvpError::Diverged(xnorm));
        }
    }
    Ok(FeasibilityOutcome::Infeasible {
        best_violation: best,
        certified: false,
    })
}

/// Feasibility with one retry at four times the budget when the first
/// answer is an uncertified "infeasible".
pub fn check_feasible_robust(
    set: &FeasibleSet,
    extra: &[SublevelConstraint],
    settings: &OracleSettings,
) -> Result<FeasibilityOutcome> {
    let first = check_feasible(set, extra, settings)?;
    match first {
        FeasibilityOutcome::Infeasible { certified: false, .. } => {
            let retry = OracleSettings {
                budget: settings.budget.saturating_mul(4),
                ..settings.clone()
            };
            check_feasible(set, extra, &retry)
        }
        other => Ok(other),
    }
}

/// Minimizes `cᵀx` over the feasible set. The returned value is within
/// `tol·(1 + |value|)` of the optimum, up to the feasibility slack.
pub fn minimize_linear(
    c: &[f64],
    set: &FeasibleSet,
    tol: f64,
    settings: &OracleSettings,
) -> Result<(Vec<f64>, f64)> {
    if c.len() != set.dim() {
        return Err(QvpError::DimensionMismatch {
            what: "linear objective",
            expected: set.dim(),
            got: c.len(),
        });
    }
    let start = check_feasible_robust(set, &[], settings)?;
    let FeasibilityOutcome::Feasible { x, .. } = start else {
        return Err(QvpError::InfeasibleSet);
    };
    let mut best_x = x;
    let mut hi = dot(c, &best_x);
    let (blo, bhi) = set.bounding_box();
    let mut lo: f64 = c
        .iter()
        .enumerate()
        .map(|(j, &cj)| if cj >= 0.0 { cj * blo[j] } else { cj * bhi[j] })
        .sum();
    if !lo.is_finite() {
        return Err(QvpError::InvalidProblem("bounding box is not finite".into()));
    }
    lo = lo.min(hi);

    while hi - lo > tol * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        let cut = SublevelConstraint::Convex(ConvexConstraint::Linear(crate::model::Affine::new(
            c.to_vec(),
            -mid,
        )));
        match check_feasible_robust(set, std::slice::from_ref(&cut), settings)? {
            FeasibilityOutcome::Feasible { x, .. } => {
                hi = dot(c, &x).min(mid);
                best_x = x;
            }
            FeasibilityOutcome::Infeasible { .. } => lo = mid,
        }
    }
    let value = dot(c, &best_x);
    Ok((best_x, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Affine, Quadratic};

    fn example1_set() -> FeasibleSet {
        FeasibleSet::new(
            2,
            vec![
                vec![1.0, -2.0],
                vec![-1.0, -2.0],
                vec![-1.0, 1.0],
                vec![1.0, 0.0],
            ],
            vec![2.0, -2.0, 1.0, 6.0],
            vec![],
            vec![0.0, 0.0],
            vec![6.0, 7.0],
        )
        .unwrap()
    }

    fn linear(a: Vec<f64>, a0: f64) -> SublevelConstraint {
        SublevelConstraint::Convex(ConvexConstraint::Linear(Affine::new(a, a0)))
    }

    #[test]
    fn example1_polytope_is_feasible() {
        let s = example1_set();
        for method in [OracleMethod::Ellipsoid, OracleMethod::ProjectedSubgradient] {
            let settings = OracleSettings {
                method,
                ..Default::default()
            };
            let out = check_feasible(&s, &[], &settings).unwrap();
            let x = out.point().expect("feasible").to_vec();
            assert!(s.violation(&x).unwrap() <= settings.tol_feas);
        }
    }

    #[test]
    fn unit_square_with_negative_halfplane_is_infeasible() {
        let s = FeasibleSet::from_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let extra = [linear(vec![1.0, 1.0], 1.0)];
        for method in [OracleMethod::Ellipsoid, OracleMethod::ProjectedSubgradient] {
            let settings = OracleSettings {
                method,
                budget: 5_000,
                ..Default::default()
            };
            match check_feasible(&s, &extra, &settings).unwrap() {
                FeasibilityOutcome::Infeasible { best_violation, .. } => {
                    assert!(best_violation >= 1.0 - 1e-12, "{best_violation}")
                }
                other => panic!("expected infeasible, got {other:?}"),
            }
        }
    }

    #[test]
    fn ball_outside_shifted_box_is_infeasible() {
        let ball = Quadratic::new(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![0.0; 3],
            -100.0,
        )
        .unwrap();
        let s = FeasibleSet::new(3, vec![], vec![], vec![ball], vec![9.0; 3], vec![10.0; 3]).unwrap();
        let out = check_feasible(&s, &[], &OracleSettings::default()).unwrap();
        match out {
            FeasibilityOutcome::Infeasible { best_violation, certified } => {
                assert!(certified);
                assert!(best_violation >= 143.0 - 1e-9);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_marker_short_circuits() {
        let s = FeasibleSet::from_box(vec![0.0], vec![1.0]).unwrap();
        let out = check_feasible(&s, &[SublevelConstraint::Infeasible], &OracleSettings::default()).unwrap();
        assert!(!out.is_feasible());
    }

    #[test]
    fn dimension_mismatch() {
        let s = FeasibleSet::from_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let err = check_feasible(&s, &[linear(vec![1.0], 0.0)], &OracleSettings::default()).unwrap_err();
        assert!(matches!(err, QvpError::DimensionMismatch { .. }));
    }

    #[test]
    fn one_dimensional_ellipsoid() {
        let s = FeasibleSet::from_box(vec![-3.0], vec![5.0]).unwrap();
        let out = check_feasible(&s, &[linear(vec![1.0], -4.9)], &OracleSettings::default()).unwrap();
        assert!(out.is_feasible());
        let (x, v) = minimize_linear(&[-1.0], &s, 1e-10, &OracleSettings::default()).unwrap();
        assert!((v + 5.0).abs() < 1e-6, "{v} {x:?}");
    }

    #[test]
    fn minimize_linear_unit_square() {
        let s = FeasibleSet::from_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let (_, v) = minimize_linear(&[1.0, 0.0], &s, 1e-9, &OracleSettings::default()).unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn minimize_linear_example1_sum() {
        // vertices of the polytope are (0,1), (2,0), (6,2), (6,7)
        let s = example1_set();
        let (x, v) = minimize_linear(&[-1.0, -1.0], &s, 1e-10, &OracleSettings::default()).unwrap();
        assert!((v + 13.0).abs() < 1e-6, "{v} at {x:?}");
        assert!(s.violation(&x).unwrap() <= 1e-7);
    }

    #[test]
    fn deterministic() {
        let s = example1_set();
        let extra = [linear(vec![1.0, 1.0], -1.5)];
        let a = check_feasible(&s, &extra, &OracleSettings::default()).unwrap();
        let b = check_feasible(&s, &extra, &OracleSettings::default()).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
