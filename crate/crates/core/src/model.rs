//! Objective classes, convex constraints, and the map from quasiconvex
//! objectives to convex sublevel constraints.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{QvpError, Result};

/// Denominators at or below this value are treated as non-positive.
pub const TAU_DEN: f64 = 1e-8;
/// Eigenvalue slack for the PSD / NSD checks done at load time.
pub const PSD_TOL: f64 = 1e-8;

/// `aᵀx + a0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: Vec<f64>,
    pub a0: f64,
}

impl Affine {
    pub fn new(a: Vec<f64>, a0: f64) -> Self {
        Self { a, a0 }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) + self.a0
    }

    fn combine(&self, other: &Affine, scale: f64) -> Affine {
        Affine {
            a: self.a.iter().zip(&other.a).map(|(p, q)| p + scale * q).collect(),
            a0: self.a0 + scale * other.a0,
        }
    }
}

/// `xᵀQx + cᵀx + d` with `Q` stored row-major and kept symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    n: usize,
    q: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
}

impl Quadratic {
    /// Builds the form from a square matrix, replacing `Q` by `(Q + Qᵀ)/2`.
    pub fn new(q_rows: &[Vec<f64>], c: Vec<f64>, d: f64) -> Result<Self> {
        let n = c.len();
        if q_rows.len() != n {
            return Err(QvpError::DimensionMismatch {
                what: "quadratic matrix rows",
                expected: n,
                got: q_rows.len(),
            });
        }
        let mut q = vec![0.0; n * n];
        for (i, row) in q_rows.iter().enumerate() {
            if row.len() != n {
                return Err(QvpError::DimensionMismatch {
                    what: "quadratic matrix columns",
                    expected: n,
                    got: row.len(),
                });
            }
            q[i * n..(i + 1) * n].copy_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (q[i * n + j] + q[j * n + i]);
                q[i * n + j] = s;
                q[j * n + i] = s;
            }
        }
        Ok(Self { n, q, c, d })
    }

    /// The affine function `cᵀx + d` viewed as a quadratic with `Q = 0`.
    pub fn from_affine(a: &Affine) -> Self {
        let n = a.dim();
        Self {
            n,
            q: vec![0.0; n * n],
            c: a.a.clone(),
            d: a.a0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    pub fn q_rows(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn has_quadratic_part(&self) -> bool {
        self.q.iter().any(|&v| v != 0.0)
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = self.d;
        for i in 0..n {
            let row = &self.q[i * n..(i + 1) * n];
            acc += x[i] * (dot(row, x) + self.c[i]);
        }
        acc
    }

    /// Writes `2Qx + c` into `out`.
    #[inline]
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.q[i * n..(i + 1) * n];
            out[i] = 2.0 * dot(row, x) + self.c[i];
        }
    }

    /// Smallest and largest eigenvalue of `Q`.
    pub fn eigen_range(&self) -> (f64, f64) {
        if self.n == 0 {
            return (0.0, 0.0);
        }
        let m = DMatrix::from_row_slice(self.n, self.n, &self.q);
        let eig = SymmetricEigen::new(m).eigenvalues;
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Solves `Q y = rhs` for positive definite `Q`.
    pub(crate) fn solve_q(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.q);
        let chol = m.cholesky()?;
        let b = nalgebra::DVector::from_column_slice(rhs);
        Some(chol.solve(&b).iter().cloned().collect())
    }

    fn combine(&self, other: &Quadratic, scale: f64) -> Quadratic {
        Quadratic {
            n: self.n,
            q: self.q.iter().zip(&other.q).map(|(p, q)| p + scale * q).collect(),
            c: self.c.iter().zip(&other.c).map(|(p, q)| p + scale * q).collect(),
            d: self.d + scale * other.d,
        }
    }

    fn shifted(&self, delta: f64) -> Quadratic {
        Quadratic {
            d: self.d + delta,
            ..self.clone()
        }
    }
}

/// One of the supported strictly quasiconvex objective classes.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveFunction {
    /// `(aᵀx + a0) / (bᵀx + b0)`.
    LinearFractional { num: Affine, den: Affine },
    /// Nonnegative convex quadratic over positive concave quadratic (or affine).
    ConvexOverConcave { num: Quadratic, den: Quadratic },
    /// `xᵀQx + cᵀx + d` with `Q ⪰ 0`.
    ConvexQuadratic(Quadratic),
}

impl ObjectiveFunction {
    pub fn dim(&self) -> usize {
        match self {
            Self::LinearFractional { num, .. } => num.dim(),
            Self::ConvexOverConcave { num, .. } => num.dim(),
            Self::ConvexQuadratic(q) => q.dim(),
        }
    }

    /// Checks dimensions and curvature. Called once when a problem is built.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |what: &'static str, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(QvpError::DimensionMismatch {
                    what,
                    expected: n,
                    got,
                })
            }
        };
        match self {
            Self::LinearFractional { num, den } => {
                check("fractional numerator", num.dim())?;
                check("fractional denominator", den.dim())?;
            }
            Self::ConvexOverConcave { num, den } => {
                check("fractional numerator", num.dim())?;
                check("fractional denominator", den.dim())?;
                let (lo, _) = num.eigen_range();
                if lo < -PSD_TOL {
                    return Err(QvpError::InvalidProblem(format!(
                        "numerator quadratic is not convex (min eigenvalue {lo:e})"
                    )));
                }
                let (_, hi) = den.eigen_range();
                if hi > PSD_TOL {
                    return Err(QvpError::InvalidProblem(format!(
                        "denominator quadratic is not concave (max eigenvalue {hi:e})"
                    )));
                }
            }
            Self::ConvexQuadratic(q) => {
                check("quadratic objective", q.dim())?;
                let (lo, _) = q.eigen_range();
                if lo < -PSD_TOL {
                    return Err(QvpError::InvalidProblem(format!(
                        "quadratic objective is not convex (min eigenvalue {lo:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Denominator value at `x`, or `None` for non-fractional objectives.
    pub fn denominator(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::LinearFractional { den, .. } => Some(den.value(x)),
            Self::ConvexOverConcave { den, .. } => Some(den.value(x)),
            Self::ConvexQuadratic(_) => None,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(QvpError::DimensionMismatch {
                what: "decision point",
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self {
            Self::LinearFractional { num, den } => {
                let d = den.value(x);
                if d <= TAU_DEN {
                    return Err(QvpError::DenominatorNonPositive {
                        value: d,
                        threshold: TAU_DEN,
                    });
                }
                Ok(num.value(x) / d)
            }
            Self::ConvexOverConcave { num, den } => {
                let d = den.value(x);
                if d <= TAU_DEN {
                    return Err(QvpError::DenominatorNonPositive {
                        value: d,
                        threshold: TAU_DEN,
                    });
                }
                let h = num.value(x);
                if h < -TAU_DEN {
                    return Err(QvpError::NonnegativityViolated { value: h });
                }
                Ok(h / d)
            }
            Self::ConvexQuadratic(q) => Ok(q.value(x)),
        }
    }

    /// Convex constraint whose solution set within the feasible set equals
    /// `{x : f(x) ≤ level}`.
    pub fn sublevel(&self, level: f64) -> SublevelConstraint {
        match self {
            Self::LinearFractional { num, den } => {
                SublevelConstraint::Convex(ConvexConstraint::Linear(num.combine(den, -level)))
            }
            Self::ConvexOverConcave { num, den } => {
                // ratio of a nonnegative numerator and a positive denominator
                if level < 0.0 {
                    return SublevelConstraint::Infeasible;
                }
                ConvexConstraint::from_quadratic(num.combine(den, -level)).into()
            }
            Self::ConvexQuadratic(q) => ConvexConstraint::from_quadratic(q.shifted(-level)).into(),
        }
    }
}

/// A convex inequality `g(x) ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexConstraint {
    Linear(Affine),
    Quadratic(Quadratic),
}

impl ConvexConstraint {
    /// Downgrades quadratics with a vanishing `Q` to linear constraints.
    pub fn from_quadratic(q: Quadratic) -> Self {
        if q.has_quadratic_part() {
            Self::Quadratic(q)
        } else {
            Self::Linear(Affine::new(q.c, q.d))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Linear(a) => a.dim(),
            Self::Quadratic(q) => q.dim(),
        }
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Linear(a) => a.value(x),
            Self::Quadratic(q) => q.value(x),
        }
    }

    #[inline]
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Linear(a) => out.copy_from_slice(&a.a),
            Self::Quadratic(q) => q.gradient_into(x, out),
        }
    }
}

/// Result of turning `f_j(x) ≤ level` into a convex inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum SublevelConstraint {
    Convex(ConvexConstraint),
    /// The sublevel set is empty for every `x`.
    Infeasible,
}

impl From<ConvexConstraint> for SublevelConstraint {
    fn from(c: ConvexConstraint) -> Self {
        SublevelConstraint::Convex(c)
    }
}

impl SublevelConstraint {
    /// Constraint value at `x`; `+∞` for the canonical infeasible marker.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Convex(c) => c.value(x),
            Self::Infeasible => f64::INFINITY,
        }
    }
}

/// Compact convex feasible set: `Ax ≤ r`, convex quadratic inequalities and
/// variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    n: usize,
    linear: Vec<Affine>,
    quadratic: Vec<Quadratic>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    ball_center: Vec<f64>,
    ball_radius: f64,
    compiled: Vec<ConvexConstraint>,
}

impl FeasibleSet {
    /// Builds and structurally validates the set. Boundedness must follow
    /// from finite variable bounds or a strictly convex quadratic constraint.
    pub fn new(
        n: usize,
        linear_rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        quadratic: Vec<Quadratic>,
        lo: Vec<f64>,
        hi: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(QvpError::InvalidProblem("n must be at least 1".into()));
        }
        if linear_rows.len() != rhs.len() {
            return Err(QvpError::DimensionMismatch {
                what: "linear constraint right-hand side",
                expected: linear_rows.len(),
                got: rhs.len(),
            });
        }
        let mut linear = Vec::with_capacity(rhs.len());
        for (row, r) in linear_rows.into_iter().zip(rhs) {
            if row.len() != n {
                return Err(QvpError::DimensionMismatch {
                    what: "linear constraint row",
                    expected: n,
                    got: row.len(),
                });
            }
            linear.push(Affine::new(row, -r));
        }
        for q in &quadratic {
            if q.dim() != n {
                return Err(QvpError::DimensionMismatch {
                    what: "quadratic constraint",
                    expected: n,
                    got: q.dim(),
                });
            }
            let (lo_eig, _) = q.eigen_range();
            if lo_eig < -PSD_TOL {
                return Err(QvpError::InvalidProblem(format!(
                    "quadratic constraint is not convex (min eigenvalue {lo_eig:e})"
                )));
            }
        }
        for (what, v) in [("lower bounds", &lo), ("upper bounds", &hi)] {
            if v.len() != n {
                return Err(QvpError::DimensionMismatch {
                    what,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h || l.is_nan() || h.is_nan()) {
            return Err(QvpError::InfeasibleSet);
        }

        let (ball_center, ball_radius) = enclosing_ball(n, &quadratic, &lo, &hi)?;
        let compiled = compile(&linear, &quadratic);
        Ok(Self {
            n,
            linear,
            quadratic,
            lo,
            hi,
            ball_center,
            ball_radius,
            compiled,
        })
    }

    /// The box `[lo, hi]` with no other constraints.
    pub fn from_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::new(lo.len(), vec![], vec![], vec![], lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[Affine] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Quadratic] {
        &self.quadratic
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    /// Clamps `x` into the variable bounds.
    pub fn clamp_to_bounds(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.max(self.lo[j]).min(self.hi[j]);
        }
    }

    /// A Euclidean ball that contains the set.
    pub fn enclosing_ball(&self) -> (&[f64], f64) {
        (&self.ball_center, self.ball_radius)
    }

    /// Axis-aligned box containing the set: finite bounds where given, the
    /// enclosing ball elsewhere.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = (0..self.n)
            .map(|j| self.lo[j].max(self.ball_center[j] - self.ball_radius))
            .collect();
        let hi = (0..self.n)
            .map(|j| self.hi[j].min(self.ball_center[j] + self.ball_radius))
            .collect();
        (lo, hi)
    }

    /// The linear and quadratic constraints as `g(x) ≤ 0`; variable bounds
    /// are kept separately.
    pub fn constraints(&self) -> &[ConvexConstraint] {
        &self.compiled
    }

    /// `max(0, max_i g_i(x))`; zero exactly when `x` lies in the set.
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(QvpError::DimensionMismatch {
                what: "decision point",
                expected: self.n,
                got: x.len(),
            });
        }
        let mut worst = 0.0_f64;
        for a in &self.linear {
            worst = worst.max(a.value(x));
        }
        for q in &self.quadratic {
            worst = worst.max(q.value(x));
        }
        for j in 0..self.n {
            worst = worst.max(self.lo[j] - x[j]).max(x[j] - self.hi[j]);
        }
        Ok(worst)
    }
}

fn compile(linear: &[Affine], quadratic: &[Quadratic]) -> Vec<ConvexConstraint> {
    let mut out: Vec<ConvexConstraint> = linear.iter().cloned().map(ConvexConstraint::Linear).collect();
    out.extend(quadratic.iter().cloned().map(ConvexConstraint::from_quadratic));
    out
}

/// Same as [`FeasibleSet::violation`].
pub fn evaluate_constraints(set: &FeasibleSet, x: &[f64]) -> Result<f64> {
    set.violation(x)
}

fn enclosing_ball(
    n: usize,
    quadratic: &[Quadratic],
    lo: &[f64],
    hi: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let mut best: Option<(Vec<f64>, f64)> = None;
    if lo.iter().chain(hi).all(|v| v.is_finite()) {
        let center: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let r = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| (0.5 * (h - l)).powi(2))
            .sum::<f64>()
            .sqrt();
        best = Some((center, r));
    }
    for q in quadratic {
        let (lam, _) = q.eigen_range();
        if lam <= PSD_TOL {
            continue;
        }
        // {xᵀQx + cᵀx + d ≤ 0} = {(x-xc)ᵀQ(x-xc) ≤ xcᵀQxc - d}, xc = -Q⁻¹c/2
        let half: Vec<f64> = q.c.iter().map(|v| -0.5 * v).collect();
        let Some(xc) = q.solve_q(&half) else { continue };
        let level = -q.value(&xc);
        if level < 0.0 {
            return Err(QvpError::InfeasibleSet);
        }
        let r = (level / lam).sqrt();
        if best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((xc, r));
        }
    }
    let (center, r) = best.ok_or_else(|| {
        QvpError::InvalidProblem(
            "feasible set must be bounded: give finite bounds for every variable \
             or a strictly convex quadratic constraint"
                .into(),
        )
    })?;
    debug_assert_eq!(center.len(), n);
    Ok((center, r))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1_objectives() -> (ObjectiveFunction, ObjectiveFunction) {
        let f1 = ObjectiveFunction::LinearFractional {
            num: Affine::new(vec![-1.0, 0.0], 0.0),
            den: Affine::new(vec![1.0, 1.0], 0.0),
        };
        let f2 = ObjectiveFunction::LinearFractional {
            num: Affine::new(vec![3.0, -2.0], 0.0),
            den: Affine::new(vec![1.0, -1.0], 3.0),
        };
        (f1, f2)
    }

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

    #[test]
    fn evaluates_linear_fractional() {
        let (f1, f2) = example1_objectives();
        assert_eq!(f1.evaluate(&[1.0, 1.0]).unwrap(), -0.5);
        assert_eq!(f2.evaluate(&[2.0, 1.0]).unwrap(), 4.0 / 4.0);
    }

    #[test]
    fn evaluates_convex_over_concave() {
        let num = Quadratic::new(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![-2.0, -8.0],
            20.0,
        )
        .unwrap();
        let den = Quadratic::from_affine(&Affine::new(vec![0.0, 1.0], 0.0));
        let f2 = ObjectiveFunction::ConvexOverConcave { num, den };
        assert_eq!(f2.evaluate(&[1.0, 1.0]).unwrap(), 12.0);
    }

    #[test]
    fn evaluates_quadratic_at_origin() {
        let q = Quadratic::new(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![0.0, 10.0, -120.0],
            0.0,
        )
        .unwrap();
        let f = ObjectiveFunction::ConvexQuadratic(q);
        assert_eq!(f.evaluate(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_denominator() {
        let (f1, _) = example1_objectives();
        assert!(matches!(
            f1.evaluate(&[0.0, 0.0]),
            Err(QvpError::DenominatorNonPositive { .. })
        ));
    }

    #[test]
    fn rejects_negative_numerator() {
        let num = Quadratic::from_affine(&Affine::new(vec![1.0], -1.0));
        let den = Quadratic::from_affine(&Affine::new(vec![0.0], 1.0));
        let f = ObjectiveFunction::ConvexOverConcave { num, den };
        assert!(matches!(
            f.evaluate(&[0.0]),
            Err(QvpError::NonnegativityViolated { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (f1, _) = example1_objectives();
        assert!(matches!(
            f1.evaluate(&[1.0]),
            Err(QvpError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_fractional_sublevel_cross_multiplies() {
        let (f1, _) = example1_objectives();
        let level = -0.3596;
        match f1.sublevel(level) {
            SublevelConstraint::Convex(ConvexConstraint::Linear(a)) => {
                assert!((a.a[0] - (-1.0 + 0.3596)).abs() < 1e-15);
                assert!((a.a[1] - 0.3596).abs() < 1e-15);
                assert_eq!(a.a0, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_sublevel_shifts_constant() {
        let q = Quadratic::new(&[vec![2.0]], vec![1.0], 3.0).unwrap();
        let f = ObjectiveFunction::ConvexQuadratic(q.clone());
        match f.sublevel(5.0) {
            SublevelConstraint::Convex(ConvexConstraint::Quadratic(s)) => {
                assert_eq!(s.d, -2.0);
                assert_eq!(s.c, q.c);
                assert_eq!(s.q(0, 0), 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn convex_over_concave_negative_level_is_infeasible() {
        let num = Quadratic::new(&[vec![1.0]], vec![0.0], 1.0).unwrap();
        let den = Quadratic::new(&[vec![-1.0]], vec![0.0], 4.0).unwrap();
        let f = ObjectiveFunction::ConvexOverConcave { num, den };
        assert_eq!(f.sublevel(-1.0), SublevelConstraint::Infeasible);
    }

    #[test]
    fn constraint_violation_examples() {
        let s = example1_set();
        assert_eq!(s.violation(&[2.0, 1.0]).unwrap(), 0.0);
        // x₁ - 2x₂ ≤ 2 is violated by 3, more than x₁ ≤ 6 is
        assert_eq!(s.violation(&[7.0, 1.0]).unwrap(), 3.0);

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
        let s3 = FeasibleSet::new(3, vec![], vec![], vec![ball], vec![0.0; 3], vec![10.0; 3]).unwrap();
        assert_eq!(s3.violation(&[10.0, 10.0, 10.0]).unwrap(), 200.0);
    }

    #[test]
    fn symmetrizes_on_load() {
        let q = Quadratic::new(&[vec![1.0, 2.0], vec![0.0, 1.0]], vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(q.q(0, 1), 1.0);
        assert_eq!(q.q(1, 0), 1.0);
        let again = Quadratic::new(&q.q_rows(), q.c.clone(), q.d).unwrap();
        assert_eq!(q, again);
    }

    #[test]
    fn unbounded_set_is_rejected() {
        let err = FeasibleSet::new(
            2,
            vec![vec![1.0, 0.0]],
            vec![1.0],
            vec![],
            vec![f64::NEG_INFINITY; 2],
            vec![f64::INFINITY; 2],
        )
        .unwrap_err();
        assert!(matches!(err, QvpError::InvalidProblem(_)));
    }

    #[test]
    fn ball_gives_enclosing_sphere() {
        let ball = Quadratic::new(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![-2.0, 0.0], -3.0).unwrap();
        let s = FeasibleSet::new(
            2,
            vec![],
            vec![],
            vec![ball],
            vec![f64::NEG_INFINITY; 2],
            vec![f64::INFINITY; 2],
        )
        .unwrap();
        let (c, r) = s.enclosing_ball();
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonconvex_objective_is_rejected() {
        let q = Quadratic::new(&[vec![-1.0]], vec![0.0], 0.0).unwrap();
        assert!(ObjectiveFunction::ConvexQuadratic(q).validate(1).is_err());
    }
}
