//! The loaded multiobjective problem and its JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QvpError, Result};
use crate::model::{Affine, FeasibleSet, ObjectiveFunction, Quadratic};
use crate::oracle::{check_feasible_robust, FeasibilityOutcome, OracleSettings};
use crate::scalarize::Direction;

/// A validated multiobjective problem: `p` objectives over a compact convex
/// set, plus optional box and direction overrides from the file.
#[derive(Debug, Clone)]
pub struct QvpProblem {
    objectives: Vec<ObjectiveFunction>,
    feasible: FeasibleSet,
    box_lower: Option<Vec<f64>>,
    box_upper: Option<Vec<f64>>,
    direction: Option<Direction>,
    start: Vec<f64>,
}

impl QvpProblem {
    /// Validates dimensions, curvature and boundedness, then checks that the
    /// feasible set is nonempty. The witness found becomes the stored start
    /// point used to bracket scalarizations.
    pub fn new(
        objectives: Vec<ObjectiveFunction>,
        feasible: FeasibleSet,
        settings: &OracleSettings,
    ) -> Result<Self> {
        if objectives.len() < 2 {
            return Err(QvpError::InvalidProblem(format!(
                "need at least two objectives, got {}",
                objectives.len()
            )));
        }
        let n = feasible.dim();
        for f in &objectives {
            f.validate(n)?;
        }
        let start = match check_feasible_robust(&feasible, &[], settings)? {
            FeasibilityOutcome::Feasible { x, .. } => x,
            FeasibilityOutcome::Infeasible { .. } => return Err(QvpError::InfeasibleSet),
        };
        Ok(Self {
            objectives,
            feasible,
            box_lower: None,
            box_upper: None,
            direction: None,
            start,
        })
    }

    pub fn with_box_lower(mut self, m: Vec<f64>) -> Result<Self> {
        self.check_outcome_len("box m", m.len())?;
        self.box_lower = Some(m);
        Ok(self)
    }

    pub fn with_box_upper(mut self, upper: Vec<f64>) -> Result<Self> {
        self.check_outcome_len("box M", upper.len())?;
        self.box_upper = Some(upper);
        Ok(self)
    }

    pub fn with_direction(mut self, d: Direction) -> Result<Self> {
        self.check_outcome_len("direction", d.len())?;
        self.direction = Some(d);
        Ok(self)
    }

    fn check_outcome_len(&self, what: &'static str, got: usize) -> Result<()> {
        if got != self.num_objectives() {
            return Err(QvpError::DimensionMismatch {
                what,
                expected: self.num_objectives(),
                got,
            });
        }
        Ok(())
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn num_variables(&self) -> usize {
        self.feasible.dim()
    }

    pub fn objectives(&self) -> &[ObjectiveFunction] {
        &self.objectives
    }

    pub fn feasible_set(&self) -> &FeasibleSet {
        &self.feasible
    }

    pub fn box_lower(&self) -> Option<&[f64]> {
        self.box_lower.as_deref()
    }

    pub fn box_upper(&self) -> Option<&[f64]> {
        self.box_upper.as_deref()
    }

    pub fn direction(&self) -> Option<&Direction> {
        self.direction.as_ref()
    }

    /// A feasible point found at load time.
    pub fn start_point(&self) -> &[f64] {
        &self.start
    }

    /// `f(x)` for all objectives.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.objectives.iter().map(|f| f.evaluate(x)).collect()
    }

    pub fn from_json_str(text: &str, settings: &OracleSettings) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| QvpError::InvalidProblem(format!("cannot parse problem file: {e}")))?;
        file.into_problem(settings)
    }

    pub fn from_path(path: impl AsRef<Path>, settings: &OracleSettings) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| QvpError::InvalidProblem(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text, settings)
    }

    /// The problem as a file document.
    pub fn to_file(&self) -> ProblemFile {
        ProblemFile::from_problem(self)
    }
}

/// Serialized problem document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub objectives: Vec<ObjectiveSpec>,
    #[serde(default)]
    pub constraints: ConstraintsSpec,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub outcome_box: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    LinearFractional { num: NumSpec, den: DenSpec },
    Quadratic(QuadraticSpec),
    ConvexOverConcave { num: QuadraticSpec, den: QuadraticSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumSpec {
    pub a: Vec<f64>,
    #[serde(default)]
    pub a0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenSpec {
    pub b: Vec<f64>,
    #[serde(default)]
    pub b0: f64,
}

/// `xᵀQx + cᵀx + d`; a missing `Q` means the form is affine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSpec {
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub d: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quadratic: Vec<QuadraticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub r: Vec<f64>,
}

/// `null` entries stand for an infinite bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSpec {
    pub lo: Vec<Option<f64>>,
    pub hi: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<f64>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

impl QuadraticSpec {
    fn build(&self, n: usize) -> Result<Quadratic> {
        if self.c.len() != n {
            return Err(QvpError::DimensionMismatch {
                what: "quadratic linear term",
                expected: n,
                got: self.c.len(),
            });
        }
        match &self.q {
            Some(rows) => Quadratic::new(rows, self.c.clone(), self.d),
            None => Ok(Quadratic::from_affine(&Affine::new(self.c.clone(), self.d))),
        }
    }

    fn from_quadratic(q: &Quadratic) -> Self {
        Self {
            q: q.has_quadratic_part().then(|| q.q_rows()),
            c: q.c.clone(),
            d: q.d,
        }
    }
}

impl ObjectiveSpec {
    fn build(&self, n: usize) -> Result<ObjectiveFunction> {
        Ok(match self {
            Self::LinearFractional { num, den } => ObjectiveFunction::LinearFractional {
                num: Affine::new(num.a.clone(), num.a0),
                den: Affine::new(den.b.clone(), den.b0),
            },
            Self::Quadratic(q) => ObjectiveFunction::ConvexQuadratic(q.build(n)?),
            Self::ConvexOverConcave { num, den } => ObjectiveFunction::ConvexOverConcave {
                num: num.build(n)?,
                den: den.build(n)?,
            },
        })
    }

    fn from_objective(f: &ObjectiveFunction) -> Self {
        match f {
            ObjectiveFunction::LinearFractional { num, den } => Self::LinearFractional {
                num: NumSpec {
                    a: num.a.clone(),
                    a0: num.a0,
                },
                den: DenSpec {
                    b: den.a.clone(),
                    b0: den.a0,
                },
            },
            ObjectiveFunction::ConvexQuadratic(q) => {
                let mut spec = QuadraticSpec::from_quadratic(q);
                spec.q.get_or_insert_with(|| vec![vec![0.0; q.dim()]; q.dim()]);
                Self::Quadratic(spec)
            }
            ObjectiveFunction::ConvexOverConcave { num, den } => Self::ConvexOverConcave {
                num: QuadraticSpec::from_quadratic(num),
                den: QuadraticSpec::from_quadratic(den),
            },
        }
    }
}

impl ProblemFile {
    pub fn into_problem(self, settings: &OracleSettings) -> Result<QvpProblem> {
        let n = self.n;
        let objectives = self
            .objectives
            .iter()
            .map(|o| o.build(n))
            .collect::<Result<Vec<_>>>()?;
        let (rows, rhs) = match self.constraints.linear {
            Some(l) => (l.a, l.r),
            None => (vec![], vec![]),
        };
        let quadratic = self
            .constraints
            .quadratic
            .iter()
            .map(|q| q.build(n))
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = match self.constraints.bounds {
            Some(b) => (
                b.lo.into_iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
                b.hi.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
            ),
            None => (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n]),
        };
        let feasible = FeasibleSet::new(n, rows, rhs, quadratic, lo, hi)?;
        let mut problem = QvpProblem::new(objectives, feasible, settings)?;
        if let Some(b) = self.outcome_box {
            if let Some(m) = b.m {
                problem = problem.with_box_lower(m)?;
            }
            if let Some(upper) = b.upper {
                problem = problem.with_box_upper(upper)?;
            }
        }
        if let Some(d) = self.direction {
            problem = problem.with_direction(Direction::new(d)?)?;
        }
        Ok(problem)
    }

    pub fn from_problem(p: &QvpProblem) -> Self {
        let s = p.feasible_set();
        let finite = |v: f64| v.is_finite().then_some(v);
        let linear = (!s.linear().is_empty()).then(|| LinearSpec {
            a: s.linear().iter().map(|a| a.a.clone()).collect(),
            r: s.linear().iter().map(|a| -a.a0).collect(),
        });
        let has_bounds = s.lower().iter().chain(s.upper()).any(|v| v.is_finite());
        let bounds = has_bounds.then(|| BoundsSpec {
            lo: s.lower().iter().map(|&v| finite(v)).collect(),
            hi: s.upper().iter().map(|&v| finite(v)).collect(),
        });
        let outcome_box = (p.box_lower().is_some() || p.box_upper().is_some()).then(|| BoxSpec {
            m: p.box_lower().map(<[f64]>::to_vec),
            upper: p.box_upper().map(<[f64]>::to_vec),
        });
        Self {
            n: s.dim(),
            objectives: p.objectives().iter().map(ObjectiveSpec::from_objective).collect(),
            constraints: ConstraintsSpec {
                linear,
                quadratic: s.quadratic().iter().map(QuadraticSpec::from_quadratic).collect(),
                bounds,
            },
            outcome_box,
            direction: p.direction().map(|d| d.as_slice().to_vec()),
        }
    }
}
