#![allow(dead_code)]

use std::path::PathBuf;

use qvp_core::copolyblock::{minimal_points, VertexSet};
use qvp_core::diagnostics::sample_feasible;
use qvp_core::driver::{solve_with_observer, Action, SolveOptions, SolveResult};
use qvp_core::model::{Affine, FeasibleSet, ObjectiveFunction, Quadratic};
use qvp_core::{solve_chebyshev, verify_wes, Direction, OracleSettings, QvpProblem, SolverSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn example(name: &str) -> QvpProblem {
    QvpProblem::from_path(example_path(name), &OracleSettings::default()).unwrap()
}

/// Random instance with `p` objectives over `n` variables in `[0,1]^n`,
/// cut by a random half-space and a ball, both passing near the center.
pub fn random_instance(rng: &mut ChaCha8Rng, p: usize, n: usize) -> QvpProblem {
    let mut objectives = Vec::with_capacity(p);
    for _ in 0..p {
        let f = match rng.random_range(0..3) {
            0 => {
                let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
                let b0 = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
                ObjectiveFunction::LinearFractional {
                    num: Affine::new(a, rng.random_range(-1.0..1.0)),
                    den: Affine::new(b, b0),
                }
            }
            1 => {
                let q = diag(rng, n, 0.1, 1.0);
                let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                ObjectiveFunction::ConvexQuadratic(Quadratic::new(&q, c, 0.0).unwrap())
            }
            _ => {
                let q = diag(rng, n, 0.1, 1.0);
                let num = Quadratic::new(&q, vec![0.0; n], 0.1).unwrap();
                let neg: Vec<Vec<f64>> = diag(rng, n, 0.01, 0.2)
                    .into_iter()
                    .map(|row| row.into_iter().map(|v| -v).collect())
                    .collect();
                let den = Quadratic::new(&neg, vec![0.0; n], 2.0).unwrap();
                ObjectiveFunction::ConvexOverConcave { num, den }
            }
        };
        objectives.push(f);
    }
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = a.iter().sum::<f64>() * 0.5 + 0.2;
    let mut eye = vec![vec![0.0; n]; n];
    for (i, row) in eye.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    // ‖x - c‖² ≤ 0.36 with c = e/2
    let ball = Quadratic::new(&eye, vec![-1.0; n], n as f64 * 0.25 - 0.36).unwrap();
    let set = FeasibleSet::new(n, vec![a], vec![r], vec![ball], vec![0.0; n], vec![1.0; n]).unwrap();
    QvpProblem::new(objectives, set, &OracleSettings::default()).unwrap()
}

fn diag(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = rng.random_range(lo..hi);
    }
    q
}

/// Componentwise minima of a finite outcome list (2-D or 3-D).
pub fn nondominated(mut ys: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ys.first().is_some_and(|y| y.len() == 2) {
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut best = f64::INFINITY;
        for y in ys {
            if y[1] < best {
                best = y[1];
                out.push(y);
            }
        }
        return out;
    }
    minimal_points(&ys, 0.0)
}

fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Counts of invariant violations found while solving one instance.
#[derive(Debug, Default, Clone)]
pub struct Violations {
    pub nesting: usize,
    pub cut_point_kept: usize,
    pub properness: usize,
    pub riv: usize,
    pub outcome_outside: usize,
    pub gap: usize,
    pub witness: usize,
    pub verify: usize,
    pub sandwich: usize,
    pub monotonicity: usize,
    pub translation: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.nesting
            + self.cut_point_kept
            + self.properness
            + self.riv
            + self.outcome_outside
            + self.gap
            + self.witness
            + self.verify
            + self.sandwich
            + self.monotonicity
            + self.translation
    }
}

/// Solves `problem` and checks every structural invariant along the way.
pub fn check_invariants(problem: &QvpProblem, options: &SolveOptions, seed: u64) -> (SolveResult, Violations) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = sample_feasible(problem, 200, seed).unwrap();
    let outcomes: Vec<Vec<f64>> = samples.iter().map(|x| problem.evaluate(x).unwrap()).collect();
    let mut bad = Violations::default();
    let mut prev: Option<VertexSet> = None;

    let result = solve_with_observer(problem, options, |state, rec| {
        let lower = state.vertices.lower().to_vec();
        let upper = state.vertices.upper().to_vec();
        let before = prev.take().unwrap_or_else(|| VertexSet::initial(&lower, &upper));
        let tau = before.tolerance();
        let clip = |y: &[f64]| -> Vec<f64> { y.iter().zip(&upper).map(|(a, b)| a.min(*b)).collect() };
        if rec.action == Action::Cut {
            if !state.vertices.is_proper() {
                bad.properness += 1;
            }
            for _ in 0..200 {
                let y: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| rng.random_range(*l..=*u)).collect();
                if state.vertices.contains(&y) && !before.contains(&y) {
                    bad.nesting += 1;
                }
            }
            let strictly_above = rec.v.iter().zip(&rec.w).all(|(v, w)| w - v > 10.0 * tau);
            if strictly_above && state.vertices.contains(&rec.v) {
                bad.cut_point_kept += 1;
            }
            // full minimality filtering of (V \ {v}) ∪ {z^i}
            let mut all: Vec<Vec<f64>> = before.points().into_iter().filter(|u| *u != rec.v).collect();
            for i in 0..rec.v.len() {
                let raised = rec.w[i].min(upper[i]).max(rec.v[i]);
                if raised < upper[i] - tau {
                    let mut z = rec.v.clone();
                    z[i] = raised;
                    all.push(z);
                }
            }
            if sorted(minimal_points(&all, tau)) != sorted(state.vertices.points()) {
                bad.riv += 1;
            }
        }
        for y in &outcomes {
            if !state.vertices.contains(&clip(y)) {
                bad.outcome_outside += 1;
            }
        }
        prev = Some(state.vertices.clone());
    })
    .unwrap();

    let d = result.direction.clone();
    let settings = &options.settings;
    if result.final_gap > options.epsilon {
        bad.gap += 1;
    }
    for rec in result.log.iter().filter(|r| r.action == Action::Accepted) {
        if rec.t.abs() * d.norm() > options.epsilon {
            bad.gap += 1;
        }
    }
    for e in &result.y_wn {
        let fx = problem.evaluate(&e.x).unwrap();
        let feasible = problem.feasible_set().violation(&e.x).unwrap() <= settings.oracle.tol_feas;
        let below_w = fx.iter().zip(&e.w).zip(d.as_slice()).all(|((f, w), dj)| *f <= w + 1e-5 * dj);
        if !feasible || fx != e.f || !below_w {
            bad.witness += 1;
        }
        if !verify_wes(problem, &e.x, &d, settings).unwrap().weakly_efficient {
            bad.verify += 1;
        }
    }
    let upper_set = result.upper_set();
    for y in &outcomes {
        if !upper_set.contains(&result.outcome_box.clip(y)) {
            bad.sandwich += 1;
        }
    }

    // scalarization monotonicity and translation on random reference points
    let m = &result.outcome_box.lower;
    let big = &result.outcome_box.upper;
    for _ in 0..3 {
        let v: Vec<f64> = m.iter().zip(big).map(|(l, u)| rng.random_range(*l..*u)).collect();
        let v2: Vec<f64> = v.iter().zip(big).map(|(a, u)| a + rng.random_range(0.0..(u - a))).collect();
        let t1 = solve_chebyshev(problem, &v, &d, Some(m), settings).unwrap().t;
        let t2 = solve_chebyshev(problem, &v2, &d, Some(m), settings).unwrap().t;
        if t1 < t2 - 2.0 * settings.tol_scalar {
            bad.monotonicity += 1;
        }
        let s = rng.random_range(-0.5..0.5);
        let shifted: Vec<f64> = v.iter().zip(d.as_slice()).map(|(a, dj)| a + s * dj).collect();
        let t3 = solve_chebyshev(problem, &shifted, &d, None, settings).unwrap().t;
        if (t3 - (t1 - s)).abs() > 2.0 * settings.tol_scalar {
            bad.translation += 1;
        }
    }
    (result, bad)
}

/// Largest spread of the payoff table: `max_j (max_i f_j(x_i) - m_j)` over
/// the individual minimizers `x_i`.
pub fn front_extent(problem: &QvpProblem) -> f64 {
    let (m, xs) = qvp_core::bounds::ideal_point(problem, &OracleSettings::default()).unwrap();
    let table: Vec<Vec<f64>> = xs.iter().map(|x| problem.evaluate(x).unwrap()).collect();
    (0..m.len())
        .map(|j| table.iter().map(|f| f[j]).fold(f64::NEG_INFINITY, f64::max) - m[j])
        .fold(0.0, f64::max)
}

/// Random instance whose front is not a single point, with options scaled
/// to it.
pub fn random_case(rng: &mut ChaCha8Rng) -> (QvpProblem, SolveOptions) {
    loop {
        let p = rng.random_range(2..=3);
        let n = rng.random_range(2..=3);
        let problem = random_instance(rng, p, n);
        let extent = front_extent(&problem);
        if extent < 0.05 {
            continue;
        }
        let mut o = SolveOptions::new(extent * rng.random_range(0.05..0.2));
        if rng.random_bool(0.5) {
            let d: Vec<f64> = (0..p).map(|_| rng.random_range(0.3..1.5)).collect();
            o.direction = Some(Direction::new(d).unwrap());
        }
        o.settings = SolverSettings::default();
        return (problem, o);
    }
}
