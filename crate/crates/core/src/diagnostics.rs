//! Sample-based checks of a finished solve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::SolveResult;
use crate::error::Result;
use crate::problem::QvpProblem;

/// Draws up to `count` feasible points by rejection from the bounding box.
/// Gives up after `50 * count` draws.
pub fn sample_feasible(problem: &QvpProblem, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let set = problem.feasible_set();
    let (lo, hi) = set.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut x = vec![0.0; lo.len()];
    for _ in 0..count.saturating_mul(50) {
        if out.len() == count {
            break;
        }
        for (j, v) in x.iter_mut().enumerate() {
            *v = rng.random_range(lo[j]..=hi[j]);
        }
        if set.violation(&x)? == 0.0 {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Smallest `s ≥ 0` with `y + s d` in `∪_{q ∈ points} [q, ∞)`, scaled to a
/// Euclidean length. Infinite when `points` is empty.
pub fn directed_distance(points: &[Vec<f64>], y: &[f64], d: &[f64]) -> f64 {
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    points
        .iter()
        .map(|q| {
            q.iter()
                .zip(y)
                .zip(d)
                .map(|((qj, yj), dj)| (qj - yj) / dj)
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
        * norm
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub samples: usize,
    /// Sampled `min(f(x), M)` not covered by the outer approximation.
    pub outside_upper: usize,
    /// Largest directed distance from a sampled outcome up to the inner
    /// approximation.
    pub max_inner_distance: f64,
}

impl SandwichReport {
    pub fn holds(&self, epsilon: f64, slack: f64) -> bool {
        self.outside_upper == 0 && self.max_inner_distance <= epsilon + slack
    }
}

/// Checks sampled outcomes against both sides of the approximation.
pub fn sandwich_check(result: &SolveResult, problem: &QvpProblem, samples: &[Vec<f64>]) -> Result<SandwichReport> {
    let upper = result.upper_set();
    let inner: Vec<Vec<f64>> = result.y_wn.iter().map(|e| result.outcome_box.clip(&e.f)).collect();
    let d = result.direction.as_slice();
    let mut report = SandwichReport {
        samples: samples.len(),
        outside_upper: 0,
        max_inner_distance: 0.0,
    };
    for x in samples {
        let y = result.outcome_box.clip(&problem.evaluate(x)?);
        if !upper.contains(&y) {
            report.outside_upper += 1;
        }
        report.max_inner_distance = report.max_inner_distance.max(directed_distance(&inner, &y, d));
    }
    Ok(report)
}
