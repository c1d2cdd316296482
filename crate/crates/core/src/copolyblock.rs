//! Outer copolyblock `∪_{v ∈ V} [v, M]` stored as its proper vertices.

use std::collections::BTreeMap;

use crate::error::{QvpError, Result};

/// Scale-aware tolerance for componentwise comparisons inside `[m, M]`.
pub fn geometric_tolerance(lower: &[f64], upper: &[f64]) -> f64 {
    let span = lower
        .iter()
        .zip(upper)
        .map(|(l, u)| (u - l).abs())
        .fold(0.0, f64::max);
    1e-9 * span.max(1.0)
}

/// `a ≤ b + tol` in every coordinate.
pub fn weakly_below(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= *y + tol)
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    vertices: BTreeMap<u64, Vec<f64>>,
    next_seq: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    tau: f64,
}

impl VertexSet {
    /// The box itself, `V = {m}`.
    pub fn initial(lower: &[f64], upper: &[f64]) -> Self {
        let mut set = Self::empty(lower, upper);
        set.push(lower.to_vec());
        set
    }

    pub fn empty(lower: &[f64], upper: &[f64]) -> Self {
        Self {
            vertices: BTreeMap::new(),
            next_seq: 0,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            tau: geometric_tolerance(lower, upper),
        }
    }

    /// Builds a set from arbitrary points, keeping only the minimal ones.
    pub fn from_points(lower: &[f64], upper: &[f64], points: impl IntoIterator<Item = Vec<f64>>) -> Self {
        let mut set = Self::empty(lower, upper);
        let seqs: Vec<u64> = points.into_iter().map(|p| set.push(p)).collect();
        set.remove_improper(&seqs);
        set
    }

    fn push(&mut self, v: Vec<f64>) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.vertices.insert(seq, v);
        seq
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn tolerance(&self) -> f64 {
        self.tau
    }

    pub fn get(&self, seq: u64) -> Option<&[f64]> {
        self.vertices.get(&seq).map(Vec::as_slice)
    }

    /// Vertices in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &[f64])> {
        self.vertices.iter().map(|(s, v)| (*s, v.as_slice()))
    }

    pub fn seqs(&self) -> Vec<u64> {
        self.vertices.keys().copied().collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.vertices.values().cloned().collect()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        if !weakly_below(y, &self.upper, self.tau) {
            return false;
        }
        self.vertices.values().any(|v| weakly_below(v, y, self.tau))
    }

    /// Cuts the cone `w - ℝ₊^p` off at vertex `seq`; returns the sequence
    /// numbers of the surviving new vertices.
    pub fn cut(&mut self, seq: u64, w: &[f64]) -> Result<Vec<u64>> {
        let v = self.vertices.get(&seq).ok_or(QvpError::VertexNotInSet(seq))?.clone();
        if w.len() != v.len() {
            return Err(QvpError::DimensionMismatch {
                what: "cut point",
                expected: v.len(),
                got: w.len(),
            });
        }
        if !weakly_below(&v, w, self.tau) {
            return Err(QvpError::WNotAbove);
        }
        // A zero displacement leaves the copolyblock as it is.
        if v.iter().zip(w).all(|(a, b)| b - a <= 0.0) {
            return Ok(Vec::new());
        }

        self.vertices.remove(&seq);
        let mut fresh = Vec::with_capacity(v.len());
        for i in 0..v.len() {
            let raised = w[i].min(self.upper[i]).max(v[i]);
            if raised >= self.upper[i] - self.tau {
                continue;
            }
            let mut z = v.clone();
            z[i] = raised;
            fresh.push(self.push(z));
        }
        Ok(self.remove_improper(&fresh))
    }

    /// Drops every candidate that another vertex dominates from below.
    /// Earlier vertices win ties. Returns the candidates that survive.
    pub fn remove_improper(&mut self, candidates: &[u64]) -> Vec<u64> {
        let mut kept = Vec::with_capacity(candidates.len());
        for &c in candidates {
            let Some(z) = self.vertices.get(&c) else { continue };
            let dominated = self
                .vertices
                .iter()
                .any(|(s, u)| *s != c && weakly_below(u, z, self.tau));
            if dominated {
                self.vertices.remove(&c);
            } else {
                kept.push(c);
            }
        }
        kept
    }

    /// Largest recorded distance `‖w_v - v‖` over current vertices.
    pub fn gap(&self, w_of: &BTreeMap<u64, Vec<f64>>) -> f64 {
        self.vertices
            .iter()
            .filter_map(|(s, v)| w_of.get(s).map(|w| euclidean_distance(w, v)))
            .fold(0.0, f64::max)
    }

    /// Pairwise check that no vertex is weakly below another.
    pub fn is_proper(&self) -> bool {
        let pts: Vec<&Vec<f64>> = self.vertices.values().collect();
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate() {
                if i != j && weakly_below(a, b, self.tau) {
                    return false;
                }
            }
        }
        true
    }
}

/// Minimal elements of a point list, first occurrence kept on ties.
pub fn minimal_points(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, z) in points.iter().enumerate() {
        let dominated = points.iter().enumerate().any(|(j, u)| {
            j != i && weakly_below(u, z, tol) && (j < i || !weakly_below(z, u, tol))
        });
        if !dominated {
            out.push(z.clone());
        }
    }
    out
}
