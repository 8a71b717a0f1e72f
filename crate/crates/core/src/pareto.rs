//! Pareto dominance, non-dominated archives, the 2-D hypervolume and the
//! IGD+ quality indicator.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::problems::Problem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParetoError {
    #[error("point set is empty")]
    EmptySet,
    #[error("point {index} does not strictly dominate the reference point")]
    PointBeyondReference { index: usize },
    #[error("hypervolume is implemented for two objectives only, got {0}")]
    UnsupportedDimension(usize),
    #[error("no analytic Pareto front is known for problem {0:?}")]
    UnknownProblem(alloc::string::String),
}

/// `a` dominates `b` (minimization): no worse everywhere, not identical.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).all(|(x, y)| x <= y) && a != b
}

/// `a` is no worse than `b` in every component.
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Mutually non-dominated objective vectors, optionally with the design
/// points that produced them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    members: Vec<Vec<f64>>,
    designs: Vec<Vec<f64>>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    /// Design points aligned with [`members`](Self::members); empty when the
    /// archive was built from objective vectors alone.
    pub fn designs(&self) -> &[Vec<f64>] {
        &self.designs
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts `f` unless it is weakly dominated by a member; evicts the
    /// members it dominates. Returns whether the archive changed.
    pub fn insert(&mut self, f: Vec<f64>, design: Option<Vec<f64>>) -> bool {
        if self.members.iter().any(|m| weakly_dominates(m, &f)) {
            return false;
        }
        let keep: Vec<bool> = self.members.iter().map(|m| !dominates(&f, m)).collect();
        let with_designs = !self.designs.is_empty() || (self.members.is_empty() && design.is_some());
        let mut i = 0;
        self.members.retain(|_| {
            i += 1;
            keep[i - 1]
        });
        if !self.designs.is_empty() {
            let mut j = 0;
            self.designs.retain(|_| {
                j += 1;
                keep[j - 1]
            });
        }
        self.members.push(f);
        if with_designs {
            self.designs.push(design.unwrap_or_default());
        }
        true
    }

    /// Members sorted by the first objective.
    pub fn sorted_by_first(&self) -> Vec<Vec<f64>> {
        let mut m = self.members.clone();
        m.sort_by(|a, b| a[0].total_cmp(&b[0]));
        m
    }
}

/// Non-dominated subset of `points`; duplicates collapse to one member.
pub fn nondominated_filter(points: &[Vec<f64>]) -> ParetoArchive {
    let idx = nondominated_indices(points);
    ParetoArchive {
        members: idx.iter().map(|&i| points[i].clone()).collect(),
        designs: Vec::new(),
    }
}

/// Like [`nondominated_filter`], carrying the design point of each member.
pub fn nondominated_filter_with_designs(points: &[Vec<f64>], designs: &[Vec<f64>]) -> ParetoArchive {
    debug_assert_eq!(points.len(), designs.len());
    let idx = nondominated_indices(points);
    ParetoArchive {
        members: idx.iter().map(|&i| points[i].clone()).collect(),
        designs: idx.iter().map(|&i| designs[i].clone()).collect(),
    }
}

/// Indices of the non-dominated points, first occurrence kept among
/// duplicates, ordered lexicographically by objective vector.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    if points.first().is_some_and(|p| p.len() == 2) {
        // Sweep: in lexicographic order a point survives iff its second
        // objective beats every earlier one.
        let mut best = f64::INFINITY;
        order
            .into_iter()
            .filter(|&i| {
                let keep = points[i][1] < best;
                if keep {
                    best = points[i][1];
                }
                keep
            })
            .collect()
    } else {
        // Lexicographic order guarantees dominators come first.
        let mut kept: Vec<usize> = Vec::new();
        for i in order {
            if !kept.iter().any(|&k| weakly_dominates(&points[k], &points[i])) {
                kept.push(i);
            }
        }
        kept
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Sample of an analytic optimal Pareto front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    points: Vec<Vec<f64>>,
}

impl ReferenceFront {
    /// Wraps a point set after non-dominated filtering.
    pub fn new(points: &[Vec<f64>]) -> Result<Self, ParetoError> {
        if points.is_empty() {
            return Err(ParetoError::EmptySet);
        }
        Ok(Self {
            points: nondominated_filter(points).members,
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// IGD+: mean over `z` in the reference set of
/// `min_a sqrt(sum_j max(a_j - z_j, 0)^2)`.
pub fn igd_plus(attained: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64, ParetoError> {
    if attained.is_empty() || reference.is_empty() {
        return Err(ParetoError::EmptySet);
    }
    let total: f64 = reference
        .iter()
        .map(|z| {
            attained
                .iter()
                .map(|a| {
                    a.iter()
                        .zip(z)
                        .map(|(ai, zi)| {
                            let t = (ai - zi).max(0.0);
                            t * t
                        })
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .map(libm::sqrt)
        .sum();
    Ok(total / reference.len() as f64)
}

/// Area dominated by `points` and bounded above by `reference` (n = 2).
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64, ParetoError> {
    if reference.len() != 2 {
        return Err(ParetoError::UnsupportedDimension(reference.len()));
    }
    if let Some(index) = points
        .iter()
        .position(|p| p.len() != 2 || !(p[0] < reference[0] && p[1] < reference[1]))
    {
        return Err(ParetoError::PointBeyondReference { index });
    }
    Ok(hypervolume_2d(points, reference))
}

/// Staircase sweep; points outside the reference box contribute nothing.
pub(crate) fn hypervolume_2d(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .map(|p| (p[0], p[1]))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut level = reference[1];
    for (x, y) in pts {
        if y < level {
            area += (reference[0] - x) * (level - y);
            level = y;
        }
    }
    area
}

/// Samples the analytic optimal front of a benchmark problem.
///
/// `count` parameter values are spread over the pieces of the Pareto-set
/// parameterization in proportion to each piece's length in objective
/// space, evaluated with the true objectives, restricted to feasible points
/// and non-dominated filtered.
pub fn reference_front(problem: &dyn Problem, count: usize) -> Result<ReferenceFront, ParetoError> {
    let bench = problem
        .benchmark()
        .ok_or_else(|| ParetoError::UnknownProblem(problem.name().into()))?;
    if count == 0 {
        return Err(ParetoError::EmptySet);
    }
    let segments = bench.pareto_segments();
    const PROBE: usize = 256;
    let lengths: Vec<f64> = (0..segments)
        .map(|s| {
            let pts: Vec<Vec<f64>> = (0..=PROBE)
                .map(|i| bench.eval(&bench.pareto_set_point(s, i as f64 / PROBE as f64)).f)
                .collect();
            pts.windows(2)
                .map(|w| libm::sqrt(w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum()))
                .sum()
        })
        .collect();
    let counts = apportion(count, &lengths);

    let mut objectives = Vec::with_capacity(count);
    for (s, &k) in counts.iter().enumerate() {
        for i in 0..k {
            let t = if k == 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
            let e = bench.eval(&bench.pareto_set_point(s, t));
            if e.g.iter().all(|g| *g >= -1e-9) {
                objectives.push(e.f);
            }
        }
    }
    ReferenceFront::new(&objectives)
}

/// Largest-remainder split of `total` proportional to `weights`.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        let mut out = vec![total / weights.len(); weights.len()];
        out[0] += total % weights.len();
        return out;
    }
    let raw: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut out: Vec<usize> = raw.iter().map(|r| *r as usize).collect();
    let mut rest = total - out.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - out[b] as f64).total_cmp(&(raw[a] - out[a] as f64)));
    for i in order {
        if rest == 0 {
            break;
        }
        out[i] += 1;
        rest -= 1;
    }
    out
}
