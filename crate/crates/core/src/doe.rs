//! Design of experiments: box domains, Latin hypercube sampling and the
//! evaluated-data container shared by the rest of the crate.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;

/// Relative per-axis distance under which two points count as identical.
pub const DUPLICATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DoeError {
    #[error("domain must have at least one dimension")]
    EmptyDomain,
    #[error("bounds have different lengths ({lower} lower, {upper} upper)")]
    BoundsLength { lower: usize, upper: usize },
    #[error("degenerate domain on axis {axis}: lower bound must be below upper bound")]
    DegenerateDomain { axis: usize },
    #[error("sample count must be positive")]
    EmptySample,
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies outside the domain on axis {axis}")]
    OutOfDomain { axis: usize },
    #[error("point duplicates existing row {row}")]
    DuplicatePoint { row: usize },
}

/// Axis-aligned box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawDomain> for BoxDomain {
    type Error = DoeError;
    fn try_from(raw: RawDomain) -> Result<Self, Self::Error> {
        BoxDomain::new(raw.lower, raw.upper)
    }
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DoeError> {
        if lower.len() != upper.len() {
            return Err(DoeError::BoundsLength {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(DoeError::EmptyDomain);
        }
        if let Some(axis) = lower
            .iter()
            .zip(&upper)
            .position(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite())
        {
            return Err(DoeError::DegenerateDomain { axis });
        }
        Ok(Self { lower, upper })
    }

    /// The unit hypercube `[0, 1]^d`.
    pub fn unit(d: usize) -> Result<Self, DoeError> {
        Self::new(alloc::vec![0.0; d], alloc::vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), DoeError> {
        if x.len() != self.dim() {
            return Err(DoeError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        match x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(v, (l, u))| !(*v >= *l && *v <= *u))
        {
            Some(axis) => Err(DoeError::OutOfDomain { axis }),
            None => Ok(()),
        }
    }

    /// Maps a point of the box to the unit hypercube.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.lower[i]) / self.width(i))
            .collect()
    }

    /// Inverse of [`normalize`](Self::normalize).
    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, v)| self.lower[i] + v * self.width(i))
            .collect()
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }

    /// True when `a` and `b` agree on every axis within
    /// [`DUPLICATE_TOLERANCE`] relative to the axis width.
    pub fn same_point(&self, a: &[f64], b: &[f64]) -> bool {
        a.iter()
            .zip(b)
            .enumerate()
            .all(|(i, (x, y))| (x - y).abs() <= DUPLICATE_TOLERANCE * self.width(i))
    }
}

/// Latin hypercube sample: one random permutation of the strata per axis,
/// uniform jitter inside each stratum.
pub fn lhs_sample(domain: &BoxDomain, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, DoeError> {
    let mut rng = rng::stream(seed, &[0x1A5]);
    lhs_sample_with(domain, count, &mut rng)
}

pub fn lhs_sample_with<R: Rng + ?Sized>(
    domain: &BoxDomain,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, DoeError> {
    if count == 0 {
        return Err(DoeError::EmptySample);
    }
    let d = domain.dim();
    let mut points = alloc::vec![alloc::vec![0.0; d]; count];
    let mut strata: Vec<usize> = (0..count).collect();
    for axis in 0..d {
        strata.shuffle(rng);
        let (lo, w) = (domain.lower[axis], domain.width(axis));
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            let t = (s as f64 + u) / count as f64;
            // Keep the draw inside its stratum despite rounding.
            point[axis] = (lo + t * w).min(lo + (s as f64 + 1.0) / count as f64 * w);
        }
    }
    Ok(points)
}

/// Initial design size `2d + 2c + 1` for `d` variables and `c` constraints.
pub fn initial_doe_size(d: usize, c: usize) -> usize {
    2 * d + 2 * c + 1
}

/// Evaluated design points with their objective and constraint values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    domain: BoxDomain,
    n_obj: usize,
    n_ineq: usize,
    n_eq: usize,
    points: Vec<Vec<f64>>,
    objectives: Vec<Vec<f64>>,
    ineq_constraints: Vec<Vec<f64>>,
    eq_constraints: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(domain: BoxDomain, n_obj: usize, n_ineq: usize, n_eq: usize) -> Self {
        Self {
            domain,
            n_obj,
            n_ineq,
            n_eq,
            points: Vec::new(),
            objectives: Vec::new(),
            ineq_constraints: Vec::new(),
            eq_constraints: Vec::new(),
        }
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn n_ineq(&self) -> usize {
        self.n_ineq
    }

    pub fn n_eq(&self) -> usize {
        self.n_eq
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn objectives(&self) -> &[Vec<f64>] {
        &self.objectives
    }

    pub fn ineq_constraints(&self) -> &[Vec<f64>] {
        &self.ineq_constraints
    }

    pub fn eq_constraints(&self) -> &[Vec<f64>] {
        &self.eq_constraints
    }

    /// Index of a row identical to `x`, if any.
    pub fn find_duplicate(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| self.domain.same_point(p, x))
    }

    /// Returns the dataset extended by one row.
    pub fn append(mut self, x: &[f64], f: &[f64], g: &[f64], h: &[f64]) -> Result<Self, DoeError> {
        self.push(x, f, g, h)?;
        Ok(self)
    }

    /// In-place variant of [`append`](Self::append).
    pub fn push(&mut self, x: &[f64], f: &[f64], g: &[f64], h: &[f64]) -> Result<(), DoeError> {
        self.domain.check_point(x)?;
        for (v, expected) in [(f, self.n_obj), (g, self.n_ineq), (h, self.n_eq)] {
            if v.len() != expected {
                return Err(DoeError::DimensionMismatch {
                    expected,
                    found: v.len(),
                });
            }
        }
        if let Some(row) = self.find_duplicate(x) {
            return Err(DoeError::DuplicatePoint { row });
        }
        self.points.push(x.to_vec());
        self.objectives.push(f.to_vec());
        self.ineq_constraints.push(g.to_vec());
        self.eq_constraints.push(h.to_vec());
        Ok(())
    }

    /// Column `k` over all rows, outputs ordered objectives, then
    /// inequality constraints, then equality constraints.
    pub fn output_column(&self, k: usize) -> Vec<f64> {
        let (rows, j) = if k < self.n_obj {
            (&self.objectives, k)
        } else if k < self.n_obj + self.n_ineq {
            (&self.ineq_constraints, k - self.n_obj)
        } else {
            (&self.eq_constraints, k - self.n_obj - self.n_ineq)
        };
        rows.iter().map(|r| r[j]).collect()
    }

    pub fn n_outputs(&self) -> usize {
        self.n_obj + self.n_ineq + self.n_eq
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn strata_counts(points: &[Vec<f64>], domain: &BoxDomain, axis: usize) -> Vec<usize> {
        let n = points.len();
        let mut counts = vec![0; n];
        for p in points {
            let t = (p[axis] - domain.lower()[axis]) / domain.width(axis);
            counts[((t * n as f64) as usize).min(n - 1)] += 1;
        }
        counts
    }

    #[test]
    fn lhs_unit_square_quartiles() {
        let domain = BoxDomain::unit(2).unwrap();
        let pts = lhs_sample(&domain, 4, 7).unwrap();
        assert_eq!(pts.len(), 4);
        for axis in 0..2 {
            assert_eq!(strata_counts(&pts, &domain, axis), vec![1; 4]);
        }
    }

    #[test]
    fn lhs_single_point() {
        let domain = BoxDomain::unit(1).unwrap();
        let pts = lhs_sample(&domain, 1, 12345).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0][0] >= 0.0 && pts[0][0] < 1.0);
    }

    #[test]
    fn lhs_bnh_domain_histogram() {
        let domain = BoxDomain::new(vec![0.0, 0.0], vec![5.0, 3.0]).unwrap();
        let pts = lhs_sample(&domain, initial_doe_size(2, 2), 0).unwrap();
        assert_eq!(pts.len(), 9);
        for p in &pts {
            assert!(domain.contains(p));
        }
        for axis in 0..2 {
            assert_eq!(strata_counts(&pts, &domain, axis), vec![1; 9]);
        }
    }

    #[test]
    fn lhs_rejects_bad_input() {
        let domain = BoxDomain::unit(2).unwrap();
        assert_eq!(lhs_sample(&domain, 0, 1), Err(DoeError::EmptySample));
        assert_eq!(
            BoxDomain::new(vec![0.0, 1.0], vec![1.0, 1.0]),
            Err(DoeError::DegenerateDomain { axis: 1 })
        );
        assert_eq!(
            BoxDomain::new(vec![2.0], vec![1.0]),
            Err(DoeError::DegenerateDomain { axis: 0 })
        );
    }

    #[test]
    fn doe_size_formula() {
        assert_eq!(initial_doe_size(2, 0), 5);
        assert_eq!(initial_doe_size(2, 2), 9);
        assert_eq!(initial_doe_size(6, 6), 25);
    }

    #[test]
    fn append_rows() {
        let domain = BoxDomain::unit(2).unwrap();
        let ds = Dataset::new(domain, 2, 0, 0);
        let ds = ds.append(&[0.1, 0.2], &[1.0, 2.0], &[], &[]).unwrap();
        assert_eq!(ds.len(), 1);
        let ds = ds.append(&[0.3, 0.4], &[3.0, 4.0], &[], &[]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.points()[0], vec![0.1, 0.2]);
        assert_eq!(ds.points()[1], vec![0.3, 0.4]);
        let err = ds.clone().append(&[0.1, 0.2], &[0.0, 0.0], &[], &[]).unwrap_err();
        assert_eq!(err, DoeError::DuplicatePoint { row: 0 });
        assert!(matches!(
            ds.append(&[1.5, 0.2], &[0.0, 0.0], &[], &[]),
            Err(DoeError::OutOfDomain { axis: 0 })
        ));
    }

    #[test]
    fn near_duplicates_are_relative_to_axis_width() {
        let domain = BoxDomain::new(vec![0.0], vec![1e6]).unwrap();
        assert!(domain.same_point(&[5.0], &[5.0 + 1e-5]));
        assert!(!domain.same_point(&[5.0], &[5.0 + 1e-3]));
    }

    proptest::proptest! {
        #[test]
        fn lhs_is_stratified_and_deterministic(count in 1usize..60, d in 1usize..6, seed in 0u64..10_000) {
            let domain = BoxDomain::new(
                (0..d).map(|i| -(i as f64)).collect(),
                (0..d).map(|i| 1.0 + 2.0 * i as f64).collect(),
            ).unwrap();
            let a = lhs_sample(&domain, count, seed).unwrap();
            let b = lhs_sample(&domain, count, seed).unwrap();
            proptest::prop_assert_eq!(&a, &b);
            for axis in 0..d {
                proptest::prop_assert_eq!(strata_counts(&a, &domain, axis), vec![1; count]);
            }
            for p in &a {
                proptest::prop_assert!(domain.contains(p));
            }
        }

        #[test]
        fn doe_size_exact(d in 1usize..=100, c in 0usize..=100) {
            proptest::prop_assert_eq!(initial_doe_size(d, c), 2 * d + 2 * c + 1);
        }
    }
}
