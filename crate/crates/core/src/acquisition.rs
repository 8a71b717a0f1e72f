//! Multi-objective infill criteria and surrogate-based feasibility.
//!
//! All criteria assume independent Gaussian predictions per objective and
//! a bi-objective archive. The regularized criterion is
//! `gamma * alpha(x) - psi(mu(x))` with `psi` the max or sum of the
//! predicted objectives.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pareto::{self, ParetoArchive};
use crate::stats::{expected_shortfall_below, prob_at_least, prob_below};
use crate::surrogate::SurrogateBundle;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AcquisitionError {
    #[error("reference point must be strictly dominated by every archive member")]
    InvalidReference,
    #[error("criterion needs a non-empty archive")]
    EmptyArchive,
    #[error("criteria are implemented for two objectives, got {0}")]
    UnsupportedObjectives(usize),
    #[error("beta must be positive")]
    InvalidBeta,
    #[error("unknown {what} {value:?}")]
    Parse {
        what: &'static str,
        value: alloc::string::String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Pi,
    Mpi,
    Ehvi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularization {
    #[default]
    None,
    Max,
    Sum,
}

impl FromStr for Criterion {
    type Err = AcquisitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pi" => Ok(Criterion::Pi),
            "mpi" => Ok(Criterion::Mpi),
            "ehvi" => Ok(Criterion::Ehvi),
            _ => Err(AcquisitionError::Parse {
                what: "criterion",
                value: s.into(),
            }),
        }
    }
}

impl FromStr for Regularization {
    type Err = AcquisitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Regularization::None),
            "max" => Ok(Regularization::Max),
            "sum" => Ok(Regularization::Sum),
            _ => Err(AcquisitionError::Parse {
                what: "regularization",
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Pi => "pi",
            Criterion::Mpi => "mpi",
            Criterion::Ehvi => "ehvi",
        })
    }
}

impl fmt::Display for Regularization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularization::None => "none",
            Regularization::Max => "max",
            Regularization::Sum => "sum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionKind {
    pub criterion: Criterion,
    pub regularization: Regularization,
    pub beta: f64,
}

impl AcquisitionKind {
    pub fn new(criterion: Criterion, regularization: Regularization, beta: f64) -> Result<Self, AcquisitionError> {
        if !(beta > 0.0) {
            return Err(AcquisitionError::InvalidBeta);
        }
        Ok(Self {
            criterion,
            regularization,
            beta,
        })
    }

    pub fn plain(criterion: Criterion) -> Self {
        Self {
            criterion,
            regularization: Regularization::None,
            beta: 100.0,
        }
    }
}

impl fmt::Display for AcquisitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.regularization {
            Regularization::None => write!(f, "{}", self.criterion),
            r => write!(f, "{}(reg={})", self.criterion, r),
        }
    }
}

/// Bi-objective non-dominated set sorted by increasing first objective
/// (hence strictly decreasing second objective).
#[derive(Debug, Clone, PartialEq)]
pub struct SortedFront {
    points: Vec<[f64; 2]>,
}

impl SortedFront {
    pub fn new(points: &[Vec<f64>]) -> Result<Self, AcquisitionError> {
        if let Some(p) = points.iter().find(|p| p.len() != 2) {
            return Err(AcquisitionError::UnsupportedObjectives(p.len()));
        }
        let idx = pareto::nondominated_indices(points);
        Ok(Self {
            points: idx.iter().map(|&i| [points[i][0], points[i][1]]).collect(),
        })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Probability that `F ~ N(mu, diag(sigma^2))` lands in the region not
/// weakly dominated by `front`, integrated exactly over the staircase cells.
pub fn probability_of_improvement(front: &SortedFront, mu: &[f64], sigma: &[f64]) -> f64 {
    let pts = front.points();
    let Some(first) = pts.first() else {
        return 1.0;
    };
    let below1 = |a: f64| prob_below(mu[0], sigma[0], a);
    let mut total = below1(first[0]);
    for (i, p) in pts.iter().enumerate() {
        let upper = pts.get(i + 1).map_or(1.0, |q| below1(q[0]));
        let width = (upper - below1(p[0])).max(0.0);
        total += width * prob_below(mu[1], sigma[1], p[1]);
    }
    total.clamp(0.0, 1.0)
}

/// Minimum over front members `z` of `1 - prod_j P(F_j >= z_j)`.
pub fn minimum_probability_of_improvement(front: &SortedFront, mu: &[f64], sigma: &[f64]) -> f64 {
    front
        .points()
        .iter()
        .map(|z| {
            let no_gain: f64 = (0..2).map(|j| prob_at_least(mu[j], sigma[j], z[j])).product();
            1.0 - no_gain
        })
        .fold(1.0, f64::min)
        .clamp(0.0, 1.0)
}

/// Exact bi-objective expected hypervolume improvement.
///
/// The non-dominated part of the reference box splits into vertical strips
/// at the archive's first coordinates; in strip `j` the improvement is
/// `|strip ∩ [F1, inf)| * (h_j - F2)^+` with `h_j` the staircase height, and
/// the two factors are independent.
pub fn expected_hypervolume_improvement(
    front: &SortedFront,
    reference: &[f64],
    mu: &[f64],
    sigma: &[f64],
) -> Result<f64, AcquisitionError> {
    let pts = front.points();
    if pts.iter().any(|p| !(p[0] < reference[0] && p[1] < reference[1])) {
        return Err(AcquisitionError::InvalidReference);
    }
    // E[(x - F1)^+], whose derivative in x is P(F1 <= x).
    let g1 = |x: f64| expected_shortfall_below(mu[0], sigma[0], x);
    let mut total = 0.0;
    let mut left = 0.0;
    let mut height = reference[1];
    for p in pts.iter().chain(core::iter::once(&[reference[0], f64::NEG_INFINITY])) {
        let right = g1(p[0]);
        total += (right - left) * expected_shortfall_below(mu[1], sigma[1], height);
        left = right;
        height = p[1];
    }
    Ok(total.max(0.0))
}

/// Scalarization of predicted objectives; zero when unregularized.
pub fn psi(mu: &[f64], reg: Regularization) -> f64 {
    match reg {
        Regularization::None => 0.0,
        Regularization::Max => mu.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Regularization::Sum => mu.iter().sum(),
    }
}

/// `gamma * alpha - psi`.
pub fn regularize(alpha: f64, psi_value: f64, gamma: f64) -> f64 {
    gamma * alpha - psi_value
}

/// Scale of the regularized criterion from the raw maximizer:
/// `beta * |psi(mu(x_max))| / alpha(x_max)` floored at 1, or 1 when the raw
/// maximum is not positive.
pub fn gamma_from(psi_at_max: f64, alpha_at_max: f64, beta: f64) -> f64 {
    if alpha_at_max > 0.0 {
        (beta * psi_at_max.abs() / alpha_at_max).max(1.0)
    } else {
        1.0
    }
}

/// EHVI reference point: componentwise maximum of `objectives` plus 10% of
/// the observed range (at least `1e-6`).
pub fn reference_point(objectives: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = objectives.first()?.len();
    Some(
        (0..n)
            .map(|j| {
                let (lo, hi) = objectives
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f[j]), hi.max(f[j])));
                hi + (0.1 * (hi - lo)).max(1e-6)
            })
            .collect(),
    )
}

/// Surrogate predictions at one design point.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Surrogate constraint violation; zero iff the point is in the
    /// approximate feasible domain.
    pub violation: f64,
}

impl Prediction {
    pub fn feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Everything an infill criterion needs at one iteration.
#[derive(Debug, Clone)]
pub struct AcquisitionContext<'a> {
    surrogates: &'a SurrogateBundle,
    front: SortedFront,
    reference: Option<Vec<f64>>,
    /// Tolerance on `|mu_h|` in standardized constraint units.
    pub eq_tolerance: f64,
    /// Feasibility margin: `mu_g + kappa * sigma_g >= 0`.
    pub kappa: f64,
}

impl<'a> AcquisitionContext<'a> {
    /// `archive` is the current feasible non-dominated set; `reference` is
    /// required for EHVI only.
    pub fn new(
        surrogates: &'a SurrogateBundle,
        archive: &ParetoArchive,
        reference: Option<Vec<f64>>,
    ) -> Result<Self, AcquisitionError> {
        if surrogates.n_obj() != 2 {
            return Err(AcquisitionError::UnsupportedObjectives(surrogates.n_obj()));
        }
        let front = SortedFront::new(archive.members())?;
        if let Some(r) = &reference {
            if front.points().iter().any(|p| !(p[0] < r[0] && p[1] < r[1])) {
                return Err(AcquisitionError::InvalidReference);
            }
        }
        Ok(Self {
            surrogates,
            front,
            reference,
            eq_tolerance: 1e-4,
            kappa: 0.0,
        })
    }

    pub fn surrogates(&self) -> &SurrogateBundle {
        self.surrogates
    }

    pub fn front(&self) -> &SortedFront {
        &self.front
    }

    pub fn reference(&self) -> Option<&[f64]> {
        self.reference.as_deref()
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        let (mu, sigma) = self.surrogates.predict_objectives(x);
        Prediction {
            mu,
            sigma,
            violation: self.violation(x),
        }
    }

    /// Surrogate constraint violation
    /// `sum max(-(mu_g + kappa sigma_g), 0) + sum max(|mu_h| - tol, 0)`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ineq: f64 = self
            .surrogates
            .ineq_constraints
            .iter()
            .map(|gp| {
                let v = if self.kappa == 0.0 {
                    gp.predict_mean(x)
                } else {
                    let (m, s) = gp.predict(x);
                    m + self.kappa * s
                };
                (-v).max(0.0)
            })
            .sum();
        let eq: f64 = self
            .surrogates
            .eq_constraints
            .iter()
            .map(|gp| (gp.predict_mean(x).abs() - self.eq_tolerance * gp.target_std()).max(0.0))
            .sum();
        ineq + eq
    }

    /// Membership of the approximate feasible domain.
    pub fn feasibility(&self, x: &[f64]) -> bool {
        self.violation(x) == 0.0
    }

    pub fn pi(&self, x: &[f64]) -> f64 {
        let (mu, sigma) = self.surrogates.predict_objectives(x);
        probability_of_improvement(&self.front, &mu, &sigma)
    }

    pub fn mpi(&self, x: &[f64]) -> f64 {
        let (mu, sigma) = self.surrogates.predict_objectives(x);
        minimum_probability_of_improvement(&self.front, &mu, &sigma)
    }

    pub fn ehvi(&self, x: &[f64]) -> Result<f64, AcquisitionError> {
        let (mu, sigma) = self.surrogates.predict_objectives(x);
        let r = self.reference.as_deref().ok_or(AcquisitionError::InvalidReference)?;
        expected_hypervolume_improvement(&self.front, r, &mu, &sigma)
    }

    /// Raw criterion value from a prediction.
    pub fn alpha(&self, criterion: Criterion, pred: &Prediction) -> f64 {
        match criterion {
            Criterion::Pi => probability_of_improvement(&self.front, &pred.mu, &pred.sigma),
            Criterion::Mpi => minimum_probability_of_improvement(&self.front, &pred.mu, &pred.sigma),
            Criterion::Ehvi => self
                .reference
                .as_deref()
                .and_then(|r| expected_hypervolume_improvement(&self.front, r, &pred.mu, &pred.sigma).ok())
                .unwrap_or(0.0),
        }
    }

    /// `gamma` for the regularized criterion given the raw maximizer.
    pub fn estimate_gamma(&self, x_max: &[f64], alpha_at_max: f64, beta: f64, reg: Regularization) -> f64 {
        gamma_from(psi(&self.surrogates.mean_objectives(x_max), reg), alpha_at_max, beta)
    }

    /// Product of the probabilities that each inequality constraint is
    /// satisfied.
    pub fn probability_of_feasibility(&self, x: &[f64]) -> f64 {
        self.surrogates
            .ineq_constraints
            .iter()
            .map(|gp| {
                let (m, s) = gp.predict(x);
                prob_at_least(m, s, 0.0)
            })
            .product()
    }
}
