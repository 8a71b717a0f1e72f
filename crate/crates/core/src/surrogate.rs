//! Ordinary Kriging (Gaussian process regression with a constant trend).
//!
//! Inputs are mapped to the unit hypercube and targets standardized before
//! fitting, so the hyperparameter bounds are problem independent. The
//! signal variance and trend are profiled out of the likelihood; only the
//! log-lengthscales are searched, by bounded Nelder-Mead from Latin hypercube
//! starts.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::doe::{self, BoxDomain, Dataset};
use crate::inner_opt::nelder_mead;
use crate::linalg::Cholesky;
use crate::rng;

const SQRT5: f64 = 2.236_067_977_499_79;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GpError {
    #[error("need at least two distinct training inputs, got {0}")]
    TooFewPoints(usize),
    #[error("target {index} is not finite")]
    NonFiniteTarget { index: usize },
    #[error("input {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("covariance matrix is singular even with nugget {nugget:e}")]
    SingularCovariance { nugget: f64 },
    #[error("fitting surrogate for {output}: {source}")]
    Output {
        output: OutputId,
        #[source]
        source: Box<GpError>,
    },
}

/// Identifies one surrogate inside a [`SurrogateBundle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputId {
    Objective(usize),
    Inequality(usize),
    Equality(usize),
}

impl fmt::Display for OutputId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputId::Objective(i) => write!(f, "objective f{}", i + 1),
            OutputId::Inequality(i) => write!(f, "inequality constraint g{}", i + 1),
            OutputId::Equality(i) => write!(f, "equality constraint h{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    SquaredExponential,
    #[default]
    Matern52,
}

impl Kernel {
    /// Correlation as a function of the scaled squared distance.
    #[inline]
    pub fn correlation(self, scaled_sq_dist: f64) -> f64 {
        match self {
            Kernel::SquaredExponential => libm::exp(-0.5 * scaled_sq_dist),
            Kernel::Matern52 => {
                let r = libm::sqrt(scaled_sq_dist);
                (1.0 + SQRT5 * r + 5.0 / 3.0 * scaled_sq_dist) * libm::exp(-SQRT5 * r)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::SquaredExponential => "squared_exponential",
            Kernel::Matern52 => "matern52",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub kernel: Kernel,
    /// Number of multi-start local searches over the log-lengthscales.
    pub restarts: usize,
    /// Likelihood evaluations per local search.
    pub evals_per_restart: usize,
    pub seed: u64,
    /// Initial nugget, relative to the signal variance.
    pub nugget: f64,
    /// Largest nugget tried before giving up with `SingularCovariance`.
    pub max_nugget: f64,
    /// Bounds on normalized lengthscales.
    pub lengthscale_bounds: (f64, f64),
    /// Bounds on the standardized signal variance.
    pub signal_variance_bounds: (f64, f64),
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            kernel: Kernel::Matern52,
            restarts: 5,
            evals_per_restart: 150,
            seed: 0,
            nugget: 1e-8,
            max_nugget: 1e-4,
            lengthscale_bounds: (1e-3, 1e2),
            signal_variance_bounds: (1e-6, 1e2),
        }
    }
}

/// Hyperparameters in normalized units: lengthscales over the unit
/// hypercube, signal variance of the standardized targets, relative nugget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub nugget: f64,
}

/// Affine maps between original and normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub input_offset: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
}

/// A fitted Gaussian process. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GpSnapshot", try_from = "GpSnapshot")]
pub struct GaussianProcess {
    kernel: Kernel,
    hyper: Hyperparameters,
    norm: Normalization,
    /// Constant trend, standardized units.
    trend: f64,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    /// Normalized training inputs.
    unit_inputs: Vec<Vec<f64>>,
    chol: Cholesky,
    /// `R^-1 (y - trend)` on standardized targets.
    weights: Vec<f64>,
    log_likelihood: f64,
}

/// Serialized form: everything needed to rebuild the model exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpSnapshot {
    pub kernel: Kernel,
    pub hyperparameters: Hyperparameters,
    pub normalization: Normalization,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl From<GaussianProcess> for GpSnapshot {
    fn from(gp: GaussianProcess) -> Self {
        Self {
            kernel: gp.kernel,
            hyperparameters: gp.hyper,
            normalization: gp.norm,
            inputs: gp.inputs,
            targets: gp.targets,
        }
    }
}

impl TryFrom<GpSnapshot> for GaussianProcess {
    type Error = GpError;
    fn try_from(s: GpSnapshot) -> Result<Self, GpError> {
        let data = Standardized::with_normalization(&s.inputs, &s.targets, s.normalization)?;
        build(data, s.kernel, s.hyperparameters)
    }
}

struct Standardized {
    norm: Normalization,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    unit_inputs: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl Standardized {
    fn new(inputs: &[Vec<f64>], targets: &[f64], bounds: Option<&BoxDomain>) -> Result<Self, GpError> {
        validate(inputs, targets)?;
        let d = inputs[0].len();
        let (input_offset, input_scale) = match bounds {
            Some(domain) => (domain.lower().to_vec(), (0..d).map(|i| domain.width(i)).collect()),
            None => {
                let mut lo = inputs[0].clone();
                let mut hi = inputs[0].clone();
                for x in inputs {
                    for i in 0..d {
                        lo[i] = lo[i].min(x[i]);
                        hi[i] = hi[i].max(x[i]);
                    }
                }
                let scale = lo
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| if h > l { h - l } else { 1.0 })
                    .collect();
                (lo, scale)
            }
        };
        let n = targets.len() as f64;
        let target_mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|t| (t - target_mean) * (t - target_mean)).sum::<f64>() / n;
        let sd = libm::sqrt(var);
        let target_std = if sd > 1e-12 * (1.0 + target_mean.abs()) { sd } else { 1.0 };
        let norm = Normalization {
            input_offset,
            input_scale,
            target_mean,
            target_std,
        };
        Self::with_normalization(inputs, targets, norm)
    }

    fn with_normalization(inputs: &[Vec<f64>], targets: &[f64], norm: Normalization) -> Result<Self, GpError> {
        validate(inputs, targets)?;
        let unit_inputs = inputs.iter().map(|x| norm.to_unit(x)).collect();
        let y = targets
            .iter()
            .map(|t| (t - norm.target_mean) / norm.target_std)
            .collect();
        Ok(Self {
            norm,
            inputs: inputs.to_vec(),
            targets: targets.to_vec(),
            unit_inputs,
            y,
        })
    }
}

impl Normalization {
    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.input_offset.iter().zip(&self.input_scale))
            .map(|(v, (o, s))| (v - o) / s)
            .collect()
    }
}

fn validate(inputs: &[Vec<f64>], targets: &[f64]) -> Result<(), GpError> {
    if inputs.len() < 2 || targets.len() != inputs.len() {
        return Err(GpError::TooFewPoints(inputs.len().min(targets.len())));
    }
    let d = inputs[0].len();
    for (index, x) in inputs.iter().enumerate() {
        if x.len() != d || d == 0 {
            return Err(GpError::DimensionMismatch {
                index,
                expected: d,
                found: x.len(),
            });
        }
    }
    if let Some(index) = targets.iter().position(|t| !t.is_finite()) {
        return Err(GpError::NonFiniteTarget { index });
    }
    if inputs.iter().all(|x| x == &inputs[0]) {
        return Err(GpError::TooFewPoints(1));
    }
    Ok(())
}

#[inline]
fn scaled_sq_dist(a: &[f64], b: &[f64], inv_ls: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(inv_ls)
        .map(|((x, y), w)| {
            let t = (x - y) * w;
            t * t
        })
        .sum()
}

/// Correlation matrix without the nugget on the diagonal.
fn correlation_matrix(kernel: Kernel, xs: &[Vec<f64>], lengthscales: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let inv: Vec<f64> = lengthscales.iter().map(|l| 1.0 / l).collect();
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        r[i * n + i] = 1.0;
        for j in 0..i {
            let c = kernel.correlation(scaled_sq_dist(&xs[i], &xs[j], &inv));
            r[i * n + j] = c;
            r[j * n + i] = c;
        }
    }
    r
}

/// Factors `R + nugget I`, escalating the nugget by 10x on failure.
fn factor_with_nugget(n: usize, corr: &[f64], nugget: f64, max_nugget: f64) -> Result<(Cholesky, f64), GpError> {
    let mut tau = nugget;
    let mut a = corr.to_vec();
    loop {
        for i in 0..n {
            a[i * n + i] = 1.0 + tau;
        }
        if let Some(c) = Cholesky::factor(n, &a) {
            return Ok((c, tau));
        }
        if tau >= max_nugget {
            return Err(GpError::SingularCovariance { nugget: tau });
        }
        tau = (tau * 10.0).min(max_nugget).max(f64::MIN_POSITIVE);
    }
}

struct Profile {
    trend: f64,
    weights: Vec<f64>,
    quad: f64,
}

/// Generalized least squares trend and `R^-1 (y - trend)`.
fn profile(chol: &Cholesky, y: &[f64]) -> Profile {
    let ones = vec![1.0; y.len()];
    let r_inv_one = chol.solve(&ones);
    let r_inv_y = chol.solve(y);
    let denom: f64 = r_inv_one.iter().sum();
    let trend = r_inv_y.iter().sum::<f64>() / denom;
    let weights: Vec<f64> = r_inv_y
        .iter()
        .zip(&r_inv_one)
        .map(|(a, b)| a - trend * b)
        .collect();
    let quad = y
        .iter()
        .zip(&weights)
        .map(|(yi, wi)| (yi - trend) * wi)
        .sum::<f64>()
        .max(0.0);
    Profile { trend, weights, quad }
}

fn concentrated_log_likelihood(
    data: &Standardized,
    kernel: Kernel,
    lengthscales: &[f64],
    config: &GpConfig,
) -> Option<(f64, f64, f64)> {
    let n = data.y.len();
    let corr = correlation_matrix(kernel, &data.unit_inputs, lengthscales);
    let (chol, tau) = factor_with_nugget(n, &corr, config.nugget, config.max_nugget).ok()?;
    let p = profile(&chol, &data.y);
    let (lo, hi) = config.signal_variance_bounds;
    let s2 = (p.quad / n as f64).clamp(lo, hi);
    let ll = -0.5 * (n as f64 * libm::log(s2) + chol.log_det() + p.quad / s2);
    ll.is_finite().then_some((ll, s2, tau))
}

fn build(data: Standardized, kernel: Kernel, hyper: Hyperparameters) -> Result<GaussianProcess, GpError> {
    let n = data.y.len();
    let corr = correlation_matrix(kernel, &data.unit_inputs, &hyper.lengthscales);
    let mut a = corr;
    for i in 0..n {
        a[i * n + i] = 1.0 + hyper.nugget;
    }
    let chol = Cholesky::factor(n, &a).ok_or(GpError::SingularCovariance { nugget: hyper.nugget })?;
    let p = profile(&chol, &data.y);
    let s2 = hyper.signal_variance;
    let log_likelihood = -0.5 * (n as f64 * libm::log(s2) + chol.log_det() + p.quad / s2);
    Ok(GaussianProcess {
        kernel,
        hyper,
        norm: data.norm,
        trend: p.trend,
        inputs: data.inputs,
        targets: data.targets,
        unit_inputs: data.unit_inputs,
        chol,
        weights: p.weights,
        log_likelihood,
    })
}

impl GaussianProcess {
    /// Fits with inputs normalized by their bounding box.
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], config: &GpConfig) -> Result<Self, GpError> {
        Self::fit_impl(Standardized::new(inputs, targets, None)?, config)
    }

    /// Fits with inputs normalized by a known domain.
    pub fn fit_in_domain(
        inputs: &[Vec<f64>],
        targets: &[f64],
        domain: &BoxDomain,
        config: &GpConfig,
    ) -> Result<Self, GpError> {
        Self::fit_impl(Standardized::new(inputs, targets, Some(domain))?, config)
    }

    /// Builds a model with given hyperparameters (no likelihood search).
    pub fn with_hyperparameters(
        inputs: &[Vec<f64>],
        targets: &[f64],
        domain: Option<&BoxDomain>,
        kernel: Kernel,
        hyper: Hyperparameters,
    ) -> Result<Self, GpError> {
        build(Standardized::new(inputs, targets, domain)?, kernel, hyper)
    }

    fn fit_impl(data: Standardized, config: &GpConfig) -> Result<Self, GpError> {
        let d = data.unit_inputs[0].len();
        let (lmin, lmax) = config.lengthscale_bounds;
        let lower = vec![libm::log(lmin); d];
        let upper = vec![libm::log(lmax); d];
        // Starts are spread over a central part of the search box where the
        // likelihood is not flat.
        let start_box = BoxDomain::new(
            vec![libm::log(lmin.max(1e-2)); d],
            vec![libm::log(lmax.min(1e1)); d],
        )
        .expect("lengthscale start box");
        let mut rng = rng::stream(config.seed, &[0x6F17]);
        let starts = doe::lhs_sample_with(&start_box, config.restarts.max(1), &mut rng)
            .expect("restarts >= 1");

        let objective = |theta: &[f64]| -> f64 {
            let ls: Vec<f64> = theta.iter().map(|t| libm::exp(*t)).collect();
            concentrated_log_likelihood(&data, config.kernel, &ls, config)
                .map_or(f64::NEG_INFINITY, |(ll, _, _)| ll)
        };

        let mut best: Option<(Vec<f64>, f64)> = None;
        for start in &starts {
            let res = nelder_mead(
                |t| objective(t),
                start,
                0.5,
                &lower,
                &upper,
                config.evals_per_restart,
                1e-6,
            );
            if res.value.is_finite() && best.as_ref().is_none_or(|(_, v)| res.value > *v) {
                best = Some((res.x, res.value));
            }
        }
        let theta = match best {
            Some((theta, _)) => theta,
            None => return Err(GpError::SingularCovariance { nugget: config.max_nugget }),
        };
        let lengthscales: Vec<f64> = theta.iter().map(|t| libm::exp(*t)).collect();
        let (_, s2, tau) = concentrated_log_likelihood(&data, config.kernel, &lengthscales, config)
            .ok_or(GpError::SingularCovariance { nugget: config.max_nugget })?;
        build(
            data,
            config.kernel,
            Hyperparameters {
                lengthscales,
                signal_variance: s2,
                nugget: tau,
            },
        )
    }

    /// Predictive mean and standard deviation in original target units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let u = self.norm.to_unit(x);
        let inv: Vec<f64> = self.hyper.lengthscales.iter().map(|l| 1.0 / l).collect();
        let mut r: Vec<f64> = self
            .unit_inputs
            .iter()
            .map(|xi| self.kernel.correlation(scaled_sq_dist(&u, xi, &inv)))
            .collect();
        let mean = self.trend + r.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>();
        self.chol.solve_lower_in_place(&mut r);
        let explained: f64 = r.iter().map(|v| v * v).sum();
        let var = (self.hyper.signal_variance * (1.0 - explained)).max(0.0);
        (
            self.norm.target_mean + self.norm.target_std * mean,
            self.norm.target_std * libm::sqrt(var),
        )
    }

    /// Predictive mean only (skips the triangular solve).
    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        let u = self.norm.to_unit(x);
        let mean = self
            .unit_inputs
            .iter()
            .zip(&self.weights)
            .map(|(xi, w)| {
                let s: f64 = u
                    .iter()
                    .zip(xi)
                    .zip(&self.hyper.lengthscales)
                    .map(|((a, b), l)| {
                        let t = (a - b) / l;
                        t * t
                    })
                    .sum();
                self.kernel.correlation(s) * w
            })
            .sum::<f64>();
        self.norm.target_mean + self.norm.target_std * (self.trend + mean)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn normalization(&self) -> &Normalization {
        &self.norm
    }

    /// Constant trend in original units.
    pub fn trend(&self) -> f64 {
        self.norm.target_mean + self.norm.target_std * self.trend
    }

    /// Prior standard deviation in original units.
    pub fn prior_std(&self) -> f64 {
        self.norm.target_std * libm::sqrt(self.hyper.signal_variance)
    }

    pub fn target_std(&self) -> f64 {
        self.norm.target_std
    }

    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// One surrogate per objective, inequality and equality constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateBundle {
    pub objectives: Vec<GaussianProcess>,
    pub ineq_constraints: Vec<GaussianProcess>,
    pub eq_constraints: Vec<GaussianProcess>,
}

impl SurrogateBundle {
    /// Fits all `n + p + m` outputs of a dataset. Output `k` uses a seed
    /// derived from `(config.seed, k)`, so the result does not depend on
    /// fitting order.
    pub fn fit(dataset: &Dataset, config: &GpConfig) -> Result<Self, GpError> {
        let total = dataset.n_outputs();
        let fit_one = |k: usize| -> Result<GaussianProcess, GpError> {
            let cfg = GpConfig {
                seed: rng::derive_seed(config.seed, &[k as u64]),
                ..config.clone()
            };
            GaussianProcess::fit_in_domain(dataset.points(), &dataset.output_column(k), dataset.domain(), &cfg)
                .map_err(|e| GpError::Output {
                    output: output_id(dataset, k),
                    source: Box::new(e),
                })
        };
        #[cfg(feature = "parallel")]
        let fitted: Vec<_> = {
            use rayon::prelude::*;
            (0..total).into_par_iter().map(fit_one).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let fitted: Vec<_> = (0..total).map(fit_one).collect();

        let mut models = fitted.into_iter().collect::<Result<Vec<_>, _>>()?;
        let eq_constraints = models.split_off(dataset.n_obj() + dataset.n_ineq());
        let ineq_constraints = models.split_off(dataset.n_obj());
        Ok(Self {
            objectives: models,
            ineq_constraints,
            eq_constraints,
        })
    }

    pub fn len(&self) -> usize {
        self.objectives.len() + self.ineq_constraints.len() + self.eq_constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_obj(&self) -> usize {
        self.objectives.len()
    }

    pub fn predict_objectives(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.objectives.iter().map(|gp| gp.predict(x)).unzip()
    }

    pub fn mean_objectives(&self, x: &[f64]) -> Vec<f64> {
        self.objectives.iter().map(|gp| gp.predict_mean(x)).collect()
    }
}

/// Fits every output of `dataset`; see [`SurrogateBundle::fit`].
pub fn fit_bundle(dataset: &Dataset, config: &GpConfig) -> Result<SurrogateBundle, GpError> {
    SurrogateBundle::fit(dataset, config)
}

fn output_id(dataset: &Dataset, k: usize) -> OutputId {
    if k < dataset.n_obj() {
        OutputId::Objective(k)
    } else if k < dataset.n_obj() + dataset.n_ineq() {
        OutputId::Inequality(k - dataset.n_obj())
    } else {
        OutputId::Equality(k - dataset.n_obj() - dataset.n_ineq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> GpConfig {
        GpConfig::default()
    }

    #[test]
    fn constant_targets() {
        let xs = vec![vec![0.0], vec![0.3], vec![0.7], vec![1.0]];
        let gp = GaussianProcess::fit(&xs, &[3.0; 4], &cfg()).unwrap();
        for x in [-1.0, 0.1, 0.5, 2.0] {
            assert!((gp.predict(&[x]).0 - 3.0).abs() < 1e-9);
        }
        for x in &xs {
            assert!(gp.predict(x).1 < 1e-3);
        }
    }

    #[test]
    fn interpolates_parabola() {
        let xs = vec![vec![0.0], vec![0.25], vec![0.5], vec![0.625], vec![1.0]];
        let ys = [0.0, 0.0625, 0.25, 0.390625, 1.0];
        let gp = GaussianProcess::fit(&xs, &ys, &cfg()).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            let (m, s) = gp.predict(x);
            assert!((m - y).abs() < 1e-4, "{m} vs {y}");
            let bound = libm::sqrt(gp.hyperparameters().nugget) * gp.prior_std() * (1.0 + 1e-6);
            assert!(s <= bound, "{s} > {bound}");
        }
        // Between 0.625 and 1.0; true value 0.5625.
        let mid = gp.predict(&[0.75]).0;
        assert!((mid - 0.5625).abs() < 0.05, "{mid} {:?}", gp.hyperparameters());
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let xs = vec![vec![0.0, 0.0], vec![0.5, 0.2], vec![1.0, 1.0], vec![0.2, 0.9]];
        let ys = [1.0, 2.0, -1.0, 0.5];
        let gp = GaussianProcess::fit(&xs, &ys, &cfg()).unwrap();
        let (m, s) = gp.predict(&[1e5, -1e5]);
        assert!((m - gp.trend()).abs() < 1e-9);
        assert!((s - gp.prior_std()).abs() < 1e-9 * gp.prior_std());
    }

    #[test]
    fn rejects_bad_training_sets() {
        assert_eq!(
            GaussianProcess::fit(&[vec![0.0]], &[1.0], &cfg()),
            Err(GpError::TooFewPoints(1))
        );
        assert_eq!(
            GaussianProcess::fit(&[vec![0.0], vec![1.0]], &[1.0, f64::NAN], &cfg()),
            Err(GpError::NonFiniteTarget { index: 1 })
        );
        assert_eq!(
            GaussianProcess::fit(&[vec![0.2], vec![0.2]], &[1.0, 2.0], &cfg()),
            Err(GpError::TooFewPoints(1))
        );
    }

    #[test]
    fn fixed_hyperparameters_reject_singular_matrix() {
        // Two coincident inputs with zero nugget.
        let xs = vec![vec![0.0], vec![0.5], vec![0.5]];
        let err = GaussianProcess::with_hyperparameters(
            &xs,
            &[0.0, 1.0, 2.0],
            None,
            Kernel::Matern52,
            Hyperparameters {
                lengthscales: vec![0.3],
                signal_variance: 1.0,
                nugget: 0.0,
            },
        )
        .unwrap_err();
        assert_eq!(err, GpError::SingularCovariance { nugget: 0.0 });
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let xs = vec![vec![0.1, 0.3], vec![0.5, 0.2], vec![0.9, 0.8], vec![0.4, 0.6]];
        let gp = GaussianProcess::fit(&xs, &[1.0, 0.2, -0.5, 0.7], &cfg()).unwrap();
        let snap: GpSnapshot = gp.clone().into();
        let back = GaussianProcess::try_from(snap).unwrap();
        assert_eq!(back, gp);
    }
}
