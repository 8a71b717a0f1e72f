//! Constrained multi-objective Bayesian optimization building blocks.
//!
//! The crate is `no_std` (with `alloc`) by default. It contains everything
//! that is pure computation:
//!
//! - [`doe`]: Latin hypercube designs and the evaluated-data container,
//! - [`surrogate`]: ordinary Kriging (Gaussian process) regression,
//! - [`pareto`]: dominance, hypervolume, IGD+ and analytic reference fronts,
//! - [`acquisition`]: PI, MPI and EHVI infill criteria with the regularized
//!   `gamma * alpha - psi(mu)` wrapper and surrogate feasibility,
//! - [`inner_opt`]: multi-start derivative-free maximization of a criterion
//!   over the approximate feasible domain,
//! - [`nsga2`]: constrained NSGA-II,
//! - [`problems`]: the problem abstraction and the ZDT/BNH/TNK/OSY benchmarks.
//!
//! The `parallel` feature (implies `std`) fits surrogate bundles and runs
//! inner multi-starts on the rayon thread pool. Results do not depend on it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod acquisition;
pub mod doe;
pub mod inner_opt;
pub mod linalg;
pub mod nsga2;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod stats;
pub mod surrogate;

pub use acquisition::{AcquisitionContext, AcquisitionKind, Criterion, Regularization};
pub use doe::{BoxDomain, Dataset};
pub use pareto::{ParetoArchive, ReferenceFront};
pub use problems::{Benchmark, Evaluation, Problem, ProblemDims};
pub use surrogate::{GaussianProcess, GpConfig, Kernel, SurrogateBundle};
