//! Problem abstraction and the analytic benchmark suite.
//!
//! All problems follow the minimization convention with inequality
//! constraints `g(x) >= 0` and equality constraints `h(x) = 0`.

use alloc::string::ToString;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::doe::BoxDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDims {
    /// Design variables.
    pub d: usize,
    /// Objectives.
    pub n: usize,
    /// Inequality constraints.
    pub p: usize,
    /// Equality constraints.
    pub m: usize,
}

impl ProblemDims {
    pub fn n_constraints(&self) -> usize {
        self.p + self.m
    }

    pub fn n_outputs(&self) -> usize {
        self.n + self.p + self.m
    }
}

/// Objective and constraint values at one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl Evaluation {
    /// Total violation `sum max(-g_i, 0) + sum max(|h_j| - eq_tol, 0)`.
    pub fn violation(&self, eq_tol: f64) -> f64 {
        constraint_violation(&self.g, &self.h, eq_tol)
    }

    pub fn is_feasible(&self, eq_tol: f64) -> bool {
        self.violation(eq_tol) == 0.0
    }
}

pub fn constraint_violation(g: &[f64], h: &[f64], eq_tol: f64) -> f64 {
    g.iter().map(|v| (-v).max(0.0)).sum::<f64>()
        + h.iter().map(|v| (v.abs() - eq_tol).max(0.0)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvaluatorError {
    #[error("evaluator returned {found} values, expected {expected} (request {request:?})")]
    ArityMismatch {
        expected: usize,
        found: usize,
        request: Vec<f64>,
    },
    #[error("malformed evaluator response {line:?} (request {request:?})")]
    Malformed { line: String, request: Vec<f64> },
    #[error("evaluator exited before answering request {request:?}")]
    Exited { request: Vec<f64> },
    #[error("evaluator timed out on request {request:?}")]
    Timeout { request: Vec<f64> },
    #[error("evaluator handshake failed: {0}")]
    Handshake(String),
    #[error("evaluator I/O error: {message} (request {request:?})")]
    Io { message: String, request: Vec<f64> },
    #[error("design point has {found} coordinates, expected {expected}")]
    InputArity { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("ZDT problems need d >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("ZDT variant must be 1, 2 or 3, got {0}")]
    UnknownVariant(u8),
    #[error("unknown problem {0:?}")]
    UnknownProblem(String),
}

/// A (possibly expensive) black-box multi-objective problem.
pub trait Problem {
    fn name(&self) -> &str;
    fn dims(&self) -> ProblemDims;
    fn domain(&self) -> &BoxDomain;
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation, EvaluatorError>;

    /// The analytic benchmark behind this problem, when there is one.
    fn benchmark(&self) -> Option<&Benchmark> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkKind {
    Zdt1,
    Zdt2,
    Zdt3,
    Bnh,
    Tnk,
    Osy,
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchmarkKind::Zdt1 => "zdt1",
            BenchmarkKind::Zdt2 => "zdt2",
            BenchmarkKind::Zdt3 => "zdt3",
            BenchmarkKind::Bnh => "bnh",
            BenchmarkKind::Tnk => "tnk",
            BenchmarkKind::Osy => "osy",
        })
    }
}

/// One of the six analytic test problems.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    kind: BenchmarkKind,
    name: String,
    domain: BoxDomain,
}

/// ZDT1-3 on `[0, 1]^d` with `g(x) = 1 + 9 * mean(x_2..x_d)`.
pub fn zdt(variant: u8, d: usize) -> Result<Benchmark, ProblemError> {
    let kind = match variant {
        1 => BenchmarkKind::Zdt1,
        2 => BenchmarkKind::Zdt2,
        3 => BenchmarkKind::Zdt3,
        v => return Err(ProblemError::UnknownVariant(v)),
    };
    if d < 2 {
        return Err(ProblemError::DimensionTooSmall(d));
    }
    Ok(Benchmark {
        kind,
        name: kind.to_string(),
        domain: BoxDomain::new(vec![0.0; d], vec![1.0; d]).expect("unit box"),
    })
}

/// Binh and Korn.
pub fn bnh() -> Benchmark {
    Benchmark {
        kind: BenchmarkKind::Bnh,
        name: "bnh".into(),
        domain: BoxDomain::new(vec![0.0, 0.0], vec![5.0, 3.0]).expect("bnh box"),
    }
}

/// Tanaka.
pub fn tnk() -> Benchmark {
    Benchmark {
        kind: BenchmarkKind::Tnk,
        name: "tnk".into(),
        domain: BoxDomain::new(vec![0.0, 0.0], vec![PI, PI]).expect("tnk box"),
    }
}

/// Osyczka and Kundu.
pub fn osy() -> Benchmark {
    Benchmark {
        kind: BenchmarkKind::Osy,
        name: "osy".into(),
        domain: BoxDomain::new(vec![0.0; 6], vec![10.0, 10.0, 5.0, 6.0, 5.0, 10.0]).expect("osy box"),
    }
}

fn sq(v: f64) -> f64 {
    v * v
}

impl Benchmark {
    /// Looks a benchmark up by name; `dim` only matters for the ZDT family.
    pub fn from_name(name: &str, dim: usize) -> Result<Self, ProblemError> {
        match name.to_ascii_lowercase().as_str() {
            "zdt1" => zdt(1, dim),
            "zdt2" => zdt(2, dim),
            "zdt3" => zdt(3, dim),
            "bnh" => Ok(bnh()),
            "tnk" => Ok(tnk()),
            "osy" => Ok(osy()),
            _ => Err(ProblemError::UnknownProblem(name.into())),
        }
    }

    pub fn kind(&self) -> BenchmarkKind {
        self.kind
    }

    pub fn eval(&self, x: &[f64]) -> Evaluation {
        match self.kind {
            BenchmarkKind::Zdt1 | BenchmarkKind::Zdt2 | BenchmarkKind::Zdt3 => {
                let d = x.len();
                let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (d - 1) as f64;
                let f1 = x[0];
                let ratio = f1 / g;
                let f2 = match self.kind {
                    BenchmarkKind::Zdt1 => g * (1.0 - libm::sqrt(ratio)),
                    BenchmarkKind::Zdt2 => g * (1.0 - ratio * ratio),
                    _ => g * (1.0 - libm::sqrt(ratio) - ratio * libm::sin(10.0 * PI * f1)),
                };
                Evaluation {
                    f: vec![f1, f2],
                    g: vec![],
                    h: vec![],
                }
            }
            BenchmarkKind::Bnh => {
                let (a, b) = (x[0], x[1]);
                Evaluation {
                    f: vec![4.0 * a * a + 4.0 * b * b, sq(a - 5.0) + sq(b - 5.0)],
                    g: vec![-sq(a - 5.0) - b * b + 25.0, sq(a - 8.0) + sq(b + 3.0) - 7.7],
                    h: vec![],
                }
            }
            BenchmarkKind::Tnk => {
                let (a, b) = (x[0], x[1]);
                // atan2 makes g1 total at the origin: atan(0/0) := 0.
                let angle = if a == 0.0 && b == 0.0 { 0.0 } else { libm::atan2(a, b) };
                Evaluation {
                    f: vec![a, b],
                    g: vec![
                        a * a + b * b - 1.0 - 0.1 * libm::cos(16.0 * angle),
                        -sq(a - 0.5) - sq(b - 0.5) + 0.5,
                    ],
                    h: vec![],
                }
            }
            BenchmarkKind::Osy => {
                let f1 = -(25.0 * sq(x[0] - 2.0)
                    + sq(x[1] - 2.0)
                    + sq(x[2] - 1.0)
                    + sq(x[3] - 4.0)
                    + sq(x[4] - 1.0));
                let f2 = x.iter().map(|v| v * v).sum();
                Evaluation {
                    f: vec![f1, f2],
                    g: vec![
                        x[0] + x[1] - 2.0,
                        6.0 - x[0] - x[1],
                        2.0 - x[1] + x[0],
                        2.0 - x[0] + 3.0 * x[1],
                        4.0 - sq(x[2] - 3.0) - x[3],
                        sq(x[4] - 3.0) + x[5] - 4.0,
                    ],
                    h: vec![],
                }
            }
        }
    }

    /// Number of pieces in the analytic Pareto-set parameterization.
    pub fn pareto_segments(&self) -> usize {
        match self.kind {
            BenchmarkKind::Bnh => 2,
            BenchmarkKind::Osy => 5,
            _ => 1,
        }
    }

    /// Point of Pareto-set piece `segment` at parameter `t` in `[0, 1]`.
    ///
    /// For ZDT3 and TNK the pieces also contain dominated points (the
    /// caller filters); TNK's piece is the boundary `g1 = 0` in the first
    /// quadrant, which may violate `g2`.
    pub fn pareto_set_point(&self, segment: usize, t: f64) -> Vec<f64> {
        let lerp = |a: f64, b: f64| a + (b - a) * t;
        match self.kind {
            BenchmarkKind::Zdt1 | BenchmarkKind::Zdt2 | BenchmarkKind::Zdt3 => {
                let mut x = vec![0.0; self.domain.dim()];
                x[0] = t;
                x
            }
            BenchmarkKind::Bnh => match segment {
                0 => {
                    let v = lerp(0.0, 3.0);
                    vec![v, v]
                }
                _ => vec![lerp(3.0, 5.0), 3.0],
            },
            BenchmarkKind::Tnk => {
                let theta = lerp(0.0, PI / 2.0);
                let r = libm::sqrt(1.0 + 0.1 * libm::cos(16.0 * theta));
                vec![r * libm::sin(theta), r * libm::cos(theta)]
            }
            BenchmarkKind::Osy => match segment {
                0 => vec![5.0, 1.0, lerp(1.0, 5.0), 0.0, 5.0, 0.0],
                1 => vec![5.0, 1.0, lerp(1.0, 5.0), 0.0, 1.0, 0.0],
                2 => {
                    let x1 = lerp(4.065, 5.0);
                    vec![x1, (x1 - 2.0) / 3.0, 1.0, 0.0, 1.0, 0.0]
                }
                3 => vec![0.0, 2.0, lerp(1.0, 1.3732), 0.0, 1.0, 0.0],
                _ => {
                    let x1 = lerp(0.0, 1.0);
                    vec![x1, 2.0 - x1, 1.0, 0.0, 1.0, 0.0]
                }
            },
        }
    }
}

impl Problem for Benchmark {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> ProblemDims {
        let (p, d) = match self.kind {
            BenchmarkKind::Bnh | BenchmarkKind::Tnk => (2, 2),
            BenchmarkKind::Osy => (6, 6),
            _ => (0, self.domain.dim()),
        };
        ProblemDims { d, n: 2, p, m: 0 }
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation, EvaluatorError> {
        if x.len() != self.domain.dim() {
            return Err(EvaluatorError::InputArity {
                expected: self.domain.dim(),
                found: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    fn benchmark(&self) -> Option<&Benchmark> {
        Some(self)
    }
}
