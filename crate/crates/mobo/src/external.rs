//! Client for black-box evaluators speaking a line protocol over the
//! child's standard streams.
//!
//! On startup the evaluator prints `d,n,p,m`. Each request is one line
//! `x1,...,xd`; the reply is `f1,...,fn,g1,...,gp,h1,...,hm`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use mobo_core::doe::BoxDomain;
use mobo_core::problems::{Evaluation, EvaluatorError, Problem, ProblemDims};

/// Decimal form that round-trips every `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_line(values: &[f64]) -> String {
    values.iter().map(|v| format_f64(*v)).collect::<Vec<_>>().join(",")
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

pub struct ExternalProblem {
    name: String,
    dims: ProblemDims,
    domain: BoxDomain,
    timeout: Duration,
    channel: Mutex<Channel>,
}

fn parse_values(line: &str) -> Option<Vec<f64>> {
    let t = line.trim();
    if t.is_empty() {
        return Some(Vec::new());
    }
    t.split(',').map(|s| s.trim().parse::<f64>().ok()).collect()
}

impl ExternalProblem {
    /// Runs `command` through the shell and performs the handshake.
    pub fn spawn(command: &str, bounds: Option<BoxDomain>, timeout: Duration) -> Result<Self, EvaluatorError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| EvaluatorError::Handshake(format!("cannot start {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut channel = Channel {
            child,
            stdin,
            lines: rx,
        };
        let header = match channel.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(EvaluatorError::Handshake(e.to_string())),
            Err(RecvTimeoutError::Timeout) => {
                let _ = channel.child.kill();
                return Err(EvaluatorError::Handshake("no header before timeout".into()));
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(EvaluatorError::Handshake("evaluator exited before the header".into()))
            }
        };
        let fields: Option<Vec<usize>> = header.trim().split(',').map(|s| s.trim().parse().ok()).collect();
        let dims = match fields.as_deref() {
            Some(&[d, n, p, m]) if d > 0 && n > 0 => ProblemDims { d, n, p, m },
            _ => {
                let _ = channel.child.kill();
                return Err(EvaluatorError::Handshake(format!("bad header {header:?}")));
            }
        };
        let domain = match bounds {
            Some(b) if b.dim() == dims.d => b,
            Some(b) => {
                let _ = channel.child.kill();
                return Err(EvaluatorError::Handshake(format!(
                    "bounds have {} axes, evaluator declares {}",
                    b.dim(),
                    dims.d
                )));
            }
            None => BoxDomain::unit(dims.d).expect("d > 0"),
        };
        Ok(Self {
            name: format!("external:{command}"),
            dims,
            domain,
            timeout,
            channel: Mutex::new(channel),
        })
    }
}

impl Problem for ExternalProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> ProblemDims {
        self.dims
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation, EvaluatorError> {
        if x.len() != self.dims.d {
            return Err(EvaluatorError::InputArity {
                expected: self.dims.d,
                found: x.len(),
            });
        }
        let request = x.to_vec();
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        let io_err = |e: std::io::Error| EvaluatorError::Io {
            message: e.to_string(),
            request: x.to_vec(),
        };
        if let Err(e) = writeln!(ch.stdin, "{}", format_line(x)).and_then(|_| ch.stdin.flush()) {
            return Err(if e.kind() == std::io::ErrorKind::BrokenPipe {
                EvaluatorError::Exited { request }
            } else {
                io_err(e)
            });
        }
        let line = match ch.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(io_err(e)),
            Err(RecvTimeoutError::Timeout) => {
                let _ = ch.child.kill();
                return Err(EvaluatorError::Timeout { request });
            }
            Err(RecvTimeoutError::Disconnected) => return Err(EvaluatorError::Exited { request }),
        };
        let values = parse_values(&line).ok_or_else(|| EvaluatorError::Malformed {
            line: line.clone(),
            request: request.clone(),
        })?;
        let ProblemDims { n, p, m, .. } = self.dims;
        if values.len() != n + p + m {
            return Err(EvaluatorError::ArityMismatch {
                expected: n + p + m,
                found: values.len(),
                request,
            });
        }
        Ok(Evaluation {
            f: values[..n].to_vec(),
            g: values[n..n + p].to_vec(),
            h: values[n + p..].to_vec(),
        })
    }
}

impl Drop for ExternalProblem {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}
