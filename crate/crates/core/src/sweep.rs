//! One-parameter (`gamma`) families and ordered parallel evaluation over grids.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::chain::{family_a, family_b, family_c, family_d, legacy, CentralBlock, ChainSpec, TridiagonalMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Inclusive, evenly spaced grid `start..=stop` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("grid needs at least one point".into()));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if steps == 1 && start != stop {
            return Err(Error::InvalidArgument("a one-point grid needs start == stop".into()));
        }
        Ok(Grid { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.steps < 2 {
            0.0
        } else {
            (self.stop - self.start) / (self.steps - 1) as f64
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:steps`, or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse grid `{s}` (expected start:stop:steps)"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => {
                let x: f64 = x.trim().parse().map_err(|_| bad())?;
                Grid::new(x, x, 1)
            }
            [a, b, n] => Grid::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
                n.trim().parse().map_err(|_| bad())?,
            ),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

/// A chain family with the imaginary potential `gamma` left free.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    A {
        len: usize,
        alpha: f64,
        delta: f64,
        beta: C64,
    },
    Legacy {
        len: usize,
        alpha: f64,
    },
    B {
        len: usize,
        j1: f64,
        j2: f64,
        alpha: f64,
    },
    C {
        len: usize,
        j1: f64,
        j2: f64,
        jc: f64,
        alpha: f64,
    },
    /// Family D along `gamma1 = gamma3 = 2 gamma`, `gamma2 = gamma`.
    DScaled {
        len: usize,
    },
    /// Arbitrary spec; `gamma` replaces the central `gamma`, other block entries are kept.
    Spec(ChainSpec),
}

impl Family {
    pub fn len(&self) -> usize {
        match self {
            Family::A { len, .. }
            | Family::Legacy { len, .. }
            | Family::B { len, .. }
            | Family::C { len, .. }
            | Family::DScaled { len } => *len,
            Family::Spec(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::A { .. } => "a",
            Family::Legacy { .. } => "legacy",
            Family::B { .. } => "b",
            Family::C { .. } => "c",
            Family::DScaled { .. } => "d",
            Family::Spec(_) => "spec",
        }
    }

    /// The spec at `gamma`; `None` for families built directly as matrices.
    pub fn spec_at(&self, gamma: f64) -> Option<Result<ChainSpec>> {
        Some(match self {
            Family::A {
                len,
                alpha,
                delta,
                beta,
            } => family_a(*len, *alpha, gamma, *delta, *beta),
            Family::Legacy { len, alpha } => legacy(*len, *alpha, gamma),
            Family::B { len, j1, j2, alpha } => family_b(*len, *j1, *j2, *alpha, gamma),
            Family::C { len, j1, j2, jc, alpha } => family_c(*len, *j1, *j2, *jc, *alpha, gamma),
            Family::DScaled { .. } => return None,
            Family::Spec(s) => {
                let cb = s.central();
                Ok(s.clone().with_central(CentralBlock::general(
                    cb.alpha,
                    C64::new(gamma, 0.0),
                    cb.delta_upper,
                    cb.delta_lower,
                )))
            }
        })
    }

    pub fn matrix_at(&self, gamma: f64) -> Result<TridiagonalMatrix> {
        match self {
            Family::DScaled { len } => family_d(*len, 2.0 * gamma, gamma, 2.0 * gamma),
            _ => Ok(self.spec_at(gamma).expect("spec-backed family")?.build()),
        }
    }

    /// Values of `gamma` at which the family has full pairwise (or, for
    /// `DScaled`, four-fold) coalescence, ascending.
    pub fn pc_gammas(&self) -> Vec<f64> {
        let pair = |alpha: f64, delta: f64| {
            let mut v = vec![alpha - 2.0 * delta.abs(), alpha + 2.0 * delta.abs()];
            v.dedup();
            v
        };
        match self {
            Family::A { alpha, delta, .. } => pair(*alpha, *delta),
            Family::Legacy { alpha, .. } => pair(*alpha, 1.0),
            Family::B { len, j1, j2, alpha } => {
                let central = if (len / 2) % 2 == 1 { *j1 } else { *j2 };
                pair(*alpha, central)
            }
            Family::C { jc, alpha, .. } => pair(*alpha, *jc),
            Family::DScaled { .. } => vec![1.0],
            Family::Spec(s) => {
                let cb = s.central();
                if cb.alpha.im != 0.0 {
                    return Vec::new();
                }
                // gamma with (gamma - alpha)^2 / 4 = delta_u delta_l.
                let root = (cb.delta_upper * cb.delta_lower).sqrt();
                if root.im.abs() > 1e-12 * root.norm().max(1.0) {
                    return Vec::new();
                }
                pair(cb.alpha.re, root.re)
            }
        }
    }
}

/// Resolves a worker count: `None` or 0 means all available cores.
pub fn worker_count(requested: Option<usize>) -> usize {
    match requested {
        Some(n) if n > 0 => n,
        _ => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

/// Maps `f` over `points` on a pool of `workers` threads; output keeps input order.
pub fn par_map<T, F>(points: &[f64], workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    let n = worker_count(workers);
    if n == 1 {
        return points.iter().map(|&x| f(x)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| points.par_iter().map(|&x| f(x)).collect())
}
