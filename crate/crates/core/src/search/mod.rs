//! Seeded multi-start numerical search for MU constellations and for MU
//! extensions of fixed bases.
//!
//! A `NotFound` result only says that the configured budget did not reach the
//! success threshold. It is evidence, never a proof of non-existence.

mod cost;
mod descent;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::mub::{Basis, MuConstellation, MubError};
use crate::signature::Signature;

use cost::Block;
pub use cost::CostFunction;

/// Restarts are run in batches of this size when stopping at the first
/// success, so the outcome never depends on the worker count.
const BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("bad signature: {0}")]
    BadSignature(String),
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector count {count} is outside 1..={max}")]
    BadCount { count: usize, max: usize },
    #[error("bad search configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Mub(#[from] MubError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iterations: u64,
    pub grad_tol: f64,
    pub success_threshold: f64,
    /// Worker threads; `0` lets the pool pick.
    pub workers: usize,
    /// Stop after the first batch of restarts that contains a success.
    pub stop_on_success: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            restarts: 100,
            max_iterations: 10_000,
            grad_tol: 1e-9,
            success_threshold: 1e-8,
            workers: 1,
            stop_on_success: true,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<(), SearchError> {
        if self.restarts == 0 {
            return Err(SearchError::BadConfig("restarts must be at least 1".into()));
        }
        if !(self.grad_tol > 0.0 && self.success_threshold > 0.0) {
            return Err(SearchError::BadConfig("thresholds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub best_defect: f64,
    pub best_configuration: MuConstellation,
    /// Restart that produced the reported configuration, when it succeeded.
    pub found_at_restart: Option<usize>,
    pub restarts_run: usize,
    pub iterations_used: u64,
    pub elapsed_secs: f64,
}

/// Cost of a constellation search: the first (largest) set is pinned to
/// identity columns and every other set is the leading columns of a
/// Hermitian exponential. Only the requested vectors enter the cost; for a
/// set of `d - 1` vectors the remaining column is implied, and is unbiased
/// exactly when the listed ones are.
pub fn constellation_cost(sizes: &[usize], dim: usize) -> Result<CostFunction, SearchError> {
    if dim < 2 {
        return Err(SearchError::DimensionTooSmall(dim));
    }
    if sizes.len() < 2 {
        return Err(SearchError::BadSignature("at least two sets are required".into()));
    }
    let sig = Signature::new(dim, sizes.iter().copied()).map_err(|e| SearchError::BadSignature(e.to_string()))?;
    let sizes = sig.sizes();
    let first = Basis::standard(dim).truncated(sizes[0]);
    let blocks = sizes[1..].iter().map(|&cols| Block::Unitary { cols }).collect();
    Ok(CostFunction::new(dim, vec![first], blocks))
}

/// Cost of extending `fixed` by `k` unit vectors, mutually orthonormal when
/// `orthonormal` is set. Pairs of fixed bases do not contribute.
pub fn extension_cost(fixed: &[Basis], k: usize, orthonormal: bool) -> Result<CostFunction, SearchError> {
    let dim = fixed
        .first()
        .ok_or_else(|| SearchError::BadConfig("at least one fixed basis is required".into()))?
        .dim();
    if dim < 2 {
        return Err(SearchError::DimensionTooSmall(dim));
    }
    if let Some(b) = fixed.iter().find(|b| b.dim() != dim) {
        return Err(SearchError::DimensionMismatch {
            expected: dim,
            found: b.dim(),
        });
    }
    if k == 0 || k > dim - 1 {
        return Err(SearchError::BadCount { count: k, max: dim - 1 });
    }
    if fixed.len() + 1 > dim + 1 {
        return Err(MubError::TooManyBases(fixed.len() + 1).into());
    }
    let block = if orthonormal {
        Block::Unitary { cols: k }
    } else {
        Block::Normalized { cols: k }
    };
    Ok(CostFunction::new(dim, fixed.to_vec(), vec![block]))
}

pub fn search_constellation(sizes: &[usize], dim: usize, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let f = constellation_cost(sizes, dim)?;
    run(&f, cfg)
}

/// The reported configuration holds the fixed bases followed by the found
/// vectors; `best_defect` counts only overlaps involving the found vectors.
pub fn extend_search(
    fixed: &[Basis],
    k: usize,
    orthonormal: bool,
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    cfg.validate()?;
    let f = extension_cost(fixed, k, orthonormal)?;
    run(&f, cfg)
}

struct Outcome {
    restart: usize,
    cost: f64,
    x: Vec<f64>,
    iterations: u64,
}

fn run_restart(f: &CostFunction, cfg: &SearchConfig, restart: usize) -> Outcome {
    let x0 = f.initial_point(cfg.seed, restart as u64);
    let d = descent::descend(f, x0, cfg.max_iterations, cfg.grad_tol);
    Outcome {
        restart,
        cost: if d.cost.is_nan() { f64::INFINITY } else { d.cost },
        x: d.x,
        iterations: d.iterations,
    }
}

fn run(f: &CostFunction, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SearchError::BadConfig(e.to_string()))?;
    let chunk = if cfg.stop_on_success { BATCH } else { cfg.restarts };
    let mut best: Option<Outcome> = None;
    let mut iterations_used = 0;
    let mut restarts_run = 0;
    while restarts_run < cfg.restarts {
        let end = (restarts_run + chunk).min(cfg.restarts);
        let outcomes: Vec<Outcome> = pool.install(|| {
            (restarts_run..end)
                .into_par_iter()
                .map(|r| run_restart(f, cfg, r))
                .collect()
        });
        for o in outcomes {
            iterations_used += o.iterations;
            // strict comparison keeps the lower restart index on ties
            if best.as_ref().is_none_or(|b| o.cost < b.cost) {
                best = Some(o);
            }
        }
        restarts_run = end;
        if cfg.stop_on_success && best.as_ref().is_some_and(|b| b.cost < cfg.success_threshold) {
            break;
        }
    }
    let best = best.expect("at least one restart ran");
    let found = best.cost < cfg.success_threshold;
    Ok(SearchResult {
        status: if found {
            SearchStatus::Found
        } else {
            SearchStatus::NotFound
        },
        best_defect: best.cost,
        best_configuration: f.configuration(&best.x),
        found_at_restart: found.then_some(best.restart),
        restarts_run,
        iterations_used,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
