//! Exhaustive orthogonal-mate search over reduced Latin squares.
//!
//! Row and column permutations together with symbol relabelling preserve
//! orthogonality, so any orthogonal pair can be normalised to one whose first
//! member is reduced. Zero mates among all reduced squares of order `n`
//! therefore rules out a pair of orthogonal Latin squares of that order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::enumerate::enumerate_reduced_latin;
use super::mate::mate_search;
use super::{LatinError, LatinSquare};

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Squares per work batch; a checkpoint is written after each batch.
    pub batch: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            workers: 1,
            checkpoint: None,
            batch: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MateCertificate {
    pub order: usize,
    pub squares_examined: u64,
    pub mates_found: u64,
    /// Number of squares having each transversal count.
    pub transversal_histogram: BTreeMap<usize, u64>,
    pub elapsed_secs: f64,
    /// Hex SHA-256 chain over the examined squares in enumeration order.
    pub digest: String,
}

impl MateCertificate {
    /// True when the run proves no orthogonal pair exists at this order.
    pub fn asserts_nonexistence(&self) -> bool {
        self.mates_found == 0
    }

    pub fn max_transversals(&self) -> usize {
        self.transversal_histogram.keys().next_back().copied().unwrap_or(0)
    }
}

/// Resumable progress: everything up to (not including) `next_index` is merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub order: usize,
    pub next_index: u64,
    pub mates_found: u64,
    pub transversal_histogram: BTreeMap<usize, u64>,
    pub elapsed_secs: f64,
    pub digest: String,
}

impl Checkpoint {
    fn fresh(order: usize) -> Self {
        Checkpoint {
            order,
            next_index: 0,
            mates_found: 0,
            transversal_histogram: BTreeMap::new(),
            elapsed_secs: 0.0,
            digest: hex::encode([0u8; 32]),
        }
    }

    pub fn load(path: &Path) -> Result<Option<Self>, LatinError> {
        match fs::read_to_string(path) {
            Ok(s) => serde_json::from_str(&s)
                .map(Some)
                .map_err(|e| LatinError::Checkpoint(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(LatinError::Checkpoint(format!("{}: {e}", path.display()))),
        }
    }

    /// Write-then-rename so a crash never leaves a torn file.
    pub fn store(&self, path: &Path) -> Result<(), LatinError> {
        let err = |e: std::io::Error| LatinError::Checkpoint(format!("{}: {e}", path.display()));
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let body = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        fs::write(&tmp, body).map_err(err)?;
        fs::rename(&tmp, path).map_err(err)
    }
}

fn chain(digest: &mut [u8; 32], sq: &LatinSquare) {
    let mut h = Sha256::new();
    h.update(*digest);
    h.update(sq.cells());
    digest.copy_from_slice(&h.finalize());
}

/// Runs the mate search over every reduced square of order `n`.
pub fn certify_mates(n: usize, opts: &CertifyOptions) -> Result<MateCertificate, LatinError> {
    let started = Instant::now();
    let mut state = match &opts.checkpoint {
        Some(path) => Checkpoint::load(path)?.unwrap_or_else(|| Checkpoint::fresh(n)),
        None => Checkpoint::fresh(n),
    };
    if state.order != n {
        return Err(LatinError::Checkpoint(format!(
            "checkpoint is for order {}, not {n}",
            state.order
        )));
    }
    let mut digest = [0u8; 32];
    hex::decode_to_slice(&state.digest, &mut digest).map_err(|e| LatinError::Checkpoint(format!("bad digest: {e}")))?;
    let prior_elapsed = state.elapsed_secs;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| LatinError::Checkpoint(e.to_string()))?;
    let mut squares = enumerate_reduced_latin(n)?.skip(state.next_index as usize);
    let batch_size = opts.batch.max(1);

    loop {
        let batch: Vec<LatinSquare> = squares.by_ref().take(batch_size).collect();
        if batch.is_empty() {
            break;
        }
        let results: Vec<(usize, bool)> = pool.install(|| {
            batch
                .par_iter()
                .map(|sq| {
                    let r = mate_search(sq);
                    (r.transversals, r.mate.is_some())
                })
                .collect()
        });
        // merge strictly in enumeration order
        for (sq, (t, has_mate)) in batch.iter().zip(results) {
            chain(&mut digest, sq);
            *state.transversal_histogram.entry(t).or_insert(0) += 1;
            state.mates_found += u64::from(has_mate);
        }
        state.next_index += batch.len() as u64;
        state.digest = hex::encode(digest);
        state.elapsed_secs = prior_elapsed + started.elapsed().as_secs_f64();
        if let Some(path) = &opts.checkpoint {
            state.store(path)?;
        }
    }

    Ok(MateCertificate {
        order: n,
        squares_examined: state.next_index,
        mates_found: state.mates_found,
        transversal_histogram: state.transversal_histogram,
        elapsed_secs: prior_elapsed + started.elapsed().as_secs_f64(),
        digest: state.digest,
    })
}

/// The order-6 run: no reduced Latin square of order 6 has an orthogonal mate.
pub fn certify_no_mols6(opts: &CertifyOptions) -> Result<MateCertificate, LatinError> {
    certify_mates(6, opts)
}
