//! JSON documents read and written by the command line.

use std::collections::BTreeMap;

use constellation_core::affine::{AffineConstellation, AffineError, Line};
use constellation_core::latin::{LatinSquare, MateCertificate};
use constellation_core::mub::{Basis, MuConstellation, MubError, C64};
use constellation_core::search::{SearchConfig, SearchResult, SearchStatus};
use serde::{Deserialize, Serialize};

/// `{"order": d, "classes": [[[point, …], …], …]}` with the stored lines of
/// each class, points ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstellationDoc {
    pub order: usize,
    pub classes: Vec<Vec<Vec<usize>>>,
}

impl ConstellationDoc {
    pub fn new(c: &AffineConstellation) -> Self {
        ConstellationDoc {
            order: c.order(),
            classes: c
                .classes()
                .iter()
                .map(|class| class.lines().iter().map(|l| l.points().to_vec()).collect())
                .collect(),
        }
    }

    pub fn build(&self) -> Result<AffineConstellation, AffineError> {
        let classes = self
            .classes
            .iter()
            .map(|lines| lines.iter().map(|p| Line::new(self.order, p.clone())).collect())
            .collect::<Result<Vec<Vec<Line>>, _>>()?;
        AffineConstellation::new(self.order, classes)
    }
}

/// `{"dim": d, "bases": [[[[re, im], …] per column] per basis]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSetDoc {
    pub dim: usize,
    pub bases: Vec<Vec<Vec<[f64; 2]>>>,
}

impl BasisSetDoc {
    pub fn new(c: &MuConstellation) -> Self {
        BasisSetDoc {
            dim: c.dim(),
            bases: c
                .bases()
                .iter()
                .map(|b| {
                    b.columns()
                        .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<MuConstellation, MubError> {
        let bases = self
            .bases
            .iter()
            .map(|cols| {
                let cols = cols
                    .iter()
                    .map(|col| col.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .collect();
                Basis::new(self.dim, cols)
            })
            .collect::<Result<Vec<_>, _>>()?;
        MuConstellation::new(self.dim, bases)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub valid: bool,
    pub signature: String,
    pub stored_lines: usize,
    pub foliations: usize,
    pub violations: Vec<String>,
    pub plane_axioms: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionDoc {
    pub first_digits_latin: bool,
    pub second_digits_distinct: bool,
    pub second_digit_cells: usize,
    pub distinct_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Doc {
    pub text: String,
    pub constellation: ConstellationDoc,
    pub signature: String,
    pub verification: Option<VerifyDoc>,
    pub caption: Option<CaptionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MolsDoc {
    pub order: usize,
    pub method: String,
    pub squares: Vec<Vec<Vec<u8>>>,
    pub pairwise_orthogonal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MateDoc {
    pub order: usize,
    pub transversals: usize,
    pub mate: Option<Vec<Vec<u8>>>,
}

impl MateDoc {
    pub fn new(order: usize, transversals: usize, mate: Option<&LatinSquare>) -> Self {
        MateDoc {
            order,
            transversals,
            mate: mate.map(LatinSquare::rows),
        }
    }
}

/// A mate certificate without its wall-clock time, so repeated runs emit
/// identical documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub order: usize,
    pub squares_examined: u64,
    pub mates_found: u64,
    pub transversal_histogram: BTreeMap<usize, u64>,
    pub digest: String,
    pub asserts_nonexistence: bool,
}

impl CertificateDoc {
    pub fn new(c: &MateCertificate) -> Self {
        CertificateDoc {
            order: c.order,
            squares_examined: c.squares_examined,
            mates_found: c.mates_found,
            transversal_histogram: c.transversal_histogram.clone(),
            digest: c.digest.clone(),
            asserts_nonexistence: c.asserts_nonexistence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDefectDoc {
    pub pair: [usize; 2],
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectDoc {
    pub signature: String,
    pub pair_defects: Vec<PairDefectDoc>,
    pub orthonormality_residuals: Vec<f64>,
    pub total: f64,
    pub tolerance: f64,
    pub mutually_unbiased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetDoc {
    pub restarts: usize,
    pub max_iterations: u64,
    pub grad_tol: f64,
    pub success_threshold: f64,
}

/// A search outcome. The wall-clock time and worker count are left out so
/// that a fixed seed always yields the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub target: String,
    pub status: String,
    pub best_defect: f64,
    pub found_at_restart: Option<usize>,
    pub restarts_run: usize,
    pub iterations_used: u64,
    pub seed: u64,
    pub budget: BudgetDoc,
    pub note: String,
    pub configuration: BasisSetDoc,
}

pub const EVIDENCE_NOTE: &str = "budgeted numerical evidence, not a proof of non-existence";
pub const FOUND_NOTE: &str = "defect below the success threshold";

impl SearchDoc {
    pub fn new(target: String, r: &SearchResult, cfg: &SearchConfig) -> Self {
        let found = r.status == SearchStatus::Found;
        SearchDoc {
            target,
            status: if found { "Found" } else { "NotFound" }.to_string(),
            best_defect: r.best_defect,
            found_at_restart: r.found_at_restart,
            restarts_run: r.restarts_run,
            iterations_used: r.iterations_used,
            seed: cfg.seed,
            budget: BudgetDoc {
                restarts: cfg.restarts,
                max_iterations: cfg.max_iterations,
                grad_tol: cfg.grad_tol,
                success_threshold: cfg.success_threshold,
            },
            note: if found { FOUND_NOTE } else { EVIDENCE_NOTE }.to_string(),
            configuration: BasisSetDoc::new(&r.best_configuration),
        }
    }
}
