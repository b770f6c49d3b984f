//! Orthonormal vector sets in `C^d` and the defect that measures how far a
//! family of them is from being mutually unbiased.

mod constructions;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::signature::{Signature, SignatureError};

pub use constructions::{fourier_basis, fourier_family6, hw_triple, tao_basis, wf_complete_set};

pub type C64 = Complex64;

/// Tolerance for checks on freshly constructed bases.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Default tolerance for verifying externally supplied data.
pub const VERIFICATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MubError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("basis must hold 1..={dim} columns of length {dim}")]
    BadShape { dim: usize },
    #[error("{0} bases exceed the d + 1 limit")]
    TooManyBases(usize),
    #[error("eigenvalues closer than {0:e}")]
    DegenerateSpectrum(f64),
    #[error("order {0} is not supported")]
    UnsupportedOrder(u32),
    #[error("embedded construction failed validation: {0}")]
    ConstructionInvalid(String),
    #[error("signature {from} does not dominate {to}")]
    NotDominated { from: String, to: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// `m <= d` column vectors of length `d`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    data: Vec<C64>,
}

impl Basis {
    pub fn new(dim: usize, columns: Vec<Vec<C64>>) -> Result<Self, MubError> {
        if dim == 0 || columns.is_empty() || columns.len() > dim || columns.iter().any(|c| c.len() != dim) {
            return Err(MubError::BadShape { dim });
        }
        Ok(Basis {
            dim,
            data: columns.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_column_major(dim: usize, data: Vec<C64>) -> Self {
        debug_assert!(dim > 0 && data.len().is_multiple_of(dim) && data.len() / dim <= dim);
        Basis { dim, data }
    }

    /// The first `m` columns of a `d × d` matrix.
    pub fn from_matrix(m: &DMatrix<C64>, columns: usize) -> Self {
        let dim = m.nrows();
        let data = (0..columns)
            .flat_map(|j| m.column(j).iter().copied().collect::<Vec<_>>())
            .collect();
        Basis { dim, data }
    }

    pub fn standard(dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Basis { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.dim)
    }

    /// All entries, column-major.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_column_slice(self.dim, self.len(), &self.data)
    }

    /// Largest entry of `|G - I|` for the Gram matrix `G`.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = self.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                let g = inner(self.column(i), self.column(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Keeps the first `m` columns.
    pub fn truncated(&self, m: usize) -> Basis {
        Basis {
            dim: self.dim,
            data: self.data[..m.min(self.len()) * self.dim].to_vec(),
        }
    }

    /// Applies `u` to every column.
    pub fn transformed(&self, u: &DMatrix<C64>) -> Basis {
        Basis::from_matrix(&(u * self.to_matrix()), self.len())
    }

    /// Divides each column by the phase of its first entry, then each row by
    /// the phase of its first entry. Zero entries are left as they are.
    pub fn dephased(&self) -> Basis {
        let d = self.dim;
        let m = self.len();
        let mut data = self.data.clone();
        let unit = |z: C64| {
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        };
        for j in 0..m {
            let ph = unit(data[j * d]);
            for i in 0..d {
                data[j * d + i] /= ph;
            }
        }
        for i in 0..d {
            let ph = unit(data[i]);
            for j in 0..m {
                data[j * d + i] /= ph;
            }
        }
        Basis { dim: d, data }
    }

    pub fn max_entry_distance(&self, other: &Basis) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨u|v⟩ = Σ conj(u_i) v_i`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Σ over column pairs `(u, v)` of `(|⟨u|v⟩|² - 1/d)²`.
pub fn mu_defect(b1: &Basis, b2: &Basis) -> Result<f64, MubError> {
    if b1.dim != b2.dim {
        return Err(MubError::DimensionMismatch {
            expected: b1.dim,
            found: b2.dim,
        });
    }
    let inv_d = 1.0 / b1.dim as f64;
    Ok(b1
        .columns()
        .flat_map(|u| b2.columns().map(move |v| (inner(u, v).norm_sqr() - inv_d).powi(2)))
        .sum())
}

/// Sets of orthonormal vectors sharing a dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MuConstellation {
    dim: usize,
    bases: Vec<Basis>,
}

impl MuConstellation {
    pub fn new(dim: usize, bases: Vec<Basis>) -> Result<Self, MubError> {
        if dim < 2 {
            return Err(MubError::DimensionTooSmall(dim));
        }
        if let Some(b) = bases.iter().find(|b| b.dim != dim) {
            return Err(MubError::DimensionMismatch {
                expected: dim,
                found: b.dim,
            });
        }
        if bases.len() > dim + 1 {
            return Err(MubError::TooManyBases(bases.len()));
        }
        Ok(MuConstellation { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn into_bases(self) -> Vec<Basis> {
        self.bases
    }

    /// Column counts, with a full basis of `d` columns recorded as `d - 1`.
    pub fn signature(&self) -> Signature {
        Signature::new(self.dim, self.bases.iter().map(|b| b.len().min(self.dim - 1)))
            .expect("sizes are within 1..=d-1 and at most d+1 sets")
    }

    /// Restricts to a dominated signature: the sets are matched in order of
    /// decreasing size and each keeps its leading columns.
    pub fn restrict_to(&self, target: &Signature) -> Result<MuConstellation, MubError> {
        let own = self.signature();
        if !own.dominates(target)? {
            return Err(MubError::NotDominated {
                from: own.to_string(),
                to: target.to_string(),
            });
        }
        let mut order: Vec<usize> = (0..self.bases.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.bases[i].len().min(self.dim - 1)));
        let bases = order
            .iter()
            .zip(target.sizes())
            .map(|(&i, &size)| self.bases[i].truncated(size))
            .collect();
        MuConstellation::new(self.dim, bases)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    /// `((i, j), defect)` for every basis pair `i < j`.
    pub pair_defects: Vec<((usize, usize), f64)>,
    pub orthonormality_residuals: Vec<f64>,
    /// Sum of the pair defects only.
    pub total: f64,
}

impl DefectReport {
    pub fn max_pair_defect(&self) -> f64 {
        self.pair_defects.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.orthonormality_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Unbiased and orthonormal within `tol`.
    pub fn is_mu(&self, tol: f64) -> bool {
        self.max_pair_defect() < tol && self.max_residual() < tol
    }
}

pub fn constellation_defect(c: &MuConstellation) -> DefectReport {
    let n = c.bases.len();
    let mut pair_defects = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = mu_defect(&c.bases[i], &c.bases[j]).expect("constellation dims agree");
            pair_defects.push(((i, j), d));
        }
    }
    let total = pair_defects.iter().map(|p| p.1).sum();
    DefectReport {
        pair_defects,
        orthonormality_residuals: c.bases.iter().map(Basis::orthonormality_residual).collect(),
        total,
    }
}

/// Haar-ish random unitary from the QR factorisation of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    g.qr().q()
}

/// Unit-modulus scalar `e^{2πi·turns}`.
pub fn phase(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}
