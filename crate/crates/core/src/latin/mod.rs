//! Latin squares, MOLS constructions and the square/foliation correspondence.

mod certify;
mod enumerate;
mod mate;
mod text;

use thiserror::Error;

use crate::affine::{Line, ParallelClass};
use crate::field::FieldTable;

pub use certify::{certify_mates, certify_no_mols6, CertifyOptions, Checkpoint, MateCertificate};
pub use enumerate::{enumerate_reduced_latin, ReducedLatinSquares};
pub use mate::{find_orthogonal_mate, mate_search, transversals, MateSearch};
pub use text::{parse_graeco_latin, parse_latin_text, render_graeco_latin, render_latin, TABLE1_TEXT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("grid is not a Latin square")]
    NotLatin,
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("no input squares")]
    EmptyInput,
    #[error("input squares are not pairwise orthogonal")]
    NotOrthogonalInput,
    #[error("foliation line {0} does not meet every row and column exactly once")]
    NotTransversalFoliation(usize),
    #[error("order {0} is outside the supported range")]
    OrderOutOfRange(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("second symbols repeat in row {row} or column {col}")]
    PartialClash { row: usize, col: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

fn is_latin_grid(n: usize, cell: impl Fn(usize, usize) -> u8) -> bool {
    if n == 0 || n > 64 {
        return false;
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..n).all(|i| {
        let (mut row, mut col) = (0u64, 0u64);
        for j in 0..n {
            let (a, b) = (cell(i, j), cell(j, i));
            if a as usize >= n || b as usize >= n {
                return false;
            }
            row |= 1 << a;
            col |= 1 << b;
        }
        row == full && col == full
    })
}

/// An `n × n` grid over symbols `0..n` with every row and column a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u8>,
}

impl LatinSquare {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self, LatinError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatinError::NotLatin);
        }
        Self::from_cells(n, rows.into_iter().flatten().collect())
    }

    /// Row-major cells.
    pub fn from_cells(n: usize, cells: Vec<u8>) -> Result<Self, LatinError> {
        if cells.len() != n * n || !is_latin_grid(n, |r, c| cells[r * n + c]) {
            return Err(LatinError::NotLatin);
        }
        Ok(LatinSquare { n, cells })
    }

    /// `cell(r, c) = (r + c) mod n`, the Cayley table of `Z_n`.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n * n).map(|i| ((i / n + i % n) % n) as u8).collect();
        LatinSquare { n, cells }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.cells.chunks(self.n).map(<[u8]>::to_vec).collect()
    }

    /// First row and first column both `0, 1, …, n-1`.
    pub fn is_reduced(&self) -> bool {
        (0..self.n).all(|i| self.get(0, i) as usize == i && self.get(i, 0) as usize == i)
    }

    pub fn is_orthogonal_to(&self, other: &LatinSquare) -> bool {
        self.n == other.n && pairs_distinct(self.n, |r, c| (self.get(r, c), other.get(r, c)))
    }
}

fn pairs_distinct(n: usize, pair: impl Fn(usize, usize) -> (u8, u8)) -> bool {
    let mut seen = vec![false; n * n];
    for r in 0..n {
        for c in 0..n {
            let (a, b) = pair(r, c);
            if a as usize >= n || b as usize >= n {
                return false;
            }
            if std::mem::replace(&mut seen[a as usize * n + b as usize], true) {
                return false;
            }
        }
    }
    true
}

/// An `n × n` grid of optional symbols without row or column repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSquare {
    n: usize,
    cells: Vec<Option<u8>>,
}

impl PartialSquare {
    pub fn new(rows: Vec<Vec<Option<u8>>>) -> Result<Self, LatinError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatinError::Parse {
                line: 0,
                message: "partial square is not square".into(),
            });
        }
        let cells: Vec<Option<u8>> = rows.into_iter().flatten().collect();
        for r in 0..n {
            for c in 0..n {
                let Some(s) = cells[r * n + c] else { continue };
                if s as usize >= n {
                    return Err(LatinError::Parse {
                        line: r + 1,
                        message: format!("symbol {} out of range", s as usize + 1),
                    });
                }
                let clash_row = (c + 1..n).any(|k| cells[r * n + k] == Some(s));
                let clash_col = (r + 1..n).any(|k| cells[k * n + c] == Some(s));
                if clash_row || clash_col {
                    return Err(LatinError::PartialClash { row: r, col: c });
                }
            }
        }
        Ok(PartialSquare { n, cells })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Option<u8> {
        self.cells[r * self.n + c]
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().flatten().count()
    }

    /// Distinct symbols present.
    pub fn symbols(&self) -> Vec<u8> {
        let mut s: Vec<u8> = self.cells.iter().flatten().copied().collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

impl From<&LatinSquare> for PartialSquare {
    fn from(sq: &LatinSquare) -> Self {
        PartialSquare {
            n: sq.n,
            cells: sq.cells.iter().map(|&s| Some(s)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareCheck {
    /// Every supplied grid is Latin.
    pub latin: bool,
    /// All `n²` superposed pairs distinct; `None` without a second grid.
    pub orthogonal: Option<bool>,
}

/// Checks raw grids for the Latin property and, given two, orthogonality.
pub fn validate_squares(a: &[Vec<u8>], b: Option<&[Vec<u8>]>) -> Result<SquareCheck, LatinError> {
    let n = a.len();
    let square = |g: &[Vec<u8>]| g.iter().all(|r| r.len() == g.len());
    let latin_a = square(a) && is_latin_grid(n, |r, c| a[r][c]);
    let Some(b) = b else {
        return Ok(SquareCheck {
            latin: latin_a,
            orthogonal: None,
        });
    };
    if b.len() != n {
        return Err(LatinError::OrderMismatch(n, b.len()));
    }
    let latin_b = square(b) && is_latin_grid(n, |r, c| b[r][c]);
    let orthogonal = square(a) && square(b) && pairs_distinct(n, |r, c| (a[r][c], b[r][c]));
    Ok(SquareCheck {
        latin: latin_a && latin_b,
        orthogonal: Some(orthogonal),
    })
}

/// `q - 1` pairwise orthogonal squares `L_a(r, c) = a·r + c` over GF(q).
pub fn mols_prime_power(q: u32) -> Result<Vec<LatinSquare>, LatinError> {
    let f = FieldTable::of_order(q).map_err(|_| LatinError::NotPrimePower(q))?;
    let n = q as usize;
    Ok((1..q)
        .map(|a| {
            let cells = (0..n * n)
                .map(|i| f.add(f.mul(a, (i / n) as u32), (i % n) as u32) as u8)
                .collect();
            LatinSquare { n, cells }
        })
        .collect())
}

fn pairwise_orthogonal(squares: &[LatinSquare]) -> bool {
    squares
        .iter()
        .enumerate()
        .all(|(i, a)| squares[i + 1..].iter().all(|b| a.is_orthogonal_to(b)))
}

/// Direct products `As[i] × Bs[i]` for `i < min(|As|, |Bs|)`.
///
/// Rows and columns of the product are pairs `(x₁, x₂)` indexed as
/// `x₁·m + x₂`; the symbol is `A(r₁,c₁)·m + B(r₂,c₂)`.
pub fn macneish_product(a_list: &[LatinSquare], b_list: &[LatinSquare]) -> Result<Vec<LatinSquare>, LatinError> {
    if a_list.is_empty() || b_list.is_empty() {
        return Err(LatinError::EmptyInput);
    }
    let (n, m) = (a_list[0].n, b_list[0].n);
    if let Some(x) = a_list.iter().find(|s| s.n != n) {
        return Err(LatinError::OrderMismatch(n, x.n));
    }
    if let Some(x) = b_list.iter().find(|s| s.n != m) {
        return Err(LatinError::OrderMismatch(m, x.n));
    }
    if n * m > 64 {
        return Err(LatinError::OrderOutOfRange(n * m));
    }
    if !pairwise_orthogonal(a_list) || !pairwise_orthogonal(b_list) {
        return Err(LatinError::NotOrthogonalInput);
    }
    let nm = n * m;
    Ok(a_list
        .iter()
        .zip(b_list)
        .map(|(a, b)| {
            let mut cells = vec![0u8; nm * nm];
            for r in 0..nm {
                for c in 0..nm {
                    let sym = a.get(r / m, c / m) as usize * m + b.get(r % m, c % m) as usize;
                    cells[r * nm + c] = sym as u8;
                }
            }
            LatinSquare { n: nm, cells }
        })
        .collect())
}

/// MOLS of order `n` from its prime-power factorisation: the field construction
/// for each factor, folded with [`macneish_product`]. Yields `min(qᵢ) - 1` squares.
pub fn mols_macneish(n: u32) -> Result<Vec<LatinSquare>, LatinError> {
    let factors = crate::field::prime_power_factors(n);
    let mut iter = factors.into_iter();
    let first = iter.next().ok_or(LatinError::OrderOutOfRange(n as usize))?;
    iter.try_fold(mols_prime_power(first)?, |acc, q| {
        macneish_product(&acc, &mols_prime_power(q)?)
    })
}

/// Line `s` of the foliation is the set of cells holding symbol `s`.
pub fn latin_to_foliation(sq: &LatinSquare) -> ParallelClass {
    let n = sq.n;
    let lines = (0..n as u8)
        .map(|s| {
            let pts = (0..n * n).filter(|&i| sq.cells[i] == s).collect();
            Line::new(n, pts).expect("a symbol of a Latin square occupies n cells")
        })
        .collect();
    ParallelClass::new(n, lines).expect("n lines of order n")
}

/// Inverse of [`latin_to_foliation`]: cell `(r, c)` gets the index of the line
/// containing it. Every line must meet each row and each column once.
pub fn foliation_to_latin(class: &ParallelClass) -> Result<LatinSquare, LatinError> {
    let n = class.order();
    if class.lines().len() != n {
        return Err(LatinError::NotTransversalFoliation(class.lines().len()));
    }
    let mut cells = vec![u8::MAX; n * n];
    for (s, line) in class.lines().iter().enumerate() {
        let (mut rows, mut cols) = (vec![false; n], vec![false; n]);
        for &p in line.points() {
            let (r, c) = (p / n, p % n);
            if rows[r] || cols[c] || cells[p] != u8::MAX {
                return Err(LatinError::NotTransversalFoliation(s));
            }
            rows[r] = true;
            cols[c] = true;
            cells[p] = s as u8;
        }
    }
    LatinSquare::from_cells(n, cells).map_err(|_| LatinError::NotTransversalFoliation(0))
}
