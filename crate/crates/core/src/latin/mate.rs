//! Orthogonal mates via transversals and exact cover.
//!
//! A mate of `A` exists iff the cells of `A` split into `n` disjoint
//! transversals; giving transversal `j` the symbol `j` builds the mate.

use super::{LatinError, LatinSquare};

/// Column chosen in each row.
pub type Transversal = Vec<u8>;

/// All transversals of `sq`, in lexicographic order of their column vectors.
pub fn transversals(sq: &LatinSquare) -> Vec<Transversal> {
    let n = sq.order();
    let mut out = Vec::new();
    let mut cols = vec![0u8; n];
    fn walk(
        sq: &LatinSquare,
        row: usize,
        used_cols: u64,
        used_syms: u64,
        cols: &mut Vec<u8>,
        out: &mut Vec<Transversal>,
    ) {
        let n = sq.order();
        if row == n {
            out.push(cols.clone());
            return;
        }
        for c in 0..n {
            let s = sq.get(row, c);
            if used_cols >> c & 1 == 0 && used_syms >> s & 1 == 0 {
                cols[row] = c as u8;
                walk(sq, row + 1, used_cols | 1 << c, used_syms | 1 << s, cols, out);
            }
        }
    }
    walk(sq, 0, 0, 0, &mut cols, &mut out);
    out
}

/// Outcome of a full mate search on one square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MateSearch {
    pub transversals: usize,
    pub mate: Option<LatinSquare>,
}

/// Depth-first exact cover over cells, branching on the uncovered cell with
/// the fewest compatible transversals.
fn cover(masks: &[u64], by_cell: &[Vec<usize>], covered: u64, all: u64, chosen: &mut Vec<usize>) -> bool {
    if covered == all {
        return true;
    }
    let mut best: Option<(usize, usize)> = None;
    let mut rest = all & !covered;
    while rest != 0 {
        let cell = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let k = by_cell[cell].iter().filter(|&&t| masks[t] & covered == 0).count();
        if k == 0 {
            return false;
        }
        if best.is_none_or(|(_, b)| k < b) {
            best = Some((cell, k));
        }
    }
    let (cell, _) = best.expect("an uncovered cell exists");
    for &t in &by_cell[cell] {
        if masks[t] & covered == 0 {
            chosen.push(t);
            if cover(masks, by_cell, covered | masks[t], all, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Transversal count and, if one exists, an orthogonal mate.
pub fn mate_search(sq: &LatinSquare) -> MateSearch {
    let n = sq.order();
    assert!(n * n <= 64, "mate search supports n <= 8");
    let ts = transversals(sq);
    let masks: Vec<u64> = ts
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .fold(0u64, |m, (r, &c)| m | 1 << (r * n + c as usize))
        })
        .collect();
    let mut by_cell = vec![Vec::new(); n * n];
    for (i, &m) in masks.iter().enumerate() {
        let mut bits = m;
        while bits != 0 {
            by_cell[bits.trailing_zeros() as usize].push(i);
            bits &= bits - 1;
        }
    }
    let all = if n * n == 64 { u64::MAX } else { (1u64 << (n * n)) - 1 };
    let mut chosen = Vec::with_capacity(n);
    let mate = cover(&masks, &by_cell, 0, all, &mut chosen).then(|| {
        let mut cells = vec![0u8; n * n];
        for (sym, &t) in chosen.iter().enumerate() {
            for (r, &c) in ts[t].iter().enumerate() {
                cells[r * n + c as usize] = sym as u8;
            }
        }
        LatinSquare::from_cells(n, cells).expect("disjoint transversals form a Latin square")
    });
    MateSearch {
        transversals: ts.len(),
        mate,
    }
}

/// An orthogonal mate of `sq`, or `None` when none exists.
pub fn find_orthogonal_mate(sq: &LatinSquare) -> Result<Option<LatinSquare>, LatinError> {
    if sq.order() > 8 {
        return Err(LatinError::OrderOutOfRange(sq.order()));
    }
    Ok(mate_search(sq).mate)
}
