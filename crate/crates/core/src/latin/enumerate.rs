use super::{LatinError, LatinSquare};

/// Reduced Latin squares of order `n` (first row and column `0..n`) in
/// lexicographic order of their row-major cells.
pub fn enumerate_reduced_latin(n: usize) -> Result<ReducedLatinSquares, LatinError> {
    if !(2..=7).contains(&n) {
        return Err(LatinError::OrderOutOfRange(n));
    }
    Ok(ReducedLatinSquares::new(n))
}

/// Streaming row-by-row backtracker behind [`enumerate_reduced_latin`].
#[derive(Debug, Clone)]
pub struct ReducedLatinSquares {
    n: usize,
    grid: Vec<u8>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    // free cells (r >= 1, c >= 1) in row-major order
    free: Vec<usize>,
    // value tried at each free cell, or NONE
    value: Vec<u8>,
    started: bool,
    done: bool,
}

const NONE: u8 = u8::MAX;

impl ReducedLatinSquares {
    fn new(n: usize) -> Self {
        let mut grid = vec![0u8; n * n];
        let mut row_used = vec![0u32; n];
        let mut col_used = vec![0u32; n];
        for i in 0..n {
            grid[i] = i as u8;
            grid[i * n] = i as u8;
            row_used[0] |= 1 << i;
            col_used[i] |= 1 << i;
            row_used[i] |= 1 << i;
            col_used[0] |= 1 << i;
        }
        let free: Vec<usize> = (1..n).flat_map(|r| (1..n).map(move |c| r * n + c)).collect();
        let value = vec![NONE; free.len()];
        ReducedLatinSquares {
            n,
            grid,
            row_used,
            col_used,
            free,
            value,
            started: false,
            done: false,
        }
    }
}

impl Iterator for ReducedLatinSquares {
    type Item = LatinSquare;

    fn next(&mut self) -> Option<LatinSquare> {
        if self.done {
            return None;
        }
        let n = self.n;
        let m = self.free.len();
        let mut i = if self.started { m - 1 } else { 0 };
        self.started = true;
        loop {
            let cell = self.free[i];
            let (r, c) = (cell / n, cell % n);
            let start = match self.value[i] {
                NONE => 0,
                v => {
                    self.row_used[r] &= !(1 << v);
                    self.col_used[c] &= !(1 << v);
                    v as usize + 1
                }
            };
            let taken = self.row_used[r] | self.col_used[c];
            match (start..n).find(|&v| taken >> v & 1 == 0) {
                Some(v) => {
                    self.value[i] = v as u8;
                    self.grid[cell] = v as u8;
                    self.row_used[r] |= 1 << v;
                    self.col_used[c] |= 1 << v;
                    if i + 1 == m {
                        return Some(LatinSquare {
                            n,
                            cells: self.grid.clone(),
                        });
                    }
                    i += 1;
                }
                None => {
                    self.value[i] = NONE;
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                }
            }
        }
    }
}
