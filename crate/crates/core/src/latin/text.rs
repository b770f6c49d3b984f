//! Graeco-Latin text: one row per line, cells separated by a single space,
//! each cell a symbol character followed by a second symbol or `.`.
//! Symbols are written 1-based: `1`–`9`, then `A`–`Z`.

use super::{LatinError, LatinSquare, PartialSquare};

/// The maximal order-6 constellation's Graeco-Latin grid.
pub const TABLE1_TEXT: &str = "\
54 2. 3. 63 11 42
1. 53 64 4. 22 31
2. 62 51 3. 44 13
61 1. 4. 52 33 24
32 41 23 14 5. 6.
43 34 12 21 6. 5.
";

const SYMBOLS: &[u8] = b"123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn symbol_char(s: u8) -> char {
    SYMBOLS[s as usize] as char
}

fn symbol_value(ch: u8) -> Option<u8> {
    SYMBOLS.iter().position(|&c| c == ch).map(|p| p as u8)
}

fn parse_err(line: usize, message: impl Into<String>) -> LatinError {
    LatinError::Parse {
        line,
        message: message.into(),
    }
}

/// Splits text into rows of cells, checking the square shape.
fn cells(text: &str) -> Result<Vec<Vec<&[u8]>>, LatinError> {
    if !text.is_ascii() {
        return Err(parse_err(0, "non-ASCII input"));
    }
    let rows: Vec<&str> = text.trim_end_matches('\n').split('\n').collect();
    let n = rows.len();
    if n == 0 || n > SYMBOLS.len() || rows[0].is_empty() {
        return Err(parse_err(1, "empty grid"));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row: Vec<&[u8]> = row.split(' ').map(str::as_bytes).collect();
            if row.len() != n {
                return Err(parse_err(i + 1, format!("expected {n} cells, found {}", row.len())));
            }
            Ok(row)
        })
        .collect()
}

fn symbol(n: usize, line: usize, ch: u8) -> Result<u8, LatinError> {
    symbol_value(ch)
        .filter(|&s| (s as usize) < n)
        .ok_or_else(|| parse_err(line, format!("symbol {:?} out of range for order {n}", ch as char)))
}

/// Parses Graeco-Latin text into its first-symbol Latin square and its
/// second-symbol partial square.
pub fn parse_graeco_latin(text: &str) -> Result<(LatinSquare, PartialSquare), LatinError> {
    let grid = cells(text)?;
    let n = grid.len();
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for (i, row) in grid.iter().enumerate() {
        let mut f = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for cell in row {
            let &[a, b] = *cell else {
                return Err(parse_err(
                    i + 1,
                    format!("cell {:?} is not two characters", String::from_utf8_lossy(cell)),
                ));
            };
            f.push(symbol(n, i + 1, a)?);
            s.push(if b == b'.' { None } else { Some(symbol(n, i + 1, b)?) });
        }
        first.push(f);
        second.push(s);
    }
    Ok((LatinSquare::new(first)?, PartialSquare::new(second)?))
}

/// Parses a Latin square written with one-character cells or Graeco-Latin
/// cells (only the first character is read).
pub fn parse_latin_text(text: &str) -> Result<LatinSquare, LatinError> {
    let grid = cells(text)?;
    let n = grid.len();
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|cell| match **cell {
                    [a] | [a, _] => symbol(n, i + 1, a),
                    _ => Err(parse_err(i + 1, "cell must be one or two characters")),
                })
                .collect::<Result<Vec<u8>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    LatinSquare::new(rows)
}

pub fn render_graeco_latin(first: &LatinSquare, second: &PartialSquare) -> String {
    let n = first.order();
    assert_eq!(n, second.order(), "squares of different order");
    let mut out = String::with_capacity(n * n * 3);
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                out.push(' ');
            }
            out.push(symbol_char(first.get(r, c)));
            out.push(second.get(r, c).map_or('.', symbol_char));
        }
        out.push('\n');
    }
    out
}

/// One-character cells.
pub fn render_latin(sq: &LatinSquare) -> String {
    let n = sq.order();
    let mut out = String::with_capacity(n * n * 2);
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                out.push(' ');
            }
            out.push(symbol_char(sq.get(r, c)));
        }
        out.push('\n');
    }
    out
}
