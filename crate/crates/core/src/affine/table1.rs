//! The maximal order-6 affine constellation ⟨5³,4⟩₆.
//!
//! Each cell carries a first digit (the line of a third foliation through that
//! point) and an optional second digit (one of four further lines).

use super::{AffineConstellation, Line};

/// 1-based digits per grid cell, row-major; `0` marks an empty second digit.
pub const TABLE1_CELLS: [[(u8, u8); 6]; 6] = [
    [(5, 4), (2, 0), (3, 0), (6, 3), (1, 1), (4, 2)],
    [(1, 0), (5, 3), (6, 4), (4, 0), (2, 2), (3, 1)],
    [(2, 0), (6, 2), (5, 1), (3, 0), (4, 4), (1, 3)],
    [(6, 1), (1, 0), (4, 0), (5, 2), (3, 3), (2, 4)],
    [(3, 2), (4, 1), (2, 3), (1, 4), (5, 0), (6, 0)],
    [(4, 3), (3, 4), (1, 2), (2, 1), (6, 0), (5, 0)],
];

/// The two digit grids, 0-based: first digits in `0..6`, second digits in
/// `0..4` or `None`.
pub fn table1_digits() -> (Vec<Vec<u8>>, Vec<Vec<Option<u8>>>) {
    let first = TABLE1_CELLS
        .iter()
        .map(|row| row.iter().map(|&(a, _)| a - 1).collect())
        .collect();
    let second = TABLE1_CELLS
        .iter()
        .map(|row| row.iter().map(|&(_, b)| b.checked_sub(1)).collect())
        .collect();
    (first, second)
}

/// Rows, columns, the first-digit foliation and the four second-digit lines.
pub fn table1_constellation() -> AffineConstellation {
    const D: usize = 6;
    let cells = || (0..D).flat_map(|r| (0..D).map(move |c| (r, c)));
    let line = |pts: Vec<usize>| Line::new(D, pts).expect("embedded table lines are well formed");

    let rows = (0..D).map(|r| line((0..D).map(|c| r * D + c).collect())).collect();
    let cols = (0..D).map(|c| line((0..D).map(|r| r * D + c).collect())).collect();
    let by_digit = |pick: fn((u8, u8)) -> u8, symbols: u8| -> Vec<Line> {
        (1..=symbols)
            .map(|s| {
                line(
                    cells()
                        .filter(|&(r, c)| pick(TABLE1_CELLS[r][c]) == s)
                        .map(|(r, c)| r * D + c)
                        .collect(),
                )
            })
            .collect()
    };
    let first = by_digit(|cell| cell.0, 6);
    let second = by_digit(|cell| cell.1, 4);

    AffineConstellation::new(D, vec![rows, cols, first, second]).expect("embedded table is a valid constellation shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{complete_parallel_class, verify_constellation};

    #[test]
    fn stores_five_five_five_four() {
        let c = table1_constellation();
        assert_eq!(c.signature().sizes(), &[5, 5, 5, 4]);
        assert_eq!(c.stored_line_count(), 19);
        assert_eq!(c.foliation_count(), 3);
        assert!(verify_constellation(&c).valid());
    }

    fn digit_line(digit: u8) -> Vec<usize> {
        let (first, _) = table1_digits();
        (0..36).filter(|&p| first[p / 6][p % 6] == digit).collect()
    }

    #[test]
    fn completing_first_digits_one_to_five_gives_six() {
        let lines: Vec<Line> = (0..5).map(|s| Line::new(6, digit_line(s)).unwrap()).collect();
        let implied = complete_parallel_class(6, &lines).unwrap();
        assert_eq!(implied.points(), &digit_line(5)[..]);
    }

    #[test]
    fn canonical_third_class_implies_the_largest_line() {
        // the digit-4 line starts at point 5, later than any other
        let c = table1_constellation();
        let implied = complete_parallel_class(6, c.classes()[2].lines()).unwrap();
        assert_eq!(implied.points(), &digit_line(3)[..]);
    }
}
