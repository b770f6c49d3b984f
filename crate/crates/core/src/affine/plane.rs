use super::{AffineConstellation, AffineError, Line};
use crate::field::FieldTable;

/// The Galois-field affine plane of order `q` in canonical form.
///
/// Point `(x, y)` of `GF(q)²` sits at grid row `y`, column `x`. Classes are
/// the lines `y = m·x + b` for each slope `m` (slope 0 gives the rows),
/// followed by the verticals `x = c` (the columns).
pub fn make_plane(q: u32) -> Result<AffineConstellation, AffineError> {
    let field = FieldTable::of_order(q)?;
    let d = q as usize;
    let point = |x: u32, y: u32| y as usize * d + x as usize;

    let mut classes = Vec::with_capacity(d + 1);
    for m in field.elements() {
        let lines = field
            .elements()
            .map(|b| Line::from_points(d, field.elements().map(|x| point(x, field.add(field.mul(m, x), b)))))
            .collect::<Result<Vec<_>, _>>()?;
        classes.push(lines);
    }
    let verticals = field
        .elements()
        .map(|c| Line::from_points(d, field.elements().map(|y| point(c, y))))
        .collect::<Result<Vec<_>, _>>()?;
    classes.push(verticals);

    AffineConstellation::new(d, classes)
}
