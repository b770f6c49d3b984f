//! Points, lines and parallel classes on a `d × d` grid.
//!
//! Point `(row, col)` has index `row * d + col`. A constellation stores at most
//! `d - 1` lines per class; a class holding exactly `d - 1` pairwise disjoint
//! lines is a full foliation whose last line is implied (the complement).

mod plane;
mod table1;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::field::FieldError;
use crate::signature::{Signature, SignatureError};

pub use plane::make_plane;
pub use table1::{table1_constellation, table1_digits, TABLE1_CELLS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("malformed line of order {order} {points:?}: {reason}")]
    MalformedLine {
        order: usize,
        points: Vec<usize>,
        reason: &'static str,
    },
    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("order {0} is too small; affine constellations need order >= 2")]
    OrderTooSmall(usize),
    #[error("class {class} holds {lines} lines; at most {max} allowed")]
    ClassTooLarge { class: usize, lines: usize, max: usize },
    #[error("class {0} has d lines that do not partition the points")]
    NotAFoliation(usize),
    #[error("{found} classes exceed the maximum of {max}")]
    TooManyClasses { found: usize, max: usize },
    #[error("a constellation needs at least one line")]
    EmptyConstellation,
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("lines {first} and {second} share a point")]
    NotDisjoint { first: usize, second: usize },
    #[error("expected {expected} items, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("need {needed} full foliations, found {found}")]
    NotEnoughFoliations { found: usize, needed: usize },
    #[error("input foliations violate the one-point intersection condition")]
    ConditionBViolated,
    #[error("constructed lines do not form a foliation")]
    CompletionInconsistent,
    #[error("bad line index {index} for class {class}")]
    BadIndex { class: usize, index: usize },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

impl From<FieldError> for AffineError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::NotPrimePower(q) => AffineError::NotPrimePower(q),
            FieldError::NotPrime(p) => AffineError::NotPrimePower(p),
            _ => AffineError::NotPrimePower(0),
        }
    }
}

/// `d` distinct points in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    order: usize,
    points: Vec<usize>,
}

impl Line {
    /// Validates a line given as a strictly increasing point list.
    pub fn new(order: usize, points: Vec<usize>) -> Result<Self, AffineError> {
        let bad = |reason| AffineError::MalformedLine {
            order,
            points: points.clone(),
            reason,
        };
        if order < 2 {
            return Err(AffineError::OrderTooSmall(order));
        }
        if points.len() != order {
            return Err(bad("wrong number of points"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("points not strictly increasing"));
        }
        if points.last().is_some_and(|&p| p >= order * order) {
            return Err(bad("point index out of range"));
        }
        Ok(Line { order, points })
    }

    /// Like [`Line::new`] but sorts the points first.
    pub fn from_points(order: usize, points: impl IntoIterator<Item = usize>) -> Result<Self, AffineError> {
        let mut points: Vec<usize> = points.into_iter().collect();
        points.sort_unstable();
        Line::new(order, points)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn intersection_size(&self, other: &Line) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.points, &other.points);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.points)
    }
}

/// One to `d` lines of a common order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClass {
    order: usize,
    lines: Vec<Line>,
}

impl ParallelClass {
    pub fn new(order: usize, lines: Vec<Line>) -> Result<Self, AffineError> {
        if lines.is_empty() {
            return Err(AffineError::WrongCount { expected: 1, found: 0 });
        }
        if lines.len() > order {
            return Err(AffineError::ClassTooLarge {
                class: 0,
                lines: lines.len(),
                max: order,
            });
        }
        if let Some(l) = lines.iter().find(|l| l.order != order) {
            return Err(AffineError::OrderMismatch {
                expected: order,
                found: l.order,
            });
        }
        Ok(ParallelClass { order, lines })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn into_lines(self) -> Vec<Line> {
        self.lines
    }

    /// `d` lines covering all `d²` points.
    pub fn is_foliation(&self) -> bool {
        self.lines.len() == self.order && partitions(self.order, &self.lines)
    }

    /// Lines as a set, for order-independent comparison.
    pub fn line_set(&self) -> BTreeSet<Line> {
        self.lines.iter().cloned().collect()
    }
}

fn partitions(order: usize, lines: &[Line]) -> bool {
    let mut seen = vec![false; order * order];
    for p in lines.iter().flat_map(|l| l.points.iter()) {
        if std::mem::replace(&mut seen[*p], true) {
            return false;
        }
    }
    seen.iter().all(|&s| s)
}

/// Union complement of pairwise disjoint lines, if it has exactly `d` points.
fn complement(order: usize, lines: &[Line]) -> Option<Line> {
    let mut covered = vec![false; order * order];
    for p in lines.iter().flat_map(|l| l.points.iter()) {
        covered[*p] = true;
    }
    let rest: Vec<usize> = (0..order * order).filter(|&p| !covered[p]).collect();
    Line::new(order, rest).ok()
}

/// Sets of lines on `d²` points, stored in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineConstellation {
    order: usize,
    classes: Vec<ParallelClass>,
}

impl AffineConstellation {
    /// Builds a constellation from per-class line lists. Empty classes are
    /// dropped; a class given with all `d` lines must partition the points
    /// and is canonicalised by dropping its lexicographically largest line.
    pub fn new(order: usize, classes: Vec<Vec<Line>>) -> Result<Self, AffineError> {
        if order < 2 {
            return Err(AffineError::OrderTooSmall(order));
        }
        let mut stored = Vec::new();
        for (ci, mut lines) in classes.into_iter().enumerate() {
            if lines.is_empty() {
                continue;
            }
            if lines.len() > order {
                return Err(AffineError::ClassTooLarge {
                    class: ci,
                    lines: lines.len(),
                    max: order,
                });
            }
            if let Some(l) = lines.iter().find(|l| l.order != order) {
                return Err(AffineError::OrderMismatch {
                    expected: order,
                    found: l.order,
                });
            }
            if lines.len() == order {
                if !partitions(order, &lines) {
                    return Err(AffineError::NotAFoliation(ci));
                }
                let largest = (0..lines.len()).max_by(|&a, &b| lines[a].cmp(&lines[b])).unwrap();
                lines.remove(largest);
            }
            stored.push(ParallelClass { order, lines });
        }
        if stored.is_empty() {
            return Err(AffineError::EmptyConstellation);
        }
        if stored.len() > order + 1 {
            return Err(AffineError::TooManyClasses {
                found: stored.len(),
                max: order + 1,
            });
        }
        Ok(AffineConstellation { order, classes: stored })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn classes(&self) -> &[ParallelClass] {
        &self.classes
    }

    pub fn stored_line_count(&self) -> usize {
        self.classes.iter().map(|c| c.lines.len()).sum()
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.order, self.classes.iter().map(|c| c.lines.len()))
            .expect("canonical classes hold 1..=d-1 lines")
    }

    /// Per-class line lists with the implied line of every full class added.
    /// A `d - 1` line class whose lines overlap is returned unchanged.
    pub fn materialized(&self) -> Vec<Vec<Line>> {
        self.classes
            .iter()
            .map(|c| {
                let mut lines = c.lines.clone();
                if lines.len() == self.order - 1 {
                    if let Some(last) = complement(self.order, &lines) {
                        lines.push(last);
                    }
                }
                lines
            })
            .collect()
    }

    /// Number of classes that materialize to a full foliation.
    pub fn foliation_count(&self) -> usize {
        self.materialized()
            .iter()
            .filter(|lines| lines.len() == self.order && partitions(self.order, lines))
            .count()
    }

    /// Appends a class, canonicalising it.
    pub fn with_class(&self, class: ParallelClass) -> Result<Self, AffineError> {
        let mut classes: Vec<Vec<Line>> = self.classes.iter().map(|c| c.lines.clone()).collect();
        classes.push(class.lines);
        AffineConstellation::new(self.order, classes)
    }
}

/// One failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Two stored lines meet in the wrong number of points.
    Intersection {
        class_a: usize,
        line_a: usize,
        class_b: usize,
        line_b: usize,
        observed: usize,
        expected: usize,
    },
    /// Postulate (i): a point pair lies on `lines` lines instead of one.
    PointPair { p: usize, q: usize, lines: usize },
    /// Postulate (ii): through `point` there are `count` parallels to the line.
    Parallel {
        class: usize,
        line: usize,
        point: usize,
        count: usize,
    },
    /// Postulate (iii): no four points with no three collinear.
    NoQuadrangle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Intersection {
                class_a,
                line_a,
                class_b,
                line_b,
                observed,
                expected,
            } => write!(
                f,
                "class {class_a} line {line_a} and class {class_b} line {line_b} share {observed} points (expected {expected})"
            ),
            Violation::PointPair { p, q, lines } => {
                write!(f, "points {p} and {q} lie on {lines} lines (expected 1)")
            }
            Violation::Parallel {
                class,
                line,
                point,
                count,
            } => write!(
                f,
                "{count} lines through point {point} miss class {class} line {line} (expected 1)"
            ),
            Violation::NoQuadrangle => write!(f, "no four points with no three collinear"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks conditions (a) and (b) over the stored lines: lines in one class are
/// disjoint, lines in different classes meet in exactly one point.
pub fn verify_constellation(c: &AffineConstellation) -> VerificationReport {
    check_intersections(&c.classes.iter().map(|c| c.lines.clone()).collect::<Vec<_>>())
}

fn check_intersections(classes: &[Vec<Line>]) -> VerificationReport {
    let mut violations = Vec::new();
    let flat: Vec<(usize, usize, &Line)> = classes
        .iter()
        .enumerate()
        .flat_map(|(ci, ls)| ls.iter().enumerate().map(move |(li, l)| (ci, li, l)))
        .collect();
    for (i, &(ca, la, a)) in flat.iter().enumerate() {
        for &(cb, lb, b) in &flat[i + 1..] {
            let expected = usize::from(ca != cb);
            let observed = a.intersection_size(b);
            if observed != expected {
                violations.push(Violation::Intersection {
                    class_a: ca,
                    line_a: la,
                    class_b: cb,
                    line_b: lb,
                    observed,
                    expected,
                });
            }
        }
    }
    VerificationReport { violations }
}

/// Checks the three affine-plane postulates over the materialized line set.
pub fn verify_plane_axioms(c: &AffineConstellation) -> VerificationReport {
    let d = c.order;
    let n = d * d;
    let classes = c.materialized();
    let lines: Vec<(usize, usize, &Line)> = classes
        .iter()
        .enumerate()
        .flat_map(|(ci, ls)| ls.iter().enumerate().map(move |(li, l)| (ci, li, l)))
        .collect();
    let mut violations = Vec::new();

    // (i) every pair of points on exactly one line
    let mut pair_count = vec![0usize; n * n];
    for (_, _, l) in &lines {
        for (i, &p) in l.points.iter().enumerate() {
            for &q in &l.points[i + 1..] {
                pair_count[p * n + q] += 1;
            }
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            let k = pair_count[p * n + q];
            if k != 1 {
                violations.push(Violation::PointPair { p, q, lines: k });
            }
        }
    }

    // (ii) unique parallel through each outside point
    for &(ci, li, l) in &lines {
        for point in (0..n).filter(|&p| !l.contains(p)) {
            let count = lines
                .iter()
                .filter(|(_, _, m)| m.contains(point) && m.intersection_size(l) == 0)
                .count();
            if count != 1 {
                violations.push(Violation::Parallel {
                    class: ci,
                    line: li,
                    point,
                    count,
                });
            }
        }
    }

    // (iii) a quadrangle exists
    if !has_quadrangle(n, &lines.iter().map(|t| t.2).collect::<Vec<_>>()) {
        violations.push(Violation::NoQuadrangle);
    }

    VerificationReport { violations }
}

fn has_quadrangle(n: usize, lines: &[&Line]) -> bool {
    let words = lines.len().div_ceil(64).max(1);
    let mut incidence = vec![0u64; n * words];
    for (li, l) in lines.iter().enumerate() {
        for &p in &l.points {
            incidence[p * words + li / 64] |= 1 << (li % 64);
        }
    }
    let on = |p: usize| &incidence[p * words..(p + 1) * words];
    let collinear = |a: usize, b: usize, c: usize| on(a).iter().zip(on(b)).zip(on(c)).any(|((x, y), z)| x & y & z != 0);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if collinear(a, b, c) {
                    continue;
                }
                for e in c + 1..n {
                    if !collinear(a, b, e) && !collinear(a, c, e) && !collinear(b, c, e) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Returns the unique line parallel to `d - 1` pairwise disjoint lines.
pub fn complete_parallel_class(order: usize, lines: &[Line]) -> Result<Line, AffineError> {
    if order < 2 {
        return Err(AffineError::OrderTooSmall(order));
    }
    if lines.len() != order - 1 {
        return Err(AffineError::WrongCount {
            expected: order - 1,
            found: lines.len(),
        });
    }
    if let Some(l) = lines.iter().find(|l| l.order != order) {
        return Err(AffineError::OrderMismatch {
            expected: order,
            found: l.order,
        });
    }
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if lines[i].intersection_size(&lines[j]) != 0 {
                return Err(AffineError::NotDisjoint { first: i, second: j });
            }
        }
    }
    Ok(complement(order, lines).expect("d-1 disjoint lines leave exactly d points"))
}

/// Completes `d` mutually compatible foliations with the unique `(d+1)`-st.
///
/// For each point `P` the `d` input lines through `P` cover `d(d-1) + 1`
/// points; `P` together with the `d - 1` uncovered points is the line `L_P`.
pub fn complete_foliation_set(c: &AffineConstellation) -> Result<ParallelClass, AffineError> {
    let d = c.order;
    let classes = c.materialized();
    let full = classes.iter().filter(|ls| ls.len() == d && partitions(d, ls)).count();
    if full < d {
        return Err(AffineError::NotEnoughFoliations { found: full, needed: d });
    }
    if full != classes.len() || classes.len() != d {
        return Err(AffineError::WrongCount {
            expected: d,
            found: classes.len(),
        });
    }
    if !check_intersections(&classes).valid() {
        return Err(AffineError::ConditionBViolated);
    }

    let n = d * d;
    // through[p] = for each class, the line containing p
    let mut through = vec![Vec::with_capacity(d); n];
    for ls in &classes {
        for l in ls {
            for &p in &l.points {
                through[p].push(l);
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut new_lines = Vec::with_capacity(d);
    for p in 0..n {
        if assigned[p] {
            continue;
        }
        let mut covered = vec![false; n];
        for l in &through[p] {
            for &x in &l.points {
                covered[x] = true;
            }
        }
        let pts: Vec<usize> = (0..n).filter(|&x| x == p || !covered[x]).collect();
        let line = Line::new(d, pts).map_err(|_| AffineError::CompletionInconsistent)?;
        for &x in &line.points {
            if std::mem::replace(&mut assigned[x], true) {
                return Err(AffineError::CompletionInconsistent);
            }
        }
        new_lines.push(line);
    }
    if new_lines.len() != d {
        return Err(AffineError::CompletionInconsistent);
    }
    new_lines.sort();
    ParallelClass::new(d, new_lines)
}

/// Keeps `keep[c]` (stored line indices) of every class `c`; classes left
/// empty are dropped.
pub fn sub_constellation(c: &AffineConstellation, keep: &[Vec<usize>]) -> Result<AffineConstellation, AffineError> {
    if keep.len() != c.classes.len() {
        return Err(AffineError::BadIndex {
            class: keep.len().min(c.classes.len()),
            index: 0,
        });
    }
    let mut classes = Vec::with_capacity(keep.len());
    for (ci, (class, idx)) in c.classes.iter().zip(keep).enumerate() {
        let mut seen = BTreeSet::new();
        let mut lines = Vec::with_capacity(idx.len());
        for &i in idx {
            if i >= class.lines.len() || !seen.insert(i) {
                return Err(AffineError::BadIndex { class: ci, index: i });
            }
            lines.push(class.lines[i].clone());
        }
        classes.push(lines);
    }
    if classes.iter().all(|ls| ls.is_empty()) {
        return Err(AffineError::BadIndex { class: 0, index: 0 });
    }
    AffineConstellation::new(c.order, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(order: usize, pts: &[usize]) -> Line {
        Line::new(order, pts.to_vec()).unwrap()
    }

    #[test]
    fn line_validation() {
        assert!(Line::new(3, vec![0, 1, 2]).is_ok());
        assert!(matches!(
            Line::new(3, vec![0, 2, 1]),
            Err(AffineError::MalformedLine { .. })
        ));
        assert!(matches!(
            Line::new(3, vec![0, 1]),
            Err(AffineError::MalformedLine { .. })
        ));
        assert!(matches!(
            Line::new(3, vec![0, 1, 9]),
            Err(AffineError::MalformedLine { .. })
        ));
        assert!(matches!(
            Line::new(3, vec![1, 1, 2]),
            Err(AffineError::MalformedLine { .. })
        ));
    }

    #[test]
    fn complete_horizontal_lines() {
        let got = complete_parallel_class(3, &[line(3, &[0, 1, 2]), line(3, &[3, 4, 5])]).unwrap();
        assert_eq!(got.points(), &[6, 7, 8]);
    }

    #[test]
    fn complete_rejects_overlap_and_count() {
        assert_eq!(
            complete_parallel_class(3, &[line(3, &[0, 1, 2]), line(3, &[2, 4, 6])]),
            Err(AffineError::NotDisjoint { first: 0, second: 1 })
        );
        assert_eq!(
            complete_parallel_class(3, &[line(3, &[0, 1, 2])]),
            Err(AffineError::WrongCount { expected: 2, found: 1 })
        );
    }

    #[test]
    fn order_two_diagonals() {
        let rows = vec![line(2, &[0, 1]), line(2, &[2, 3])];
        let cols = vec![line(2, &[0, 2]), line(2, &[1, 3])];
        let c = AffineConstellation::new(2, vec![rows, cols]).unwrap();
        let diag = complete_foliation_set(&c).unwrap();
        let want: BTreeSet<Line> = [line(2, &[0, 3]), line(2, &[1, 2])].into_iter().collect();
        assert_eq!(diag.line_set(), want);
    }

    #[test]
    fn canonical_form_drops_largest_line() {
        let rows = vec![line(2, &[2, 3]), line(2, &[0, 1])];
        let c = AffineConstellation::new(2, vec![rows, vec![]]).unwrap();
        assert_eq!(c.classes().len(), 1);
        assert_eq!(c.classes()[0].lines(), &[line(2, &[0, 1])]);
        assert_eq!(c.materialized()[0].len(), 2);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(
            AffineConstellation::new(2, vec![vec![], vec![]]),
            Err(AffineError::EmptyConstellation)
        );
        let overlapping = vec![line(2, &[0, 1]), line(2, &[0, 2])];
        assert_eq!(
            AffineConstellation::new(2, vec![overlapping]),
            Err(AffineError::NotAFoliation(0))
        );
        let four = (0..4).map(|_| vec![line(2, &[0, 1])]).collect();
        assert!(matches!(
            AffineConstellation::new(2, four),
            Err(AffineError::TooManyClasses { found: 4, max: 3 })
        ));
    }

    #[test]
    fn intersection_violations_are_itemized() {
        let c = AffineConstellation::new(
            3,
            vec![
                vec![line(3, &[0, 1, 2]), line(3, &[2, 4, 6])],
                vec![line(3, &[0, 3, 6])],
            ],
        )
        .unwrap();
        let r = verify_constellation(&c);
        assert_eq!(
            r.violations,
            vec![Violation::Intersection {
                class_a: 0,
                line_a: 0,
                class_b: 0,
                line_b: 1,
                observed: 1,
                expected: 0
            }]
        );
    }

    #[test]
    fn sub_constellation_errors() {
        let c = make_plane(3).unwrap();
        assert!(matches!(
            sub_constellation(&c, &[vec![], vec![], vec![], vec![]]),
            Err(AffineError::BadIndex { .. })
        ));
        assert!(matches!(
            sub_constellation(&c, &[vec![5], vec![], vec![], vec![]]),
            Err(AffineError::BadIndex { class: 0, index: 5 })
        ));
        assert!(matches!(
            sub_constellation(&c, &[vec![0, 0], vec![], vec![], vec![]]),
            Err(AffineError::BadIndex { class: 0, index: 0 })
        ));
        let all: Vec<Vec<usize>> = c.classes().iter().map(|k| (0..k.lines().len()).collect()).collect();
        assert_eq!(sub_constellation(&c, &all).unwrap(), c);
    }
}
