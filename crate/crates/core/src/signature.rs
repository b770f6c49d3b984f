//! Constellation signatures and the dominance order between them.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("signature order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("set size {size} is outside 1..={max} for order {order}")]
    SizeOutOfRange { size: usize, max: usize, order: usize },
    #[error("{count} sets exceed the maximum of {max} for order {order}")]
    TooManySets { count: usize, max: usize, order: usize },
    #[error("cannot compare signatures of orders {0} and {1}")]
    OrderMismatch(usize, usize),
}

/// Which bracket style to render: `⟨…⟩` for affine, `{…}` for MU constellations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Angle,
    Brace,
}

/// Sorted multiset of set sizes, each in `1..=order-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    order: usize,
    sizes: Vec<usize>,
}

impl Signature {
    pub fn new(order: usize, sizes: impl IntoIterator<Item = usize>) -> Result<Self, SignatureError> {
        if order < 2 {
            return Err(SignatureError::OrderTooSmall(order));
        }
        let mut sizes: Vec<usize> = sizes.into_iter().collect();
        if let Some(&size) = sizes.iter().find(|&&s| s == 0 || s > order - 1) {
            return Err(SignatureError::SizeOutOfRange {
                size,
                max: order - 1,
                order,
            });
        }
        if sizes.len() > order + 1 {
            return Err(SignatureError::TooManySets {
                count: sizes.len(),
                max: order + 1,
                order,
            });
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Signature { order, sizes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Sizes in descending order.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// `self ⪰ other`: componentwise `>=` after zero-padding the shorter list.
    pub fn dominates(&self, other: &Signature) -> Result<bool, SignatureError> {
        if self.order != other.order {
            return Err(SignatureError::OrderMismatch(self.order, other.order));
        }
        let n = self.sizes.len().max(other.sizes.len());
        let at = |s: &[usize], i: usize| s.get(i).copied().unwrap_or(0);
        Ok((0..n).all(|i| at(&self.sizes, i) >= at(&other.sizes, i)))
    }

    /// Compact notation with exponents, e.g. `⟨5³,4⟩₆`.
    pub fn notation(&self, bracket: Bracket) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.sizes.len() {
            let s = self.sizes[i];
            let run = self.sizes[i..].iter().take_while(|&&x| x == s).count();
            if run > 1 {
                parts.push(format!("{s}{}", superscript(run)));
            } else {
                parts.push(s.to_string());
            }
            i += run;
        }
        wrap(bracket, &parts.join(","), self.order)
    }

    /// Fully expanded notation, e.g. `⟨5,5,5,4⟩₆`.
    pub fn expanded(&self, bracket: Bracket) -> String {
        let body: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        wrap(bracket, &body.join(","), self.order)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation(Bracket::Angle))
    }
}

fn wrap(bracket: Bracket, body: &str, order: usize) -> String {
    let (open, close) = match bracket {
        Bracket::Angle => ('⟨', '⟩'),
        Bracket::Brace => ('{', '}'),
    };
    format!("{open}{body}{close}{}", subscript(order))
}

fn map_digits(n: usize, table: [char; 10]) -> String {
    n.to_string()
        .chars()
        .map(|c| table[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn superscript(n: usize) -> String {
    map_digits(n, ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'])
}

fn subscript(n: usize) -> String {
    map_digits(n, ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'])
}
