//! Arithmetic in GF(p^k).
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients of the polynomial residue, constant term least significant.
//! Multiplication goes through discrete log / antilog tables built from a
//! primitive element, so a table costs `O(q)` memory rather than `O(q^2)`.

use thiserror::Error;

/// Largest field order a table may be built for.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} is out of range")]
    DegreeOutOfRange(u32),
    #[error("field order {0} exceeds {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{element} is not an element of GF({order})")]
    BadElement { element: u32, order: u32 },
}

/// Operation selector for [`FieldTable::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
    Pow,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u32;
    while (i as u64) * (i as u64) <= n as u64 {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Prime-power factors of `n` in increasing order, e.g. `12 -> [3, 4]`.
pub fn prime_power_factors(n: u32) -> Vec<u32> {
    let mut factors = Vec::new();
    let mut rest = n;
    let mut d = 2;
    while rest > 1 {
        if rest.is_multiple_of(d) {
            let mut f = 1;
            while rest.is_multiple_of(d) {
                rest /= d;
                f *= d;
            }
            factors.push(f);
        }
        d += 1;
    }
    factors.sort_unstable();
    factors
}

/// Immutable arithmetic tables for one finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    // exp[i] = g^i for i in 0..q-1, g the primitive element found at build time
    exp: Vec<u32>,
    // log[a] for a != 0; log[0] unused
    log: Vec<u32>,
}

impl FieldTable {
    /// Builds GF(p^k) using the lexicographically smallest monic irreducible
    /// modulus (coefficients compared constant term first).
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 || k > 16 {
            return Err(FieldError::DegreeOutOfRange(k));
        }
        let q = (p as u64).pow(k);
        if q > MAX_ORDER as u64 {
            return Err(FieldError::OrderTooLarge(q));
        }
        let q = q as u32;
        let modulus = smallest_irreducible(p, k);

        let mut field = FieldTable {
            p,
            k,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_log_tables();
        Ok(field)
    }

    /// Builds the field of order `q`.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, k)
    }

    fn build_log_tables(&mut self) {
        let q = self.q as usize;
        if q == 2 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        for g in 2..self.q {
            let mut exp = Vec::with_capacity(q - 1);
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..q - 1 {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.mul_poly(x, g);
            }
            if primitive && x == 1 {
                let mut log = vec![0u32; q];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic");
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, constant term first; length `k + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q
    }

    pub fn check(&self, a: u32) -> Result<u32, FieldError> {
        if a < self.q {
            Ok(a)
        } else {
            Err(FieldError::BadElement {
                element: a,
                order: self.q,
            })
        }
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0; self.k as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn encode_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let d: Vec<u32> = self.digits(a).into_iter().map(|c| (self.p - c) % self.p).collect();
        self.encode_digits(&d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let e = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        self.check(a)?;
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let n = self.q - 1;
        Ok(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * (e % n)) % n;
        self.exp[l as usize]
    }

    /// Absolute trace to the prime subfield: `a + a^p + ... + a^(p^(k-1))`.
    /// The result is a prime-field element, i.e. an integer in `0..p`.
    pub fn trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.k {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// Checked single-operation entry point; `b` is ignored for `Neg`/`Inv`
    /// and is the exponent for `Pow`.
    pub fn arith(&self, op: FieldOp, a: u32, b: u64) -> Result<u32, FieldError> {
        self.check(a)?;
        match op {
            FieldOp::Add | FieldOp::Mul => {
                let b = u32::try_from(b)
                    .ok()
                    .filter(|&b| b < self.q)
                    .ok_or(FieldError::BadElement {
                        element: b.min(u32::MAX as u64) as u32,
                        order: self.q,
                    })?;
                Ok(if op == FieldOp::Add {
                    self.add(a, b)
                } else {
                    self.mul(a, b)
                })
            }
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow => Ok(self.pow(a, b)),
        }
    }

    /// Schoolbook product reduced by the modulus; used only to build tables.
    fn mul_poly(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let k = self.k as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        poly_rem_monic(&mut prod, &self.modulus, p);
        prod.truncate(k);
        prod.resize(k, 0);
        self.encode_digits(&prod)
    }
}

/// Reduces `a` modulo the monic polynomial `m` in place (coefficients
/// constant term first, arithmetic mod `p`).
fn poly_rem_monic(a: &mut [u32], m: &[u32], p: u32) {
    let dm = m.len() - 1;
    if a.len() <= dm {
        return;
    }
    for top in (dm..a.len()).rev() {
        let c = a[top];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            a[idx] = (a[idx] + (p - c) * mi) % p;
        }
    }
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    // trial division by every monic polynomial of degree 1..=k/2
    for deg in 1..=k / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            let mut rem = m.to_vec();
            poly_rem_monic(&mut rem, &divisor, p);
            if rem[..deg].iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    if k == 1 {
        return vec![0, 1];
    }
    // Counting with the highest non-leading coefficient varying fastest walks
    // coefficient tuples (c0, c1, ..., c_{k-1}) in lexicographic order.
    let mut coeffs = vec![0u32; k];
    loop {
        let mut m = coeffs.clone();
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
        let mut i = k;
        loop {
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
        }
    }
}
