//! Known MU bases: Fourier, the order-6 Fourier family and spectral matrix,
//! the Heisenberg–Weyl triple and the Galois-field complete sets.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Basis, MuConstellation, MubError, C64, CONSTRUCTION_TOL};
use crate::field::FieldTable;

fn flat_moduli(b: &Basis, tol: f64) -> bool {
    let target = 1.0 / (b.dim() as f64).sqrt();
    b.columns().flatten().all(|z| (z.norm() - target).abs() < tol)
}

fn validated(b: Basis, what: &str) -> Result<Basis, MubError> {
    let r = b.orthonormality_residual();
    if r >= CONSTRUCTION_TOL {
        return Err(MubError::ConstructionInvalid(format!(
            "{what}: unitarity residual {r:e}"
        )));
    }
    if !flat_moduli(&b, CONSTRUCTION_TOL) {
        return Err(MubError::ConstructionInvalid(format!(
            "{what}: entries not of modulus 1/sqrt(d)"
        )));
    }
    Ok(b)
}

/// Column `k` has entries `exp(2πi·jk/d)/√d`.
pub fn fourier_basis(d: usize) -> Basis {
    assert!(d >= 1);
    let s = 1.0 / (d as f64).sqrt();
    let data = (0..d)
        .flat_map(|k| (0..d).map(move |j| C64::from_polar(s, 2.0 * PI * ((j * k) % d) as f64 / d as f64)))
        .collect();
    Basis::from_column_major(d, data)
}

/// Phase pattern of the affine Fourier family: rows 1, 3, 5 pick up `a` in
/// columns 1, 4 and `b` in columns 2, 5.
fn family_phase(row: usize, col: usize, a: f64, b: f64) -> f64 {
    if row.is_multiple_of(2) {
        return 0.0;
    }
    match col % 3 {
        1 => a,
        2 => b,
        _ => 0.0,
    }
}

/// The two-parameter affine family `F₆(a, b) = F₆ ∘ exp(2πi·R(a, b))`, in
/// dephased form. Parameters are in full turns, fundamental domain `[0, 1)²`.
pub fn fourier_family6(a: f64, b: f64) -> Basis {
    const D: usize = 6;
    let s = 1.0 / (D as f64).sqrt();
    let data = (0..D)
        .flat_map(|k| {
            (0..D).map(move |j| {
                let turns = ((j * k) % D) as f64 / D as f64 + family_phase(j, k, a, b);
                C64::from_polar(s, 2.0 * PI * turns)
            })
        })
        .collect();
    Basis::from_column_major(D, data).dephased()
}

/// Exponents of `ω = e^{2πi/3}` in the order-6 spectral matrix.
const TAO_EXPONENTS: [[u8; 6]; 6] = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 2, 2],
    [0, 1, 0, 2, 2, 1],
    [0, 1, 2, 0, 1, 2],
    [0, 2, 2, 1, 0, 1],
    [0, 2, 1, 2, 1, 0],
];

/// The order-6 spectral matrix with entries in `{1, ω, ω²}/√6`.
pub fn tao_basis() -> Result<Basis, MubError> {
    let s = 1.0 / 6f64.sqrt();
    let data = (0..6)
        .flat_map(|k| (0..6).map(move |j| C64::from_polar(s, 2.0 * PI * TAO_EXPONENTS[j][k] as f64 / 3.0)))
        .collect();
    validated(Basis::from_column_major(6, data), "spectral matrix")
}

/// Eigenvectors of a unitary `u` with non-degenerate spectrum, ordered by
/// eigenphase in `[0, 2π)`, each with its first largest-modulus entry real
/// and positive.
fn unitary_eigenbasis(u: &DMatrix<C64>) -> Result<Basis, MubError> {
    let d = u.nrows();
    // (U + U†)/2 + c (U - U†)/(2i) is Hermitian, shares U's eigenvectors and maps
    // e^{iθ} to cos θ + c sin θ, which separates the eigenphases of U for c = 1/π.
    let c = 1.0 / PI;
    let ut = u.adjoint();
    let h = (u + &ut).map(|z| z * 0.5) + (u - &ut).map(|z| z * C64::new(0.0, -0.5 * c));
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors;

    let mut pairs: Vec<(f64, Vec<C64>)> = Vec::with_capacity(d);
    for k in 0..d {
        let col: Vec<C64> = v.column(k).iter().copied().collect();
        let x = DMatrix::from_column_slice(d, 1, &col);
        let lambda = (x.adjoint() * u * &x)[(0, 0)];
        let residual = (u * &x - &x * lambda).norm();
        if residual > 1e-9 {
            return Err(MubError::DegenerateSpectrum(1e-8));
        }
        let mut angle = lambda.arg().rem_euclid(2.0 * PI);
        if angle > 2.0 * PI - 1e-9 {
            angle = 0.0;
        }
        pairs.push((angle, col));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pairs.windows(2) {
        let gap = C64::from_polar(1.0, w[0].0) - C64::from_polar(1.0, w[1].0);
        if gap.norm() < 1e-8 {
            return Err(MubError::DegenerateSpectrum(1e-8));
        }
    }
    let data = pairs
        .into_iter()
        .flat_map(|(_, mut col)| {
            let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = col.iter().position(|z| z.norm() > max - 1e-12).unwrap();
            let ph = col[pivot] / col[pivot].norm();
            col.iter_mut().for_each(|z| *z /= ph);
            col
        })
        .collect();
    Ok(Basis::from_column_major(d, data))
}

/// Eigenbases of the clock `Z`, the shift `X` and the product `XZ`.
pub fn hw_triple(d: usize) -> Result<MuConstellation, MubError> {
    if d < 2 {
        return Err(MubError::DimensionTooSmall(d));
    }
    let omega = |j: usize| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64);
    // X|j⟩ = |j+1⟩, Z|j⟩ = ω^j |j⟩, so XZ|j⟩ = ω^j |j+1⟩
    let mut xz = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for j in 0..d {
        xz[((j + 1) % d, j)] = omega(j);
    }
    let third = unitary_eigenbasis(&xz)?;
    MuConstellation::new(d, vec![Basis::standard(d), fourier_basis(d), third])
}

fn pauli_triple() -> Result<MuConstellation, MubError> {
    let s = 1.0 / 2f64.sqrt();
    let c = |re: f64, im: f64| C64::new(re * s, im * s);
    let x = Basis::new(2, vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]])?;
    let y = Basis::new(2, vec![vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(0.0, -1.0)]])?;
    MuConstellation::new(2, vec![Basis::standard(2), x, y])
}

/// Complete set of `q + 1` MU bases: the standard basis plus, for each
/// `a ∈ GF(q)`, the basis whose column `b` has amplitudes
/// `exp(2πi·Tr(a·x² + b·x)/p)/√q`. `q = 2` gives the Pauli eigenbases.
pub fn wf_complete_set(q: u32) -> Result<MuConstellation, MubError> {
    if q == 2 {
        return pauli_triple();
    }
    let f = FieldTable::of_order(q).map_err(|_| MubError::UnsupportedOrder(q))?;
    let p = f.characteristic();
    if p == 2 {
        return Err(MubError::UnsupportedOrder(q));
    }
    let d = q as usize;
    let s = 1.0 / (d as f64).sqrt();
    let mut bases = vec![Basis::standard(d)];
    for a in f.elements() {
        let data = f
            .elements()
            .flat_map(|b| {
                let f = &f;
                f.elements().map(move |x| {
                    let arg = f.add(f.mul(a, f.mul(x, x)), f.mul(b, x));
                    C64::from_polar(s, 2.0 * PI * f.trace(arg) as f64 / p as f64)
                })
            })
            .collect();
        bases.push(Basis::from_column_major(d, data));
    }
    MuConstellation::new(d, bases)
}
