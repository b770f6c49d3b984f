//! The total cross-set defect as a smooth function of real parameters.
//!
//! Each variable set is either the leading columns of `exp(iH)` for a
//! Hermitian `H` (`d²` parameters: the diagonal, then real and imaginary
//! parts of the upper triangle row by row) or a list of independent unit
//! vectors `z/|z|` (`2d` parameters per vector: real parts, then imaginary).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::mub::{inner, Basis, MuConstellation, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Block {
    Unitary { cols: usize },
    Normalized { cols: usize },
}

impl Block {
    fn params(self, d: usize) -> usize {
        match self {
            Block::Unitary { .. } => d * d,
            Block::Normalized { cols } => 2 * d * cols,
        }
    }
}

/// Defect of a family of variable vector sets against each other and
/// against a list of constant sets. Pairs of constant sets are not counted.
#[derive(Debug, Clone)]
pub struct CostFunction {
    dim: usize,
    fixed: Vec<Basis>,
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    n_params: usize,
}

/// Variable columns at one parameter point, with what the gradient needs.
struct Eval {
    cols: Vec<Vec<C64>>,
    spectra: Vec<Option<(DMatrix<C64>, Vec<f64>)>>,
    norms: Vec<Vec<f64>>,
}

impl CostFunction {
    pub(crate) fn new(dim: usize, fixed: Vec<Basis>, blocks: Vec<Block>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n_params = 0;
        for b in &blocks {
            offsets.push(n_params);
            n_params += b.params(dim);
        }
        CostFunction {
            dim,
            fixed,
            blocks,
            offsets,
            n_params,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_params(&self) -> usize {
        self.n_params
    }

    /// Standard normal parameters from the stream of `(seed, restart)`.
    pub fn initial_point(&self, seed: u64, restart: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        (0..self.n_params).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.cost_of(&self.evaluate(x))
    }

    /// Writes the gradient into `grad` and returns the cost.
    pub fn cost_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let e = self.evaluate(x);
        self.gradient_of(&e, grad);
        self.cost_of(&e)
    }

    /// The constant sets followed by the variable ones.
    pub fn configuration(&self, x: &[f64]) -> MuConstellation {
        let e = self.evaluate(x);
        let mut bases = self.fixed.clone();
        bases.extend(e.cols.into_iter().map(|c| Basis::from_column_major(self.dim, c)));
        MuConstellation::new(self.dim, bases).expect("set count validated on construction")
    }

    fn evaluate(&self, x: &[f64]) -> Eval {
        assert_eq!(x.len(), self.n_params, "parameter vector has the wrong length");
        let d = self.dim;
        let mut e = Eval {
            cols: Vec::with_capacity(self.blocks.len()),
            spectra: Vec::with_capacity(self.blocks.len()),
            norms: Vec::with_capacity(self.blocks.len()),
        };
        for (b, &off) in self.blocks.iter().zip(&self.offsets) {
            let p = &x[off..off + b.params(d)];
            match *b {
                Block::Unitary { cols } => {
                    let eig = SymmetricEigen::new(hermitian(d, p));
                    let v = eig.eigenvectors;
                    let lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();
                    let ph: Vec<C64> = lambda.iter().map(|&l| C64::from_polar(1.0, l)).collect();
                    let mut out = vec![C64::new(0.0, 0.0); d * cols];
                    for c in 0..cols {
                        for k in 0..d {
                            let s = ph[k] * v[(c, k)].conj();
                            for i in 0..d {
                                out[c * d + i] += v[(i, k)] * s;
                            }
                        }
                    }
                    e.cols.push(out);
                    e.spectra.push(Some((v, lambda)));
                    e.norms.push(Vec::new());
                }
                Block::Normalized { cols } => {
                    let mut out = Vec::with_capacity(d * cols);
                    let mut norms = Vec::with_capacity(cols);
                    for c in 0..cols {
                        let z = &p[2 * d * c..2 * d * (c + 1)];
                        let n = z.iter().map(|t| t * t).sum::<f64>().sqrt();
                        out.extend((0..d).map(|i| C64::new(z[i], z[d + i]) / n));
                        norms.push(n);
                    }
                    e.cols.push(out);
                    e.spectra.push(None);
                    e.norms.push(norms);
                }
            }
        }
        e
    }

    fn cost_of(&self, e: &Eval) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for (j, cj) in e.cols.iter().enumerate() {
            for f in &self.fixed {
                total += pair_cost(d, f.as_slice(), cj);
            }
            for ci in &e.cols[..j] {
                total += pair_cost(d, ci, cj);
            }
        }
        total
    }

    fn gradient_of(&self, e: &Eval, grad: &mut [f64]) {
        let d = self.dim;
        assert_eq!(grad.len(), self.n_params);
        let inv_d = 1.0 / d as f64;
        for (j, b) in self.blocks.iter().enumerate() {
            // ∂C/∂v̄ for every column v of this block
            let vs = &e.cols[j];
            let mut g = vec![C64::new(0.0, 0.0); vs.len()];
            let others = self.fixed.iter().map(Basis::as_slice).chain(
                e.cols
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, c)| c.as_slice()),
            );
            for ws in others {
                for (v, gv) in vs.chunks(d).zip(g.chunks_mut(d)) {
                    for w in ws.chunks(d) {
                        let ip = inner(w, v);
                        let coeff = 2.0 * (ip.norm_sqr() - inv_d) * ip;
                        for (gi, wi) in gv.iter_mut().zip(w) {
                            *gi += coeff * wi;
                        }
                    }
                }
            }
            let out = &mut grad[self.offsets[j]..self.offsets[j] + b.params(d)];
            match *b {
                Block::Unitary { cols } => {
                    let (v, lambda) = e.spectra[j].as_ref().expect("unitary blocks keep their spectrum");
                    unitary_gradient(d, cols, &g, v, lambda, out);
                }
                Block::Normalized { .. } => {
                    for (c, &n) in e.norms[j].iter().enumerate() {
                        let z: Vec<C64> = vs[c * d..(c + 1) * d].iter().map(|t| t * n).collect();
                        let gc = &g[c * d..(c + 1) * d];
                        let re_gz = inner(gc, &z).re;
                        let o = &mut out[2 * d * c..2 * d * (c + 1)];
                        for i in 0..d {
                            let r = gc[i] / n - z[i] * (re_gz / (n * n * n));
                            o[i] = 2.0 * r.re;
                            o[d + i] = 2.0 * r.im;
                        }
                    }
                }
            }
        }
    }
}

fn pair_cost(d: usize, a: &[C64], b: &[C64]) -> f64 {
    let inv_d = 1.0 / d as f64;
    let mut s = 0.0;
    for u in a.chunks(d) {
        for v in b.chunks(d) {
            s += (inner(u, v).norm_sqr() - inv_d).powi(2);
        }
    }
    s
}

fn hermitian(d: usize, p: &[f64]) -> DMatrix<C64> {
    let mut h = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for j in 0..d {
        h[(j, j)] = C64::new(p[j], 0.0);
    }
    let mut idx = d;
    for j in 0..d {
        for k in j + 1..d {
            let z = C64::new(p[idx], p[idx + 1]);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
            idx += 2;
        }
    }
    h
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Chain rule through `U = exp(iH)` with `H = V Λ V†`, using the divided
/// differences of `t ↦ e^{it}` on the spectrum.
fn unitary_gradient(d: usize, cols: usize, g: &[C64], v: &DMatrix<C64>, lambda: &[f64], out: &mut [f64]) {
    let mut gm = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for c in 0..cols {
        for i in 0..d {
            gm[(i, c)] = g[c * d + i];
        }
    }
    let mut w = v.adjoint() * gm * v;
    for j in 0..d {
        for k in 0..d {
            let f = C64::new(0.0, 1.0)
                * C64::from_polar(1.0, 0.5 * (lambda[j] + lambda[k]))
                * sinc(0.5 * (lambda[j] - lambda[k]));
            w[(j, k)] *= f.conj();
        }
    }
    let q = v * w * v.adjoint();
    for j in 0..d {
        out[j] = 2.0 * q[(j, j)].re;
    }
    let mut idx = d;
    for j in 0..d {
        for k in j + 1..d {
            out[idx] = 2.0 * (q[(j, k)].re + q[(k, j)].re);
            out[idx + 1] = 2.0 * (q[(j, k)].im - q[(k, j)].im);
            idx += 2;
        }
    }
}

/// Parameters of a Hermitian `H` with `exp(iH) = u`, for a unitary `u`.
#[cfg(test)]
pub(crate) fn log_params(u: &DMatrix<C64>) -> Vec<f64> {
    let d = u.nrows();
    let (q, t) = nalgebra::Schur::new(u.clone()).unpack();
    let diag = DMatrix::from_diagonal(&t.diagonal().map(|z| C64::new(z.arg(), 0.0)));
    let h = &q * diag * q.adjoint();
    let mut p: Vec<f64> = (0..d).map(|j| h[(j, j)].re).collect();
    for j in 0..d {
        for k in j + 1..d {
            p.push(h[(j, k)].re);
            p.push(h[(j, k)].im);
        }
    }
    p
}
