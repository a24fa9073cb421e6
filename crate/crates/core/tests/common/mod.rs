#![allow(dead_code)]

use hexent_core::density::CMatrix;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense statevector of the graph state `Π CZ |+⟩^n`, qubit 0 most
/// significant.
pub fn graph_statevector(n: usize, edges: &[(usize, usize)]) -> DVector<Complex64> {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    DVector::from_fn(dim, |index, _| {
        let bit = |q: usize| (index >> (n - 1 - q)) & 1;
        let parity = edges.iter().filter(|&&(a, b)| bit(a) & bit(b) == 1).count();
        c(if parity % 2 == 0 { amp } else { -amp }, 0.0)
    })
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &DVector<Complex64>) -> CMatrix {
    psi * psi.adjoint()
}

/// Trace out every qubit not in `keep`; the result lists `keep` in order.
pub fn partial_trace(rho: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let k = keep.len();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose = |kept: usize, traced: usize| {
        let mut index = 0usize;
        for (i, &q) in keep.iter().enumerate() {
            index |= ((kept >> (k - 1 - i)) & 1) << (n - 1 - q);
        }
        for (i, &q) in rest.iter().enumerate() {
            index |= ((traced >> (rest.len() - 1 - i)) & 1) << (n - 1 - q);
        }
        index
    };
    CMatrix::from_fn(1 << k, 1 << k, |r, col| {
        (0..1usize << rest.len()).map(|t| rho[(compose(r, t), compose(col, t))]).sum()
    })
}

/// Apply a single-qubit operator to qubit `q` of an `n`-qubit matrix from
/// the left: `(U_q) m`.
pub fn apply_left(m: &CMatrix, n: usize, q: usize, u: &[[Complex64; 2]; 2]) -> CMatrix {
    let shift = n - 1 - q;
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, col| {
        let bit = (r >> shift) & 1;
        let r0 = r & !(1 << shift);
        u[bit][0] * m[(r0, col)] + u[bit][1] * m[(r0 | (1 << shift), col)]
    })
}

/// `U_q m U_q†`.
pub fn conjugate(m: &CMatrix, n: usize, q: usize, u: &[[Complex64; 2]; 2]) -> CMatrix {
    let left = apply_left(m, n, q, u);
    apply_left(&left.adjoint(), n, q, u).adjoint()
}

pub fn hadamard() -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn s_dagger() -> [[Complex64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]
}

pub fn pauli(index: usize) -> [[Complex64; 2]; 2] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match index {
        0 => [[l, o], [o, l]],
        1 => [[o, l], [l, o]],
        2 => [[o, -i], [i, o]],
        _ => [[l, o], [o, -l]],
    }
}

/// Haar-random single-qubit unitary from a normalized complex Gaussian
/// 2-vector.
pub fn random_unitary<R: Rng>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let mut g = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a, b) = (g(), g());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    [[a, -b.conj()], [b, a.conj()]]
}

pub fn random_state<R: Rng>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v.unscale(norm)
}

/// Random density matrix of the given rank.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    m.unscale(trace)
}

/// Random Hermitian matrix with unit trace.
pub fn random_hermitian_unit_trace<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut h = (&g + g.adjoint()).scale(0.5 / dim as f64);
    let shift = (h.trace().re - 1.0) / dim as f64;
    for i in 0..dim {
        h[(i, i)] -= c(shift, 0.0);
    }
    h
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.nrows(), b.ncols());
    CMatrix::from_fn(a.nrows() * br, a.ncols() * bc, |r, col| a[(r / br, col / bc)] * b[(r % br, col % bc)])
}

pub fn frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}
