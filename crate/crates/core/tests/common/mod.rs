//! Dense-matrix oracles built from explicit Kronecker products.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli(p: char) -> DMatrix<C> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let e = match p {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => panic!("bad pauli {p}"),
    };
    DMatrix::from_row_slice(2, 2, &e)
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

/// `"ZZXI"` with the first letter on the most significant qubit.
pub fn string(s: &str) -> DMatrix<C> {
    s.chars().fold(DMatrix::identity(1, 1), |acc, p| kron(&acc, &pauli(p)))
}

pub fn eye(dim: usize) -> DMatrix<C> {
    DMatrix::identity(dim, dim)
}

/// Edge Majorana of chain `m` (1-based), `side` 'l' or 'r', for `chains`
/// chains of `n` sites: a Z string followed by X (left) or Y (right).
pub fn gamma(m: usize, side: char, n: usize, chains: usize) -> DMatrix<C> {
    let total = n * chains;
    let pos = if side == 'l' { (m - 1) * n + 1 } else { m * n };
    let op = if side == 'l' { 'X' } else { 'Y' };
    let s: String = (1..=total)
        .map(|k| if k < pos { 'Z' } else if k == pos { op } else { 'I' })
        .collect();
    string(&s)
}

/// `(1 + g_a g_b) / sqrt2`.
pub fn braid(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    let d = a.nrows();
    (eye(d) + a * b).map(|z| z * FRAC_1_SQRT_2)
}

/// `(|++> + s |-->) / sqrt2` as a four-amplitude vector.
pub fn logical(one: bool) -> DVector<C> {
    let h = 0.5;
    let plus = DVector::from_vec(vec![c(h, 0.0); 4]);
    let minus = DVector::from_vec(vec![c(h, 0.0), c(-h, 0.0), c(-h, 0.0), c(h, 0.0)]);
    let s = if one { -1.0 } else { 1.0 };
    (plus + minus.map(|z| z * s)).map(|z| z * FRAC_1_SQRT_2)
}

pub fn kron_v(a: &DVector<C>, b: &DVector<C>) -> DVector<C> {
    let m = a.kronecker(b);
    DVector::from_column_slice(m.as_slice())
}

/// `|ab_L>` for two chains of two sites, in the order 00, 01, 10, 11.
pub fn logical_pair_basis() -> Vec<DVector<C>> {
    let mut out = Vec::new();
    for a in [false, true] {
        for b in [false, true] {
            out.push(kron_v(&logical(a), &logical(b)));
        }
    }
    out
}

pub fn restrict(u: &DMatrix<C>, basis: &[DVector<C>]) -> DMatrix<C> {
    let n = basis.len();
    DMatrix::from_fn(n, n, |i, j| (basis[i].adjoint() * u * &basis[j])[(0, 0)])
}

/// `min_phi | a - e^{i phi} b |`.
pub fn phase_distance(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let ph = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    (a - b.map(|z| z * ph)).norm()
}

/// `(I + i s P) / sqrt2`.
pub fn sqrt_pauli(p: &str, sign: f64) -> DMatrix<C> {
    let m = string(p);
    (eye(m.nrows()) + m.map(|z| z * c(0.0, sign))).map(|z| z * FRAC_1_SQRT_2)
}
