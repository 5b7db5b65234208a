//! Dense state vectors and density matrices.
//!
//! Qubits are 0-based in the API. Qubit 0 is the most significant bit of an
//! amplitude index, so `|q0 q1 ... q(n-1)>` has index `q0 * 2^(n-1) + ...`.
//! Rotations follow `R^a(theta) = exp(+i sigma^a theta / 2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// A native gate.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    Rotation { axis: Axis, angle: f64, qubit: usize },
    Cz { control: usize, target: usize },
    Hadamard { qubit: usize },
    /// Arbitrary single-qubit unitary, row-major.
    Unitary { qubit: usize, matrix: [[C64; 2]; 2] },
    Pauli(PauliString),
    GlobalPhase(f64),
}

impl GateOp {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        GateOp::Rotation { axis: Axis::X, angle, qubit }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        GateOp::Rotation { axis: Axis::Y, angle, qubit }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        GateOp::Rotation { axis: Axis::Z, angle, qubit }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        GateOp::Cz { control, target }
    }

    pub fn h(qubit: usize) -> Self {
        GateOp::Hadamard { qubit }
    }

    /// Qubits touched by the gate. Pauli strings report their support.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Rotation { qubit, .. } | GateOp::Hadamard { qubit } | GateOp::Unitary { qubit, .. } => {
                vec![*qubit]
            }
            GateOp::Cz { control, target } => vec![*control, *target],
            GateOp::Pauli(p) => p.support(),
            GateOp::GlobalPhase(_) => Vec::new(),
        }
    }

    /// Checks indices against `n_qubits` and that angles are finite.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match self {
            GateOp::Rotation { angle, .. } | GateOp::GlobalPhase(angle) if !angle.is_finite() => {
                return Err(Error::InvalidAngle(*angle))
            }
            GateOp::Unitary { matrix, .. } if matrix.iter().flatten().any(|z| !z.is_finite()) => {
                return Err(Error::InvalidAngle(f64::NAN))
            }
            GateOp::Pauli(p) if p.len() != n_qubits => {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    actual: p.len(),
                })
            }
            GateOp::Cz { control, target } if control == target => {
                return Err(Error::QubitOutOfRange {
                    index: *target,
                    n_qubits,
                })
            }
            _ => {}
        }
        match self.qubits().into_iter().find(|q| *q >= n_qubits) {
            Some(index) => Err(Error::QubitOutOfRange { index, n_qubits }),
            None => Ok(()),
        }
    }
}

/// 2x2 matrix of `exp(i sigma^axis angle / 2)`.
pub fn rotation_matrix(axis: Axis, angle: f64) -> [[C64; 2]; 2] {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    match axis {
        Axis::X => [[C64::new(c, 0.0), C64::new(0.0, s)], [C64::new(0.0, s), C64::new(c, 0.0)]],
        Axis::Y => [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(-s, 0.0), C64::new(c, 0.0)]],
        Axis::Z => [[C64::new(c, s), ZERO], [ZERO, C64::new(c, -s)]],
    }
}

fn hadamard_matrix() -> [[C64; 2]; 2] {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(1),
                actual: len,
            });
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Tensor product `self ⊗ rhs`; `self` occupies the leading qubits.
    pub fn tensor(&self, rhs: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| rhs.amps.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n_qubits: self.n_qubits + rhs.n_qubits,
            amps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, rhs: &StateVector) -> C64 {
        self.amps.iter().zip(&rhs.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&mut self, by: C64) {
        self.amps.iter_mut().for_each(|a| *a *= by);
    }

    pub fn add_scaled(&mut self, rhs: &StateVector, by: C64) {
        self.amps.iter_mut().zip(&rhs.amps).for_each(|(a, b)| *a += by * b);
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn apply_single(&mut self, q: usize, m: &[[C64; 2]; 2]) {
        let mask = self.bit(q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            GateOp::Rotation { axis, angle, qubit } => {
                self.apply_single(*qubit, &rotation_matrix(*axis, *angle))
            }
            GateOp::Hadamard { qubit } => self.apply_single(*qubit, &hadamard_matrix()),
            GateOp::Unitary { qubit, matrix } => self.apply_single(*qubit, matrix),
            GateOp::Cz { control, target } => {
                let mask = self.bit(*control) | self.bit(*target);
                self.amps
                    .iter_mut()
                    .enumerate()
                    .filter(|(i, _)| i & mask == mask)
                    .for_each(|(_, a)| *a = -*a);
            }
            GateOp::Pauli(p) => self.apply_pauli(p),
            GateOp::GlobalPhase(theta) => self.scale(C64::from_polar(1.0, *theta)),
        }
        Ok(())
    }

    /// Functional form of [`StateVector::apply`].
    pub fn applied(mut self, gate: &GateOp) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    fn apply_pauli(&mut self, p: &PauliString) {
        let n = self.n_qubits;
        let mut flip = 0usize;
        let mut zmask = 0usize;
        let mut ys = 0u32;
        for (q, f) in p.factors().iter().enumerate() {
            let b = 1 << (n - 1 - q);
            match f {
                Pauli::I => {}
                Pauli::X => flip |= b,
                Pauli::Z => zmask |= b,
                Pauli::Y => {
                    flip |= b;
                    zmask |= b;
                    ys += 1;
                }
            }
        }
        // Y = i X Z, so the string is i^ys * X-part * Z-part.
        let lead = p.phase().to_complex() * C64::new(0.0, 1.0).powu(ys);
        let old = self.amps.clone();
        for (i, a) in old.iter().enumerate() {
            let sign = if (i & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            self.amps[i ^ flip] = lead * sign * a;
        }
    }

    /// Projects `qubit` onto `outcome` without renormalizing.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.bit(qubit);
        let want = if outcome == 0 { 0 } else { mask };
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| i & mask != want)
            .for_each(|(_, a)| *a = ZERO);
        Ok(())
    }

    pub fn projected(mut self, qubit: usize, outcome: u8) -> Result<Self> {
        self.project(qubit, outcome)?;
        Ok(self)
    }

    /// `<psi|P|psi>` for a hermitian string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::NonHermitian(p.to_string()));
        }
        if p.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: p.len(),
            });
        }
        let mut image = self.clone();
        image.apply_pauli(p);
        Ok(self.inner(&image).re)
    }

    /// Reduced density matrix on `keep` (0-based, any order; result ordered ascending).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_keep(keep, self.n_qubits)?;
        let n = self.n_qubits;
        let k = keep.len();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dim = 1 << k;
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        for t in 0..(1usize << traced.len()) {
            let base = scatter(t, &traced, n);
            let column: Vec<C64> = (0..dim).map(|a| self.amps[base | scatter(a, &keep, n)]).collect();
            for a in 0..dim {
                if column[a] == ZERO {
                    continue;
                }
                for b in 0..dim {
                    rho[(a, b)] += column[a] * column[b].conj();
                }
            }
        }
        Ok(DensityMatrix { n_qubits: k, m: rho })
    }
}

fn normalize_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&q) = keep.iter().find(|q| **q >= n) {
        return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
    }
    Ok(keep)
}

/// Spreads the bits of `value` (MSB first) onto the positions of `qubits`.
fn scatter(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .filter(|(i, _)| value >> (k - 1 - i) & 1 == 1)
        .fold(0, |acc, (_, q)| acc | 1 << (n - 1 - q))
}

/// Dense density matrix over `n_qubits`, same bit ordering as [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            m: DMatrix::from_element(dim, dim, ZERO),
        }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self {
            n_qubits: psi.n_qubits(),
            m: &v * v.adjoint(),
        }
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 || !dim.is_power_of_two() || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                actual: m.ncols(),
            });
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            m,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn add_assign(&mut self, rhs: &DensityMatrix) {
        self.m += &rhs.m;
    }

    pub fn scaled(&self, by: f64) -> DensityMatrix {
        Self {
            n_qubits: self.n_qubits,
            m: self.m.map(|z| z * by),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.m - self.m.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Smallest eigenvalue of the hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.m + self.m.adjoint()).map(|z| z * 0.5);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `<psi|rho|psi>`.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: psi.n_qubits(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }

    /// Trace over every qubit not in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        let keep = normalize_keep(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dim = 1 << keep.len();
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        for t in 0..(1usize << traced.len()) {
            let base = scatter(t, &traced, n);
            for a in 0..dim {
                let ia = base | scatter(a, &keep, n);
                for b in 0..dim {
                    out[(a, b)] += self.m[(ia, base | scatter(b, &keep, n))];
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            m: out,
        })
    }

    pub fn to_record(&self) -> DensityRecord {
        let dim = self.m.nrows();
        DensityRecord {
            n_qubits: self.n_qubits,
            entries: (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| ComplexEntry {
                            re: self.m[(r, c)].re,
                            im: self.m[(r, c)].im,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &DensityRecord) -> Result<Self> {
        let dim = rec.entries.len();
        if rec.entries.iter().any(|row| row.len() != dim) || dim != 1 << rec.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << rec.n_qubits,
                actual: dim,
            });
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            let e = &rec.entries[r][c];
            C64::new(e.re, e.im)
        });
        Self::from_matrix(m)
    }
}

/// Serialized form of a density matrix: explicit real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub n_qubits: usize,
    pub entries: Vec<Vec<ComplexEntry>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    fn plus() -> StateVector {
        StateVector::zero(1).applied(&GateOp::h(0)).unwrap()
    }

    #[test]
    fn rx_pi_carries_plus_i_phase() {
        let s = StateVector::zero(1).applied(&GateOp::rx(0, PI)).unwrap();
        assert!(close(s.amplitudes()[0], ZERO));
        assert!(close(s.amplitudes()[1], C64::new(0.0, 1.0)));
    }

    #[test]
    fn cz_flips_only_11() {
        let s = StateVector::basis(2, 3).applied(&GateOp::cz(0, 1)).unwrap();
        assert!(close(s.amplitudes()[3], -ONE));
        let s = StateVector::basis(2, 2).applied(&GateOp::cz(0, 1)).unwrap();
        assert!(close(s.amplitudes()[2], ONE));
    }

    #[test]
    fn hadamard_gives_plus() {
        let s = plus();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(s.amplitudes()[0], h) && close(s.amplitudes()[1], h));
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = StateVector::zero(3).applied(&GateOp::Pauli("XII".parse().unwrap())).unwrap();
        assert!(close(s.amplitudes()[4], ONE));
    }

    #[test]
    fn out_of_range_gates_fail() {
        let mut s = StateVector::zero(2);
        assert!(matches!(s.apply(&GateOp::h(2)), Err(Error::QubitOutOfRange { index: 2, .. })));
        assert!(s.apply(&GateOp::cz(0, 5)).is_err());
        assert!(s.apply(&GateOp::rx(0, f64::NAN)).is_err());
        assert!(s.project(3, 0).is_err());
    }

    #[test]
    fn projections() {
        assert!((plus().projected(0, 0).unwrap().norm_sqr() - 0.5).abs() < 1e-12);
        assert_eq!(StateVector::zero(1).projected(0, 1).unwrap().norm_sqr(), 0.0);
        let psi = StateVector::from_amplitudes(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let p = psi.projected(0, 0).unwrap();
        assert!(close(p.amplitudes()[0], C64::new(0.6, 0.0)));
        assert!(close(p.amplitudes()[1], ZERO));
    }

    #[test]
    fn pauli_expectations() {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        assert!((plus().expectation(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!(StateVector::zero(1).expectation(&x).unwrap().abs() < 1e-12);
        // exp(+i Z theta/2) rotates |+> towards |-i>, hence the negative angle
        let plus_i = plus().applied(&GateOp::rz(0, -PI / 2.0)).unwrap();
        assert!((plus_i.expectation(&y).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            plus().expectation(&"+i.X".parse().unwrap()),
            Err(Error::NonHermitian(_))
        ));
    }

    fn bell() -> StateVector {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        StateVector::from_amplitudes(vec![h, ZERO, ZERO, h]).unwrap()
    }

    #[test]
    fn partial_traces() {
        let rho = bell().reduced_density(&[0]).unwrap();
        assert!(close(rho.get(0, 0), C64::new(0.5, 0.0)));
        assert!(close(rho.get(1, 1), C64::new(0.5, 0.0)));
        assert!(close(rho.get(0, 1), ZERO));

        let full = DensityMatrix::from_pure(&bell());
        assert_eq!(full.partial_trace(&[1, 0]).unwrap(), full);

        let psi = StateVector::from_amplitudes(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let prod = psi.tensor(&StateVector::zero(1));
        let reduced = DensityMatrix::from_pure(&prod).partial_trace(&[0]).unwrap();
        let expect = DensityMatrix::from_pure(&psi);
        assert!((reduced.matrix() - expect.matrix()).norm() < 1e-12);
        assert!(matches!(full.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn density_record_roundtrip() {
        let rho = DensityMatrix::from_pure(&bell());
        let json = serde_json::to_string(&rho.to_record()).unwrap();
        let back: DensityRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(DensityMatrix::from_record(&back).unwrap(), rho);
    }

    fn kron_pauli(p: &PauliString) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for f in p.factors() {
            let a = f.matrix();
            let f = DMatrix::from_fn(2, 2, |r, c| a[r][c]);
            m = m.kronecker(&f);
        }
        m * p.phase().to_complex()
    }

    fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_map(|v| {
            let mut s = StateVector::from_amplitudes(v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
                .unwrap();
            let n = s.norm_sqr().sqrt().max(1e-9);
            s.scale(C64::new(1.0 / n, 0.0));
            s
        })
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (0u8..4, proptest::collection::vec(0usize..4, n)).prop_map(|(ph, f)| {
            PauliString::new(
                crate::pauli::Phase::from_exponent(ph),
                f.into_iter().map(|k| Pauli::ALL[k]).collect(),
            )
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = GateOp> {
        prop_oneof![
            (0..n, -7.0f64..7.0, 0usize..3).prop_map(|(q, a, ax)| GateOp::Rotation {
                axis: [Axis::X, Axis::Y, Axis::Z][ax],
                angle: a,
                qubit: q
            }),
            (0..n, 1..n).prop_map(move |(c, d)| GateOp::cz(c, (c + d) % n)),
            (0..n).prop_map(GateOp::h),
        ]
    }

    proptest! {
        #[test]
        fn pauli_apply_matches_kronecker_matrix(s in arb_state(4), p in arb_pauli(4)) {
            let out = s.clone().applied(&GateOp::Pauli(p.clone())).unwrap();
            let v = nalgebra::DVector::from_column_slice(s.amplitudes());
            let expect = kron_pauli(&p) * v;
            for (a, b) in out.amplitudes().iter().zip(expect.iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn unitaries_preserve_norm_and_projections_split_it(
            s in arb_state(3),
            gates in proptest::collection::vec(arb_gate(3), 0..12),
            q in 0usize..3,
        ) {
            let mut t = s.clone();
            t.apply_all(&gates).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
            let p0 = t.clone().projected(q, 0).unwrap().norm_sqr();
            let p1 = t.projected(q, 1).unwrap().norm_sqr();
            prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
        }

        #[test]
        fn partial_trace_is_linear_and_trace_preserving(
            a in arb_state(3), b in arb_state(3), w in 0.0f64..1.0, keep in proptest::sample::subsequence(vec![0usize, 1, 2], 1..=3)
        ) {
            let ra = DensityMatrix::from_pure(&a);
            let rb = DensityMatrix::from_pure(&b);
            let mut mix = ra.scaled(w);
            mix.add_assign(&rb.scaled(1.0 - w));
            let lhs = mix.partial_trace(&keep).unwrap();
            let mut rhs = ra.partial_trace(&keep).unwrap().scaled(w);
            rhs.add_assign(&rb.partial_trace(&keep).unwrap().scaled(1.0 - w));
            prop_assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-12);
            prop_assert!((lhs.trace() - mix.trace()).abs() < 1e-12);
            let direct = a.reduced_density(&keep).unwrap();
            prop_assert!((direct.matrix() - ra.partial_trace(&keep).unwrap().matrix()).norm() < 1e-12);
        }
    }
}
