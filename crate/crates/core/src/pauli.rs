//! Signed Pauli strings with exact phase tracking.
//!
//! Phases live in the cyclic group `{+1, +i, -1, -i}` and are stored as an
//! exponent of `i`, so every product is computed without floating point.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An element of `{+1, +i, -1, -i}`, stored as the power of `i` (mod 4).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub const fn from_exponent(k: u8) -> Phase {
        Phase(k & 3)
    }

    pub const fn exponent(self) -> u8 {
        self.0
    }

    pub const fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    pub const fn conj(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    pub const fn neg(self) -> Phase {
        Phase((self.0 + 2) & 3)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    fn symbol(self) -> &'static str {
        match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * rhs` as `(phase, factor)`.
    pub fn product(self, rhs: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, X) => (Phase::MINUS_I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, Y) => (Phase::MINUS_I, X),
            (Z, X) => (Phase::I, Y),
            (X, Z) => (Phase::MINUS_I, Y),
        }
    }

    pub fn commutes_with(self, rhs: Pauli) -> bool {
        self == Pauli::I || rhs == Pauli::I || self == rhs
    }

    /// 2x2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A phase times a tensor product of single-qubit Paulis.
///
/// `factors[0]` acts on qubit 1, the most significant position of a state
/// vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, factors: Vec<Pauli>) -> Self {
        Self { phase, factors }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(Phase::ONE, vec![Pauli::I; n_qubits])
    }

    /// A single factor `p` on 0-based qubit `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.factors[qubit] = p;
        s
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.factors.iter().filter(|p| **p != Pauli::I).count()
    }

    /// 0-based indices of non-identity factors.
    pub fn support(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.weight() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn scaled(mut self, by: Phase) -> Self {
        self.phase = self.phase * by;
        self
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.phase.conj(), self.factors.clone())
    }

    /// Exact product `self * rhs`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.len() != rhs.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: rhs.len(),
            });
        }
        let mut phase = self.phase * rhs.phase;
        let factors = self
            .factors
            .iter()
            .zip(&rhs.factors)
            .map(|(a, b)| {
                let (ph, p) = a.product(*b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok(PauliString { phase, factors })
    }

    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        let anti = self
            .factors
            .iter()
            .zip(&rhs.factors)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        anti % 2 == 0
    }

    /// Compact subscripted form such as `X2X3` (1-based qubits), `I` for the identity.
    pub fn operator_label(&self) -> String {
        let s: String = self
            .factors
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, p)| format!("{}{}", p.letter(), q + 1))
            .collect();
        if s.is_empty() {
            "I".to_string()
        } else {
            s
        }
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Panics on a length mismatch; use [`PauliString::multiply`] to handle it.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs).expect("pauli string length mismatch")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.", self.phase)?;
        for p in &self.factors {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `"+1.XYZ"`, `"-i.ZZ"` or a bare `"XIZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid pauli string '{s}'"));
        let (phase, body) = match s.split_once('.') {
            Some((ph, body)) => {
                let phase = match ph {
                    "+1" | "1" | "+" => Phase::ONE,
                    "-1" | "-" => Phase::MINUS_ONE,
                    "+i" | "i" => Phase::I,
                    "-i" => Phase::MINUS_I,
                    _ => return Err(bad()),
                };
                (phase, body)
            }
            None => (Phase::ONE, s),
        };
        let factors = body
            .chars()
            .map(Pauli::from_letter)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        Ok(PauliString::new(phase, factors))
    }
}
