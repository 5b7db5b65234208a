//! Majorana mode labels, the Jordan-Wigner map onto Pauli strings, and
//! braid generators in their spin representation.
//!
//! Qubits are numbered globally in chain-major order: chain `m` with `N`
//! sites occupies 1-based qubits `(m-1)N+1 ..= mN`. Internally the Pauli
//! strings are 0-based.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, Phase};

/// Geometry of `chains` Kitaev chains of `chain_length` sites each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChainLayout {
    pub chain_length: usize,
    pub chains: usize,
}

impl ChainLayout {
    pub fn new(chain_length: usize, chains: usize) -> Result<Self> {
        if chain_length == 0 || chains == 0 {
            return Err(Error::InvalidChain(format!(
                "layout needs at least one site and one chain, got N={chain_length}, M={chains}"
            )));
        }
        Ok(Self {
            chain_length,
            chains,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.chain_length * self.chains
    }

    /// 0-based qubit indices of chain `m` (1-based).
    pub fn chain_qubits(&self, m: usize) -> std::ops::Range<usize> {
        (m - 1) * self.chain_length..m * self.chain_length
    }

    /// All edge modes, two per chain, ordered `(1,l), (1,r), (2,l), ...`.
    pub fn edge_modes(&self) -> Vec<MajoranaLabel> {
        (1..=self.chains)
            .flat_map(|m| [MajoranaLabel::left_edge(m), self.right_edge(m)])
            .collect()
    }

    pub fn right_edge(&self, chain: usize) -> MajoranaLabel {
        MajoranaLabel::new(chain, self.chain_length, Side::Right)
    }

    pub fn validate(&self, label: &MajoranaLabel) -> Result<()> {
        let ok = (1..=self.chains).contains(&label.chain)
            && (1..=self.chain_length).contains(&label.site);
        if ok {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange {
                label: label.to_string(),
                chains: self.chains,
                chain_length: self.chain_length,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Majorana mode `gamma_{site, side}` on chain `chain`; all indices 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaLabel {
    pub chain: usize,
    pub site: usize,
    pub side: Side,
}

impl MajoranaLabel {
    pub const fn new(chain: usize, site: usize, side: Side) -> Self {
        Self { chain, site, side }
    }

    /// The left zero mode of a chain, `gamma_{1,l}`.
    pub const fn left_edge(chain: usize) -> Self {
        Self::new(chain, 1, Side::Left)
    }

    /// Short `(m,l)` / `(m,r)` form when the label is an edge mode of `layout`.
    pub fn edge_name(&self, layout: &ChainLayout) -> String {
        match self.side {
            Side::Left if self.site == 1 => format!("({},l)", self.chain),
            Side::Right if self.site == layout.chain_length => format!("({},r)", self.chain),
            _ => self.to_string(),
        }
    }
}

impl fmt::Display for MajoranaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => 'l',
            Side::Right => 'r',
        };
        write!(f, "({},{},{})", self.chain, self.site, side)
    }
}

/// Spin image of a Majorana mode: a Z string followed by X (left) or Y (right).
pub fn jordan_wigner(label: &MajoranaLabel, layout: &ChainLayout) -> Result<PauliString> {
    layout.validate(label)?;
    let j = (label.chain - 1) * layout.chain_length + (label.site - 1);
    let mut factors = vec![Pauli::I; layout.n_qubits()];
    factors[..j].fill(Pauli::Z);
    factors[j] = match label.side {
        Side::Left => Pauli::X,
        Side::Right => Pauli::Y,
    };
    Ok(PauliString::new(Phase::ONE, factors))
}

/// Exchange of two Majorana modes, `(1 + gamma_a gamma_b)/sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BraidGenerator {
    pub a: MajoranaLabel,
    pub b: MajoranaLabel,
}

impl BraidGenerator {
    pub fn new(a: MajoranaLabel, b: MajoranaLabel) -> Result<Self> {
        if a == b {
            return Err(Error::IdenticalLabels(a.to_string()));
        }
        Ok(Self { a, b })
    }

    pub fn name(&self, layout: &ChainLayout) -> String {
        format!("{}{}", self.a.edge_name(layout), self.b.edge_name(layout))
    }
}

/// `(1 + sign * pauli)/sqrt(2)` with `pauli` carrying phase `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinBraid {
    pub sign: Phase,
    pub pauli: PauliString,
}

impl SpinBraid {
    /// `sign * pauli`, which squares to `-1`.
    pub fn product(&self) -> PauliString {
        self.pauli.clone().with_phase(self.sign)
    }

    /// Hermitian `H` with `sign * pauli = i H`, so the braid is `exp(i pi/4 H)`.
    pub fn generator(&self) -> PauliString {
        self.product().scaled(Phase::MINUS_I)
    }

    /// Renders as `(1 + i*X2X3)/sqrt2`, with 1-based qubits.
    pub fn describe(&self) -> String {
        let (op, coeff) = match self.sign {
            Phase::I => ("+", "i*"),
            Phase::MINUS_I => ("-", "i*"),
            Phase::ONE => ("+", ""),
            _ => ("-", ""),
        };
        format!("(1 {op} {coeff}{})/sqrt2", self.pauli.operator_label())
    }
}

/// Spin representation of a braid, derived from the Jordan-Wigner images.
pub fn braid_spin_rep(g: &BraidGenerator, layout: &ChainLayout) -> Result<SpinBraid> {
    if g.a == g.b {
        return Err(Error::IdenticalLabels(g.a.to_string()));
    }
    let product = jordan_wigner(&g.a, layout)?.multiply(&jordan_wigner(&g.b, layout)?)?;
    let sign = product.phase();
    debug_assert!(!sign.is_real(), "distinct majoranas anticommute");
    Ok(SpinBraid {
        sign,
        pauli: product.with_phase(Phase::ONE),
    })
}

/// Heisenberg action of a braid on a mode: `B g_a B^dag = -g_b`, `B g_b B^dag = g_a`,
/// every other mode is left alone.
pub fn conjugate_majorana(g: &BraidGenerator, target: &MajoranaLabel) -> (i8, MajoranaLabel) {
    if *target == g.a {
        (-1, g.b)
    } else if *target == g.b {
        (1, g.a)
    } else {
        (1, *target)
    }
}

/// A nonempty sequence of braids, applied first to last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidWord(Vec<BraidGenerator>);

impl BraidWord {
    pub fn new(braids: Vec<BraidGenerator>, layout: &ChainLayout) -> Result<Self> {
        if braids.is_empty() {
            return Err(Error::UnsupportedBraid("empty braid word".into()));
        }
        for g in &braids {
            layout.validate(&g.a)?;
            layout.validate(&g.b)?;
        }
        Ok(Self(braids))
    }

    pub fn braids(&self) -> &[BraidGenerator] {
        &self.0
    }
}
