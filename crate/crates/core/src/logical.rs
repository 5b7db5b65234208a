//! Action of braids on the logical space of two chains.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kitaev::{logical_states, pauli_matrix};
use crate::majorana::{braid_spin_rep, BraidGenerator, BraidWord, ChainLayout};
use crate::pauli::{Pauli, Phase, PauliString};
use crate::state::{StateVector, C64};

/// Dense spin-representation unitary of a braid word, the first braid acting first.
pub fn spin_unitary(word: &BraidWord, layout: &ChainLayout) -> Result<DMatrix<C64>> {
    let dim = 1usize << layout.n_qubits();
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for g in word.braids() {
        let p = pauli_matrix(&braid_spin_rep(g, layout)?.product());
        let b = (DMatrix::<C64>::identity(dim, dim) + p).map(|z| z * FRAC_1_SQRT_2);
        u = b * u;
    }
    Ok(u)
}

/// Restriction of a braid word to `{|00_L>, |01_L>, |10_L>, |11_L>}`.
#[derive(Clone, Debug)]
pub struct LogicalAction {
    /// Column `2a + b` is the image of `|ab_L>`, chain 1 carrying `a`.
    pub matrix: DMatrix<C64>,
    /// Frobenius norm of the component that leaves the logical space.
    pub leakage: f64,
}

fn logical_product_basis(chain_length: usize) -> Result<Vec<StateVector>> {
    let b = logical_states(chain_length)?;
    let single = [&b.zero, &b.one];
    let mut out = Vec::with_capacity(4);
    for a in single {
        for c in single {
            out.push(a.tensor(c));
        }
    }
    Ok(out)
}

pub fn logical_action(word: &BraidWord, chain_length: usize) -> Result<LogicalAction> {
    let layout = ChainLayout::new(chain_length, 2)?;
    for g in word.braids() {
        layout.validate(&g.a)?;
        layout.validate(&g.b)?;
    }
    let u = spin_unitary(word, &layout)?;
    let basis = logical_product_basis(chain_length)?;
    let mut m = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    let mut leakage = 0.0;
    for (j, v) in basis.iter().enumerate() {
        let image = &u * nalgebra::DVector::from_column_slice(v.amplitudes());
        let image = StateVector::from_amplitudes(image.as_slice().to_vec())?;
        let mut rest = image.clone();
        for (i, w) in basis.iter().enumerate() {
            let c = w.inner(&image);
            m[(i, j)] = c;
            rest.add_scaled(w, -c);
        }
        leakage += rest.norm_sqr();
    }
    Ok(LogicalAction {
        matrix: m,
        leakage: leakage.sqrt(),
    })
}

/// A logical gate `exp(i sign pi/4 P)` on two logical qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalGate {
    pub pauli: PauliString,
    pub sign: i8,
}

impl LogicalGate {
    pub fn matrix(&self) -> DMatrix<C64> {
        let p = pauli_matrix(&self.pauli);
        let i = C64::new(0.0, f64::from(self.sign));
        (DMatrix::<C64>::identity(4, 4) + p.map(|z| z * i)).map(|z| z * FRAC_1_SQRT_2)
    }

    /// `sqrtZ1` or `sqrt(X1X2)`. Both signs of the exponent share the name.
    pub fn name(&self) -> String {
        let label = self.pauli.operator_label();
        if self.pauli.weight() == 1 {
            format!("sqrt{label}")
        } else {
            format!("sqrt({label})")
        }
    }

    /// `exp(+i pi/4 X1X2)`.
    pub fn exponential(&self) -> String {
        let s = if self.sign < 0 { '-' } else { '+' };
        format!("exp({s}i pi/4 {})", self.pauli.operator_label())
    }
}

/// Smallest `|| a - e^{i phi} b ||` over the global phase.
pub fn phase_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (a - b.map(|z| z * phase)).norm()
}

/// Names a logical matrix as `exp(+-i pi/4 P)` up to global phase, if it is one.
pub fn identify_gate(m: &DMatrix<C64>, tol: f64) -> Option<LogicalGate> {
    for p in Pauli::ALL {
        for q in Pauli::ALL {
            if p == Pauli::I && q == Pauli::I {
                continue;
            }
            for sign in [1i8, -1] {
                let gate = LogicalGate {
                    pauli: PauliString::new(Phase::ONE, vec![p, q]),
                    sign,
                };
                if phase_distance(m, &gate.matrix()) < tol {
                    return Some(gate);
                }
            }
        }
    }
    None
}

/// One row of the table of elementary braids between the four edge modes of two chains.
#[derive(Clone, Debug)]
pub struct BraidRow {
    pub braid: BraidGenerator,
    pub name: String,
    pub spin: String,
    pub action: LogicalAction,
    pub gate: Option<LogicalGate>,
}

pub fn six_braids(chain_length: usize) -> Result<Vec<BraidRow>> {
    let layout = ChainLayout::new(chain_length, 2)?;
    let modes = layout.edge_modes();
    let mut rows = Vec::new();
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            let braid = BraidGenerator::new(*a, *b)?;
            let action = logical_action(&BraidWord::new(vec![braid], &layout)?, chain_length)?;
            let gate = identify_gate(&action.matrix, 1e-9);
            rows.push(BraidRow {
                braid,
                name: braid.name(&layout),
                spin: braid_spin_rep(&braid, &layout)?.describe(),
                action,
                gate,
            });
        }
    }
    if rows.len() != 6 {
        return Err(Error::UnsupportedBraid(format!("expected 6 edge braids, got {}", rows.len())));
    }
    Ok(rows)
}
