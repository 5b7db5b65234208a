//! Compilation of braids, encoders and decoders into a CZ-native circuit, and
//! assembly of the eight-qubit teleportation program.
//!
//! Gates are stored in execution order. Operator products written as
//! `A B C` act right to left, so `C` is emitted first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::majorana::{braid_spin_rep, BraidGenerator, BraidWord, ChainLayout, MajoranaLabel};
use crate::pauli::{Pauli, PauliString};
use crate::state::{Axis, GateOp, StateVector, C64};

/// What a measured qubit is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementRole {
    Syndrome,
    Correction,
    Ancilla,
    Tomography,
}

impl MeasurementRole {
    fn name(self) -> &'static str {
        match self {
            MeasurementRole::Syndrome => "syndrome",
            MeasurementRole::Correction => "correction",
            MeasurementRole::Ancilla => "ancilla",
            MeasurementRole::Tomography => "tomography",
        }
    }
}

/// A labelled, contiguous run of gates.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR {
    n_qubits: usize,
    gates: Vec<GateOp>,
    sections: Vec<Section>,
    measurements: Vec<(usize, MeasurementRole)>,
}

impl CircuitIR {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            sections: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn measurements(&self) -> &[(usize, MeasurementRole)] {
        &self.measurements
    }

    pub fn push(&mut self, gate: GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other` under `label`.
    pub fn append(&mut self, label: impl Into<String>, other: &CircuitIR) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        let start = self.gates.len();
        for g in &other.gates {
            self.push(g.clone())?;
        }
        self.sections.push(Section {
            label: label.into(),
            start,
            end: self.gates.len(),
        });
        Ok(())
    }

    pub fn measure(&mut self, qubit: usize, role: MeasurementRole) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        if self.measurements.iter().any(|(q, _)| *q == qubit) {
            return Err(Error::Parse(format!("qubit {} already has a measurement role", qubit + 1)));
        }
        self.measurements.push((qubit, role));
        Ok(())
    }

    pub fn qubits_with_role(&self, role: MeasurementRole) -> Vec<usize> {
        self.measurements
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(q, _)| *q)
            .collect()
    }

    /// Gates from `range` as their own circuit, without sections or measurements.
    pub fn slice(&self, range: std::ops::Range<usize>) -> CircuitIR {
        CircuitIR {
            n_qubits: self.n_qubits,
            gates: self.gates[range].to_vec(),
            sections: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn run(&self, state: &mut StateVector) -> Result<()> {
        state.apply_all(&self.gates)
    }

    /// Dense unitary, column `j` being the image of basis state `j`.
    pub fn unitary(&self) -> Result<DMatrix<C64>> {
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for col in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, col);
            self.run(&mut s)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        Ok(u)
    }

    /// As-soon-as-possible moments: gate indices grouped by time step.
    /// Global phases occupy no qubit and join the moment that is open.
    pub fn moments(&self) -> Vec<Vec<usize>> {
        let mut depth = vec![0usize; self.n_qubits];
        let mut moments: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            let layer = if qs.is_empty() {
                moments.len().saturating_sub(1)
            } else {
                qs.iter().map(|q| depth[*q]).max().unwrap_or(0)
            };
            for q in &qs {
                depth[*q] = layer + 1;
            }
            if moments.len() <= layer {
                moments.resize_with(layer + 1, Vec::new);
            }
            moments[layer].push(i);
        }
        moments
    }

    /// Number of two-qubit gates.
    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, GateOp::Cz { .. })).count()
    }
}

fn fmt_gate(g: &GateOp, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        GateOp::Rotation { axis, angle, qubit } => {
            write!(f, "R{} q{} {:?}", axis.letter(), qubit + 1, angle)
        }
        GateOp::Cz { control, target } => write!(f, "CZ q{} q{}", control + 1, target + 1),
        GateOp::Hadamard { qubit } => write!(f, "H q{}", qubit + 1),
        GateOp::Unitary { qubit, matrix } => {
            write!(f, "U q{}", qubit + 1)?;
            for z in matrix.iter().flatten() {
                write!(f, " {:?} {:?}", z.re, z.im)?;
            }
            Ok(())
        }
        GateOp::Pauli(p) => write!(f, "PAULI {p}"),
        GateOp::GlobalPhase(theta) => write!(f, "GPHASE {theta:?}"),
    }
}

/// Line-oriented text: a `QUBITS n` header, one gate per line with 1-based
/// qubits, `SECTION` markers and trailing `MEASURE` lines.
impl fmt::Display for CircuitIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.n_qubits)?;
        for (i, g) in self.gates.iter().enumerate() {
            for s in self.sections.iter().filter(|s| s.start == i) {
                writeln!(f, "SECTION {}", s.label)?;
            }
            fmt_gate(g, f)?;
            writeln!(f)?;
        }
        for s in self.sections.iter().filter(|s| s.start == self.gates.len()) {
            writeln!(f, "SECTION {}", s.label)?;
        }
        for (q, role) in &self.measurements {
            writeln!(f, "MEASURE q{} {}", q + 1, role.name())?;
        }
        Ok(())
    }
}

fn parse_qubit(tok: Option<&str>, line: &str) -> Result<usize> {
    tok.and_then(|t| t.strip_prefix('q'))
        .and_then(|t| t.parse::<usize>().ok())
        .filter(|q| *q >= 1)
        .map(|q| q - 1)
        .ok_or_else(|| Error::Parse(format!("bad qubit in '{line}'")))
}

fn parse_angle(tok: Option<&str>, line: &str) -> Result<f64> {
    tok.and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| Error::Parse(format!("bad angle in '{line}'")))
}

impl FromStr for CircuitIR {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty circuit".into()))?;
        let n = header
            .strip_prefix("QUBITS ")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'QUBITS n', got '{header}'")))?;
        let mut c = CircuitIR::new(n);
        let mut open: Option<(String, usize)> = None;
        let close = |c: &mut CircuitIR, open: &mut Option<(String, usize)>| {
            if let Some((label, start)) = open.take() {
                c.sections.push(Section {
                    label,
                    start,
                    end: c.gates.len(),
                });
            }
        };
        for line in lines {
            let mut tok = line.split_whitespace();
            let op = tok.next().unwrap_or_default();
            let gate = match op {
                "RX" | "RY" | "RZ" => {
                    let axis = match op {
                        "RX" => Axis::X,
                        "RY" => Axis::Y,
                        _ => Axis::Z,
                    };
                    let qubit = parse_qubit(tok.next(), line)?;
                    let angle = parse_angle(tok.next(), line)?;
                    GateOp::Rotation { axis, angle, qubit }
                }
                "CZ" => GateOp::cz(parse_qubit(tok.next(), line)?, parse_qubit(tok.next(), line)?),
                "H" => GateOp::h(parse_qubit(tok.next(), line)?),
                "U" => {
                    let qubit = parse_qubit(tok.next(), line)?;
                    let mut vals = [0.0; 8];
                    for v in &mut vals {
                        *v = parse_angle(tok.next(), line)?;
                    }
                    let z = |k: usize| C64::new(vals[2 * k], vals[2 * k + 1]);
                    GateOp::Unitary {
                        qubit,
                        matrix: [[z(0), z(1)], [z(2), z(3)]],
                    }
                }
                "PAULI" => GateOp::Pauli(tok.next().unwrap_or_default().parse()?),
                "GPHASE" => GateOp::GlobalPhase(parse_angle(tok.next(), line)?),
                "SECTION" => {
                    close(&mut c, &mut open);
                    let label = line["SECTION".len()..].trim().to_string();
                    open = Some((label, c.gates.len()));
                    continue;
                }
                "MEASURE" => {
                    let q = parse_qubit(tok.next(), line)?;
                    let role = match tok.next() {
                        Some("syndrome") => MeasurementRole::Syndrome,
                        Some("correction") => MeasurementRole::Correction,
                        Some("ancilla") => MeasurementRole::Ancilla,
                        Some("tomography") => MeasurementRole::Tomography,
                        _ => return Err(Error::Parse(format!("bad role in '{line}'"))),
                    };
                    c.measure(q, role)?;
                    continue;
                }
                _ => return Err(Error::Parse(format!("unknown instruction '{line}'"))),
            };
            c.push(gate)?;
        }
        close(&mut c, &mut open);
        Ok(c)
    }
}

/// `exp(i theta P)` for a hermitian Pauli string `P` (phase `+1` or `-1`).
///
/// Two-qubit strings with equal factors use a single CZ sandwiched between
/// basis changes; other weights use a CNOT parity ladder, each CNOT being
/// `H CZ H`. The global phase is emitted explicitly so the circuit equals the
/// exponential exactly.
pub fn compile_pauli_exponential(generator: &PauliString, theta: f64) -> Result<CircuitIR> {
    if !generator.is_hermitian() {
        return Err(Error::NonHermitian(generator.to_string()));
    }
    let n = generator.len();
    let mut c = CircuitIR::new(n);
    let support = generator.support();
    if support.is_empty() {
        let phase = if generator.phase() == crate::pauli::Phase::ONE { theta } else { -theta };
        c.push(GateOp::GlobalPhase(phase))?;
        return Ok(c);
    }
    // W P W^dag = sign * Z..Z: X via R^y(-pi/2) (X -> -Z), Y via R^x(-pi/2) (Y -> Z).
    let mut sign = if generator.phase() == crate::pauli::Phase::ONE { 1.0 } else { -1.0 };
    let mut basis_in = Vec::new();
    let mut basis_out = Vec::new();
    for &q in support.iter().rev() {
        match generator.factors()[q] {
            Pauli::X => {
                sign = -sign;
                basis_in.push(GateOp::ry(q, -FRAC_PI_2));
                basis_out.push(GateOp::ry(q, FRAC_PI_2));
            }
            Pauli::Y => {
                basis_in.push(GateOp::rx(q, -FRAC_PI_2));
                basis_out.push(GateOp::rx(q, FRAC_PI_2));
            }
            _ => {}
        }
    }
    let theta = sign * theta;
    for g in basis_in {
        c.push(g)?;
    }
    let uniform_pair = support.len() == 2
        && generator.factors()[support[0]] == generator.factors()[support[1]];
    if uniform_pair && (theta.abs() - FRAC_PI_4).abs() < 1e-15 {
        // exp(+-i pi/4 Z_a Z_b) = e^{-+i pi/4} R^z_a(+-pi/2) R^z_b(+-pi/2) CZ_ab
        let (a, b) = (support[0], support[1]);
        let s = theta.signum();
        c.push(GateOp::cz(a, b))?;
        c.push(GateOp::rz(b, s * FRAC_PI_2))?;
        c.push(GateOp::rz(a, s * FRAC_PI_2))?;
        for g in basis_out {
            c.push(g)?;
        }
        c.push(GateOp::GlobalPhase(-s * FRAC_PI_4))?;
        return Ok(c);
    }
    let ladder: Vec<(usize, usize)> = support.windows(2).map(|w| (w[0], w[1])).collect();
    let cnot = |c: &mut CircuitIR, ctrl: usize, tgt: usize| -> Result<()> {
        c.push(GateOp::h(tgt))?;
        c.push(GateOp::cz(ctrl, tgt))?;
        c.push(GateOp::h(tgt))
    };
    for &(ctrl, tgt) in &ladder {
        cnot(&mut c, ctrl, tgt)?;
    }
    let last = *support.last().expect("nonempty support");
    c.push(GateOp::rz(last, 2.0 * theta))?;
    for &(ctrl, tgt) in ladder.iter().rev() {
        cnot(&mut c, ctrl, tgt)?;
    }
    for g in basis_out {
        c.push(g)?;
    }
    Ok(c)
}

/// Native-gate circuit for one braid on chains of two sites.
///
/// The circuit equals `(1 + s P)/sqrt2` from [`braid_spin_rep`] exactly,
/// including global phase.
pub fn compile_braid(g: &BraidGenerator, layout: &ChainLayout) -> Result<CircuitIR> {
    if layout.chain_length != 2 {
        return Err(Error::UnsupportedBraid(format!(
            "braid compilation targets two-site chains, layout has {}",
            layout.chain_length
        )));
    }
    let spin = braid_spin_rep(g, layout)?;
    compile_pauli_exponential(&spin.generator(), FRAC_PI_4)
}

pub fn compile_braid_word(word: &BraidWord, layout: &ChainLayout) -> Result<CircuitIR> {
    let mut c = CircuitIR::new(layout.n_qubits());
    for g in word.braids() {
        c.append(g.name(layout), &compile_braid(g, layout)?)?;
    }
    Ok(c)
}

fn check_pair(n_qubits: usize, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::QubitOutOfRange { index: b, n_qubits });
    }
    for q in [a, b] {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
    }
    Ok(())
}

/// `U_enc = H_b CZ_ab H_a H_b`: `|0>(x|0> + y|1>)` on `(a, b)` becomes `x|0_L> + y|1_L>`.
pub fn encoder_circuit(n_qubits: usize, a: usize, b: usize) -> Result<CircuitIR> {
    check_pair(n_qubits, a, b)?;
    let mut c = CircuitIR::new(n_qubits);
    for g in [GateOp::h(b), GateOp::h(a), GateOp::cz(a, b), GateOp::h(b)] {
        c.push(g)?;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderVariant {
    /// `U_dec = H_a H_b CZ_ab H_b`, the inverse of the encoder.
    Standard,
    /// `H_a CZ_ab H_b`, mapping `|+_L>` to `|00>`.
    Modified,
}

pub fn decoder_circuit(n_qubits: usize, a: usize, b: usize, variant: DecoderVariant) -> Result<CircuitIR> {
    check_pair(n_qubits, a, b)?;
    let mut c = CircuitIR::new(n_qubits);
    let gates = match variant {
        DecoderVariant::Standard => vec![GateOp::h(b), GateOp::cz(a, b), GateOp::h(b), GateOp::h(a)],
        DecoderVariant::Modified => vec![GateOp::h(b), GateOp::cz(a, b), GateOp::h(a)],
    };
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

/// Classical correction applied to the target logical qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Correction {
    None,
    X,
    Z,
    XZ,
}

impl Correction {
    pub const ALL: [Correction; 4] = [Correction::None, Correction::X, Correction::Z, Correction::XZ];

    pub fn name(self) -> &'static str {
        match self {
            Correction::None => "I",
            Correction::X => "X",
            Correction::Z => "Z",
            Correction::XZ => "XZ",
        }
    }

    fn has_x(self) -> bool {
        matches!(self, Correction::X | Correction::XZ)
    }

    fn has_z(self) -> bool {
        matches!(self, Correction::Z | Correction::XZ)
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "NONE" => Ok(Correction::None),
            "X" => Ok(Correction::X),
            "Z" => Ok(Correction::Z),
            "XZ" => Ok(Correction::XZ),
            _ => Err(Error::Parse(format!("unknown correction variant '{s}'"))),
        }
    }
}

/// Four chains of two sites on eight qubits.
pub fn teleport_layout() -> ChainLayout {
    ChainLayout {
        chain_length: 2,
        chains: 4,
    }
}

/// Label prefix of the correction braid sections.
pub const CORRECTION_SECTION: &str = "correction";

fn braid(layout: &ChainLayout, a: MajoranaLabel, b: MajoranaLabel) -> Result<(String, CircuitIR)> {
    let g = BraidGenerator::new(a, b)?;
    Ok((format!("braid {}", g.name(layout)), compile_braid(&g, layout)?))
}

/// The shared part of the teleportation program: ancilla preparation,
/// encoding, both entangling braids, and decoding of the two sender chains.
pub fn teleport_prefix() -> Result<CircuitIR> {
    let lay = teleport_layout();
    let n = lay.n_qubits();
    let mut c = CircuitIR::new(n);

    let mut anc = CircuitIR::new(n);
    anc.push(GateOp::h(7))?;
    anc.push(GateOp::h(6))?;
    c.append("prepare chain 4", &anc)?;
    for m in 1..=3 {
        let q = lay.chain_qubits(m);
        c.append(format!("encode chain {m}"), &encoder_circuit(n, q.start, q.start + 1)?)?;
    }
    // logical sqrt(X2 X3) then sqrt(X1 X2)
    let (label, bc) = braid(&lay, lay.right_edge(2), MajoranaLabel::left_edge(3))?;
    c.append(label, &bc)?;
    let (label, bc) = braid(&lay, lay.right_edge(1), MajoranaLabel::left_edge(2))?;
    c.append(label, &bc)?;
    for m in 1..=2 {
        let q = lay.chain_qubits(m);
        c.append(
            format!("decode chain {m}"),
            &decoder_circuit(n, q.start, q.start + 1, DecoderVariant::Standard)?,
        )?;
    }
    Ok(c)
}

/// Correction braids on chain 3 followed by decoding of chains 3 and 4.
/// `X` is two `(3,r)(4,l)` braids against the `|+_L>` ancilla, `Z` is two
/// `(3,l)(3,r)` braids; with both, `X` runs first.
pub fn teleport_suffix(variant: Correction) -> Result<CircuitIR> {
    let lay = teleport_layout();
    let n = lay.n_qubits();
    let mut c = CircuitIR::new(n);
    if variant.has_x() {
        for _ in 0..2 {
            let (label, bc) = braid(&lay, lay.right_edge(3), MajoranaLabel::left_edge(4))?;
            c.append(format!("{CORRECTION_SECTION} X: {label}"), &bc)?;
        }
    }
    if variant.has_z() {
        for _ in 0..2 {
            let (label, bc) = braid(&lay, MajoranaLabel::left_edge(3), lay.right_edge(3))?;
            c.append(format!("{CORRECTION_SECTION} Z: {label}"), &bc)?;
        }
    }
    c.append("decode chain 3", &decoder_circuit(n, 4, 5, DecoderVariant::Standard)?)?;
    c.append("decode chain 4", &decoder_circuit(n, 6, 7, DecoderVariant::Modified)?)?;
    Ok(c)
}

fn teleport_measurements(c: &mut CircuitIR) -> Result<()> {
    for q in [0, 2, 4, 6] {
        c.measure(q, MeasurementRole::Syndrome)?;
    }
    c.measure(1, MeasurementRole::Correction)?;
    c.measure(3, MeasurementRole::Correction)?;
    c.measure(7, MeasurementRole::Ancilla)?;
    c.measure(5, MeasurementRole::Tomography)
}

/// Full eight-qubit program for one correction variant, no gate simplification.
pub fn compile_teleport_program(variant: Correction) -> Result<CircuitIR> {
    let prefix = teleport_prefix()?;
    let suffix = teleport_suffix(variant)?;
    let mut c = CircuitIR::new(prefix.n_qubits());
    for part in [&prefix, &suffix] {
        for s in part.sections() {
            c.append(s.label.clone(), &part.slice(s.start..s.end))?;
        }
    }
    teleport_measurements(&mut c)?;
    Ok(c)
}
