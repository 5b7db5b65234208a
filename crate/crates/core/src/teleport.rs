//! Teleportation of one logical qubit across the four-chain register, with
//! exact enumeration of every measurement branch.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::compiler::{teleport_prefix, teleport_suffix, CircuitIR, Correction};
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, GateOp, StateVector, C64};

pub const N_QUBITS: usize = 8;
pub const INPUT_QUBIT: usize = 1;
pub const CORRECTION_QUBITS: [usize; 2] = [1, 3];
pub const SYNDROME_QUBITS: [usize; 4] = [0, 2, 4, 6];
pub const ANCILLA_QUBIT: usize = 7;
pub const TARGET_QUBIT: usize = 5;

/// Below this retained weight a postselected state counts as empty.
pub const RETAINED_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InputState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    /// `alpha|0> + beta|1>`, normalized on construction.
    Custom(C64, C64),
}

impl InputState {
    pub const SIX: [InputState; 6] = [
        InputState::Zero,
        InputState::One,
        InputState::Plus,
        InputState::Minus,
        InputState::PlusI,
        InputState::MinusI,
    ];

    pub fn custom(alpha: C64, beta: C64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::Parse(format!("cannot normalize ({alpha}, {beta})")));
        }
        Ok(InputState::Custom(alpha / norm, beta / norm))
    }

    pub fn amplitudes(&self) -> (C64, C64) {
        let h = FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        match self {
            InputState::Zero => (r(1.0), r(0.0)),
            InputState::One => (r(0.0), r(1.0)),
            InputState::Plus => (r(h), r(h)),
            InputState::Minus => (r(h), r(-h)),
            InputState::PlusI => (r(h), C64::new(0.0, h)),
            InputState::MinusI => (r(h), C64::new(0.0, -h)),
            InputState::Custom(a, b) => (*a, *b),
        }
    }

    pub fn ket(&self) -> StateVector {
        let (a, b) = self.amplitudes();
        StateVector::from_amplitudes(vec![a, b]).expect("two amplitudes")
    }

    pub fn label(&self) -> String {
        match self {
            InputState::Zero => "0".into(),
            InputState::One => "1".into(),
            InputState::Plus => "+".into(),
            InputState::Minus => "-".into(),
            InputState::PlusI => "+i".into(),
            InputState::MinusI => "-i".into(),
            InputState::Custom(a, b) => format!("({a},{b})"),
        }
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for InputState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('|').trim_end_matches('>');
        match t.to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(InputState::Zero),
            "1" | "one" => Ok(InputState::One),
            "+" | "plus" => Ok(InputState::Plus),
            "-" | "minus" => Ok(InputState::Minus),
            "+i" | "plus_i" => Ok(InputState::PlusI),
            "-i" | "minus_i" => Ok(InputState::MinusI),
            _ => Err(Error::Parse(format!("unknown input state '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PostselectPolicy {
    /// Keep every branch.
    NoSyndrome,
    /// Keep branches whose four syndrome bits read zero.
    ErrorSyndrome,
}

impl PostselectPolicy {
    pub fn short(self) -> &'static str {
        match self {
            PostselectPolicy::NoSyndrome => "ns",
            PostselectPolicy::ErrorSyndrome => "es",
        }
    }
}

/// Correction on the target chain for measured logical values of chains 1 and 2.
pub fn correction_for(c1: u8, c2: u8) -> Correction {
    match (c1 & 1, c2 & 1) {
        (0, 0) => Correction::Z,
        (0, 1) => Correction::X,
        (1, 0) => Correction::XZ,
        _ => Correction::None,
    }
}

/// One measurement branch.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub c: [u8; 2],
    pub m: [u8; 4],
    pub k: u8,
    /// Unnormalized target-qubit state; its trace is the branch probability.
    pub rho: DensityMatrix,
}

impl RunOutcome {
    pub fn probability(&self) -> f64 {
        self.rho.trace()
    }

    pub fn syndrome_clear(&self) -> bool {
        self.m == [0; 4]
    }
}

/// The compiled shared part and the four correction-dependent parts.
#[derive(Clone, Debug)]
pub struct TeleportProgram {
    pub prefix: CircuitIR,
    pub suffix: [CircuitIR; 4],
}

fn variant_index(v: Correction) -> usize {
    Correction::ALL.iter().position(|c| *c == v).expect("listed variant")
}

impl TeleportProgram {
    pub fn compile() -> Result<Self> {
        Ok(Self {
            prefix: teleport_prefix()?,
            suffix: [
                teleport_suffix(Correction::None)?,
                teleport_suffix(Correction::X)?,
                teleport_suffix(Correction::Z)?,
                teleport_suffix(Correction::XZ)?,
            ],
        })
    }

    pub fn suffix_for(&self, v: Correction) -> &CircuitIR {
        &self.suffix[variant_index(v)]
    }

    /// Gate lists with no noise.
    pub fn ideal(&self) -> ProgramInstance {
        ProgramInstance {
            prefix: self.prefix.gates().to_vec(),
            suffix: self.suffix.clone().map(|c| c.gates().to_vec()),
        }
    }
}

/// Concrete gate lists for one execution, possibly carrying sampled noise.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramInstance {
    pub prefix: Vec<GateOp>,
    /// Indexed like [`Correction::ALL`].
    pub suffix: [Vec<GateOp>; 4],
}

impl ProgramInstance {
    pub fn suffix_for(&self, v: Correction) -> &[GateOp] {
        &self.suffix[variant_index(v)]
    }
}

/// How corrections are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecutionMode {
    /// Project the correction qubits after the shared part, then apply the
    /// matching correction.
    FeedForward,
    /// Run each of the four full programs and keep the outcomes that select it.
    FourVariant,
}

fn bit(q: usize) -> usize {
    1 << (N_QUBITS - 1 - q)
}

fn read(index: usize, q: usize) -> u8 {
    u8::from(index & bit(q) != 0)
}

/// Per-branch target densities indexed by `[c][m][k]`.
struct Branches(Vec<[C64; 4]>);

impl Branches {
    fn new() -> Self {
        Self(vec![[C64::new(0.0, 0.0); 4]; 4 * 16 * 2])
    }

    fn slot(c: usize, m: usize, k: usize) -> usize {
        (c * 16 + m) * 2 + k
    }

    /// Adds the branches of `state` whose correction bits select `keep_c`.
    fn accumulate(&mut self, state: &StateVector, keep_c: impl Fn(usize) -> bool) {
        let amps = state.amplitudes();
        let t = bit(TARGET_QUBIT);
        for i0 in (0..amps.len()).filter(|i| i & t == 0) {
            let (a0, a1) = (amps[i0], amps[i0 | t]);
            if a0.norm_sqr() + a1.norm_sqr() == 0.0 {
                continue;
            }
            let c = usize::from(read(i0, CORRECTION_QUBITS[0])) * 2 + usize::from(read(i0, CORRECTION_QUBITS[1]));
            if !keep_c(c) {
                continue;
            }
            let m = SYNDROME_QUBITS
                .iter()
                .fold(0usize, |acc, q| acc * 2 + usize::from(read(i0, *q)));
            let k = usize::from(read(i0, ANCILLA_QUBIT));
            let r = &mut self.0[Self::slot(c, m, k)];
            r[0] += a0 * a0.conj();
            r[1] += a0 * a1.conj();
            r[2] += a1 * a0.conj();
            r[3] += a1 * a1.conj();
        }
    }

    fn into_outcomes(self) -> Vec<RunOutcome> {
        let mut out = Vec::with_capacity(self.0.len());
        for c in 0..4 {
            for m in 0..16 {
                for k in 0..2 {
                    let r = self.0[Self::slot(c, m, k)];
                    let rho = DensityMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &r))
                        .expect("2x2 matrix");
                    out.push(RunOutcome {
                        c: [(c >> 1) as u8, (c & 1) as u8],
                        m: [(m >> 3) as u8 & 1, (m >> 2) as u8 & 1, (m >> 1) as u8 & 1, m as u8 & 1],
                        k: k as u8,
                        rho,
                    });
                }
            }
        }
        out
    }
}

/// `|0> ⊗ |psi> ⊗ |0...0>` on eight qubits.
pub fn initial_state(input: &InputState) -> StateVector {
    StateVector::zero(1)
        .tensor(&input.ket())
        .tensor(&StateVector::zero(N_QUBITS - 2))
}

/// All 128 `(c, m, k)` branches of one execution.
pub fn run_teleport(input: &InputState, instance: &ProgramInstance, mode: ExecutionMode) -> Result<Vec<RunOutcome>> {
    let mut branches = Branches::new();
    match mode {
        ExecutionMode::FeedForward => {
            let mut shared = initial_state(input);
            shared.apply_all(&instance.prefix)?;
            for c in 0..4usize {
                let (c1, c2) = ((c >> 1) as u8, (c & 1) as u8);
                let mut s = shared
                    .clone()
                    .projected(CORRECTION_QUBITS[0], c1)?
                    .projected(CORRECTION_QUBITS[1], c2)?;
                s.apply_all(instance.suffix_for(correction_for(c1, c2)))?;
                branches.accumulate(&s, |got| got == c);
            }
        }
        ExecutionMode::FourVariant => {
            for v in Correction::ALL {
                let mut s = initial_state(input);
                s.apply_all(&instance.prefix)?;
                s.apply_all(instance.suffix_for(v))?;
                branches.accumulate(&s, |c| correction_for((c >> 1) as u8, (c & 1) as u8) == v);
            }
        }
    }
    Ok(branches.into_outcomes())
}

/// Sum of the retained branches and its trace.
pub fn assemble_density(outcomes: &[RunOutcome], policy: PostselectPolicy) -> Result<(DensityMatrix, f64)> {
    let mut rho = DensityMatrix::zeros(1);
    for o in outcomes {
        if policy == PostselectPolicy::NoSyndrome || o.syndrome_clear() {
            rho.add_assign(&o.rho);
        }
    }
    let p = rho.trace();
    if p < RETAINED_FLOOR {
        return Err(Error::EmptyRetained);
    }
    Ok((rho, p))
}

/// `<psi|rho|psi> / tr(rho)` after postselection.
pub fn teleport_fidelity(input: &InputState, outcomes: &[RunOutcome], policy: PostselectPolicy) -> Result<f64> {
    let (rho, p) = assemble_density(outcomes, policy)?;
    Ok(rho.expectation_pure(&input.ket())? / p)
}

/// Where an extra gate is inserted into an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjectionPoint {
    /// Before gate `i` of the shared part (`i == len` means at its end).
    Prefix(usize),
    /// Before gate `i` of every correction-dependent part.
    Suffix(usize),
    /// Before the decoder of the target chain, after any correction braids.
    BeforeTargetDecode,
}

impl ProgramInstance {
    pub fn inject(&mut self, at: InjectionPoint, gate: GateOp, program: &TeleportProgram) -> Result<()> {
        gate.validate(N_QUBITS)?;
        match at {
            InjectionPoint::Prefix(i) => {
                if i > self.prefix.len() {
                    return Err(Error::QubitOutOfRange { index: i, n_qubits: self.prefix.len() });
                }
                self.prefix.insert(i, gate);
            }
            InjectionPoint::Suffix(i) => {
                for s in &mut self.suffix {
                    if i > s.len() {
                        return Err(Error::QubitOutOfRange { index: i, n_qubits: s.len() });
                    }
                    s.insert(i, gate.clone());
                }
            }
            InjectionPoint::BeforeTargetDecode => {
                for (s, compiled) in self.suffix.iter_mut().zip(&program.suffix) {
                    let at = compiled
                        .sections()
                        .iter()
                        .find(|sec| sec.label == "decode chain 3")
                        .map(|sec| sec.start)
                        .ok_or_else(|| Error::Parse("suffix without a target decoder".into()))?;
                    s.insert(at, gate.clone());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> (TeleportProgram, ProgramInstance) {
        let p = TeleportProgram::compile().unwrap();
        let i = p.ideal();
        (p, i)
    }

    #[test]
    fn noiseless_teleport_is_identity_for_the_six_states() {
        let (_, inst) = ideal();
        for input in InputState::SIX {
            let out = run_teleport(&input, &inst, ExecutionMode::FeedForward).unwrap();
            let total: f64 = out.iter().map(RunOutcome::probability).sum();
            assert!((total - 1.0).abs() < 1e-9);
            for policy in [PostselectPolicy::NoSyndrome, PostselectPolicy::ErrorSyndrome] {
                let f = teleport_fidelity(&input, &out, policy).unwrap();
                assert!((f - 1.0).abs() < 1e-9, "{input} {policy:?}: {f}");
            }
            let ancilla_and_syndromes: f64 = out
                .iter()
                .filter(|o| o.k == 0 && o.syndrome_clear())
                .map(RunOutcome::probability)
                .sum();
            assert!((ancilla_and_syndromes - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn four_variant_mode_matches_feed_forward() {
        let (_, inst) = ideal();
        let input = InputState::custom(C64::new(0.3, 0.1), C64::new(-0.2, 0.9)).unwrap();
        let a = run_teleport(&input, &inst, ExecutionMode::FeedForward).unwrap();
        let b = run_teleport(&input, &inst, ExecutionMode::FourVariant).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.rho.matrix() - y.rho.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn correction_table() {
        assert_eq!(correction_for(0, 0), Correction::Z);
        assert_eq!(correction_for(0, 1), Correction::X);
        assert_eq!(correction_for(1, 0), Correction::XZ);
        assert_eq!(correction_for(1, 1), Correction::None);
    }

    #[test]
    fn uncorrected_11_branch_already_holds_the_input() {
        // the (1,1) outcome needs no correction, so the variant-none program alone teleports it
        let p = TeleportProgram::compile().unwrap();
        let mut s = initial_state(&InputState::Zero);
        p.prefix.run(&mut s).unwrap();
        p.suffix_for(Correction::None).run(&mut s).unwrap();
        let s = s.projected(1, 1).unwrap().projected(3, 1).unwrap();
        let rho = s.reduced_density(&[TARGET_QUBIT]).unwrap();
        assert!(rho.trace() > 0.0);
        assert!((rho.get(0, 0).re / rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_flip_on_sender_chain_is_always_flagged() {
        let (prog, mut inst) = ideal();
        let before_decode = prog
            .prefix
            .sections()
            .iter()
            .find(|s| s.label == "decode chain 1")
            .unwrap()
            .start;
        inst.inject(InjectionPoint::Prefix(before_decode), GateOp::Pauli("ZIIIIIII".parse().unwrap()), &prog)
            .unwrap();
        let out = run_teleport(&InputState::Plus, &inst, ExecutionMode::FeedForward).unwrap();
        assert!(matches!(
            assemble_density(&out, PostselectPolicy::ErrorSyndrome),
            Err(Error::EmptyRetained)
        ));
        assert!(assemble_density(&out, PostselectPolicy::NoSyndrome).is_ok());
    }

    #[test]
    fn parse_labels() {
        assert_eq!("+i".parse::<InputState>().unwrap(), InputState::PlusI);
        assert_eq!("|->".parse::<InputState>().unwrap(), InputState::Minus);
        assert!("2".parse::<InputState>().is_err());
        assert!(InputState::custom(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).is_err());
    }
}
