//! Symbolic identity suite behind the `verify` command.

use std::f64::consts::FRAC_1_SQRT_2;

use rand_distr::{Distribution, StandardNormal};

use crate::compiler::{
    compile_braid, decoder_circuit, encoder_circuit, teleport_layout, CircuitIR, Correction, DecoderVariant,
};
use crate::error::{Error, Result};
use crate::kitaev::{logical_states, pauli_matrix};
use crate::logical::{identify_gate, phase_distance, spin_unitary};
use crate::majorana::{BraidGenerator, BraidWord, ChainLayout, MajoranaLabel};
use crate::noise::draw_rng;
use crate::pauli::PauliString;
use crate::state::{GateOp, StateVector, C64};
use crate::teleport::{
    assemble_density, correction_for, run_teleport, teleport_fidelity, ExecutionMode, InjectionPoint, InputState,
    PostselectPolicy, TeleportProgram,
};

pub const TOL: f64 = 1e-9;

/// Signature of a braid compiler under test.
pub type BraidCompiler = fn(&BraidGenerator, &ChainLayout) -> Result<CircuitIR>;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn verified(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, group: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            group,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Logical gate of each edge braid of two chains, as `(pair, pauli, sign)`.
pub const BRAID_TABLE: [(&str, &str, i8); 6] = [
    ("(1,l)(1,r)", "ZI", 1),
    ("(1,l)(2,l)", "YX", -1),
    ("(1,l)(2,r)", "YY", -1),
    ("(1,r)(2,l)", "XX", 1),
    ("(1,r)(2,r)", "XY", 1),
    ("(2,l)(2,r)", "IZ", 1),
];

fn braid_soundness(report: &mut VerifyReport, compiler: BraidCompiler) -> Result<()> {
    let two = ChainLayout::new(2, 2)?;
    let modes = two.edge_modes();
    let mut pairs = Vec::new();
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            pairs.push((two, BraidGenerator::new(*a, *b)?));
        }
    }
    let four = teleport_layout();
    for (a, b) in [
        (four.right_edge(2), MajoranaLabel::left_edge(3)),
        (four.right_edge(3), MajoranaLabel::left_edge(4)),
        (MajoranaLabel::left_edge(3), four.right_edge(3)),
    ] {
        pairs.push((four, BraidGenerator::new(a, b)?));
    }
    for (layout, g) in pairs {
        let name = format!("braid {}", g.name(&layout));
        let symbolic = spin_unitary(&BraidWord::new(vec![g], &layout)?, &layout)?;
        let compiled = match compiler(&g, &layout).and_then(|c| c.unitary()) {
            Ok(u) => u,
            Err(e) => {
                report.push("braid", name, false, format!("compilation failed: {e}"));
                continue;
            }
        };
        let d = phase_distance(&compiled, &symbolic);
        let mut ok = d < TOL;
        let mut detail = format!("compiled vs spin representation: {d:.1e}");
        if layout.chains == 2 {
            let (_, pauli, sign) = BRAID_TABLE
                .iter()
                .find(|row| row.0 == g.name(&layout))
                .ok_or_else(|| Error::UnsupportedBraid(g.name(&layout)))?;
            let action = logical_action_of(&compiled)?;
            let gate = identify_gate(&action, TOL);
            let expect = pauli.parse::<PauliString>()?;
            match gate {
                Some(gate) if gate.pauli == expect && gate.sign == *sign => {
                    detail.push_str(&format!(", logical {}", gate.exponential()));
                }
                Some(gate) => {
                    ok = false;
                    detail.push_str(&format!(", logical {} but expected {pauli} sign {sign}", gate.exponential()));
                }
                None => {
                    ok = false;
                    detail.push_str(", logical action is not a braid gate");
                }
            }
        }
        report.push("braid", name, ok, detail);
    }
    Ok(())
}

/// Restriction of a four-qubit unitary to the two-chain logical product basis.
fn logical_action_of(u: &nalgebra::DMatrix<C64>) -> Result<nalgebra::DMatrix<C64>> {
    let b = logical_states(2)?;
    let basis: Vec<StateVector> = [&b.zero, &b.one]
        .iter()
        .flat_map(|a| [&b.zero, &b.one].map(|c| a.tensor(c)))
        .collect();
    let mut m = nalgebra::DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for (j, v) in basis.iter().enumerate() {
        let image = u * nalgebra::DVector::from_column_slice(v.amplitudes());
        let image = StateVector::from_amplitudes(image.as_slice().to_vec())?;
        for (i, w) in basis.iter().enumerate() {
            m[(i, j)] = w.inner(&image);
        }
    }
    Ok(m)
}

fn encoder_decoder(report: &mut VerifyReport) -> Result<()> {
    let enc = encoder_circuit(2, 0, 1)?;
    let dec = decoder_circuit(2, 0, 1, DecoderVariant::Standard)?;
    let mut round = enc.clone();
    round.append("decode", &dec)?;
    let d = (round.unitary()? - nalgebra::DMatrix::<C64>::identity(4, 4)).norm();
    report.push("codec", "decoder inverts encoder", d < TOL, format!("|D E - I| = {d:.1e}"));

    let basis = logical_states(2)?;
    let mut worst: f64 = 0.0;
    for (x, target) in [(0, &basis.zero), (1, &basis.one)] {
        let mut s = StateVector::basis(2, x);
        enc.run(&mut s)?;
        worst = worst.max(1.0 - s.inner(target).norm_sqr());
    }
    report.push("codec", "encoder prepares logical states", worst < TOL, format!("infidelity {worst:.1e}"));

    // a single phase flip on either qubit leaves the syndrome qubit in |1>
    let mut worst: f64 = 0.0;
    for x in 0..2 {
        for q in 0..2 {
            let mut s = StateVector::basis(2, x);
            enc.run(&mut s)?;
            s.apply(&GateOp::rz(q, std::f64::consts::PI))?;
            dec.run(&mut s)?;
            worst = worst.max(s.clone().projected(0, 0)?.norm_sqr());
        }
    }
    report.push("codec", "single phase flip raises the syndrome", worst < TOL, format!("unflagged weight {worst:.1e}"));

    let modified = decoder_circuit(2, 0, 1, DecoderVariant::Modified)?;
    let mut s = basis.zero.clone();
    s.add_scaled(&basis.one, C64::new(1.0, 0.0));
    s.scale(C64::new(FRAC_1_SQRT_2, 0.0));
    modified.run(&mut s)?;
    let miss = 1.0 - s.amplitudes()[0].norm_sqr();
    report.push("codec", "modified decoder maps |+_L> to |00>", miss < TOL, format!("infidelity {miss:.1e}"));
    Ok(())
}

/// Deterministic random single-qubit states.
pub fn random_inputs(count: usize, seed: u64) -> Vec<InputState> {
    (0..count as u64)
        .map(|i| {
            let mut rng = draw_rng(seed, i);
            let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
            let (a, b) = (C64::new(g(), g()), C64::new(g(), g()));
            InputState::custom(a, b).expect("nonzero gaussian amplitudes")
        })
        .collect()
}

fn exp_pi4(label: &str) -> Result<nalgebra::DMatrix<C64>> {
    let p = pauli_matrix(&label.parse()?);
    let dim = p.nrows();
    Ok((nalgebra::DMatrix::<C64>::identity(dim, dim) + p.map(|z| z * C64::new(0.0, 1.0))).map(|z| z * FRAC_1_SQRT_2))
}

/// Which corrections return logical qubit 3 to `psi` after outcome `(c1, c2)`,
/// computed on three logical qubits.
pub fn corrections_restoring(psi: &InputState, c1: u8, c2: u8) -> Result<Vec<Correction>> {
    let u = exp_pi4("XXI")? * exp_pi4("IXX")?;
    let start = psi.ket().tensor(&StateVector::zero(2));
    let out = u * nalgebra::DVector::from_column_slice(start.amplitudes());
    let branch = StateVector::from_amplitudes(out.as_slice().to_vec())?
        .projected(0, c1)?
        .projected(1, c2)?;
    let mut found = Vec::new();
    for v in Correction::ALL {
        let mut s = branch.clone();
        let ops: &[&str] = match v {
            Correction::None => &[],
            Correction::X => &["IIX"],
            Correction::Z => &["IIZ"],
            Correction::XZ => &["IIX", "IIZ"],
        };
        for op in ops {
            s.apply(&GateOp::Pauli(op.parse()?))?;
        }
        let rho = s.reduced_density(&[2])?;
        let f = rho.expectation_pure(&psi.ket())? / rho.trace();
        if (f - 1.0).abs() < TOL {
            found.push(v);
        }
    }
    Ok(found)
}

fn correction_table(report: &mut VerifyReport) -> Result<()> {
    let inputs = random_inputs(20, 0xc0de);
    for (c1, c2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let table = correction_for(c1, c2);
        let mut ok = true;
        for psi in &inputs {
            let found = corrections_restoring(psi, c1, c2)?;
            ok &= found == [table];
        }
        report.push(
            "correction",
            format!("outcome |{c1}{c2}_L> needs {}", table.name()),
            ok,
            format!("{} random inputs", inputs.len()),
        );
    }
    Ok(())
}

/// Section-boundary positions after encoding, with a label each.
pub fn logical_positions(program: &TeleportProgram) -> Vec<(String, InjectionPoint)> {
    let mut out: Vec<(String, InjectionPoint)> = program
        .prefix
        .sections()
        .iter()
        .filter(|s| !s.label.starts_with("encode") && !s.label.starts_with("prepare"))
        .map(|s| (format!("before {}", s.label), InjectionPoint::Prefix(s.start)))
        .collect();
    out.push(("before corrections".into(), InjectionPoint::Suffix(0)));
    out.push(("before decode chain 3".into(), InjectionPoint::BeforeTargetDecode));
    out
}

/// Outcome of one phase-flip injection under error-syndrome postselection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Injection {
    /// Nothing survives postselection.
    Flagged,
    /// Survivors carry this worst-case fidelity.
    Retained(f64),
}

pub fn inject_and_run(program: &TeleportProgram, at: InjectionPoint, gate: GateOp, input: &InputState) -> Result<Injection> {
    let mut inst = program.ideal();
    inst.inject(at, gate, program)?;
    let out = run_teleport(input, &inst, ExecutionMode::FeedForward)?;
    match assemble_density(&out, PostselectPolicy::ErrorSyndrome) {
        Ok(_) => Ok(Injection::Retained(teleport_fidelity(input, &out, PostselectPolicy::ErrorSyndrome)?)),
        Err(Error::EmptyRetained) => Ok(Injection::Flagged),
        Err(e) => Err(e),
    }
}

fn detection(report: &mut VerifyReport, program: &TeleportProgram) -> Result<()> {
    let positions = logical_positions(program);
    let (mut flagged, mut trivial, mut bad) = (0, 0, Vec::new());
    for (label, at) in &positions {
        for q in 0..6 {
            let z = GateOp::Pauli(PauliString::single(8, q, crate::pauli::Pauli::Z));
            for input in InputState::SIX {
                match inject_and_run(program, *at, z.clone(), &input)? {
                    Injection::Flagged => flagged += 1,
                    Injection::Retained(f) if (f - 1.0).abs() < TOL => trivial += 1,
                    Injection::Retained(f) => bad.push(format!("Z on qubit {} {label}, input {input}: F = {f:.3}", q + 1)),
                }
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{flagged} flagged, {trivial} trivial over {} positions", positions.len())
    } else {
        bad.join("; ")
    };
    report.push("detection", "single phase flips are flagged or harmless", bad.is_empty(), detail);

    let at = positions[0].1;
    let zz = GateOp::Pauli("ZZIIIIII".parse()?);
    let outcome = inject_and_run(program, at, zz, &InputState::Plus)?;
    let ok = matches!(outcome, Injection::Retained(f) if f.abs() < TOL);
    report.push("detection", "Z1Z2 passes as a logical Z", ok, format!("{outcome:?} for |+>"));
    Ok(())
}

fn teleport_identity(report: &mut VerifyReport, program: &TeleportProgram) -> Result<()> {
    let ideal = program.ideal();
    let mut worst: f64 = 0.0;
    for input in InputState::SIX {
        let out = run_teleport(&input, &ideal, ExecutionMode::FeedForward)?;
        for policy in [PostselectPolicy::NoSyndrome, PostselectPolicy::ErrorSyndrome] {
            worst = worst.max((1.0 - teleport_fidelity(&input, &out, policy)?).abs());
        }
    }
    report.push("teleport", "noiseless teleportation is exact", worst < TOL, format!("|1 - F| <= {worst:.1e}"));
    Ok(())
}

/// Runs the suite with `compiler` used for the braid checks.
pub fn verify_with(compiler: BraidCompiler) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    braid_soundness(&mut report, compiler)?;
    encoder_decoder(&mut report)?;
    correction_table(&mut report)?;
    let program = TeleportProgram::compile()?;
    detection(&mut report, &program)?;
    teleport_identity(&mut report, &program)?;
    Ok(report)
}

pub fn verify_all() -> Result<VerifyReport> {
    verify_with(compile_braid)
}
