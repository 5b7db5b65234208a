//! Stochastic gate and dephasing noise, and Monte Carlo estimation of the
//! teleportation fidelity.
//!
//! Widths are standard deviations in units of a pi rotation. A rotation by
//! `theta` runs as `theta (1 + xi)`, a CZ is followed by `R^z(xi pi)` on its
//! target, and dephasing is a set of `R^z(xi pi)` pulses.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::CircuitIR;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, GateOp, StateVector, C64};
use crate::teleport::{
    assemble_density, run_teleport, ExecutionMode, InputState, PostselectPolicy, ProgramInstance,
    TeleportProgram,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingPolicy {
    /// One pulse per qubit halfway through the shared part of the program.
    Midpoint,
    /// One pulse per qubit after every moment, each of width `sigma_d / sqrt(moments)`.
    PerMoment,
}

impl FromStr for DephasingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(DephasingPolicy::Midpoint),
            "per_moment" => Ok(DephasingPolicy::PerMoment),
            _ => Err(Error::InvalidNoise(format!("unknown dephasing policy '{s}'"))),
        }
    }
}

/// `sigma_d,i = c_d * T2*_i / max_j T2*_j`.
pub fn derive_sigma_d(t2_star: &[f64], c_d: f64) -> Result<Vec<f64>> {
    if t2_star.is_empty() {
        return Err(Error::InvalidNoise("no T2* values".into()));
    }
    if t2_star.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidNoise("T2* values must be positive".into()));
    }
    if !(c_d >= 0.0 && c_d.is_finite()) {
        return Err(Error::InvalidNoise(format!("c_d = {c_d}")));
    }
    let max = t2_star.iter().cloned().fold(f64::MIN, f64::max);
    Ok(t2_star.iter().map(|t| c_d * t / max).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseParams {
    /// Per qubit.
    pub sigma_g: Vec<f64>,
    /// Per adjacent pair `(i, i + 1)`.
    pub sigma_cz: Vec<f64>,
    /// Per qubit.
    pub sigma_d: Vec<f64>,
    pub policy: DephasingPolicy,
}

fn check_widths(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        Some(x) => Err(Error::InvalidNoise(format!("{name} contains {x}"))),
        None => Ok(()),
    }
}

impl NoiseParams {
    pub fn new(sigma_g: Vec<f64>, sigma_cz: Vec<f64>, sigma_d: Vec<f64>, policy: DephasingPolicy) -> Result<Self> {
        check_widths("sigma_g", &sigma_g)?;
        check_widths("sigma_cz", &sigma_cz)?;
        check_widths("sigma_d", &sigma_d)?;
        if sigma_d.len() != sigma_g.len() {
            return Err(Error::InvalidNoise(format!(
                "{} dephasing widths for {} qubits",
                sigma_d.len(),
                sigma_g.len()
            )));
        }
        if sigma_cz.len() + 1 != sigma_g.len() {
            return Err(Error::InvalidNoise(format!(
                "{} CZ widths for {} qubits in a line",
                sigma_cz.len(),
                sigma_g.len()
            )));
        }
        Ok(Self {
            sigma_g,
            sigma_cz,
            sigma_d,
            policy,
        })
    }

    /// Builds the dephasing widths from T2* times.
    pub fn from_t2_star(
        sigma_g: Vec<f64>,
        sigma_cz: Vec<f64>,
        t2_star: &[f64],
        c_d: f64,
        policy: DephasingPolicy,
    ) -> Result<Self> {
        Self::new(sigma_g, sigma_cz, derive_sigma_d(t2_star, c_d)?, policy)
    }

    pub fn noiseless(n_qubits: usize) -> Self {
        Self {
            sigma_g: vec![0.0; n_qubits],
            sigma_cz: vec![0.0; n_qubits.saturating_sub(1)],
            sigma_d: vec![0.0; n_qubits],
            policy: DephasingPolicy::Midpoint,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.sigma_g.len()
    }

    pub fn single(&self, q: usize) -> Result<f64> {
        self.sigma_g
            .get(q)
            .copied()
            .ok_or_else(|| Error::UnknownNoiseTarget(format!("qubit {}", q + 1)))
    }

    pub fn pair(&self, a: usize, b: usize) -> Result<f64> {
        if a.abs_diff(b) != 1 {
            return Err(Error::UnknownNoiseTarget(format!("pair ({}, {})", a + 1, b + 1)));
        }
        self.sigma_cz
            .get(a.min(b))
            .copied()
            .ok_or_else(|| Error::UnknownNoiseTarget(format!("pair ({}, {})", a + 1, b + 1)))
    }

    pub fn dephasing(&self, q: usize) -> Result<f64> {
        self.sigma_d
            .get(q)
            .copied()
            .ok_or_else(|| Error::UnknownNoiseTarget(format!("qubit {}", q + 1)))
    }
}

/// Zero-mean Gaussian draw; a zero width returns exactly zero without consuming randomness.
fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma).expect("validated width").sample(rng)
}

/// `-i R^n(phi)` about `n = (x + z)/sqrt2`, which is `H` at `phi = pi`.
pub fn hadamard_like(phi: f64) -> [[C64; 2]; 2] {
    let c = (phi / 2.0).cos();
    let s = (phi / 2.0).sin() * FRAC_1_SQRT_2;
    let mi = C64::new(0.0, -1.0);
    [
        [mi * C64::new(c, s), mi * C64::new(0.0, s)],
        [mi * C64::new(0.0, s), mi * C64::new(c, -s)],
    ]
}

/// Jittered replacement for a single-qubit gate.
pub fn sample_noisy_single(gate: &GateOp, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<GateOp>> {
    Ok(match gate {
        GateOp::Rotation { axis, angle, qubit } => {
            let xi = gauss(rng, params.single(*qubit)?);
            vec![GateOp::Rotation {
                axis: *axis,
                angle: angle * (1.0 + xi),
                qubit: *qubit,
            }]
        }
        GateOp::Hadamard { qubit } => {
            let xi = gauss(rng, params.single(*qubit)?);
            if xi == 0.0 {
                vec![gate.clone()]
            } else {
                vec![GateOp::Unitary {
                    qubit: *qubit,
                    matrix: hadamard_like(PI * (1.0 + xi)),
                }]
            }
        }
        _ => vec![gate.clone()],
    })
}

/// `CZ` followed by `R^z(xi pi)` on the target.
pub fn sample_noisy_cz(control: usize, target: usize, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<GateOp>> {
    let xi = gauss(rng, params.pair(control, target)?);
    let mut out = vec![GateOp::cz(control, target)];
    if xi != 0.0 {
        out.push(GateOp::rz(target, xi * PI));
    }
    Ok(out)
}

/// Gate jitter on every gate of `circuit`, in order.
pub fn sample_gate_noise(gates: &[GateOp], params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<GateOp>> {
    let mut out = Vec::with_capacity(gates.len() + gates.len() / 4);
    for g in gates {
        match g {
            GateOp::Cz { control, target } => out.extend(sample_noisy_cz(*control, *target, params, rng)?),
            _ => out.extend(sample_noisy_single(g, params, rng)?),
        }
    }
    Ok(out)
}

/// An entry of a circuit with dephasing pulses interleaved.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheduled {
    /// Index into the nominal gate list.
    Gate(usize),
    Pulse(GateOp),
}

/// Places dephasing pulses on every qubit of `circuit`.
pub fn schedule_dephasing(circuit: &CircuitIR, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<Scheduled>> {
    let n = circuit.n_qubits();
    if params.n_qubits() < n {
        return Err(Error::UnknownNoiseTarget(format!("qubit {}", params.n_qubits() + 1)));
    }
    let moments = circuit.moments();
    let layers = moments.len();
    // pulses in row k go before the first gate of moment boundaries[k] on each qubit
    let (boundaries, scale): (Vec<usize>, f64) = match params.policy {
        DephasingPolicy::Midpoint => (vec![layers / 2], 1.0),
        DephasingPolicy::PerMoment => ((1..=layers).collect(), 1.0 / (layers.max(1) as f64).sqrt()),
    };
    let mut pulses: Vec<Vec<Option<GateOp>>> = Vec::with_capacity(boundaries.len());
    for _ in &boundaries {
        let mut row = Vec::with_capacity(n);
        for q in 0..n {
            let xi = gauss(rng, params.dephasing(q)? * scale);
            row.push((xi != 0.0).then(|| GateOp::rz(q, xi * PI)));
        }
        pulses.push(row);
    }
    let mut layer_of = vec![0usize; circuit.gates().len()];
    for (k, m) in moments.iter().enumerate() {
        for &i in m {
            layer_of[i] = k;
        }
    }
    let mut next = vec![0usize; n];
    let mut out = Vec::with_capacity(circuit.gates().len() + n * boundaries.len());
    let flush = |out: &mut Vec<Scheduled>, q: usize, upto: usize, next: &mut [usize]| {
        while next[q] < upto {
            if let Some(p) = &pulses[next[q]][q] {
                out.push(Scheduled::Pulse(p.clone()));
            }
            next[q] += 1;
        }
    };
    for (i, g) in circuit.gates().iter().enumerate() {
        for q in g.qubits() {
            let upto = boundaries.iter().take_while(|b| layer_of[i] >= **b).count();
            flush(&mut out, q, upto, &mut next);
        }
        out.push(Scheduled::Gate(i));
    }
    for q in 0..n {
        flush(&mut out, q, boundaries.len(), &mut next);
    }
    Ok(out)
}

/// Nominal gates of `circuit` with dephasing pulses inserted.
pub fn apply_dephasing(circuit: &CircuitIR, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<GateOp>> {
    Ok(schedule_dephasing(circuit, params, rng)?
        .into_iter()
        .map(|s| match s {
            Scheduled::Gate(i) => circuit.gates()[i].clone(),
            Scheduled::Pulse(p) => p,
        })
        .collect())
}

/// Dephasing pulses plus jitter on every compiled gate. Pulses carry no jitter.
fn noisy_prefix(circuit: &CircuitIR, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<Vec<GateOp>> {
    let schedule = schedule_dephasing(circuit, params, rng)?;
    let mut out = Vec::with_capacity(schedule.len());
    for s in schedule {
        match s {
            Scheduled::Gate(i) => out.extend(sample_gate_noise(&circuit.gates()[i..=i], params, rng)?),
            Scheduled::Pulse(p) => out.push(p),
        }
    }
    Ok(out)
}

/// One noisy realisation of the teleportation program.
pub fn sample_instance(program: &TeleportProgram, params: &NoiseParams, rng: &mut ChaCha8Rng) -> Result<ProgramInstance> {
    let prefix = noisy_prefix(&program.prefix, params, rng)?;
    let mut suffix: [Vec<GateOp>; 4] = Default::default();
    for (slot, compiled) in suffix.iter_mut().zip(&program.suffix) {
        *slot = sample_gate_noise(compiled.gates(), params, rng)?;
    }
    Ok(ProgramInstance { prefix, suffix })
}

/// Generator for draw `index` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub draws: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and `stddev / sqrt(n)` of `samples`, in order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::EmptyRetained);
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Ok(Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            draws: n,
            seed,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PolicyEstimate {
    pub fidelity: McEstimate,
    /// Mean of the per-draw normalized target state.
    pub mean_rho: DensityMatrix,
    /// Draws whose postselection kept nothing; they are left out of the estimate.
    pub empty_draws: usize,
}

#[derive(Clone, Debug)]
pub struct TeleportEstimate {
    pub input: InputState,
    pub ns: PolicyEstimate,
    pub es: PolicyEstimate,
}

struct DrawResult {
    ns: Option<(f64, DensityMatrix)>,
    es: Option<(f64, DensityMatrix)>,
}

fn one_draw(input: &InputState, program: &TeleportProgram, params: &NoiseParams, seed: u64, index: u64) -> Result<DrawResult> {
    let mut rng = draw_rng(seed, index);
    let inst = sample_instance(program, params, &mut rng)?;
    let out = run_teleport(input, &inst, ExecutionMode::FeedForward)?;
    let psi = input.ket();
    let eval = |policy| -> Result<Option<(f64, DensityMatrix)>> {
        match assemble_density(&out, policy) {
            Ok((rho, p)) => {
                let rho = rho.scaled(1.0 / p);
                Ok(Some((rho.expectation_pure(&psi)?, rho)))
            }
            Err(Error::EmptyRetained) => Ok(None),
            Err(e) => Err(e),
        }
    };
    Ok(DrawResult {
        ns: eval(PostselectPolicy::NoSyndrome)?,
        es: eval(PostselectPolicy::ErrorSyndrome)?,
    })
}

fn reduce(results: Vec<Option<(f64, DensityMatrix)>>, seed: u64) -> Result<PolicyEstimate> {
    let empty_draws = results.iter().filter(|r| r.is_none()).count();
    let kept: Vec<(f64, DensityMatrix)> = results.into_iter().flatten().collect();
    let fidelities: Vec<f64> = kept.iter().map(|(f, _)| *f).collect();
    let fidelity = McEstimate::from_samples(&fidelities, seed)?;
    let mut mean_rho = DensityMatrix::zeros(1);
    for (_, rho) in &kept {
        mean_rho.add_assign(rho);
    }
    Ok(PolicyEstimate {
        fidelity,
        mean_rho: mean_rho.scaled(1.0 / kept.len() as f64),
        empty_draws,
    })
}

/// Fidelity estimates over `draws` independent noisy runs. Draw `n` uses
/// stream `n` of `seed`, so the result does not depend on thread count.
pub fn monte_carlo_teleport(
    input: &InputState,
    program: &TeleportProgram,
    params: &NoiseParams,
    draws: usize,
    seed: u64,
) -> Result<TeleportEstimate> {
    if draws == 0 {
        return Err(Error::InvalidShots);
    }
    let results: Vec<DrawResult> = (0..draws as u64)
        .into_par_iter()
        .map(|n| one_draw(input, program, params, seed, n))
        .collect::<Result<_>>()?;
    let (ns, es): (Vec<_>, Vec<_>) = results.into_iter().map(|r| (r.ns, r.es)).unzip();
    Ok(TeleportEstimate {
        input: *input,
        ns: reduce(ns, seed)?,
        es: reduce(es, seed)?,
    })
}

/// `(1 + exp(-pi^2 sigma^2 / 2)) / 2`, the mean of `cos^2(xi pi / 2)`.
pub fn closed_form_gate_fidelity(sigma: f64) -> f64 {
    (1.0 + (-PI * PI * sigma * sigma / 2.0).exp()) / 2.0
}

fn parallel_samples(draws: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> Vec<f64> {
    (0..draws as u64)
        .into_par_iter()
        .map(|n| f(&mut draw_rng(seed, n)))
        .collect()
}

/// Mean of `|<1| R^x(pi + xi pi) |0>|^2`.
pub fn single_gate_fidelity_mc(sigma: f64, draws: usize, seed: u64) -> Result<McEstimate> {
    check_widths("sigma", &[sigma])?;
    let samples = parallel_samples(draws, seed, |rng| {
        let xi = gauss(rng, sigma);
        let s = StateVector::zero(1)
            .applied(&GateOp::rx(0, PI * (1.0 + xi)))
            .expect("one qubit");
        s.amplitudes()[1].norm_sqr()
    });
    McEstimate::from_samples(&samples, seed)
}

/// Mean of `|<1-| R^z_2(xi pi) CZ_12 |1+>|^2`.
pub fn cz_gate_fidelity_mc(sigma: f64, draws: usize, seed: u64) -> Result<McEstimate> {
    check_widths("sigma", &[sigma])?;
    let h = FRAC_1_SQRT_2;
    let one_plus = StateVector::from_amplitudes(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(h, 0.0)])?;
    let one_minus = StateVector::from_amplitudes(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)])?;
    let samples = parallel_samples(draws, seed, |rng| {
        let xi = gauss(rng, sigma);
        let mut s = one_plus.clone();
        s.apply(&GateOp::cz(0, 1)).expect("two qubits");
        s.apply(&GateOp::rz(1, xi * PI)).expect("two qubits");
        one_minus.inner(&s).norm_sqr()
    });
    McEstimate::from_samples(&samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::teleport_prefix;

    const T2: [f64; 8] = [4.73, 2.25, 4.91, 1.25, 6.22, 2.39, 4.7, 2.89];

    #[test]
    fn sigma_d_from_t2() {
        let d = derive_sigma_d(&T2, 0.15).unwrap();
        let table = [0.11407, 0.05426, 0.11841, 0.03014, 0.15, 0.05764, 0.11334, 0.06969];
        for (x, y) in d.iter().zip(table) {
            assert!((x - y).abs() < 5e-6, "{x} vs {y}");
        }
        assert!(derive_sigma_d(&[], 0.15).is_err());
        assert!(derive_sigma_d(&[1.0, 0.0], 0.15).is_err());
    }

    #[test]
    fn zero_width_is_exact() {
        let p = NoiseParams::noiseless(2);
        let mut rng = draw_rng(1, 0);
        let g = GateOp::ry(1, 0.7);
        assert_eq!(sample_noisy_single(&g, &p, &mut rng).unwrap(), vec![g]);
        assert_eq!(sample_noisy_cz(0, 1, &p, &mut rng).unwrap(), vec![GateOp::cz(0, 1)]);
        assert_eq!(single_gate_fidelity_mc(0.0, 10, 3).unwrap().mean, 1.0);
    }

    #[test]
    fn hadamard_like_at_pi_is_hadamard() {
        let m = hadamard_like(PI);
        let h = FRAC_1_SQRT_2;
        let expect = [[h, h], [h, -h]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((m[r][c] - C64::new(expect[r][c], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn non_adjacent_pair_is_unknown() {
        let p = NoiseParams::noiseless(8);
        let mut rng = draw_rng(1, 0);
        assert!(matches!(sample_noisy_cz(0, 2, &p, &mut rng), Err(Error::UnknownNoiseTarget(_))));
        assert!(matches!(p.single(8), Err(Error::UnknownNoiseTarget(_))));
    }

    #[test]
    fn midpoint_pulses_split_the_moments() {
        let prefix = teleport_prefix().unwrap();
        let p = NoiseParams::new(vec![0.0; 8], vec![0.0; 7], vec![0.1; 8], DephasingPolicy::Midpoint).unwrap();
        let gates = apply_dephasing(&prefix, &p, &mut draw_rng(9, 0)).unwrap();
        assert_eq!(gates.len(), prefix.gates().len() + 8);
        let moments = prefix.moments();
        let mid = moments.len() / 2;
        let mut layer_of = vec![0; prefix.gates().len()];
        for (k, m) in moments.iter().enumerate() {
            for &i in m {
                layer_of[i] = k;
            }
        }
        // every pulse on qubit q sits after all of q's gates before the midpoint
        let mut k = 0;
        let mut pulsed = [false; 8];
        for g in &gates {
            if k < prefix.gates().len() && *g == prefix.gates()[k] {
                for q in g.qubits() {
                    assert_eq!(pulsed[q], layer_of[k] >= mid, "gate {k}");
                }
                k += 1;
            } else {
                pulsed[g.qubits()[0]] = true;
            }
        }
        assert!(pulsed.iter().all(|p| *p));
    }

    #[test]
    fn per_moment_pulses_count() {
        let prefix = teleport_prefix().unwrap();
        let p = NoiseParams::new(vec![0.0; 8], vec![0.0; 7], vec![0.1; 8], DephasingPolicy::PerMoment).unwrap();
        let gates = apply_dephasing(&prefix, &p, &mut draw_rng(9, 0)).unwrap();
        assert_eq!(gates.len(), prefix.gates().len() + 8 * prefix.moments().len());
    }

    #[test]
    fn zero_noise_teleport_is_perfect() {
        let prog = TeleportProgram::compile().unwrap();
        let p = NoiseParams::noiseless(8);
        let est = monte_carlo_teleport(&InputState::PlusI, &prog, &p, 3, 7).unwrap();
        assert!((est.ns.fidelity.mean - 1.0).abs() < 1e-12);
        assert!((est.es.fidelity.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn draws_are_reproducible() {
        let prog = TeleportProgram::compile().unwrap();
        let p = NoiseParams::from_t2_star(vec![0.02; 8], vec![0.08; 7], &T2, 0.15, DephasingPolicy::Midpoint).unwrap();
        let a = monte_carlo_teleport(&InputState::Plus, &prog, &p, 16, 5).unwrap();
        let b = monte_carlo_teleport(&InputState::Plus, &prog, &p, 16, 5).unwrap();
        assert_eq!(a.ns.fidelity, b.ns.fidelity);
        assert_eq!(a.es.fidelity, b.es.fidelity);
        let c = monte_carlo_teleport(&InputState::Plus, &prog, &p, 16, 6).unwrap();
        assert_ne!(a.ns.fidelity.mean, c.ns.fidelity.mean);
    }
}
