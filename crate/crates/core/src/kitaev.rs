//! Spin-mapped trivial and Kitaev pairing Hamiltonians, their spectra and the
//! zero-mode logical states of a single chain.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorana::{jordan_wigner, ChainLayout, MajoranaLabel, Side};
use crate::pauli::PauliString;
use crate::state::{StateVector, C64};

/// Largest chain built densely unless the caller raises the cap.
pub const DEFAULT_MAX_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    /// On-site pairing `t sum_n c_n^dag c_n`.
    Trivial,
    /// Neighbour pairing that leaves the two edge modes unpaired.
    Kitaev,
}

/// Energy reference of the Kitaev Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OffsetConvention {
    /// `t/2 sum (1 + i g_{n,r} g_{n+1,l})`: ground energy 0, levels `t * sum j_n`.
    Raw,
    /// Hopping-plus-pairing form in fermion operators; equals `-t sum X_n X_{n+1}`.
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    pub sites: usize,
    pub t: f64,
    pub kind: ChainKind,
    pub offset: OffsetConvention,
}

impl ChainSpec {
    pub fn new(sites: usize, t: f64, kind: ChainKind, offset: OffsetConvention) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 sites, got {sites}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidChain(format!("energy scale must be positive, got {t}")));
        }
        if kind == ChainKind::Trivial && offset == OffsetConvention::Shifted {
            return Err(Error::InvalidChain(
                "the shifted convention only exists for the kitaev chain".into(),
            ));
        }
        Ok(Self {
            sites,
            t,
            kind,
            offset,
        })
    }
}

/// Dense matrix of a Pauli string over `p.len()` qubits.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<C64> {
    let dim = 1usize << p.len();
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for col in 0..dim {
        let mut e = StateVector::basis(p.len(), col);
        e.apply(&crate::state::GateOp::Pauli(p.clone()))
            .expect("length checked");
        for (row, a) in e.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    m
}

fn majorana_matrix(layout: &ChainLayout, site: usize, side: Side) -> DMatrix<C64> {
    let label = MajoranaLabel::new(1, site, side);
    pauli_matrix(&jordan_wigner(&label, layout).expect("site within chain"))
}

/// Annihilation operator `c_n = (g_{n,l} + i g_{n,r})/2` for 1-based `site`.
fn annihilator(layout: &ChainLayout, site: usize) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    (majorana_matrix(layout, site, Side::Left) + majorana_matrix(layout, site, Side::Right) * i)
        .map(|z| z * 0.5)
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    build_hamiltonian_capped(spec, DEFAULT_MAX_SITES)
}

pub fn build_hamiltonian_capped(spec: &ChainSpec, max_sites: usize) -> Result<DMatrix<f64>> {
    if spec.sites > max_sites {
        return Err(Error::InvalidChain(format!(
            "{} sites exceeds the dense limit of {max_sites}",
            spec.sites
        )));
    }
    let n = spec.sites;
    let layout = ChainLayout::new(n, 1)?;
    let dim = 1usize << n;
    let id = DMatrix::<C64>::identity(dim, dim);
    let i = C64::new(0.0, 1.0);
    let half_t = C64::new(spec.t / 2.0, 0.0);
    let mut h = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));

    match (spec.kind, spec.offset) {
        (ChainKind::Trivial, _) => {
            for site in 1..=n {
                let pair = majorana_matrix(&layout, site, Side::Left)
                    * majorana_matrix(&layout, site, Side::Right);
                h += (&id + pair * i) * half_t;
            }
        }
        (ChainKind::Kitaev, OffsetConvention::Raw) => {
            for site in 1..n {
                let pair = majorana_matrix(&layout, site, Side::Right)
                    * majorana_matrix(&layout, site + 1, Side::Left);
                h += (&id + pair * i) * half_t;
            }
        }
        (ChainKind::Kitaev, OffsetConvention::Shifted) => {
            let t = C64::new(spec.t, 0.0);
            for site in 1..n {
                let c = annihilator(&layout, site);
                let c_next = annihilator(&layout, site + 1);
                let bond = -(c_next.adjoint() * &c) - c.adjoint() * &c_next
                    + &c * &c_next
                    + c_next.adjoint() * c.adjoint();
                h += bond * t;
            }
        }
    }

    let imag = h.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    debug_assert!(imag < 1e-12, "spin-mapped pairing hamiltonians are real");
    Ok(h.map(|z| z.re))
}

/// An energy level and how many eigenvalues fall on it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

/// Sorted eigenvalues of `h`.
pub fn eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Groups sorted eigenvalues into levels, merging values within `tol`.
pub fn group_levels(sorted: &[f64], tol: f64) -> Vec<Level> {
    let mut levels: Vec<Level> = Vec::new();
    for &e in sorted {
        match levels.last_mut() {
            Some(l) if (e - l.energy).abs() <= tol => l.multiplicity += 1,
            _ => levels.push(Level {
                energy: e,
                multiplicity: 1,
            }),
        }
    }
    levels
}

/// Spectrum of a chain with degeneracy detection at `1e-9 * t`.
pub fn spectrum(spec: &ChainSpec) -> Result<Vec<Level>> {
    let ev = eigenvalues(&build_hamiltonian(spec)?);
    Ok(group_levels(&ev, 1e-9 * spec.t))
}

/// Zero-mode states of one chain. The tilde states exist only for two sites.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    pub zero: StateVector,
    pub one: StateVector,
    pub tilde: Option<(StateVector, StateVector)>,
}

fn uniform_product(n: usize, signs: &[f64]) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let mut s = StateVector::from_amplitudes(vec![C64::new(h, 0.0), C64::new(h * signs[0], 0.0)])
        .expect("single qubit");
    for sign in &signs[1..n] {
        let q = StateVector::from_amplitudes(vec![C64::new(h, 0.0), C64::new(h * sign, 0.0)])
            .expect("single qubit");
        s = s.tensor(&q);
    }
    s
}

fn combine(a: &StateVector, b: &StateVector, sign: f64) -> StateVector {
    let mut out = a.clone();
    out.add_scaled(b, C64::new(sign, 0.0));
    out.scale(C64::new(FRAC_1_SQRT_2, 0.0));
    out
}

/// `|0_L> = (|+..+> + |-..->)/sqrt2`, `|1_L> = (|+..+> - |-..->)/sqrt2`, and for
/// two sites `|~0_L> = (|-+> + |+->)/sqrt2`, `|~1_L> = (|-+> - |+->)/sqrt2`.
pub fn logical_states(n: usize) -> Result<LogicalBasis> {
    if n < 2 {
        return Err(Error::InvalidChain(format!("need at least 2 sites, got {n}")));
    }
    let plus = uniform_product(n, &vec![1.0; n]);
    let minus = uniform_product(n, &vec![-1.0; n]);
    let tilde = (n == 2).then(|| {
        let mp = uniform_product(2, &[-1.0, 1.0]);
        let pm = uniform_product(2, &[1.0, -1.0]);
        (combine(&mp, &pm, 1.0), combine(&mp, &pm, -1.0))
    });
    Ok(LogicalBasis {
        zero: combine(&plus, &minus, 1.0),
        one: combine(&plus, &minus, -1.0),
        tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::GateOp;

    fn spec(n: usize, kind: ChainKind, offset: OffsetConvention) -> ChainSpec {
        ChainSpec::new(n, 1.0, kind, offset).unwrap()
    }

    fn energies(levels: &[Level]) -> Vec<(f64, usize)> {
        levels.iter().map(|l| ((l.energy * 1e9).round() / 1e9, l.multiplicity)).collect()
    }

    #[test]
    fn two_site_spectra() {
        let k = spectrum(&spec(2, ChainKind::Kitaev, OffsetConvention::Raw)).unwrap();
        assert_eq!(energies(&k), vec![(0.0, 2), (1.0, 2)]);
        let t = spectrum(&spec(2, ChainKind::Trivial, OffsetConvention::Raw)).unwrap();
        assert_eq!(energies(&t), vec![(0.0, 1), (1.0, 2), (2.0, 1)]);
        let s = spectrum(&spec(2, ChainKind::Kitaev, OffsetConvention::Shifted)).unwrap();
        assert_eq!(energies(&s), vec![(-1.0, 2), (1.0, 2)]);
    }

    #[test]
    fn shifted_form_is_minus_t_xx() {
        for n in 2..=4 {
            let h = build_hamiltonian(&spec(n, ChainKind::Kitaev, OffsetConvention::Shifted)).unwrap();
            let mut expect = DMatrix::<f64>::zeros(1 << n, 1 << n);
            for q in 0..n - 1 {
                let mut f = vec![crate::pauli::Pauli::I; n];
                f[q] = crate::pauli::Pauli::X;
                f[q + 1] = crate::pauli::Pauli::X;
                let xx = pauli_matrix(&PauliString::new(crate::pauli::Phase::ONE, f));
                expect -= xx.map(|z| z.re);
            }
            assert!((h - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn kitaev_levels_are_evenly_degenerate() {
        for n in 2..=6 {
            for l in spectrum(&spec(n, ChainKind::Kitaev, OffsetConvention::Raw)).unwrap() {
                assert_eq!(l.multiplicity % 2, 0, "N={n} level {}", l.energy);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(ChainSpec::new(1, 1.0, ChainKind::Kitaev, OffsetConvention::Raw).is_err());
        assert!(ChainSpec::new(2, 0.0, ChainKind::Kitaev, OffsetConvention::Raw).is_err());
        assert!(ChainSpec::new(2, 1.0, ChainKind::Trivial, OffsetConvention::Shifted).is_err());
        let big = spec(5, ChainKind::Kitaev, OffsetConvention::Raw);
        assert!(build_hamiltonian_capped(&big, 4).is_err());
    }

    #[test]
    fn two_site_logical_states() {
        let b = logical_states(2).unwrap();
        // (|++> + |-->)/sqrt2 = (|00> + |11>)/sqrt2
        let z: Vec<f64> = b.zero.amplitudes().iter().map(|a| a.re).collect();
        let expect = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        assert!(z.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
        let (t0, t1) = b.tilde.clone().unwrap();
        let z1 = b.zero.clone().applied(&GateOp::Pauli("ZI".parse().unwrap())).unwrap();
        assert!((z1.inner(&t0).re - 1.0).abs() < 1e-12);
        let z2 = b.one.clone().applied(&GateOp::Pauli("-1.IZ".parse().unwrap())).unwrap();
        assert!((z2.inner(&t1).re - 1.0).abs() < 1e-12);
        let all = [&b.zero, &b.one, &t0, &t1];
        for (i, a) in all.iter().enumerate() {
            for (j, c) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(c).norm() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logical_states_have_zero_energy() {
        for n in 2..=5 {
            let h = build_hamiltonian(&spec(n, ChainKind::Kitaev, OffsetConvention::Raw)).unwrap();
            let b = logical_states(n).unwrap();
            for s in [&b.zero, &b.one] {
                let v = nalgebra::DVector::from_iterator(1 << n, s.amplitudes().iter().map(|a| a.re));
                assert!((&h * v).norm() < 1e-12);
            }
            assert!(b.zero.inner(&b.one).norm() < 1e-12);
        }
    }

    #[test]
    fn edge_fermion_creation_maps_zero_to_one() {
        for n in 2..=4 {
            let layout = ChainLayout::new(n, 1).unwrap();
            let i = C64::new(0.0, 1.0);
            let f_dag = (majorana_matrix(&layout, 1, Side::Left)
                - majorana_matrix(&layout, n, Side::Right) * i)
                .map(|z| z * 0.5);
            let b = logical_states(n).unwrap();
            let v0 = nalgebra::DVector::from_column_slice(b.zero.amplitudes());
            let v1 = nalgebra::DVector::from_column_slice(b.one.amplitudes());
            let img = &f_dag * v0;
            let overlap = v1.dotc(&img);
            assert!((overlap.norm() - img.norm()).abs() < 1e-12);
            assert!((img.norm() - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn phase_flips_move_between_code_and_error_spaces() {
        let b = logical_states(2).unwrap();
        let (t0, t1) = b.tilde.clone().unwrap();
        for op in ["ZI", "IZ"] {
            let p: PauliString = op.parse().unwrap();
            for s in [&b.zero, &b.one] {
                let img = s.clone().applied(&GateOp::Pauli(p.clone())).unwrap();
                let in_tilde = img.inner(&t0).norm_sqr() + img.inner(&t1).norm_sqr();
                assert!((in_tilde - 1.0).abs() < 1e-12);
            }
        }
        let zz: PauliString = "ZZ".parse().unwrap();
        let z0 = b.zero.clone().applied(&GateOp::Pauli(zz.clone())).unwrap();
        let z1 = b.one.clone().applied(&GateOp::Pauli(zz)).unwrap();
        assert!((z0.inner(&b.zero).re - 1.0).abs() < 1e-12);
        assert!((z1.inner(&b.one).re + 1.0).abs() < 1e-12);
        // a bit flip stays in the code space: an undetectable logical error
        let x0 = b.zero.clone().applied(&GateOp::Pauli("XI".parse().unwrap())).unwrap();
        assert!((x0.inner(&b.one).re - 1.0).abs() < 1e-12);
    }
}
