//! Single-qubit state tomography from Pauli expectations.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, StateVector, C64};

/// Classical estimate-and-resend limit on the average fidelity.
pub const CLASSICAL_BOUND: f64 = 2.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Nearest point of the unit ball.
    pub fn projected(&self) -> Self {
        let r = self.norm();
        if r <= 1.0 {
            *self
        } else {
            Self::new(self.x / r, self.y / r, self.z / r)
        }
    }
}

fn check_single(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: rho.n_qubits(),
        });
    }
    Ok(())
}

fn exact_bloch(rho: &DensityMatrix) -> BlochVector {
    let tr = rho.trace();
    let r01 = rho.get(0, 1);
    let r10 = rho.get(1, 0);
    BlochVector::new(
        (r01 + r10).re / tr,
        (r10 - r01).im / tr,
        (rho.get(0, 0).re - rho.get(1, 1).re) / tr,
    )
}

/// `(<X>, <Y>, <Z>)` of a one-qubit state. With `shots`, each component is the
/// mean of that many simulated projective measurements.
pub fn expectations_from_state<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<BlochVector> {
    check_single(rho)?;
    let exact = exact_bloch(rho);
    let Some(n) = shots else {
        return Ok(exact);
    };
    if n == 0 {
        return Err(Error::InvalidShots);
    }
    let mut sample = |e: f64| -> Result<f64> {
        let p = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        let dist = Binomial::new(n, p).map_err(|err| Error::InvalidNoise(err.to_string()))?;
        let k = dist.sample(rng);
        Ok(2.0 * k as f64 / n as f64 - 1.0)
    };
    Ok(BlochVector::new(sample(exact.x)?, sample(exact.y)?, sample(exact.z)?))
}

/// `(I + r.sigma) / 2` with `r` projected onto the Bloch ball.
pub fn reconstruct(b: &BlochVector) -> Result<DensityMatrix> {
    if !b.components().iter().all(|c| c.is_finite()) {
        return Err(Error::InvalidAngle(f64::NAN));
    }
    let r = b.projected();
    let m = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new((1.0 + r.z) / 2.0, 0.0),
            C64::new(r.x / 2.0, -r.y / 2.0),
            C64::new(r.x / 2.0, r.y / 2.0),
            C64::new((1.0 - r.z) / 2.0, 0.0),
        ],
    );
    DensityMatrix::from_matrix(m)
}

/// `<psi|rho|psi>`.
pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    rho.expectation_pure(psi)
}

/// `(1/2) tr|a - b|` for one-qubit states, half the Bloch distance.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_single(a)?;
    check_single(b)?;
    let (p, q) = (exact_bloch(a), exact_bloch(b));
    let d = BlochVector::new(p.x - q.x, p.y - q.y, p.z - q.z);
    Ok(d.norm() / 2.0)
}
