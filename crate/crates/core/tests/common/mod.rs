//! Seeded random channels shared by the integration tests.

#![allow(dead_code)]

use decom_core::linalg::{c, CMatrix, C64};
use decom_core::{ChiMatrix, KrausChannel};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    gaussian(rng, d, d).qr().q()
}

/// Generic CPTP channel: `r` Kraus operators cut from a random `2r × 2`
/// isometry.
pub fn random_channel(rng: &mut ChaCha8Rng, r: usize) -> KrausChannel {
    let v = gaussian(rng, 2 * r, 2).qr().q();
    let ops = (0..r)
        .map(|k| v.view((2 * k, 0), (2, 2)).into_owned())
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are complete")
}

/// Unital channel: a convex mixture of `m` random unitaries.
pub fn random_unital(rng: &mut ChaCha8Rng, m: usize) -> KrausChannel {
    let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let ops = w
        .iter()
        .map(|wi| random_unitary(rng, 2) * C64::from((wi / total).sqrt()))
        .collect();
    KrausChannel::new(ops).expect("weights sum to one")
}

/// Pauli channel with random weights.
pub fn random_pauli_chi(rng: &mut ChaCha8Rng) -> ChiMatrix {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let total: f64 = w.iter().sum();
    ChiMatrix::from_diagonal(w.map(|x| x / total))
}

pub fn random_state(rng: &mut ChaCha8Rng) -> decom_core::DensityMatrix {
    let g = gaussian(rng, 2, 2);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    decom_core::DensityMatrix::new(rho / tr).expect("Wishart sample is a state")
}
