//! Seeded random generators and test-signal factories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::{TorusSignal, C64};

/// Generator for trial `index` under a run-wide `seed`; independent streams.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex white noise of length `n`.
pub fn gaussian_signal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TorusSignal {
    TorusSignal::from_vec_unchecked((0..n).map(|_| gaussian_complex(rng)).collect())
}

pub fn gaussian_real_signal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TorusSignal {
    TorusSignal::from_vec_unchecked((0..n).map(|_| C64::new(rng.sample(StandardNormal), 0.0)).collect())
}

pub fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
