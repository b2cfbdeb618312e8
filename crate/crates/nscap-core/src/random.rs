//! Seeded random generation of distributions, channels and boxes for
//! property tests and the verification suites. All draws go through a
//! counter-based ChaCha stream so that a seed pins every instance exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{BroadcastChannel, ChannelWithState};
use crate::probspace::{CondPmf, Pmf};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Flat-Dirichlet draw via normalized exponentials.
pub fn dirichlet_pmf(rng: &mut SeededRng, n: usize) -> Pmf {
    let mut v = Vec::with_capacity(n);
    let mut total = 0.0;
    for _ in 0..n {
        let u: f64 = rng.random::<f64>();
        let e = -(1.0 - u).ln();
        v.push(e);
        total += e;
    }
    // guard against the measure-zero all-tiny draw
    if total <= 0.0 {
        return Pmf::uniform(n);
    }
    for x in v.iter_mut() {
        *x /= total;
    }
    Pmf::new(v).unwrap_or_else(|_| Pmf::uniform(n))
}

pub fn random_cond_pmf(rng: &mut SeededRng, n_in: usize, n_out: usize) -> CondPmf {
    let rows = (0..n_in).map(|_| dirichlet_pmf(rng, n_out)).collect();
    CondPmf::from_rows(rows).unwrap()
}

pub fn random_channel_with_state(
    rng: &mut SeededRng,
    x: usize,
    y: usize,
    s: usize,
) -> ChannelWithState {
    let kernel = random_cond_pmf(rng, x * s, y);
    let state = dirichlet_pmf(rng, s);
    ChannelWithState::new(kernel, state, x).unwrap()
}

pub fn random_broadcast(rng: &mut SeededRng, x: usize, y_sizes: &[usize]) -> BroadcastChannel {
    let total: usize = y_sizes.iter().product();
    let kernel = random_cond_pmf(rng, x, total);
    BroadcastChannel::new(kernel, y_sizes.to_vec()).unwrap()
}

/// Random semi-deterministic 2-user broadcast channel: user 2's output is a
/// random function of the input, user 1's channel is arbitrary.
pub fn random_semideterministic(
    rng: &mut SeededRng,
    x: usize,
    y1: usize,
    y2: usize,
) -> BroadcastChannel {
    let f: Vec<usize> = (0..x).map(|_| rng.random_range(0..y2)).collect();
    let user1 = random_cond_pmf(rng, x, y1);
    let total = y1 * y2;
    let mut kernel = vec![0.0; x * total];
    for xv in 0..x {
        for y1v in 0..y1 {
            kernel[xv * total + y1v * y2 + f[xv]] = user1.get(xv, y1v);
        }
    }
    BroadcastChannel::new(CondPmf::new(kernel, x, total).unwrap(), vec![y1, y2]).unwrap()
}
