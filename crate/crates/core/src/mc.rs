//! Deterministic chunked Monte Carlo.
//!
//! A run of `N` samples is split into fixed-size chunks. Chunk `i` draws
//! from `ChaCha8Rng` seeded with `seed` on stream `i`, and chunk results
//! are reduced in chunk order, so estimates do not depend on the number of
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Samples per chunk.
pub const CHUNK: usize = 1 << 14;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `f(rng, samples_in_chunk)` for every chunk and returns the results
/// in chunk order.
pub fn map_chunks<T, F>(samples: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = if c + 1 == chunks { samples - c * CHUNK } else { CHUNK };
            let mut rng = chunk_rng(seed, c as u64);
            f(&mut rng, len)
        })
        .collect()
}

/// Running sum and sum of squares of i.i.d. draws.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, y: f64) {
        self.count += 1;
        self.sum += y;
        self.sum_sq += y * y;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// Scales `mean(Y)` by `factor`, with the matching standard error.
    pub fn from_moments(m: &Moments, factor: f64, seed: u64) -> Self {
        Self {
            value: factor * m.mean(),
            std_error: factor.abs() * m.std_error(),
            samples: m.count,
            seed,
        }
    }
}

/// Ordered reduction of per-chunk moments.
pub fn reduce(parts: &[Moments]) -> Moments {
    let mut total = Moments::default();
    for p in parts {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_thread_count() {
        let run = || {
            let parts = map_chunks(100_000, 9, |rng, len| {
                let mut m = Moments::default();
                for _ in 0..len {
                    m.push(rng.random::<f64>());
                }
                m
            });
            reduce(&parts)
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a.sum.to_bits(), b.sum.to_bits());
        assert_eq!(a.count, 100_000);
        assert!((a.mean() - 0.5).abs() < 5.0 * a.std_error());
    }

    #[test]
    fn moments_of_constant() {
        let mut m = Moments::default();
        for _ in 0..10 {
            m.push(2.0);
        }
        assert_eq!(m.mean(), 2.0);
        assert_eq!(m.std_error(), 0.0);
    }
}
