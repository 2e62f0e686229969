//! Seeded, order-stable Monte Carlo reductions.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const CHUNK: u64 = 2048;

/// Mean and standard error of an i.i.d. sample average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub mean: Complex<T>,
    pub stderr: T,
    pub n_samples: u64,
    pub seed: u64,
}

impl<T: Real> McEstimate<T> {
    /// `|mean − reference| ≤ k · stderr`, with an absolute floor for zero-variance estimators.
    pub fn within_sigmas(&self, reference: Complex<T>, k: T) -> bool {
        let floor = T::lit(1e-12) * (T::one() + reference.norm());
        (self.mean - reference).norm() <= k * self.stderr + floor
    }

    pub fn z_score(&self, reference: Complex<T>) -> T {
        (self.mean - reference).norm() / self.stderr
    }
}

/// The random stream owned by sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy)]
struct Moments<T> {
    n: u64,
    mean: Complex<T>,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn empty() -> Self {
        Self { n: 0, mean: Complex::new(T::zero(), T::zero()), m2: T::zero() }
    }

    fn push(&mut self, v: Complex<T>) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean = self.mean + delta / T::from_u64(self.n).unwrap();
        let delta2 = v - self.mean;
        self.m2 = self.m2 + delta.re * delta2.re + delta.im * delta2.im;
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb, nn) = (T::from_u64(self.n).unwrap(), T::from_u64(other.n).unwrap(), T::from_u64(n).unwrap());
        let delta = other.mean - self.mean;
        Self { n, mean: self.mean + delta * (nb / nn), m2: self.m2 + other.m2 + delta.norm_sqr() * na * nb / nn }
    }
}

/// Averages `sample(rng, index)` over `n_samples` independent streams.
///
/// Chunks are reduced in a fixed order, so the result is bit-stable for a given seed
/// regardless of the thread pool size.
pub fn estimate<T, F>(n_samples: u64, seed: u64, sample: F) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng, u64) -> Complex<T> + Sync,
{
    let per = estimate_many(n_samples, seed, 1, |rng, i, out| out[0] = sample(rng, i))?;
    Ok(per[0])
}

/// Like [`estimate`], but each sample contributes `width` paired values.
pub fn estimate_many<T, F>(n_samples: u64, seed: u64, width: usize, sample: F) -> Result<Vec<McEstimate<T>>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng, u64, &mut [Complex<T>]) + Sync,
{
    if n_samples == 0 {
        return Err(crate::error::invalid("n_samples", "must be positive"));
    }
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<std::result::Result<Vec<Moments<T>>, u64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::empty(); width];
            let mut buf = vec![Complex::new(T::zero(), T::zero()); width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_samples) {
                let mut rng = sample_rng(seed, i);
                sample(&mut rng, i, &mut buf);
                for (m, v) in acc.iter_mut().zip(&buf) {
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(i);
                    }
                    m.push(*v);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Moments::empty(); width];
    for chunk in chunks {
        let chunk = chunk.map_err(|index| Error::NonFinite { index })?;
        for (t, m) in total.iter_mut().zip(chunk) {
            *t = t.merge(m);
        }
    }
    Ok(total
        .into_iter()
        .map(|m| {
            let n = T::from_u64(m.n).unwrap();
            let var = if m.n > 1 { m.m2 / (n - T::one()) } else { T::zero() };
            McEstimate { mean: m.mean, stderr: (var / n).sqrt(), n_samples: m.n, seed }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_functional_has_zero_stderr() {
        let e = estimate::<f64, _>(5000, 1, |_, _| Complex::new(1.0, 0.0)).unwrap();
        assert_eq!(e.mean, Complex::new(1.0, 0.0));
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn stderr_matches_direct_formula() {
        let draws = |i: u64| sample_rng(3, i).random::<f64>();
        let n = 3000_u64;
        let xs: Vec<f64> = (0..n).map(draws).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let e = estimate::<f64, _>(n, 3, |rng, _| Complex::new(rng.random::<f64>(), 0.0)).unwrap();
        assert!((e.mean.re - mean).abs() < 1e-12);
        assert!((e.stderr - (var / n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nan_reports_sample_index() {
        let err = estimate::<f64, _>(10_000, 0, |_, i| Complex::new(if i == 4321 { f64::NAN } else { 0.0 }, 0.0)).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: 4321 });
    }

    #[test]
    fn reduction_is_bit_stable() {
        let run = || estimate::<f64, _>(20_000, 9, |rng, _| Complex::new(rng.random::<f64>(), 0.0)).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
