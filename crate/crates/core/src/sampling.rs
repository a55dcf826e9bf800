//! Seedable random streams and the handful of distributions the benchmark
//! needs.
//!
//! Every stream is a ChaCha8 keystream. The 64-bit seed becomes the key
//! (little-endian, zero padded to 256 bits by `seed_from_u64`) and the stream id
//! selects one of 2^64 independent nonces, so `(seed, stream)` pairs never
//! overlap. ChaCha is specified bit-for-bit, so sequences are identical on
//! every platform.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};

/// Retry budget when rejecting within-block fixed points.
const MAX_DERANGEMENT_RETRIES: usize = 100;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh stream sharing this stream's seed but with a different id.
    pub fn sibling(&self, stream: u64) -> Self {
        Self::new(self.seed, stream)
    }

    /// Uniform draw on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Negative binomial draw with expectation `mean` and variance
/// `mean + mean^2 / dispersion`, via the gamma-Poisson mixture.
pub fn nb_sample(mean: f64, dispersion: f64, rng: &mut RngStream) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::Domain(format!("nb mean must be >= 0, got {mean}")));
    }
    if !(dispersion > 0.0) || !dispersion.is_finite() {
        return Err(Error::Domain(format!(
            "nb dispersion must be > 0, got {dispersion}"
        )));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let gamma = Gamma::new(dispersion, mean / dispersion)
        .map_err(|e| Error::Domain(format!("gamma({dispersion}, {}): {e}", mean / dispersion)))?;
    let rate: f64 = gamma.sample(rng);
    poisson_sample(rate, rng)
}

fn poisson_sample(rate: f64, rng: &mut RngStream) -> Result<u64> {
    if rate <= 0.0 {
        return Ok(0);
    }
    let poisson =
        Poisson::new(rate).map_err(|e| Error::Domain(format!("poisson({rate}): {e}")))?;
    let k: f64 = poisson.sample(rng);
    Ok(k as u64)
}

/// `k ~ Binomial(n, p)`.
pub fn binomial_sample(n: u64, p: f64, rng: &mut RngStream) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binomial p must lie in [0, 1], got {p}")));
    }
    if n == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    let binomial = Binomial::new(n, p).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(binomial.sample(rng))
}

/// Index blocks keyed by tissue, in ascending tissue order.
fn tissue_blocks(tissue_ids: &[usize]) -> Result<BTreeMap<usize, Vec<usize>>> {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &t) in tissue_ids.iter().enumerate() {
        blocks.entry(t).or_default().push(i);
    }
    if let Some((t, _)) = blocks.iter().find(|(_, b)| b.len() < 2) {
        return Err(Error::Argument(format!(
            "tissue {t} has a single sample and cannot be paired"
        )));
    }
    Ok(blocks)
}

/// Uniform random permutation that maps every index to an index of the same
/// tissue. Fixed points are allowed.
pub fn grouped_permutation(tissue_ids: &[usize], rng: &mut RngStream) -> Result<Vec<usize>> {
    let blocks = tissue_blocks(tissue_ids)?;
    let mut perm = vec![0; tissue_ids.len()];
    for block in blocks.values() {
        let mut image = block.clone();
        rng.shuffle(&mut image);
        for (&from, &to) in block.iter().zip(&image) {
            perm[from] = to;
        }
    }
    Ok(perm)
}

/// Like [`grouped_permutation`] but with no fixed points: each block is
/// reshuffled until it is a derangement. Used to draw partners for the
/// pairwise losses, where a self-pair carries no signal.
pub fn grouped_derangement(tissue_ids: &[usize], rng: &mut RngStream) -> Result<Vec<usize>> {
    let blocks = tissue_blocks(tissue_ids)?;
    let mut perm = vec![0; tissue_ids.len()];
    for (tissue, block) in &blocks {
        let mut image = block.clone();
        let mut tries = 0;
        loop {
            rng.shuffle(&mut image);
            if block.iter().zip(&image).all(|(a, b)| a != b) {
                break;
            }
            tries += 1;
            if tries >= MAX_DERANGEMENT_RETRIES {
                return Err(Error::Argument(format!(
                    "no fixed-point-free shuffle found for tissue {tissue}"
                )));
            }
        }
        for (&from, &to) in block.iter().zip(&image) {
            perm[from] = to;
        }
    }
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn moments(xs: &[u64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 0);
        let xs: Vec<u64> = (0..10_000).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..10_000).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn streams_are_distinct() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let xs: Vec<u64> = (0..64).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..64).map(|_| b.next_u64()).collect();
        assert!(xs.iter().zip(&ys).all(|(x, y)| x != y));
    }

    #[test]
    fn nb_zero_mean_is_zero() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..1000 {
            assert_eq!(nb_sample(0.0, 5.0, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn nb_rejects_bad_parameters() {
        let mut rng = RngStream::new(7, 0);
        assert!(matches!(nb_sample(-1.0, 2.0, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(nb_sample(1.0, 0.0, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(nb_sample(f64::NAN, 1.0, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn nb_poisson_limit_moments() {
        let mut rng = RngStream::new(1, 0);
        let xs: Vec<u64> = (0..1_000_000)
            .map(|_| nb_sample(5.0, 1e6, &mut rng).unwrap())
            .collect();
        let (m, v) = moments(&xs);
        assert!((m - 5.0).abs() / 5.0 < 0.02, "mean {m}");
        assert!((v - 5.0).abs() / 5.0 < 0.05, "var {v}");
    }

    #[test]
    fn nb_overdispersed_variance() {
        let mut rng = RngStream::new(2, 0);
        let xs: Vec<u64> = (0..1_000_000)
            .map(|_| nb_sample(5.0, 2.0, &mut rng).unwrap())
            .collect();
        let (_, v) = moments(&xs);
        assert!((v - 17.5).abs() / 17.5 < 0.05, "var {v}");
    }

    #[test]
    fn binomial_edges_and_domain() {
        let mut rng = RngStream::new(3, 0);
        assert_eq!(binomial_sample(7, 0.0, &mut rng).unwrap(), 0);
        assert_eq!(binomial_sample(7, 1.0, &mut rng).unwrap(), 7);
        assert!(binomial_sample(7, 1.5, &mut rng).is_err());
        assert!(binomial_sample(7, -0.1, &mut rng).is_err());
    }

    #[test]
    fn binomial_mean() {
        let mut rng = RngStream::new(4, 0);
        let xs: Vec<u64> = (0..1_000_000)
            .map(|_| binomial_sample(100, 0.3, &mut rng).unwrap())
            .collect();
        let (m, _) = moments(&xs);
        assert!((m - 30.0).abs() / 30.0 < 0.01, "mean {m}");
        assert!(xs.iter().all(|&k| k <= 100));
    }

    #[test]
    fn permutation_of_pair() {
        let mut rng = RngStream::new(5, 0);
        let mut seen = [false; 2];
        for _ in 0..100 {
            let p = grouped_permutation(&[0, 0], &mut rng).unwrap();
            if p == vec![0, 1] {
                seen[0] = true;
            } else {
                assert_eq!(p, vec![1, 0]);
                seen[1] = true;
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn permutation_block_closure() {
        let mut rng = RngStream::new(6, 0);
        let ids = [0, 0, 1, 1, 1];
        for _ in 0..200 {
            let p = grouped_permutation(&ids, &mut rng).unwrap();
            for i in 0..ids.len() {
                assert_eq!(ids[p[i]], ids[i]);
            }
            let mut sorted = p.clone();
            sorted.sort();
            assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn permutation_uniform_on_block_of_three() {
        let mut rng = RngStream::new(8, 0);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let draws = 100_000;
        for _ in 0..draws {
            *counts
                .entry(grouped_permutation(&[0, 0, 0], &mut rng).unwrap())
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (p, c) in counts {
            let f = c as f64 / draws as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "{p:?} freq {f}");
        }
    }

    #[test]
    fn singleton_tissue_is_named() {
        let mut rng = RngStream::new(9, 0);
        let err = grouped_permutation(&[0, 0, 3], &mut rng).unwrap_err();
        assert!(err.to_string().contains("tissue 3"), "{err}");
        assert!(grouped_derangement(&[1], &mut rng).is_err());
    }

    #[test]
    fn derangement_has_no_fixed_points() {
        let mut rng = RngStream::new(10, 0);
        let ids = [0, 1, 0, 1, 1, 2, 2, 0, 2, 2];
        for _ in 0..500 {
            let p = grouped_derangement(&ids, &mut rng).unwrap();
            for i in 0..ids.len() {
                assert_ne!(p[i], i);
                assert_eq!(ids[p[i]], ids[i]);
            }
        }
    }
}
