//! Counter-based random number streams.
//!
//! Every consumer of randomness derives its own stream from a master seed,
//! a textual label, and an index (`(seed, "gw-sample", worker)` and the
//! like). Output is a pure function of `(stream key, counter)`, so results
//! are reproducible across platforms and independent of the order in which
//! parallel workers run. Not cryptographically secure.

/// Derive a stream key from a master seed, a label, and an index.
pub fn derive_stream(seed: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the seed, label bytes, and index, then a splitmix64
    // finalizer to spread low-entropy inputs across all 64 bits.
    const FNV_OFFSET: u64 = 0xcbf29ce484222325;
    const FNV_PRIME: u64 = 0x100000001b3;
    let mut h = FNV_OFFSET;
    for b in seed
        .to_le_bytes()
        .iter()
        .chain(label.as_bytes())
        .chain(index.to_le_bytes().iter())
    {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    mix(h)
}

#[inline]
fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator: output depends only on
/// `(key, counter)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self {
            key,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Convenience constructor for `derive_stream` + `new`.
    pub fn from_seed(seed: u64, label: &str, index: u64) -> Self {
        Self::new(derive_stream(seed, label, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix(self.key ^ c.wrapping_mul(0xd1342543de82ef95))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform integer in `[0, bound)` without modulo bias (Lemire).
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Standard normal via Box-Muller; the second draw is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - uniform() lies in (0, 1], keeping the log finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let mag = crate::math::sqrt(-2.0 * crate::math::ln(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(mag * crate::math::sin(angle));
        mag * crate::math::cos(angle)
    }

    /// Fill `out` with an isotropic random unit vector.
    pub fn unit_vector(&mut self, out: &mut [f64]) {
        loop {
            let mut norm_sq = 0.0;
            for x in out.iter_mut() {
                let z = self.normal();
                *x = z;
                norm_sq += z * z;
            }
            if norm_sq > 1e-24 {
                let inv = 1.0 / crate::math::sqrt(norm_sq);
                for x in out.iter_mut() {
                    *x *= inv;
                }
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_sequence() {
        let mut a = CounterRng::from_seed(7, "stream", 3);
        let mut b = CounterRng::from_seed(7, "stream", 3);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_labels_and_indices_decorrelate() {
        let mut a = CounterRng::from_seed(7, "stream", 0);
        let mut b = CounterRng::from_seed(7, "stream", 1);
        let mut c = CounterRng::from_seed(7, "other", 0);
        let va: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let vc: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        assert_ne!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn uniform_range_and_mean() {
        let mut rng = CounterRng::from_seed(11, "uniform", 0);
        let mut sum = 0.0;
        let n = 100_000;
        for _ in 0..n {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn below_is_unbiased_enough_and_in_range() {
        let mut rng = CounterRng::from_seed(3, "below", 0);
        let mut counts = [0u32; 7];
        for _ in 0..70_000 {
            counts[rng.below(7) as usize] += 1;
        }
        for c in counts {
            assert!((c as i64 - 10_000).abs() < 600, "count {c}");
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = CounterRng::from_seed(5, "normal", 0);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = rng.normal();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = CounterRng::from_seed(9, "unit", 0);
        let mut v = [0.0; 6];
        for _ in 0..100 {
            rng.unit_vector(&mut v);
            let norm_sq: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm_sq - 1.0).abs() < 1e-12);
        }
    }
}
