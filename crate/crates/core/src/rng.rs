//! Seeded pseudo-random source used by every sampler in the crate.
//!
//! The generator is xorshift64* seeded through one round of splitmix64, so a
//! seed of 0 is valid. Uniform reals on `[-1, 1]` are produced from the top
//! 53 bits of each output:
//!
//! ```text
//! state  = splitmix64(seed)            (state 0 replaced by 0x9E3779B97F4A7C15)
//! next() : x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D
//! uniform_pm1() = 2 * ((next() >> 11) as f64 / 2^53) - 1
//! ```
//!
//! Any reimplementation of these three lines reproduces every sampled system,
//! element and functional of this crate.

use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone)]
pub struct XorShiftRng {
    state: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl XorShiftRng {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self {
            state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s },
        }
    }

    /// Derives an independent stream, e.g. one per level or restart.
    pub fn fork(seed: u64, stream: u64) -> Self {
        Self::new(splitmix64(seed ^ splitmix64(stream.wrapping_add(0xA5A5_A5A5))))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform on `[-1, 1)`.
    pub fn uniform_pm1(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    pub fn real<T: Real>(&mut self) -> T {
        T::lit(self.uniform_pm1())
    }

    pub fn complex<T: Real>(&mut self) -> Cx<T> {
        let re = self.real();
        let im = self.real();
        cx(re, im)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.unit() * n as f64) as usize % n.max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = XorShiftRng::new(0x5EED);
        let mut b = XorShiftRng::new(0x5EED);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = XorShiftRng::new(0);
        let v = c.uniform_pm1();
        assert!((-1.0..1.0).contains(&v));
    }

    #[test]
    fn uniform_range_and_mean() {
        let mut r = XorShiftRng::new(7);
        let n = 20_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let v = r.uniform_pm1();
            assert!((-1.0..1.0).contains(&v));
            sum += v;
        }
        assert!((sum / n as f64).abs() < 0.02);
    }
}
