//! Scene randomness: xoshiro256++ seeded through SplitMix64, the reference
//! generators of Blackman and Vigna, so scenes can be reproduced from the
//! seed alone in any language.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub const GENERATOR_NAME: &str = "xoshiro256++ (state from SplitMix64 of the seed)";

#[derive(Debug, Clone)]
pub struct SceneRng(Xoshiro256PlusPlus);

impl SceneRng {
    pub fn new(seed: u64) -> Self {
        SceneRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` from the top 53 bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal by Box-Muller; consumes two uniforms, keeps the
    /// cosine branch.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_xoshiro::SplitMix64;

    #[test]
    fn splitmix_reference_outputs() {
        let mut sm = SplitMix64::seed_from_u64(1234567);
        let got: Vec<u64> = (0..5).map(|_| sm.next_u64()).collect();
        assert_eq!(
            got,
            [
                6457827717110365317,
                3203168211198807973,
                9817491932198370423,
                4593380528125082431,
                16408922859458223821
            ]
        );
    }

    fn reference_splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn reference_xoshiro(s: &mut [u64; 4]) -> u64 {
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    #[test]
    fn matches_reference_algorithm() {
        for seed in [0u64, 1, 42, u64::MAX] {
            let mut sm = seed;
            let mut state = [0u64; 4];
            for w in &mut state {
                *w = reference_splitmix(&mut sm);
            }
            let mut rng = SceneRng::new(seed);
            for _ in 0..1000 {
                assert_eq!(rng.next_u64(), reference_xoshiro(&mut state));
            }
        }
    }

    #[test]
    fn uniform_and_gaussian_moments() {
        let mut rng = SceneRng::new(7);
        let n = 200_000;
        let u: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        assert!(u.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = u.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let gm = g.iter().sum::<f64>() / n as f64;
        let gv = g.iter().map(|x| (x - gm).powi(2)).sum::<f64>() / n as f64;
        assert!(gm.abs() < 0.01 && (gv - 1.0).abs() < 0.02);
    }
}
