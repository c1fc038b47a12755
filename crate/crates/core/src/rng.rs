//! Seed derivation and Gaussian sampling.
//!
//! Every random object in the crate is drawn from its own stream. A stream is
//! identified by a base seed plus a path of integer tags (for example
//! `[STREAM_NOISE, k]`), and the stream seed is obtained by folding the path
//! through the splitmix64 finalizer:
//!
//! ```text
//! s0 = base
//! s_{i+1} = mix64(s_i + 0x9E3779B97F4A7C15 ^ mix64(tag_i + 0x9E3779B97F4A7C15))
//! ```
//!
//! The stream seed initialises a ChaCha8 generator. Uniform variates take the
//! top 53 bits of a 64-bit draw; standard normals come from the basic
//! Box–Muller transform: two variates per pair of uniforms, cosine branch
//! first. Results are bit-reproducible within this crate on any platform with
//! IEEE-754 `f64` and a correctly rounded `ln`/`sqrt`/`sin`/`cos` (the last two
//! are libm-dependent, so cross-platform bit equality is not promised).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Golden-ratio increment used by splitmix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub const STREAM_SHARED: u64 = 1;
pub const STREAM_COMMON_UNIQUE: u64 = 2;
pub const STREAM_PER_K_UNIQUE: u64 = 3;
pub const STREAM_LOADING_V: u64 = 4;
pub const STREAM_LOADING_W: u64 = 5;
pub const STREAM_NOISE: u64 = 6;
pub const STREAM_HARD_Z1: u64 = 7;
pub const STREAM_MOMENTS: u64 = 8;
pub const STREAM_OPERANDS: u64 = 9;

/// splitmix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(base, |s, &tag| {
        mix64(s.wrapping_add(GOLDEN_GAMMA) ^ mix64(tag.wrapping_add(GOLDEN_GAMMA)))
    })
}

/// A deterministic stream of uniform and Gaussian variates.
#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn derived(base: u64, path: &[u64]) -> Self {
        Self::new(derive_seed(base, path))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64], scale: f64) {
        for x in out.iter_mut() {
            *x = scale * self.standard_normal();
        }
    }
}
