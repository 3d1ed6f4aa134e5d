//! Splittable, reproducible random streams.
//!
//! Each stream is a ChaCha8 keystream keyed by the 64-bit seed and selected by
//! a 64-bit stream index. ChaCha is counter based, so stream `i` of a seed is
//! independent of how many values were drawn from any other stream, which is
//! what lets batches be split across workers without changing their output.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Identity of a random stream: `(seed, stream_index)` fully determines its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream_index: u64,
}

/// A positioned random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    id: StreamId,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_index);
        Self {
            id: StreamId { seed, stream_index },
            inner,
        }
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// Uniform deviate in the half-open interval (0, 1].
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.inner.gen::<f64>()
    }

    /// Uniform deviate in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Standard complex Gaussian: density `exp(-|c|^2)/pi`, so `E|c|^2 = 1` and
    /// the real and imaginary parts are independent `N(0, 1/2)`.
    ///
    /// Polar Box–Muller: `|c|^2` is exponential with mean one and the phase is
    /// uniform, which is exactly the law above.
    #[inline]
    pub fn standard_complex_gaussian(&mut self) -> Complex64 {
        let radius = (-self.uniform_open0().ln()).sqrt();
        let phase = TAU * self.uniform();
        Complex64::from_polar(radius, phase)
    }

    pub fn fill_standard_complex_gaussian(&mut self, out: &mut [Complex64]) {
        for slot in out {
            *slot = self.standard_complex_gaussian();
        }
    }

    /// Uniform point on the unit circle.
    pub fn unit_phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.uniform())
    }

    /// Uniform point in the disk of the given radius.
    pub fn uniform_in_disk(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.uniform().sqrt();
        Complex64::from_polar(r, TAU * self.uniform())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
