use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Seeded, splittable random stream.
///
/// Backed by ChaCha20 keyed on the 64-bit seed with the 64-bit stream id
/// mapped onto the cipher's stream counter, so identical
/// `(seed, stream_id, draw index)` yields identical output on every platform.
/// Solvers allocate one stream per purpose (snapshot sampling, inner batches,
/// output selection) so that variants consuming different amounts of
/// randomness for one purpose do not shift the draws of another.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha20Rng,
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream with the same seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn gen_index(&mut self, bound: u64) -> u64 {
        self.rng.gen_range(0..bound)
    }

    /// Uniform in `[0, 1)`.
    pub fn gen_f64(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal via Box-Muller; two uniform draws per call.
    pub fn gen_normal(&mut self) -> f64 {
        let u1: f64 = self.rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = self.rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
