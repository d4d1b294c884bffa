use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;
const TWO_POW_M52: f64 = 1.0 / (1u64 << 52) as f64;

/// Deterministic, platform-independent random stream.
///
/// ChaCha8 keyed by the 64-bit seed; independent substreams use ChaCha's
/// stream id, so parallel trials can each own a stream derived from the
/// master seed and trial index. Floats are built from the top 53 bits by hand
/// so draws never depend on a library's float conversion.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Child stream `index` of this stream's seed (stream ids above this one).
    pub fn split(&self, index: u64) -> Self {
        Self::substream(self.seed, self.stream.wrapping_add(1).wrapping_add(index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform on `(0, 1)` over the odd multiples of `2^-53`. Every point and
    /// its mirror `1 - u` are exactly representable.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 12) as f64 + 0.5) * TWO_POW_M52
    }

    /// Standard normal via Box-Muller on two uniforms (cosine branch only).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomStream::new(42);
        let mut b = RandomStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64().to_le_bytes(), b.next_u64().to_le_bytes());
        }
    }

    #[test]
    fn known_first_draws_are_frozen() {
        // Guards against silent changes of the generator or seeding scheme.
        let mut a = RandomStream::new(0);
        let first: Vec<u64> = (0..3).map(|_| a.next_u64()).collect();
        assert_eq!(
            first,
            [13080132717333068652, 8594738769458413623, 12896916468484187878]
        );
        assert_eq!(RandomStream::substream(0, 5).next_u64(), 3283172953191924410);
    }

    #[test]
    fn substreams_differ() {
        let mut a = RandomStream::substream(7, 1);
        let mut b = RandomStream::substream(7, 2);
        assert_ne!(a.next_u64(), b.next_u64());
        assert_eq!(RandomStream::new(7).split(0).stream_id(), 1);
    }

    #[test]
    fn uniform_ranges() {
        let mut r = RandomStream::new(3);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = r.uniform_open();
            assert!(v > 0.0 && v < 1.0);
        }
    }
}
