use crate::crypto::group::{Group, ScalarField};
use crate::hash::hash64;

/// Deterministic nonce stream: `k = H(sk ∥ msg ∥ seed ∥ counter)`.
///
/// Two sources built from the same seed hand out identical nonce sequences,
/// which makes every signature and proof in a scenario reproducible. The
/// secret key is always mixed in, so two keys never share a nonce.
#[derive(Clone, Debug)]
pub struct NonceSource {
    seed: [u8; 32],
    counter: u64,
}

impl NonceSource {
    pub fn new(seed: [u8; 32]) -> Self {
        NonceSource { seed, counter: 0 }
    }

    pub fn from_u64(seed: u64) -> Self {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&seed.to_le_bytes());
        NonceSource::new(s)
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Next nonzero nonce bound to `sk` and `msg`.
    pub fn next<G: Group>(&mut self, sk: &G::Scalar, msg: &[u8]) -> G::Scalar {
        loop {
            let wide = hash64(
                b"willchain/nonce/v1",
                &[&sk.to_bytes(), msg, &self.seed, &self.counter.to_le_bytes()],
            );
            self.counter += 1;
            let k = G::Scalar::from_wide_bytes(&wide);
            if !k.is_zero() {
                return k;
            }
        }
    }
}

impl Default for NonceSource {
    fn default() -> Self {
        NonceSource::new([0u8; 32])
    }
}
