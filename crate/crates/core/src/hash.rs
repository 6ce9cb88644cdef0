//! Domain-separated hashing helpers.
//!
//! Every input part is length-prefixed so that `("ab", "c")` and
//! `("a", "bc")` hash differently.

use sha2::{Digest, Sha256, Sha512};

pub type Digest32 = [u8; 32];

fn absorb<D: Digest>(h: &mut D, domain: &[u8], parts: &[&[u8]]) {
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain);
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
}

pub fn hash32(domain: &[u8], parts: &[&[u8]]) -> Digest32 {
    let mut h = Sha256::new();
    absorb(&mut h, domain, parts);
    h.finalize().into()
}

pub fn hash64(domain: &[u8], parts: &[&[u8]]) -> [u8; 64] {
    let mut h = Sha512::new();
    absorb(&mut h, domain, parts);
    h.finalize().into()
}

/// Plain SHA-256 of a byte string, used for content addressing.
pub fn sha256(bytes: &[u8]) -> Digest32 {
    Sha256::digest(bytes).into()
}
