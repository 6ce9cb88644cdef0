//! Pedersen commitments `g^m · h^r`.

use serde::{Deserialize, Serialize};

use crate::crypto::group::Group;

/// Domain tag for deriving the second generator.
pub const H_DOMAIN: &[u8] = b"willchain/pedersen/h/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PedersenParams<G: Group> {
    pub g: G::Element,
    pub h: G::Element,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "", transparent)]
pub struct Commitment<G: Group> {
    pub point: G::Element,
}

impl<G: Group> PedersenParams<G> {
    /// Standard parameters: `g` is the group generator and `h` comes from
    /// hash-to-group, so nobody knows `log_g h`.
    pub fn standard() -> Self {
        PedersenParams {
            g: G::generator(),
            h: G::hash_to_element(H_DOMAIN, G::NAME.as_bytes()),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.h != G::identity() && self.g != G::identity()
    }

    pub fn commit(&self, m: &G::Scalar, r: &G::Scalar) -> Commitment<G> {
        Commitment {
            point: G::op(&G::exp(&self.g, m), &G::exp(&self.h, r)),
        }
    }

    pub fn verify_opening(&self, c: &Commitment<G>, m: &G::Scalar, r: &G::Scalar) -> bool {
        self.commit(m, r) == *c
    }
}

impl<G: Group> Default for PedersenParams<G> {
    fn default() -> Self {
        Self::standard()
    }
}

impl<G: Group> Commitment<G> {
    /// Group product of two commitments; commits to the sum of the openings.
    pub fn combine(&self, other: &Commitment<G>) -> Commitment<G> {
        Commitment {
            point: G::op(&self.point, &other.point),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::group::ScalarField;
    use crate::crypto::ristretto::{Ristretto, Scalar};
    use crate::crypto::toy::{Toy101, ToyScalar};

    #[test]
    fn zero_opening_is_identity() {
        let p = PedersenParams::<Ristretto>::standard();
        assert!(p.is_valid());
        let c = p.commit(&Scalar::zero(), &Scalar::zero());
        assert_eq!(c.point, Ristretto::identity());
    }

    #[test]
    fn opening_checks() {
        let p = PedersenParams::<Ristretto>::standard();
        let (m, r) = (Scalar::from_u64(5), Scalar::from_u64(7));
        let c = p.commit(&m, &r);
        assert!(p.verify_opening(&c, &m, &r));
        assert!(!p.verify_opening(&c, &m, &Scalar::from_u64(8)));
    }

    #[test]
    fn toy_params_are_independent_generators() {
        let p = PedersenParams::<Toy101>::standard();
        assert!(p.is_valid());
        assert_ne!(p.g, p.h);
        let c = p.commit(&ToyScalar::new(3), &ToyScalar::new(4));
        assert!(p.verify_opening(&c, &ToyScalar::new(3), &ToyScalar::new(4)));
    }
}
