//! Minimal ring and field contracts.
//!
//! All coefficient domains in this crate (GF(2), GF(2^k), the polynomial ring
//! in the vertex variables) have characteristic 2. A ring is described by a
//! small value object whose `Elem` type carries the actual data; this lets
//! GF(2^k) elements stay plain `u64` words while the field descriptor holds
//! the reduction polynomial.

use std::fmt::{Debug, Display};

/// Commutative ring of characteristic 2, described by a descriptor value.
pub trait Ring: Clone + PartialEq {
    type Elem: Clone + PartialEq + Debug + Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Entry-wise Frobenius building block: x ↦ x².
    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

/// The two-element field. Addition is XOR, multiplication is AND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct F2;

impl Ring for F2 {
    type Elem = bool;

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn add(&self, a: &bool, b: &bool) -> bool {
        a ^ b
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        a & b
    }
}

impl Field for F2 {
    fn inv(&self, a: &bool) -> bool {
        assert!(*a, "zero has no inverse in F2");
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_axioms() {
        let f = F2;
        for a in [false, true] {
            for b in [false, true] {
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            }
            assert_eq!(f.add(&a, &a), false);
            assert_eq!(f.mul(&a, &f.one()), a);
        }
        assert_eq!(f.inv(&true), true);
    }
}
