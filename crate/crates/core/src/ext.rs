//! Extension fields GF(2^k) for 1 ≤ k ≤ 64.
//!
//! Elements are bit-packed polynomials of degree < k in a `u64`. The field
//! modulus is the lexicographically least irreducible polynomial of degree k
//! (smallest integer value of the below-leading-term bits), found by a
//! Rabin irreducibility scan at construction time. For k = 8 this recovers
//! the familiar x^8 + x^4 + x^3 + x + 1, i.e. low bits 0x1B.

use rand::Rng;

use crate::ring::{Field, Ring};

/// Field descriptor for GF(2^k). `modulus_low` holds the bits of the modulus
/// below the leading x^k term, so the full modulus is x^k + modulus_low.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtField {
    k: u32,
    modulus_low: u64,
}

impl ExtField {
    /// Builds GF(2^k) with the canonical (lexicographically least) modulus.
    pub fn new(k: u32) -> Self {
        assert!((1..=64).contains(&k), "supported extension degrees are 1..=64");
        let modulus_low = (1u64..)
            .step_by(2) // constant term must be 1, else x divides
            .find(|&low| (k == 64 || low >> k == 0) && is_irreducible(k, low))
            .expect("an irreducible polynomial of each degree exists");
        ExtField { k, modulus_low }
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus_low(&self) -> u64 {
        self.modulus_low
    }

    fn elem_mask(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }

    /// Uniformly random element.
    pub fn random_elem(&self, rng: &mut impl Rng) -> u64 {
        rng.gen::<u64>() & self.elem_mask()
    }

    /// Canonical embedding of the prime field.
    pub fn from_f2(&self, b: bool) -> u64 {
        b as u64
    }

    /// The Frobenius endomorphism x ↦ x², an additive field automorphism in
    /// characteristic 2.
    pub fn frobenius(&self, a: u64) -> u64 {
        self.square(&a)
    }

    pub fn pow(&self, mut base: u64, mut exp: u128) -> u64 {
        let mut acc = 1u64;
        while exp != 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base, self.k, self.modulus_low);
            }
            base = mulmod(base, base, self.k, self.modulus_low);
            exp >>= 1;
        }
        acc
    }
}

impl Ring for ExtField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        a ^ b
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.k, self.modulus_low)
    }
}

impl Field for ExtField {
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "zero has no inverse");
        // a^(2^k - 2): Fermat in the multiplicative group of order 2^k - 1.
        let order_minus_one = if self.k == 64 {
            u64::MAX as u128
        } else {
            (1u128 << self.k) - 1
        };
        self.pow(*a, order_minus_one - 1)
    }
}

/// Product of two polynomials of degree < k, reduced mod x^k + low.
fn mulmod(a: u64, b: u64, k: u32, low: u64) -> u64 {
    // Carry-less product fits in 127 bits.
    let mut prod: u128 = 0;
    let mut aa = a as u128;
    let mut bb = b;
    while bb != 0 {
        if bb & 1 == 1 {
            prod ^= aa;
        }
        aa <<= 1;
        bb >>= 1;
    }
    let full_mod: u128 = (1u128 << k) | low as u128;
    while prod >> k != 0 {
        let deg = 127 - prod.leading_zeros();
        prod ^= full_mod << (deg - k);
    }
    prod as u64
}

fn poly_deg(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        // a mod b by long division over GF(2)
        while a != 0 && poly_deg(a) >= poly_deg(b) {
            a ^= b << (poly_deg(a) - poly_deg(b));
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Rabin test: x^k + low is irreducible iff x^(2^k) ≡ x and, for every prime
/// p | k, gcd(x^(2^(k/p)) − x, f) = 1.
fn is_irreducible(k: u32, low: u64) -> bool {
    let full_mod: u128 = (1u128 << k) | low as u128;
    let prime_divisors: Vec<u32> = {
        let mut ds = Vec::new();
        let mut n = k;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                ds.push(p);
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            ds.push(n);
        }
        ds
    };
    if k == 1 {
        return true; // x and x + 1 are both irreducible
    }
    let mut xp = 2u64; // the element x
    for i in 1..=k {
        xp = mulmod(xp, xp, k, low);
        if prime_divisors.iter().any(|&p| i == k / p) {
            let diff = (xp ^ 2) as u128;
            if poly_gcd(full_mod, diff) != 1 {
                return false;
            }
        }
    }
    xp == 2
}
