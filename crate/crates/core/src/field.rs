//! Word-size prime field arithmetic.
//!
//! Elements are plain `u64` values kept in canonical form `[0, q)`. All
//! products go through a 128-bit intermediate, so `q` is limited to
//! [`MAX_MODULUS`].

use crate::error::{Error, Result};

/// Field element. Always canonical with respect to the [`FieldOrder`] it was
/// produced by.
pub type FieldElement = u64;

/// Largest supported modulus (exclusive): `2^62`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// The Mersenne prime `2^31 - 1`, used by the demo and most tests.
pub const MERSENNE_31: u64 = (1 << 31) - 1;

/// Order of a prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldOrder(u64);

impl FieldOrder {
    /// Validates that `q` is a prime below [`MAX_MODULUS`].
    pub fn new(q: u64) -> Result<Self> {
        if q >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self(q))
    }

    #[inline]
    pub fn q(self) -> u64 {
        self.0
    }

    /// Reduces an arbitrary integer to its canonical representative.
    #[inline]
    pub fn elem(self, v: u64) -> FieldElement {
        v % self.0
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let c = a + b;
        if c >= self.0 {
            c - self.0
        } else {
            c
        }
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    /// `a * b + c`, one reduction.
    #[inline]
    pub fn mul_add(self, a: FieldElement, b: FieldElement, c: FieldElement) -> FieldElement {
        ((a as u128 * b as u128 + c as u128) % self.0 as u128) as u64
    }

    pub fn pow(self, mut base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.0 as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i128) as u64)
    }

    /// Falling factorial `a (a-1) ... (a-b+1)` reduced mod q; zero when `b > a`.
    pub fn falling(self, a: u64, b: u64) -> FieldElement {
        if b > a {
            return 0;
        }
        (0..b).fold(1 % self.0, |acc, i| self.mul(acc, self.elem(a - i)))
    }

    /// Number of bits needed to store one element: `ceil(log2 q)`.
    pub fn bits(self) -> u64 {
        u64::from(64 - (self.0 - 1).leading_zeros())
    }
}

impl std::fmt::Display for FieldOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}", self.0)
    }
}

pub fn ff_add(a: FieldElement, b: FieldElement, q: FieldOrder) -> FieldElement {
    q.add(a, b)
}

pub fn ff_mul(a: FieldElement, b: FieldElement, q: FieldOrder) -> FieldElement {
    q.mul(a, b)
}

pub fn ff_inv(a: FieldElement, q: FieldOrder) -> Result<FieldElement> {
    q.inv(a)
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> FieldOrder {
        FieldOrder::new(7).unwrap()
    }

    #[test]
    fn add_examples() {
        let q = f7();
        assert_eq!(ff_add(3, 4, q), 0);
        assert_eq!(ff_add(0, 5, q), 5);
        assert_eq!(ff_add(6, 1, q), 0);
    }

    #[test]
    fn mul_examples() {
        let q = f7();
        assert_eq!(ff_mul(3, 4, q), 5);
        assert_eq!(ff_mul(1, 6, q), 6);
        assert_eq!(ff_mul(6, 6, q), 1);
        let big = FieldOrder::new(MERSENNE_31).unwrap();
        assert_eq!(big.mul(MERSENNE_31 - 1, MERSENNE_31 - 1), 1);
    }

    #[test]
    fn inv_examples() {
        let q = f7();
        assert_eq!(ff_inv(1, q).unwrap(), 1);
        assert_eq!(ff_inv(2, q).unwrap(), 4);
        assert_eq!(ff_inv(3, q).unwrap(), 5);
        assert!(matches!(ff_inv(0, q), Err(Error::ZeroInverse)));
    }

    #[test]
    fn rejects_composites_and_huge_moduli() {
        assert!(matches!(FieldOrder::new(0), Err(Error::NotPrime(0))));
        assert!(matches!(FieldOrder::new(1), Err(Error::NotPrime(1))));
        assert!(matches!(FieldOrder::new(91), Err(Error::NotPrime(91))));
        // strong pseudoprime to bases 2..=37 is above 2^64, so check a Carmichael number
        assert!(FieldOrder::new(561).is_err());
        assert!(FieldOrder::new(MAX_MODULUS + 1).is_err());
        assert!(FieldOrder::new(2).is_ok());
        assert!(FieldOrder::new((1 << 61) - 1).is_ok());
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn falling_factorial() {
        let q = FieldOrder::new(101).unwrap();
        assert_eq!(q.falling(5, 0), 1);
        assert_eq!(q.falling(5, 2), 20);
        assert_eq!(q.falling(4, 4), 24);
        assert_eq!(q.falling(2, 3), 0);
    }

    #[test]
    fn bits() {
        assert_eq!(FieldOrder::new(2).unwrap().bits(), 1);
        assert_eq!(FieldOrder::new(3).unwrap().bits(), 2);
        assert_eq!(FieldOrder::new(101).unwrap().bits(), 7);
        assert_eq!(FieldOrder::new(MERSENNE_31).unwrap().bits(), 31);
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(a in 1u64..MERSENNE_31) {
            let q = FieldOrder::new(MERSENNE_31).unwrap();
            prop_assert_eq!(q.mul(a, q.inv(a).unwrap()), 1);
            prop_assert_eq!(q.inv(a).unwrap(), q.pow(a, MERSENNE_31 - 2));
        }

        #[test]
        fn sub_inverts_add(a in 0u64..101, b in 0u64..101) {
            let q = FieldOrder::new(101).unwrap();
            prop_assert_eq!(q.sub(q.add(a, b), b), a);
            prop_assert_eq!(q.add(a, q.neg(a)), 0);
        }
    }
}
