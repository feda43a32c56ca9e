//! Arithmetic in a prime field `F_q`.

use crate::rational::Q;
use num::{BigInt, Integer, ToPrimitive};

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not prime")]
pub struct NotPrime(pub u64);

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, NotPrime> {
        if is_prime(q) {
            Ok(PrimeField { q })
        } else {
            Err(NotPrime(q))
        }
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        a %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        (a != 0).then(|| self.pow(a, self.q - 2))
    }

    pub fn from_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.q)).to_u64().expect("reduced below q")
    }

    /// Image of a rational whose denominator is a unit mod `q`.
    pub fn from_rational(&self, r: &Q) -> Option<u64> {
        let num = self.from_int(r.numer());
        let den = self.inv(self.from_int(r.denom()))?;
        Some(self.mul(num, den))
    }
}
