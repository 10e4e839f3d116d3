use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// One of the primes for which `X_0(p)` has genus zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported prime {0}: expected one of 2, 3, 5, 7, 13")]
pub struct UnsupportedPrime(pub u32);

impl Prime {
    pub const SUPPORTED: [u32; 5] = [2, 3, 5, 7, 13];

    pub fn new(p: u32) -> Result<Self, UnsupportedPrime> {
        if Self::SUPPORTED.contains(&p) {
            Ok(Prime(p))
        } else {
            Err(UnsupportedPrime(p))
        }
    }

    pub fn all() -> impl Iterator<Item = Prime> {
        Self::SUPPORTED.into_iter().map(Prime)
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `24/(p-1)`: the eta-quotient exponent of the hauptmodul.
    pub fn eta_exponent(self) -> u32 {
        24 / (self.0 - 1)
    }

    /// `12/(p-1)`: `|f_p| ≤ p^(12 r/(p-1))` on the radius-`r` region.
    pub fn disc_exponent(self) -> u32 {
        12 / (self.0 - 1)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.to_bigint(), k as usize)
    }
}

impl TryFrom<u32> for Prime {
    type Error = UnsupportedPrime;
    fn try_from(p: u32) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_genus_positive_primes() {
        assert_eq!(Prime::new(11), Err(UnsupportedPrime(11)));
        assert!(Prime::new(4).is_err());
        assert_eq!(Prime::all().count(), 5);
    }

    #[test]
    fn exponents_are_integral() {
        let got: Vec<_> = Prime::all().map(|p| (p.eta_exponent(), p.disc_exponent())).collect();
        assert_eq!(got, vec![(24, 12), (12, 6), (6, 3), (4, 2), (2, 1)]);
    }
}
