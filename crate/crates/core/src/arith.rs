//! Small exact-arithmetic helpers shared by the other modules.

use std::cell::RefCell;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Largest `v` with `p^v | n`, or `None` for `n = 0`.
pub fn int_valuation(n: &BigInt, p: u32) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Splits `n ≠ 0` as `p^v · u` with `p ∤ u`.
pub fn split_int(n: &BigInt, p: u32) -> (u64, BigInt) {
    assert!(!n.is_zero(), "split_int of zero");
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

thread_local! {
    static POWERS: RefCell<Vec<(u32, Vec<BigInt>)>> = const { RefCell::new(Vec::new()) };
}

/// `p^k`, memoized per thread.
pub fn prime_power(p: u32, k: u32) -> BigInt {
    POWERS.with(|cell| {
        let mut tables = cell.borrow_mut();
        let idx = match tables.iter().position(|(q, _)| *q == p) {
            Some(i) => i,
            None => {
                tables.push((p, vec![BigInt::one()]));
                tables.len() - 1
            }
        };
        let table = &mut tables[idx].1;
        while table.len() <= k as usize {
            let next = table.last().unwrap() * p;
            table.push(next);
        }
        table[k as usize].clone()
    })
}

/// `p`-adic valuation of a nonzero rational.
pub fn rat_valuation(x: &BigRational, p: u32) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let vn = int_valuation(x.numer(), p).unwrap() as i64;
    let vd = int_valuation(x.denom(), p).unwrap() as i64;
    Some(vn - vd)
}

pub fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `p^e` for a possibly negative exponent.
pub fn rat_pow(p: u32, e: i64) -> BigRational {
    let base = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Residue of a `p`-integral rational modulo `modulus` (a power of `p`).
///
/// Panics if the denominator is not invertible modulo `modulus`.
pub fn rat_residue(x: &BigRational, modulus: &BigInt) -> BigInt {
    let inv = mod_inverse(&x.denom().mod_floor(modulus), modulus)
        .expect("denominator not invertible modulo p^k");
    (x.numer() * inv).mod_floor(modulus)
}

pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// Renders a rational as `"num/den"`, always including the denominator.
pub fn format_ratio(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Renders integers bare and proper fractions as `num/den`.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format_ratio(x)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Lowest common denominator of a set of rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn is_negative(x: &BigInt) -> bool {
    x.sign() == Sign::Minus
}

/// `|x|` as a rational, for sorting diagnostics.
pub fn abs_rat(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(int_valuation(&BigInt::from(24), 2), Some(3));
        assert_eq!(int_valuation(&BigInt::from(2048), 2), Some(11));
        assert_eq!(int_valuation(&BigInt::zero(), 5), None);
        assert_eq!(rat_valuation(&ratio(50, 3), 5), Some(2));
        assert_eq!(rat_valuation(&ratio(7, 125), 5), Some(-3));
    }

    #[test]
    fn residues() {
        let m = BigInt::from(25);
        // 1/3 mod 25 = 17
        assert_eq!(rat_residue(&ratio(1, 3), &m), BigInt::from(17));
        assert_eq!(rat_residue(&ratio(-1, 1), &m), BigInt::from(24));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::zero());
    }

    #[test]
    fn rational_text_round_trip() {
        let x = ratio(-12, 18);
        assert_eq!(format_ratio(&x), "-2/3");
        assert_eq!(parse_rational("-2/3"), Some(x));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
