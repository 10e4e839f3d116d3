//! The matrix of `U` in the basis of powers of the hauptmodul.
//!
//! Entry `u_ij` (1-based) is the coefficient of `f_p^i` in `U(f_p^j)`. At
//! radius `r` the basis is `(c f_p)^i` with `c = p^{12r/(p-1)}`, so
//! `u^(r)_ij = c^{j-i} u^(0)_ij`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::hauptmodul::RecurrenceKernel;
use crate::prime::Prime;
use crate::qseries::{self, mul_ints};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UMatrixError {
    #[error("q-precision {got} too small for size {n}: need {need}")]
    InsufficientQPrec { n: usize, got: i64, need: i64 },
    #[error("base region covers size {have}, need {need}")]
    BaseRegionIncomplete { have: usize, need: usize },
    #[error("radius {r}: 12r/(p-1) = {exponent} is not an integer, so c is irrational")]
    IrrationalScale { r: Radius, exponent: Rational64 },
    #[error("radius {r} outside [0, p/(p+1)) for p = {p}")]
    InadmissibleRadius { r: Radius, p: u32 },
    #[error("matrices have different primes ({0} vs {1})")]
    PrimeMismatch(u32, u32),
    #[error("entry ({i},{j}) violates the support band")]
    SupportViolation { i: usize, j: usize },
}

/// Overconvergence radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Radius(Rational64);

impl Radius {
    pub const ZERO: Radius = Radius(Rational64::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> Self {
        Radius(Rational64::new(num, den))
    }

    pub fn value(self) -> Rational64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == Rational64::from_integer(0)
    }

    /// `0 ≤ r < p/(p+1)`.
    pub fn check_admissible(self, p: Prime) -> Result<(), UMatrixError> {
        let pp = p.get() as i64;
        if self.0 < Rational64::from_integer(0) || self.0 >= Rational64::new(pp, pp + 1) {
            return Err(UMatrixError::InadmissibleRadius { r: self, p: p.get() });
        }
        Ok(())
    }

    /// `12r/(p−1)` as a rational.
    pub fn raw_exponent(self, p: Prime) -> Rational64 {
        self.0 * Rational64::new(12, p.get() as i64 - 1)
    }

    /// `e` with `c = p^e`, when `e` is an integer.
    pub fn scale_exponent(self, p: Prime) -> Result<i64, UMatrixError> {
        let e = self.raw_exponent(p);
        if !e.is_integer() {
            return Err(UMatrixError::IrrationalScale { r: self, exponent: e });
        }
        Ok(e.to_integer())
    }

    /// The radius conventionally used for the LDU checks: `1/2` for
    /// `p = 2, 3`, `1/3` for `p = 5`, and the largest rational-scale radius
    /// below `1/2` otherwise.
    pub fn default_for(p: Prime) -> Radius {
        match p.get() {
            2 | 3 => Radius::new(1, 2),
            5 => Radius::new(1, 3),
            7 => Radius::new(1, 2),
            // 12r/12 = r is an integer in [0, 13/14) only at 0
            _ => Radius::ZERO,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl std::str::FromStr for Radius {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid radius `{s}`: expected `a/b` or an integer");
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
        };
        if d == 0 {
            return Err(bad());
        }
        Ok(Radius::new(n, d))
    }
}

impl From<Radius> for String {
    fn from(r: Radius) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Radius {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// Exact `n × n` truncation of `U` at some radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UMatrix {
    prime: Prime,
    entries: Vec<Vec<BigRational>>,
    radius: Radius,
    qprec_used: i64,
}

impl UMatrix {
    pub fn from_entries(prime: Prime, entries: Vec<Vec<BigRational>>, radius: Radius, qprec_used: i64) -> Self {
        debug_assert!(entries.iter().all(|r| r.len() == entries.len()));
        UMatrix { prime, entries, radius, qprec_used }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn radius(&self) -> Radius {
        self.radius
    }

    pub fn qprec_used(&self) -> i64 {
        self.qprec_used
    }

    /// `u_ij`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i - 1][j - 1]
    }

    /// Rows of entries, 0-based.
    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    /// Top-left `k × k` block.
    pub fn leading_block(&self, k: usize) -> UMatrix {
        let k = k.min(self.size());
        let entries = self.entries[..k].iter().map(|r| r[..k].to_vec()).collect();
        UMatrix { prime: self.prime, entries, radius: self.radius, qprec_used: self.qprec_used }
    }

    /// Integer matrix `d · U` and the least such `d`.
    pub fn cleared(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let d = arith::common_denominator(self.entries.iter().flatten());
        let m = self
            .entries
            .iter()
            .map(|row| row.iter().map(|x| x.numer() * (&d / x.denom())).collect())
            .collect();
        (m, d)
    }

    /// Entries that are not integers, 1-based; an observation, never an error.
    pub fn non_integral_entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !arith::is_integer(x) {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }
}

/// Dense coefficients of `f_p^k` for `k = 0..=count`, each of length `len`.
fn hauptmodul_powers(p: Prime, count: usize, len: usize) -> Vec<Vec<BigInt>> {
    let f = qseries::hauptmodul_fp(p, len as i64);
    let mut fd = vec![BigInt::zero(); len];
    for (e, c) in f.terms() {
        fd[e as usize] = c.numer().clone();
    }
    let mut out = Vec::with_capacity(count + 1);
    let mut one = vec![BigInt::zero(); len];
    if len > 0 {
        one[0] = BigInt::one();
    }
    out.push(one);
    for k in 1..=count {
        let next = if k == 1 { fd.clone() } else { mul_ints(&out[k - 1], &fd, len) };
        out.push(next);
    }
    out
}

/// Coefficients of `f^i`, `1 ≤ i ≤ rows`, in `U(f^j)`, given `f^j` to at
/// least `q^{p·rows}` and the powers of `f` to at least `q^rows`.
fn solve_column(p: u32, fj: &[BigInt], pw: &[Vec<BigInt>], rows: usize) -> Vec<BigInt> {
    let mut g: Vec<BigInt> = (0..=rows).map(|k| fj[p as usize * k].clone()).collect();
    let mut out = vec![BigInt::zero(); rows];
    for i in 1..=rows {
        let c = std::mem::take(&mut g[i]);
        if c.is_zero() {
            continue;
        }
        for k in i + 1..=rows {
            if !pw[i][k].is_zero() {
                g[k] -= &c * &pw[i][k];
            }
        }
        out[i - 1] = c;
    }
    out
}

/// `U` at radius 0, by expanding `U(f^j)` in powers of `f`.
pub fn u_direct(p: Prime, n: usize) -> UMatrix {
    let q = p.get() as i64 * n as i64 + 1;
    u_direct_with_qprec(p, n, q).expect("default q-precision is sufficient")
}

/// As [`u_direct`] with an explicit q-precision, which must be at least `pn+1`.
pub fn u_direct_with_qprec(p: Prime, n: usize, qprec: i64) -> Result<UMatrix, UMatrixError> {
    let need = p.get() as i64 * n as i64 + 1;
    if qprec < need {
        return Err(UMatrixError::InsufficientQPrec { n, got: qprec, need });
    }
    let pw = hauptmodul_powers(p, n, qprec as usize);
    let cols: Vec<Vec<BigInt>> = (1..=n).into_par_iter().map(|j| solve_column(p.get(), &pw[j], &pw, n)).collect();
    let entries = (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(cols[j][i].clone())).collect()).collect();
    let u = UMatrix { prime: p, entries, radius: Radius::ZERO, qprec_used: qprec };
    if let Some((i, j)) = support_check(&u) {
        return Err(UMatrixError::SupportViolation { i, j });
    }
    Ok(u)
}

/// Entries of `U` at radius 0 with `i ≤ p` or `j ≤ p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseRegion {
    prime: Prime,
    n: usize,
    /// `cols[j-1][i-1]` for `j ≤ p`.
    cols: Vec<Vec<BigInt>>,
    /// `rows[i-1][j-1]` for `i ≤ p`.
    rows: Vec<Vec<BigInt>>,
    qprec_used: i64,
}

impl BaseRegion {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&BigInt> {
        let pp = self.prime.get() as usize;
        if j <= pp {
            self.cols.get(j - 1).and_then(|c| c.get(i - 1))
        } else if i <= pp {
            self.rows.get(i - 1).and_then(|r| r.get(j - 1))
        } else {
            None
        }
    }
}

impl From<&UMatrix> for BaseRegion {
    /// Restricts a radius-0 matrix to its base region.
    fn from(u: &UMatrix) -> Self {
        assert!(u.radius.is_zero(), "base region is taken at radius 0");
        let n = u.size();
        let pp = (u.prime.get() as usize).min(n);
        let int = |x: &BigRational| x.to_integer();
        BaseRegion {
            prime: u.prime,
            n,
            cols: (1..=pp).map(|j| (1..=n).map(|i| int(u.get(i, j))).collect()).collect(),
            rows: (1..=pp).map(|i| (1..=n).map(|j| int(u.get(i, j))).collect()).collect(),
            qprec_used: u.qprec_used,
        }
    }
}

/// The base region computed directly. Only columns `j ≤ p` need the full
/// q-precision; rows `i ≤ p` need `f^j` only to `q^{p²}`.
pub fn u_base(p: Prime, n: usize) -> BaseRegion {
    let pp = p.get() as usize;
    let kc = pp.min(n);
    let col_rows = n.min(pp * pp);
    let len = pp * col_rows + 1;
    let last_col = n.min(pp * pp);
    let pw = hauptmodul_powers(p, last_col.max(col_rows), len);
    let mut cols: Vec<Vec<BigInt>> = (1..=kc)
        .into_par_iter()
        .map(|j| solve_column(p.get(), &pw[j], &pw, col_rows))
        .collect();
    for c in &mut cols {
        c.resize(n, BigInt::zero());
    }
    // row block: columns p < j ≤ min(n, p²), first p coefficients
    let extra: Vec<Vec<BigInt>> = (kc + 1..=last_col)
        .into_par_iter()
        .map(|j| solve_column(p.get(), &pw[j], &pw, kc))
        .collect();
    let mut rows = vec![vec![BigInt::zero(); n]; kc];
    for i in 0..kc {
        for j in 0..kc {
            rows[i][j] = cols[j][i].clone();
        }
        for (t, col) in extra.iter().enumerate() {
            rows[i][kc + t] = col[i].clone();
        }
    }
    BaseRegion { prime: p, n, cols, rows, qprec_used: len as i64 }
}

/// Fills `i, j > p` by `u_ij = Σ M_ab u_{i−a, j−b}`.
pub fn u_recurrence(p: Prime, n: usize, kernel: &RecurrenceKernel, base: &BaseRegion) -> Result<UMatrix, UMatrixError> {
    if kernel.prime() != p || base.prime != p {
        return Err(UMatrixError::PrimeMismatch(kernel.prime().get(), base.prime.get()));
    }
    if base.n < n {
        return Err(UMatrixError::BaseRegionIncomplete { have: base.n, need: n });
    }
    let pp = p.get() as usize;
    let terms = kernel.nonzero();
    let mut u = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            if i <= pp || j <= pp {
                u[i][j] = base.get(i, j).cloned().expect("base region entry");
            }
        }
    }
    // each entry depends on entries up-left of it: sweep columns left to right
    for j in pp + 1..=n {
        for i in pp + 1..=n {
            let mut acc = BigInt::zero();
            for (a, b, m) in &terms {
                if *a < i && *b < j {
                    acc += m * &u[i - a][j - b];
                }
            }
            u[i][j] = acc;
        }
    }
    let entries = (1..=n).map(|i| (1..=n).map(|j| BigRational::from_integer(u[i][j].clone())).collect()).collect();
    Ok(UMatrix { prime: p, entries, radius: Radius::ZERO, qprec_used: base.qprec_used })
}

/// Change of radius: `u^(r)_ij = c^{j−i} u^(0)_ij` with `c = p^{12r/(p−1)}`.
pub fn rescale(u: &UMatrix, r: Radius) -> Result<UMatrix, UMatrixError> {
    r.check_admissible(u.prime)?;
    let e_new = r.scale_exponent(u.prime)?;
    let e_old = u.radius.scale_exponent(u.prime)?;
    let e = e_new - e_old;
    let p = u.prime.get();
    let entries = u
        .entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| if x.is_zero() { x.clone() } else { x * arith::rat_pow(p, e * (j as i64 - i as i64)) })
                .collect()
        })
        .collect();
    Ok(UMatrix { prime: u.prime, entries, radius: r, qprec_used: u.qprec_used })
}

/// First `(i, j)` with `u_ij ≠ 0` and `i > pj` or `j > pi`.
pub fn support_check(u: &UMatrix) -> Option<(usize, usize)> {
    let p = u.prime.get() as usize;
    for i in 1..=u.size() {
        for j in 1..=u.size() {
            if (i > p * j || j > p * i) && !u.get(i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// First `(i, j)`, `i, j ≤ n`, violating `i p^{cj} u_ij = j p^{ci} u_ji` in
/// radius-0 coordinates, `c = 12/(p−1)`.
pub fn symmetry_check(u: &UMatrix, n: usize) -> Result<Option<(usize, usize)>, UMatrixError> {
    let u0 = if u.radius.is_zero() { u.clone() } else { rescale(u, Radius::ZERO)? };
    let p = u.prime;
    let c = p.disc_exponent() as i64;
    let n = n.min(u0.size());
    for i in 1..=n {
        for j in i + 1..=n {
            let lhs = u0.get(i, j) * arith::rat(i as u64) * arith::rat_pow(p.get(), c * j as i64);
            let rhs = u0.get(j, i) * arith::rat(j as u64) * arith::rat_pow(p.get(), c * i as i64);
            if lhs != rhs {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::hauptmodul::HauptmodulData;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn small_entries_for_two() {
        let u = u_direct(prime(2), 4);
        assert_eq!(u.get(1, 1), &rat(24));
        assert_eq!(u.get(2, 1), &rat(2048));
        assert_eq!(u.get(1, 2), &rat(1));
        assert_eq!(u.get(3, 1), &rat(0));
        assert_eq!(u.get(1, 3), &rat(0));
        assert_eq!(u.qprec_used(), 9);
        assert_eq!(u_direct(prime(5), 1).get(1, 1), &rat(315));
        assert_eq!(u_direct(prime(3), 1).get(1, 1), &rat(90));
    }

    #[test]
    fn recurrence_entry_three_three() {
        let u = u_direct(prime(2), 6);
        let expect = rat(48) * u.get(2, 2) + u.get(2, 1) + rat(4096) * u.get(1, 2);
        assert_eq!(u.get(3, 3), &expect);
    }

    #[test]
    fn recurrence_agrees_with_direct() {
        for p in Prime::all() {
            let n = 16;
            let d = HauptmodulData::derive(p).unwrap();
            let direct = u_direct(p, n);
            let rec = u_recurrence(p, n, &d.kernel, &u_base(p, n)).unwrap();
            assert_eq!(rec.rows(), direct.rows(), "p = {p}");
            let (a, b) = (BaseRegion::from(&direct), u_base(p, n));
            assert_eq!((a.cols, a.rows), (b.cols, b.rows), "p = {p}");
        }
    }

    #[test]
    fn base_too_small() {
        let p = prime(3);
        let d = HauptmodulData::derive(p).unwrap();
        let err = u_recurrence(p, 10, &d.kernel, &u_base(p, 5)).unwrap_err();
        assert_eq!(err, UMatrixError::BaseRegionIncomplete { have: 5, need: 10 });
    }

    #[test]
    fn qprec_guard() {
        assert!(matches!(u_direct_with_qprec(prime(2), 5, 10), Err(UMatrixError::InsufficientQPrec { .. })));
        assert_eq!(u_direct_with_qprec(prime(2), 5, 20).unwrap().rows(), u_direct(prime(2), 5).rows());
    }

    #[test]
    fn symmetry_and_support() {
        for p in Prime::all() {
            let u = u_direct(p, 20);
            assert_eq!(support_check(&u), None);
            assert_eq!(symmetry_check(&u, 20).unwrap(), None, "p = {p}");
            assert!(u.non_integral_entries().is_empty());
        }
    }

    #[test]
    fn rescaling() {
        let u = u_direct(prime(5), 4);
        let r = rescale(&u, Radius::new(1, 3)).unwrap();
        assert_eq!(r.get(1, 2), &(u.get(1, 2) * rat(5)));
        assert_eq!(r.get(2, 1), &(u.get(2, 1) / rat(5)));
        assert_eq!(rescale(&u, Radius::ZERO).unwrap(), u);
        let u2 = u_direct(prime(2), 4);
        let h = rescale(&u2, Radius::new(1, 2)).unwrap();
        for i in 1..=4 {
            assert_eq!(h.get(i, i), u2.get(i, i));
        }
        assert_eq!(h.get(1, 2), &rat(64));
        assert_eq!(rescale(&h, Radius::ZERO).unwrap(), u2);
        assert!(matches!(rescale(&u, Radius::new(1, 2)), Err(UMatrixError::IrrationalScale { .. })));
        assert!(matches!(rescale(&u, Radius::new(5, 6)), Err(UMatrixError::InadmissibleRadius { .. })));
        assert_eq!(symmetry_check(&h, 4).unwrap(), None);
    }

    #[test]
    fn radius_parsing() {
        assert_eq!("1/3".parse::<Radius>().unwrap(), Radius::new(1, 3));
        assert_eq!("0".parse::<Radius>().unwrap(), Radius::ZERO);
        assert!("1/0".parse::<Radius>().is_err());
        assert_eq!(Radius::new(2, 4).to_string(), "1/2");
    }
}
