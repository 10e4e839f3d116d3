use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::SpectralError;
use crate::arith::{binomial, factorial, rat, rat_pow, rat_valuation};
use crate::prime::Prime;
use crate::uoperator::{Radius, UMatrix};

/// `U = A·D·B` with `A` lower and `B` upper unitriangular, `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LduFactorization {
    pub a: Vec<Vec<BigRational>>,
    pub d: Vec<BigRational>,
    pub b: Vec<Vec<BigRational>>,
}

impl LduFactorization {
    /// `A·D·B`, for checking the reconstruction.
    pub fn product(&self) -> Vec<Vec<BigRational>> {
        let n = self.d.len();
        let mut out = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..=i.min(j) {
                    if !self.a[i][k].is_zero() && !self.b[k][j].is_zero() {
                        acc += &self.a[i][k] * &self.d[k] * &self.b[k][j];
                    }
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

/// Doolittle elimination without pivoting; fails at the first singular
/// leading minor.
pub fn ldu(u: &UMatrix) -> Result<LduFactorization, SpectralError> {
    let n = u.size();
    let mut w: Vec<Vec<BigRational>> = u.rows().to_vec();
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for k in 0..n {
        if w[k][k].is_zero() {
            return Err(SpectralError::SingularMinor(k + 1));
        }
        a[k][k] = BigRational::one();
        let (top, bottom) = w.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for (off, row) in bottom.iter_mut().enumerate() {
            let i = k + 1 + off;
            if row[k].is_zero() {
                continue;
            }
            let f = &row[k] / &pivot_row[k];
            for j in k..n {
                if !pivot_row[j].is_zero() {
                    let t = &f * &pivot_row[j];
                    row[j] -= t;
                }
            }
            a[i][k] = f;
        }
    }
    let d: Vec<BigRational> = (0..n).map(|k| w[k][k].clone()).collect();
    let b = (0..n)
        .map(|k| (0..n).map(|j| if j < k { BigRational::zero() } else { &w[k][j] / &d[k] }).collect())
        .collect();
    Ok(LduFactorization { a, d, b })
}

fn fac(n: u64) -> BigRational {
    BigRational::from_integer(factorial(n))
}

/// Closed form of `D_ii` for `p ∈ {2, 3, 5}`.
pub fn d_closed_form(p: Prime, i: u64) -> Option<BigRational> {
    let pp = p.get();
    let v = match pp {
        2 => rat_pow(2, 4 * i as i64 + 1) * fac(3 * i).pow(2) * fac(i).pow(2) / (rat(3) * fac(2 * i).pow(4)),
        3 => rat_pow(3, 3 * i as i64) * fac(6 * i) * fac(2 * i) * fac(i) / (rat(2) * fac(3 * i).pow(3)),
        5 => {
            rat_pow(5, 2 * i as i64) * fac(10 * i) * fac(3 * i).pow(2) * fac(i)
                / (rat(3) * fac(5 * i).pow(3) * fac(2 * i))
        }
        _ => return None,
    };
    Some(v)
}

/// Closed form of the lower factor entry `a_ij` for `p = 2` at radius `r`,
/// `2j ≥ i > j`; the radius-`1/2` value is transported by `p^{6(2r−1)(j−i)}`.
pub fn lemma_entry(i: u64, j: u64, r: Radius) -> Option<BigRational> {
    if !(i > j && 2 * j >= i) {
        return None;
    }
    let two_pow = |k: u64| BigRational::from_integer(BigInt::one() << k);
    let base = rat(6 * i * j)
        * (fac(2 * j) / (two_pow(j) * fac(j))).pow(2)
        * ((two_pow(i) * fac(i)) / fac(2 * i)).pow(2)
        * (fac(2 * i - 1) / fac(i + j))
        * (fac(2 * j + i - 1) / fac(3 * j))
        * BigRational::from_integer(binomial(j, i - j));
    let p2 = Prime::new(2).unwrap();
    let e = r.scale_exponent(p2).ok()? - 6;
    Some(base * rat_pow(2, e * (j as i64 - i as i64)))
}

/// Outcome of checking the LDU structure predicted for `p ∈ {2, 3, 5}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConjectureReport {
    pub n: usize,
    /// How many `D_ii` were compared with a closed form (0 if none exists).
    pub d_checked: usize,
    pub d_mismatches: Vec<usize>,
    /// Off-diagonal `A_ij` (resp. `B_ij`) that are not divisible by `p`.
    pub a_violations: Vec<(usize, usize)>,
    pub b_violations: Vec<(usize, usize)>,
    pub lemma_checked: usize,
    pub lemma_mismatches: Vec<(usize, usize)>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.d_mismatches.is_empty()
            && self.a_violations.is_empty()
            && self.b_violations.is_empty()
            && self.lemma_mismatches.is_empty()
    }
}

/// Compares the LDU factors of `u` with the predicted structure: closed-form
/// `D`, `A ≡ B ≡ Id mod p`, and for `p = 2` the closed form of `A`.
pub fn conjecture_check(u: &UMatrix, d_limit: usize, lemma_limit: usize) -> Result<ConjectureReport, SpectralError> {
    let p = u.prime();
    let f = ldu(u)?;
    let n = u.size();
    let mut rep = ConjectureReport { n, ..Default::default() };
    for i in 1..=n.min(d_limit) {
        if let Some(expect) = d_closed_form(p, i as u64) {
            rep.d_checked += 1;
            if expect != f.d[i - 1] {
                rep.d_mismatches.push(i);
            }
        }
    }
    let not_divisible = |x: &BigRational| !x.is_zero() && rat_valuation(x, p.get()).unwrap() < 1;
    for i in 0..n {
        for j in 0..n {
            if i > j && not_divisible(&f.a[i][j]) {
                rep.a_violations.push((i + 1, j + 1));
            }
            if i < j && not_divisible(&f.b[i][j]) {
                rep.b_violations.push((i + 1, j + 1));
            }
        }
    }
    if p.get() == 2 {
        for i in 2..=n.min(lemma_limit) {
            for j in 1..i {
                if let Some(expect) = lemma_entry(i as u64, j as u64, u.radius()) {
                    rep.lemma_checked += 1;
                    if expect != f.a[i - 1][j - 1] {
                        rep.lemma_mismatches.push((i, j));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Least off-diagonal valuation of a triangular factor, with its position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinEntry {
    pub valuation: Rational64,
    pub i: usize,
    pub j: usize,
}

/// `min ν_p` of the off-diagonal entries of `A` and `B` after moving the
/// factorization of `u` to radius `r`.
///
/// Rescaling conjugates by a diagonal matrix, so `A^{(r)}_ij` is
/// `A_ij p^{e(j−i)}` with `e` rational; this works for radii where the
/// rescaled matrix itself would not be rational.
pub fn off_diagonal_valuations(u: &UMatrix, r: Radius) -> Result<(Option<MinEntry>, Option<MinEntry>), SpectralError> {
    let p = u.prime();
    let f = ldu(u)?;
    let e = r.raw_exponent(p) - u.radius().raw_exponent(p);
    let n = u.size();
    let mut best: [Option<MinEntry>; 2] = [None, None];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (slot, x) = if i > j { (0, &f.a[i][j]) } else { (1, &f.b[i][j]) };
            let Some(v) = rat_valuation(x, p.get()) else { continue };
            let v = Rational64::from(v) + e * (j as i64 - i as i64);
            if best[slot].is_none_or(|m| v < m.valuation) {
                best[slot] = Some(MinEntry { valuation: v, i: i + 1, j: j + 1 });
            }
        }
    }
    Ok((best[0], best[1]))
}
