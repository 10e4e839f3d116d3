//! The polynomial `H_p` with `j = H_p(f_p)/f_p`, the bivariate relation
//! `I_p(V f_p, 1/f_p) = 0`, and the recurrence kernel read off from `I_p`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::prime::Prime;
use crate::qseries::{self, QSeries};
use crate::uoperator::UMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HauptmodulError {
    #[error("q-expansion of j·f_p is not a polynomial of degree p+1 in f_p (residual at q^{order})")]
    InconsistentExpansion { order: i64 },
    #[error("truncation hint {got} too small, need at least {min}")]
    HintTooSmall { min: i64, got: i64 },
    #[error("linear factor does not divide the cleared relation exactly")]
    NonExactDivision,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("no sign of the generating function matches the U-matrix (first mismatch at ({i},{j}))")]
    NoSignMatches { i: usize, j: usize },
}

/// Integer polynomial in one variable, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial(Vec<BigInt>);

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// `P(g)` for a q-series `g`, by Horner's rule.
    pub fn eval_series(&self, g: &QSeries) -> QSeries {
        let trunc = g.trunc() * self.0.len().max(1) as i64;
        let mut acc = QSeries::zero(trunc);
        for c in self.0.iter().rev() {
            acc = acc.mul(g).add(&QSeries::monomial(0, BigRational::from_integer(c.clone()), trunc));
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `H_p`: the degree `p+1` integer polynomial with `j · f_p = H_p(f_p)`.
///
/// Solved by peeling off powers of `f_p` from `j · f_p`; the remaining
/// coefficients up to `q^t_hint` must then vanish.
pub fn compute_hp(p: Prime, t_hint: i64) -> Result<IntPolynomial, HauptmodulError> {
    let deg = p.get() as i64 + 1;
    if t_hint < deg + 2 {
        return Err(HauptmodulError::HintTooSmall { min: deg + 2, got: t_hint });
    }
    let f = qseries::hauptmodul_fp(p, t_hint + 1);
    let jf = qseries::j_invariant(t_hint).mul(&f);
    let mut residual = jf.truncate(t_hint);
    let mut power = QSeries::one(t_hint);
    let mut h = Vec::new();
    for k in 0..=deg {
        let c = residual.coeff(k).expect("within truncation");
        if !arith::is_integer(&c) {
            return Err(HauptmodulError::InconsistentExpansion { order: k });
        }
        residual = residual.sub(&power.scale(&c));
        h.push(c.numer().clone());
        power = power.mul(&f).truncate(t_hint);
    }
    if let Some((order, _)) = residual.terms().next() {
        return Err(HauptmodulError::InconsistentExpansion { order });
    }
    Ok(IntPolynomial::new(h))
}

/// Integer polynomial in `x, y`, keyed by `(deg_x, deg_y)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivarIntPoly {
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl BivarIntPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coeff(&self, a: u32, b: u32) -> BigInt {
        self.coeffs.get(&(a, b)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: BigInt) {
        let e = self.coeffs.entry((a, b)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> {
        self.coeffs.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|(a, b)| a + b).max()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.coeffs.keys().map(|(a, _)| *a).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.coeffs.keys().map(|(_, b)| *b).max()
    }

    /// Coefficients of `y^b` as polynomials in `x`.
    fn y_slices(&self) -> Vec<Vec<BigInt>> {
        let dy = self.degree_y().unwrap_or(0) as usize;
        let dx = self.degree_x().unwrap_or(0) as usize;
        let mut out = vec![vec![BigInt::zero(); dx + 1]; dy + 1];
        for (a, b, c) in self.terms() {
            out[b as usize][a as usize] = c.clone();
        }
        out
    }

    /// Evaluates at q-series arguments.
    pub fn eval_series(&self, x: &QSeries, y: &QSeries) -> QSeries {
        let dx = self.degree_x().unwrap_or(0);
        let dy = self.degree_y().unwrap_or(0);
        let xp: Vec<QSeries> = powers(x, dx);
        let yp: Vec<QSeries> = powers(y, dy);
        let mut acc: Option<QSeries> = None;
        for (a, b, c) in self.terms() {
            let t = xp[a as usize].mul(&yp[b as usize]).scale(&BigRational::from_integer(c.clone()));
            acc = Some(match acc {
                None => t,
                Some(s) => s.add(&t),
            });
        }
        acc.unwrap_or_else(|| QSeries::zero(x.trunc().min(y.trunc())))
    }
}

fn powers(g: &QSeries, k: u32) -> Vec<QSeries> {
    let rel = g.trunc() - g.lowest_order();
    let mut out = vec![QSeries::one(rel)];
    for _ in 0..k {
        let next = if out.len() == 1 { g.clone() } else { out.last().unwrap().mul(g) };
        out.push(next);
    }
    out
}

impl fmt::Display for BivarIntPoly {
    /// One `(a,b): coefficient` line per nonzero term, sorted by `(a, b)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b, c) in self.terms() {
            writeln!(f, "({a},{b}): {c}")?;
        }
        Ok(())
    }
}

/// `I_p(x, y)` with `I_p(V f_p, 1/f_p) = 0`.
///
/// With `c = 12/(p-1)` the level-`p` relation `H(x)/x = H(p^-c y)/(p^-c y)`
/// becomes, after multiplying by `p^{cp} x y`, an integer polynomial vanishing
/// on `y = p^c x`. Dividing out that linear factor and scaling the constant
/// term to `1` gives `I_p`.
pub fn derive_ip(p: Prime, h: &IntPolynomial) -> Result<BivarIntPoly, HauptmodulError> {
    let pp = p.get();
    let c = p.disc_exponent();
    let deg = pp + 1;
    if h.degree() != Some(deg as usize) {
        return Err(HauptmodulError::InvariantViolation(format!("H_p must have degree {deg}")));
    }
    // N(x, y) = p^{cp} y H(x) − x Σ_k h_k p^{c(p+1−k)} y^k
    let mut n = BivarIntPoly::new();
    for k in 0..=deg {
        let hk = h.coeff(k as usize);
        n.add_term(k, 1, p.pow(c * pp) * &hk);
        n.add_term(1, k, -(p.pow(c * (deg - k)) * &hk));
    }
    // synthetic division in y by (y − p^c x), from the top y-degree down
    let slices = n.y_slices();
    let dy = slices.len() - 1;
    let dx = slices.iter().map(Vec::len).max().unwrap_or(1) + 1;
    let root = p.pow(c); // y = root · x
    let mut quotient: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); dx + dy]; dy];
    let mut carry = vec![BigInt::zero(); dx + dy];
    for b in (1..=dy).rev() {
        // carry holds the quotient coefficient of y^{b-1}
        let mut cur = vec![BigInt::zero(); dx + dy];
        for (a, v) in slices[b].iter().enumerate() {
            cur[a] += v;
        }
        for a in 0..carry.len() - 1 {
            cur[a + 1] += &carry[a] * &root;
        }
        quotient[b - 1] = cur.clone();
        carry = cur;
    }
    // remainder: slice 0 + root·x·carry must vanish
    let mut rem = vec![BigInt::zero(); dx + dy + 1];
    for (a, v) in slices[0].iter().enumerate() {
        rem[a] += v;
    }
    for (a, v) in carry.iter().enumerate() {
        rem[a + 1] += v * &root;
    }
    if rem.iter().any(|v| !v.is_zero()) {
        return Err(HauptmodulError::NonExactDivision);
    }
    let mut q = BivarIntPoly::new();
    for (b, row) in quotient.iter().enumerate() {
        for (a, v) in row.iter().enumerate() {
            q.add_term(a as u32, b as u32, v.clone());
        }
    }
    let c0 = q.coeff(0, 0);
    if c0.is_zero() {
        return Err(HauptmodulError::InvariantViolation("quotient has zero constant term".into()));
    }
    let mut ip = BivarIntPoly::new();
    for (a, b, v) in q.terms() {
        let (d, r) = v.div_rem(&c0);
        if !r.is_zero() {
            return Err(HauptmodulError::NonExactDivision);
        }
        ip.add_term(a, b, d);
    }
    check_ip_shape(p, &ip)?;
    Ok(ip)
}

/// Total degree `p+1`, degree at most `p` in each variable, constant term `1`,
/// no linear terms.
fn check_ip_shape(p: Prime, ip: &BivarIntPoly) -> Result<(), HauptmodulError> {
    let pp = p.get();
    let fail = |m: &str| Err(HauptmodulError::InvariantViolation(m.to_string()));
    if ip.total_degree() != Some(pp + 1) {
        return fail("I_p must have total degree p+1");
    }
    if ip.degree_x() > Some(pp) || ip.degree_y() > Some(pp) {
        return fail("I_p must have degree at most p in each variable");
    }
    if !ip.coeff(0, 0).is_one() {
        return fail("I_p must have constant term 1");
    }
    if !ip.coeff(1, 0).is_zero() || !ip.coeff(0, 1).is_zero() {
        return fail("I_p must have no linear terms");
    }
    Ok(())
}

/// Whether `I_p(x, y) = I_p(p^-c y, p^c x)`, i.e. `I_ba = p^{c(b−a)} I_ab`.
pub fn ip_rescaling_symmetric(p: Prime, ip: &BivarIntPoly) -> bool {
    let c = p.disc_exponent() as i64;
    ip.terms().all(|(a, b, v)| {
        let lhs = BigRational::from_integer(ip.coeff(b, a));
        let rhs = BigRational::from_integer(v.clone()) * arith::rat_pow(p.get(), c * (b as i64 - a as i64));
        lhs == rhs
    })
}

/// `I_p(V f_p, 1/f_p)` to `O(q^order)`; it should vanish identically.
pub fn ip_on_hauptmodul(p: Prime, ip: &BivarIntPoly, order: i64) -> QSeries {
    let pp = p.get() as i64;
    // (1/f)^p costs p orders of relative precision at the bottom
    let t = order + 2 * pp + 2;
    let f = qseries::hauptmodul_fp(p, t);
    let x = f.v_op(p.get()).truncate(t);
    let y = f.inverse().expect("f_p starts at q");
    ip.eval_series(&x, &y).truncate(order)
}

/// `M_ab` (`1 ≤ a, b ≤ p`): the coefficient of `x^a y^b` in `−I_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceKernel {
    prime: Prime,
    m: Vec<Vec<BigInt>>,
}

impl RecurrenceKernel {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// `M_ab` with 1-based indices.
    pub fn get(&self, a: usize, b: usize) -> &BigInt {
        &self.m[a - 1][b - 1]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.m
    }

    /// Nonzero `(a, b, M_ab)` triples.
    pub fn nonzero(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for (a, row) in self.m.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push((a + 1, b + 1, v.clone()));
                }
            }
        }
        out
    }
}

pub fn recurrence_kernel(p: Prime, ip: &BivarIntPoly) -> Result<RecurrenceKernel, HauptmodulError> {
    let pp = p.get();
    check_ip_shape(p, ip)?;
    for (a, b, _) in ip.terms() {
        if (a, b) != (0, 0) && (a == 0 || b == 0) {
            return Err(HauptmodulError::InvariantViolation(format!("pure power term ({a},{b}) in I_p")));
        }
    }
    let m: Vec<Vec<BigInt>> = (1..=pp).map(|a| (1..=pp).map(|b| -ip.coeff(a, b)).collect()).collect();
    for (a, row) in m.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if a + b + 2 > pp as usize + 1 && !v.is_zero() {
                return Err(HauptmodulError::InvariantViolation("kernel not skew upper triangular".into()));
            }
        }
    }
    Ok(RecurrenceKernel { prime: p, m })
}

/// `H_p`, `I_p` and `M` for one prime.
#[derive(Clone, Debug)]
pub struct HauptmodulData {
    pub hp: IntPolynomial,
    pub ip: BivarIntPoly,
    pub kernel: RecurrenceKernel,
}

impl HauptmodulData {
    pub fn derive(p: Prime) -> Result<Self, HauptmodulError> {
        let hp = compute_hp(p, p.get() as i64 + 12)?;
        let ip = derive_ip(p, &hp)?;
        let kernel = recurrence_kernel(p, &ip)?;
        Ok(HauptmodulData { hp, ip, kernel })
    }
}

/// Which sign `s` makes `s (y/p) ∂_y log I_p = Σ u_ij x^i y^j` for `i, j ≤ n`.
///
/// With `I = 1 − Σ M_ab x^a y^b`, `1/I` obeys the same recurrence as the
/// matrix entries, and `y ∂_y I = −Σ b M_ab x^a y^b`.
pub fn rational_generation_check(kernel: &RecurrenceKernel, u0: &UMatrix, n: usize) -> Result<i32, HauptmodulError> {
    let p = kernel.prime();
    let n = n.min(u0.size());
    let terms = kernel.nonzero();
    // S = 1/I on 0..=n × 0..=n
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for i in 0..=n {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            let mut acc = BigInt::zero();
            for (a, b, m) in &terms {
                if *a <= i && *b <= j {
                    acc += m * &s[i - a][j - b];
                }
            }
            s[i][j] = acc;
        }
    }
    // g = −Σ b M_ab x^a y^b · S, so R = (s/p) g
    let mut g = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..=n {
            let mut acc = BigInt::zero();
            for (a, b, m) in &terms {
                if *a <= i && *b <= j {
                    acc -= m * *b * &s[i - a][j - b];
                }
            }
            g[i][j] = acc;
        }
    }
    let pr = BigRational::from_integer(p.to_bigint());
    let mut first_miss = (0, 0);
    for sign in [-1i32, 1] {
        let mut ok = true;
        'outer: for i in 1..=n {
            for j in 1..=n {
                let r = BigRational::from_integer(&g[i][j] * sign) / &pr;
                if &r != u0.get(i, j) {
                    ok = false;
                    if first_miss == (0, 0) {
                        first_miss = (i, j);
                    }
                    break 'outer;
                }
            }
        }
        if ok {
            return Ok(sign);
        }
    }
    Err(HauptmodulError::NoSignMatches { i: first_miss.0, j: first_miss.1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn hp_for_two_is_a_cube() {
        let h = compute_hp(prime(2), 20).unwrap();
        assert_eq!(h.coeffs(), big(&[1, 768, 196608, 16777216]).as_slice());
    }

    #[test]
    fn hp_shape_all_primes() {
        for p in Prime::all() {
            let h = compute_hp(p, 40).unwrap();
            assert_eq!(h.degree(), Some(p.get() as usize + 1), "p = {p}");
            assert!(h.coeff(0).is_one());
        }
    }

    #[test]
    fn hp_for_five_is_a_cube() {
        // (1 + 250x + 3125x^2)^3
        let h = compute_hp(prime(5), 30).unwrap();
        let mut cube = vec![BigInt::one()];
        for _ in 0..3 {
            let base = big(&[1, 250, 3125]);
            let mut next = vec![BigInt::zero(); cube.len() + 2];
            for (i, a) in cube.iter().enumerate() {
                for (j, b) in base.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            cube = next;
        }
        assert_eq!(h.coeffs(), cube.as_slice());
    }

    #[test]
    fn kernel_matches_known_displays() {
        let d2 = HauptmodulData::derive(prime(2)).unwrap();
        assert_eq!(d2.kernel.rows(), &[big(&[48, 1]), big(&[4096, 0])]);
        let d3 = HauptmodulData::derive(prime(3)).unwrap();
        assert_eq!(d3.kernel.rows(), &[big(&[270, 36, 1]), big(&[26244, 729, 0]), big(&[531441, 0, 0])]);
        assert_eq!(d2.ip.to_string(), "(0,0): 1\n(1,1): -48\n(1,2): -1\n(2,1): -4096\n");
    }

    #[test]
    fn ip_properties_all_primes() {
        for p in Prime::all() {
            let d = HauptmodulData::derive(p).unwrap();
            assert!(ip_rescaling_symmetric(p, &d.ip), "p = {p}");
            let z = ip_on_hauptmodul(p, &d.ip, 50);
            assert!(z.trunc() >= 50);
            assert!(z.is_zero(), "p = {p}: I_p(Vf, 1/f) = {:?}", z.terms().next());
            let pp = p.get() as usize;
            for a in 1..=pp {
                for b in 1..=pp {
                    if a + b > pp + 1 {
                        assert!(d.kernel.get(a, b).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_hp_fails_division() {
        let bad = IntPolynomial::new(big(&[1, 768, 196608, 16777217]));
        assert!(derive_ip(prime(2), &bad).is_err());
    }
}
