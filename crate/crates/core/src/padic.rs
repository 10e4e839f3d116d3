//! Capped-precision p-adic scalars, Newton polygons and root finding over `Q_p`.
//!
//! Exact linear algebra elsewhere in the crate runs over the rationals; the
//! types here are only used at the boundary, where eigenvalues, eigenvector
//! coordinates and q-coefficients leave `Q` and live in `Q_p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::arith::{self, prime_power};
use crate::prime::Prime;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("Newton polygon needs at least one point of finite valuation")]
    EmptyInput,
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("roots of valuation {valuation} (multiplicity {multiplicity}) are not isolated simple roots in Q_p")]
    NonIsolatedRoot { valuation: Rational64, multiplicity: u64 },
    #[error("division by a p-adic number indistinguishable from zero")]
    DivisionByZero,
}

/// A valuation: an integer, or `+∞` for exact zero.
///
/// The derived order puts every finite value below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// `ν_p(x)` for a rational `x`; `+∞` for zero.
pub fn valuation_of_rational(x: &BigRational, p: Prime) -> Valuation {
    match arith::rat_valuation(x, p.get()) {
        Some(v) => Valuation::Finite(v),
        None => Valuation::Infinite,
    }
}

/// An element `p^valuation · unit + O(p^(valuation + relprec))` of `Q_p`.
///
/// Three shapes occur:
/// * `relprec > 0`: a nonzero value; `unit` lies in `[1, p^relprec)` and is prime to `p`.
/// * `relprec == 0`: a value indistinguishable from zero, known modulo `p^valuation`.
/// * `valuation == Infinite`: exact zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    prime: Prime,
    valuation: Valuation,
    unit: BigInt,
    relprec: u32,
}

impl PadicScalar {
    pub fn exact_zero(prime: Prime) -> Self {
        PadicScalar { prime, valuation: Valuation::Infinite, unit: BigInt::zero(), relprec: 0 }
    }

    /// Zero known only modulo `p^abs_prec`.
    pub fn zero_to(prime: Prime, abs_prec: i64) -> Self {
        PadicScalar { prime, valuation: Valuation::Finite(abs_prec), unit: BigInt::zero(), relprec: 0 }
    }

    pub fn one(prime: Prime, relprec: u32) -> Self {
        Self::from_parts(prime, 0, BigInt::one(), relprec)
    }

    /// Builds `p^valuation · unit` to `relprec` digits, absorbing any factors of
    /// `p` in `unit` into the valuation (which consumes relative precision).
    pub fn from_parts(prime: Prime, valuation: i64, unit: BigInt, relprec: u32) -> Self {
        let abs = valuation + relprec as i64;
        if relprec == 0 {
            return Self::zero_to(prime, abs);
        }
        let modulus = prime_power(prime.get(), relprec);
        let u = unit.mod_floor(&modulus);
        if u.is_zero() {
            return Self::zero_to(prime, abs);
        }
        let (shift, u) = arith::split_int(&u, prime.get());
        let relprec = relprec - shift as u32;
        PadicScalar {
            prime,
            valuation: Valuation::Finite(valuation + shift as i64),
            unit: u.mod_floor(&prime_power(prime.get(), relprec)),
            relprec,
        }
    }

    /// The image of an exact rational, truncated to `relprec` significant digits.
    pub fn from_rational(x: &BigRational, prime: Prime, relprec: u32) -> Self {
        if x.is_zero() {
            return Self::exact_zero(prime);
        }
        let p = prime.get();
        let (vn, un) = arith::split_int(x.numer(), p);
        let (vd, ud) = arith::split_int(x.denom(), p);
        let modulus = prime_power(p, relprec);
        let unit = arith::rat_residue(&BigRational::new(un, ud), &modulus);
        PadicScalar { prime, valuation: Valuation::Finite(vn as i64 - vd as i64), unit, relprec }
    }

    pub fn from_int(n: &BigInt, prime: Prime, relprec: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()), prime, relprec)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// For `O(p^N)` this is `N`, a lower bound rather than a true valuation.
    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn relprec(&self) -> u32 {
        self.relprec
    }

    /// The exponent `N` with the value known modulo `p^N`.
    pub fn abs_prec(&self) -> Valuation {
        match self.valuation {
            Valuation::Finite(v) => Valuation::Finite(v + self.relprec as i64),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.valuation.is_infinite()
    }

    /// True when no nonzero digit is known (exact zero or `O(p^N)`).
    pub fn is_zero(&self) -> bool {
        self.relprec == 0
    }

    /// The rational `p^v · unit` representing this class (zero for zeros).
    pub fn lift(&self) -> BigRational {
        match self.valuation {
            Valuation::Finite(v) if self.relprec > 0 => {
                arith::rat_pow(self.prime.get(), v) * BigRational::from_integer(self.unit.clone())
            }
            _ => BigRational::zero(),
        }
    }

    /// Discards digits beyond absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match self.abs_prec() {
            Valuation::Finite(cur) if cur <= abs => self.clone(),
            _ => match self.valuation {
                Valuation::Finite(v) if self.relprec > 0 => {
                    if abs <= v {
                        Self::zero_to(self.prime, abs)
                    } else {
                        Self::from_parts(self.prime, v, self.unit.clone(), (abs - v) as u32)
                    }
                }
                _ => Self::zero_to(self.prime, abs),
            },
        }
    }

    /// Keeps at most `relprec` significant digits.
    pub fn truncate_rel(&self, relprec: u32) -> Self {
        if self.relprec <= relprec {
            return self.clone();
        }
        let v = self.valuation.finite().unwrap();
        Self::from_parts(self.prime, v, self.unit.clone(), relprec)
    }

    /// Residue modulo `p^k`, when the value is integral and known that far.
    pub fn residue(&self, k: u32) -> Option<BigInt> {
        let modulus = prime_power(self.prime.get(), k);
        match (self.valuation, self.abs_prec()) {
            (Valuation::Infinite, _) => Some(BigInt::zero()),
            (Valuation::Finite(v), Valuation::Finite(a)) => {
                if a < k as i64 || v < 0 {
                    return None;
                }
                if self.relprec == 0 {
                    return Some(BigInt::zero());
                }
                Some((prime_power(self.prime.get(), v as u32) * &self.unit).mod_floor(&modulus))
            }
            _ => None,
        }
    }

    /// `ν_p(self − other) ≥ abs`, judged only on digits both sides know.
    pub fn agrees_with(&self, other: &PadicScalar, abs: i64) -> bool {
        let diff = self - other;
        match diff.valuation {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= abs,
        }
    }

    pub fn checked_div(&self, rhs: &PadicScalar) -> Result<PadicScalar, PadicError> {
        assert_eq!(self.prime, rhs.prime, "mixed primes");
        if rhs.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let vb = rhs.valuation.finite().unwrap();
        match self.valuation {
            Valuation::Infinite => Ok(self.clone()),
            Valuation::Finite(va) if self.relprec == 0 => Ok(Self::zero_to(self.prime, va - vb)),
            Valuation::Finite(va) => {
                let r = self.relprec.min(rhs.relprec);
                let modulus = prime_power(self.prime.get(), r);
                let inv = arith::mod_inverse(&rhs.unit, &modulus).expect("unit is invertible");
                Ok(PadicScalar {
                    prime: self.prime,
                    valuation: Valuation::Finite(va - vb),
                    unit: (&self.unit * inv).mod_floor(&modulus),
                    relprec: r,
                })
            }
        }
    }

    pub fn inverse(&self) -> Result<PadicScalar, PadicError> {
        Self::one(self.prime, self.relprec.max(1)).checked_div(self)
    }

    pub fn mul_rational(&self, x: &BigRational) -> PadicScalar {
        let rel = self.relprec.max(1);
        self * &PadicScalar::from_rational(x, self.prime, rel)
    }

    /// Table rendering `p^a×b`, with `b` reduced to `digits` significant digits.
    ///
    /// Valuation 0 prints `b` alone and valuation 1 prints `p×b`.
    pub fn to_table_string(&self, digits: u32) -> String {
        let p = self.prime.get();
        match self.valuation {
            Valuation::Infinite => "0".to_string(),
            Valuation::Finite(a) if self.relprec == 0 => format!("O({p}^{a})"),
            Valuation::Finite(a) => {
                let b = self.unit.mod_floor(&prime_power(p, digits.min(self.relprec)));
                match a {
                    0 => b.to_string(),
                    1 => format!("{p}×{b}"),
                    _ => format!("{p}^{a}×{b}"),
                }
            }
        }
    }
}

impl fmt::Display for PadicScalar {
    /// `p^a*b`; zero known to `O(p^N)` renders as `0 + O(p^N)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime.get();
        match self.valuation {
            Valuation::Infinite => f.write_str("0"),
            Valuation::Finite(a) if self.relprec == 0 => write!(f, "0 + O({p}^{a})"),
            Valuation::Finite(a) => write!(f, "{p}^{a}*{}", self.unit),
        }
    }
}

impl<'a> Add<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;

    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        assert_eq!(self.prime, rhs.prime, "mixed primes");
        if self.is_exact_zero() {
            return rhs.clone();
        }
        if rhs.is_exact_zero() {
            return self.clone();
        }
        let p = self.prime.get();
        let va = self.valuation.finite().unwrap();
        let vb = rhs.valuation.finite().unwrap();
        let abs = (va + self.relprec as i64).min(vb + rhs.relprec as i64);
        let v = va.min(vb);
        if abs <= v {
            return PadicScalar::zero_to(self.prime, abs);
        }
        let width = (abs - v) as u32;
        let modulus = prime_power(p, width);
        let term = |x: &PadicScalar, vx: i64| -> BigInt {
            if x.relprec == 0 || vx - v >= width as i64 {
                BigInt::zero()
            } else {
                &x.unit * prime_power(p, (vx - v) as u32)
            }
        };
        let sum = (term(self, va) + term(rhs, vb)).mod_floor(&modulus);
        PadicScalar::from_parts(self.prime, v, sum, width)
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        if self.relprec == 0 {
            return self.clone();
        }
        let modulus = prime_power(self.prime.get(), self.relprec);
        PadicScalar { unit: (-&self.unit).mod_floor(&modulus), ..self.clone() }
    }
}

impl<'a> Sub<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        assert_eq!(self.prime, rhs.prime, "mixed primes");
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return PadicScalar::exact_zero(self.prime);
        }
        let v = self.valuation.finite().unwrap() + rhs.valuation.finite().unwrap();
        let r = self.relprec.min(rhs.relprec);
        if r == 0 {
            // O(p^a) · p^b u is known modulo p^(a+b).
            return PadicScalar::zero_to(self.prime, v);
        }
        let modulus = prime_power(self.prime.get(), r);
        PadicScalar {
            prime: self.prime,
            valuation: Valuation::Finite(v),
            unit: (&self.unit * &rhs.unit).mod_floor(&modulus),
            relprec: r,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: PadicScalar) -> PadicScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        -&self
    }
}

/// One edge of a Newton polygon, from degree `start` to degree `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: i64,
    pub end: i64,
    pub slope: Rational64,
}

impl Segment {
    pub fn length(&self) -> u64 {
        (self.end - self.start) as u64
    }
}

/// Lower convex hull of a set of `(degree, valuation)` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(i64, i64)>,
    segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Slopes listed with multiplicity, in increasing order.
    pub fn slopes(&self) -> Vec<Rational64> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.slope, s.length() as usize))
            .collect()
    }

    /// Height of the polygon above `degree`, if `degree` lies in its span.
    pub fn height_at(&self, degree: i64) -> Option<Rational64> {
        let (d0, v0) = *self.vertices.first()?;
        if degree == d0 {
            return Some(Rational64::from_integer(v0));
        }
        let mut acc = Rational64::from_integer(v0);
        for s in &self.segments {
            if degree <= s.end && degree >= s.start {
                return Some(acc + s.slope * (degree - s.start));
            }
            acc += s.slope * (s.end - s.start);
        }
        None
    }
}

/// Computes the lower convex hull of `points`; points of infinite valuation
/// impose no constraint and are dropped.
pub fn newton_polygon(points: &[(i64, Valuation)]) -> Result<NewtonPolygon, PadicError> {
    let mut pts: Vec<(i64, i64)> =
        points.iter().filter_map(|&(d, v)| v.finite().map(|v| (d, v))).collect();
    if pts.is_empty() {
        return Err(PadicError::EmptyInput);
    }
    pts.sort();
    // keep the lowest valuation per degree
    pts.dedup_by(|b, a| a.0 == b.0);

    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for pt in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let cross = (x2 - x1) as i128 * (pt.1 - y1) as i128 - (y2 - y1) as i128 * (pt.0 - x1) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            start: w[0].0,
            end: w[1].0,
            slope: Rational64::new(w[1].1 - w[0].1, w[1].0 - w[0].0),
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, segments })
}

/// The roots of a polynomial sharing one valuation (one Newton-polygon edge).
#[derive(Clone, Debug)]
pub struct SegmentRoots {
    /// Common valuation of these roots; `None` for the root at zero.
    pub valuation: Option<Rational64>,
    pub multiplicity: u64,
    /// The simple roots that could be Hensel-lifted; complete when its
    /// length equals `multiplicity`.
    pub roots: Vec<PadicScalar>,
}

impl SegmentRoots {
    pub fn is_resolved(&self) -> bool {
        self.roots.len() as u64 == self.multiplicity
    }
}

fn newton_points(poly: &[BigRational], p: Prime) -> Vec<(i64, Valuation)> {
    poly.iter().enumerate().map(|(k, c)| (k as i64, valuation_of_rational(c, p))).collect()
}

/// Groups the roots of `poly` (coefficients in increasing degree) by valuation
/// and Hensel-lifts every simple root whose valuation is an integer.
///
/// Each lifted root `r` is known to absolute precision at least `abs_prec` and
/// satisfies `ν_p(poly(r)) ≥ abs_prec`. Groups are ordered by increasing root
/// valuation, with the root at zero (if any) last.
pub fn segment_roots(poly: &[BigRational], p: Prime, abs_prec: i64) -> Result<Vec<SegmentRoots>, PadicError> {
    let zeros = poly.iter().take_while(|c| c.is_zero()).count();
    if zeros == poly.len() {
        return Err(PadicError::ZeroPolynomial);
    }
    let reduced = &poly[zeros..];
    let mut out = Vec::new();
    if reduced.len() > 1 {
        let np = newton_polygon(&newton_points(reduced, p))?;
        // root valuation is minus the edge slope: walk the edges backwards
        for seg in np.segments().iter().rev() {
            let valuation = -seg.slope;
            let mut group = SegmentRoots { valuation: Some(valuation), multiplicity: seg.length(), roots: vec![] };
            if valuation.is_integer() {
                group.roots = lift_segment(reduced, p, seg, *valuation.numer(), abs_prec);
            }
            out.push(group);
        }
    }
    if zeros > 0 {
        out.push(SegmentRoots {
            valuation: None,
            multiplicity: zeros as u64,
            roots: vec![PadicScalar::exact_zero(p); if zeros == 1 { 1 } else { 0 }],
        });
    }
    Ok(out)
}

/// All roots of `poly` in `Q_p` to absolute precision `abs_prec`; fails unless
/// every root is simple, of integral valuation and residually rational.
pub fn padic_roots(poly: &[BigRational], p: Prime, abs_prec: i64) -> Result<Vec<PadicScalar>, PadicError> {
    let mut roots = Vec::new();
    for g in segment_roots(poly, p, abs_prec)? {
        if !g.is_resolved() {
            return Err(PadicError::NonIsolatedRoot {
                valuation: g.valuation.unwrap_or_else(|| Rational64::from_integer(i64::MAX)),
                multiplicity: g.multiplicity,
            });
        }
        roots.extend(g.roots);
    }
    Ok(roots)
}

fn eval_mod(coeffs: &[BigInt], y: &BigInt, modulus: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| (acc * y + c).mod_floor(modulus))
}

fn derivative(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k).collect()
}

/// Substitutes `x = p^v y`, divides by the edge height so the result is
/// `p`-integral, then lifts every simple nonzero root of the reduction.
fn lift_segment(poly: &[BigRational], p: Prime, seg: &Segment, v: i64, abs_prec: i64) -> Vec<PadicScalar> {
    let pp = p.get();
    // height of the edge line at degree 0 after substitution
    let w = valuation_of_rational(&poly[seg.start as usize], p).finite().unwrap() + v * seg.start;
    let scaled: Vec<BigRational> = poly
        .iter()
        .enumerate()
        .map(|(k, c)| c * arith::rat_pow(pp, v * k as i64 - w))
        .collect();
    let work = (abs_prec - v).max(abs_prec - w).max(1) as u32;
    let modulus = prime_power(pp, work);
    let coeffs: Vec<BigInt> = scaled.iter().map(|c| arith::rat_residue(c, &modulus)).collect();
    let dcoeffs = derivative(&coeffs);

    let pm = BigInt::from(pp);
    let mut roots = Vec::new();
    for y0 in 1..pp {
        let y0 = BigInt::from(y0);
        if !eval_mod(&coeffs, &y0, &pm).is_zero() || eval_mod(&dcoeffs, &y0, &pm).is_zero() {
            continue;
        }
        let mut y = y0;
        for _ in 0..256 {
            let fy = eval_mod(&coeffs, &y, &modulus);
            if fy.is_zero() {
                break;
            }
            let dy = eval_mod(&dcoeffs, &y, &modulus);
            let inv = arith::mod_inverse(&dy, &modulus).expect("simple root has unit derivative");
            y = (y - fy * inv).mod_floor(&modulus);
        }
        roots.push(PadicScalar::from_parts(p, v, y, work));
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn pts(v: &[(i64, i64)]) -> Vec<(i64, Valuation)> {
        v.iter().map(|&(d, x)| (d, Valuation::Finite(x))).collect()
    }

    #[test]
    fn rational_valuations() {
        assert_eq!(valuation_of_rational(&rat(24), p(2)), Valuation::Finite(3));
        assert_eq!(valuation_of_rational(&rat(0), p(5)), Valuation::Infinite);
        assert_eq!(valuation_of_rational(&rat(2048), p(2)), Valuation::Finite(11));
        assert_eq!(valuation_of_rational(&ratio(3, 250), p(5)), Valuation::Finite(-3));
    }

    #[test]
    fn newton_polygon_examples() {
        let np = newton_polygon(&pts(&[(0, 0), (1, 1), (2, 5), (3, 10)])).unwrap();
        let s: Vec<_> = np.slopes();
        assert_eq!(s, vec![Rational64::from(1), Rational64::from(4), Rational64::from(5)]);
        assert!(np.segments().iter().all(|s| s.length() == 1));

        let np = newton_polygon(&pts(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(np.slopes(), vec![Rational64::from(0)]);

        let np = newton_polygon(&pts(&[(0, 0), (1, 2), (2, 2)])).unwrap();
        assert_eq!(np.segments().len(), 1);
        assert_eq!(np.segments()[0].length(), 2);
        assert_eq!(np.segments()[0].slope, Rational64::from(1));
    }

    #[test]
    fn newton_polygon_ignores_infinite_points_and_merges_collinear() {
        let mut input = pts(&[(0, 0), (1, 1), (2, 2), (4, 6)]);
        input.push((3, Valuation::Infinite));
        let np = newton_polygon(&input).unwrap();
        assert_eq!(np.vertices(), &[(0, 0), (2, 2), (4, 6)]);
        assert_eq!(np.slopes().len(), 4);
        assert_eq!(newton_polygon(&[(0, Valuation::Infinite)]), Err(PadicError::EmptyInput));
    }

    #[test]
    fn fractional_slopes() {
        let np = newton_polygon(&pts(&[(0, 0), (1, 3), (2, 5)])).unwrap();
        assert_eq!(np.slopes(), vec![Rational64::new(5, 2), Rational64::new(5, 2)]);
        assert_eq!(np.height_at(1), Some(Rational64::new(5, 2)));
    }

    #[test]
    fn idempotent_roots() {
        // x^2 - x
        let roots = padic_roots(&[rat(0), rat(-1), rat(1)], p(5), 10).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| r.is_exact_zero()));
        assert!(roots.iter().any(|r| r.residue(10) == Some(BigInt::one())));
    }

    #[test]
    fn square_roots_of_six_mod_25() {
        // brute force: squares congruent to 6 mod 25
        let brute: Vec<u32> = (0..25u32).filter(|x| (x * x) % 25 == 6).collect();
        assert_eq!(brute, vec![9, 16]);
        let roots = padic_roots(&[rat(-6), rat(0), rat(1)], p(5), 2).unwrap();
        let mut got: Vec<BigInt> = roots.iter().map(|r| r.residue(2).unwrap()).collect();
        got.sort();
        assert_eq!(got, vec![BigInt::from(9), BigInt::from(16)]);
    }

    #[test]
    fn ramified_roots_are_reported_not_lifted() {
        // x^2 - 5 has roots of valuation 1/2
        let err = padic_roots(&[rat(-5), rat(0), rat(1)], p(5), 4).unwrap_err();
        assert!(matches!(err, PadicError::NonIsolatedRoot { multiplicity: 2, .. }));
        // x^2 - 2 is irreducible mod 5: slope 0 but no residue roots
        assert!(padic_roots(&[rat(-2), rat(0), rat(1)], p(5), 4).is_err());
    }

    #[test]
    fn roots_of_distinct_valuations() {
        // (x - 5)(x - 50)(x - 3) = x^3 - 58x^2 + 415x - 750
        let poly = [rat(-750), rat(415), rat(-58), rat(1)];
        let groups = segment_roots(&poly, p(5), 12).unwrap();
        let vals: Vec<_> = groups.iter().map(|g| g.valuation.unwrap()).collect();
        assert_eq!(vals, vec![Rational64::from(0), Rational64::from(1), Rational64::from(2)]);
        let exact = [rat(3), rat(5), rat(50)];
        for (g, e) in groups.iter().zip(exact.iter()) {
            let r = &g.roots[0];
            assert!(r.agrees_with(&PadicScalar::from_rational(e, p(5), 20), 12));
        }
    }

    #[test]
    fn arithmetic_precision_rules() {
        let pr = p(5);
        let a = PadicScalar::from_rational(&rat(26), pr, 4); // 1 + 5^2
        let b = PadicScalar::from_rational(&rat(-1), pr, 6);
        let s = &a + &b; // 25, abs precision min(4, 6) = 4
        assert_eq!(s.valuation(), Valuation::Finite(2));
        assert_eq!(s.abs_prec(), Valuation::Finite(4));
        let m = &a * &PadicScalar::from_rational(&rat(10), pr, 3);
        assert_eq!(m.valuation(), Valuation::Finite(1));
        assert_eq!(m.relprec(), 3);
        let d = m.checked_div(&PadicScalar::from_rational(&rat(5), pr, 8)).unwrap();
        assert_eq!(d.valuation(), Valuation::Finite(0));
        let z = &a - &a;
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(z.to_string(), "0 + O(5^4)");
        assert!(matches!(a.checked_div(&z), Err(PadicError::DivisionByZero)));
    }

    #[test]
    fn rendering() {
        let x = PadicScalar::from_parts(p(5), 4, BigInt::from(7540786), 10);
        assert_eq!(x.to_string(), "5^4*7540786");
        assert_eq!(x.to_table_string(10), "5^4×7540786");
        let y = PadicScalar::from_parts(p(5), 1, BigInt::from(610813), 10);
        assert_eq!(y.to_table_string(10), "5×610813");
        let z = PadicScalar::from_parts(p(5), 0, BigInt::from(8295001), 10);
        assert_eq!(z.to_table_string(10), "8295001");
    }
}
