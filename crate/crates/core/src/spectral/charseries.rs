use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::SpectralError;
use crate::padic::{newton_polygon, valuation_of_rational, NewtonPolygon};
use crate::prime::Prime;
use crate::uoperator::UMatrix;

/// Size gap used to decide whether a slope has stabilized.
pub const STABILITY_GAP: usize = 5;

/// `det(I − tU_n) = Σ c_k t^k`, together with the series of the leading
/// `(n−5)`-block used to judge stability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSeries {
    prime: Prime,
    n: usize,
    coeffs: Vec<BigRational>,
    reference: Option<Vec<BigRational>>,
}

impl CharSeries {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `c_0, …, c_n`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficients of `det(xI − U_n)`, lowest degree first.
    pub fn char_poly(&self) -> Vec<BigRational> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        newton_of(&self.coeffs, self.prime)
    }
}

fn newton_of(coeffs: &[BigRational], p: Prime) -> NewtonPolygon {
    let pts: Vec<_> = coeffs.iter().enumerate().map(|(k, c)| (k as i64, valuation_of_rational(c, p))).collect();
    newton_polygon(&pts).expect("c_0 = 1 is finite")
}

/// Characteristic polynomials `det(xI − A_k)` of every leading block `A_k`,
/// `k = 0..=n`, highest degree first, by Berkowitz's division-free method.
pub fn berkowitz(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::one()]];
    for k in 1..=n {
        let m = k - 1;
        let mut t = Vec::with_capacity(k + 1);
        t.push(BigInt::one());
        t.push(-a[m][m].clone());
        // t_{s+2} = −r M^s c, with r, c the new row and column
        let mut w: Vec<BigInt> = (0..m).map(|i| a[i][m].clone()).collect();
        for s in 0..m {
            let rc: BigInt = (0..m).map(|j| &a[m][j] * &w[j]).sum();
            t.push(-rc);
            if s + 1 < m {
                let step = |i: usize| -> BigInt { (0..m).map(|j| &a[i][j] * &w[j]).sum() };
                w = if m > 24 { (0..m).into_par_iter().map(step).collect() } else { (0..m).map(step).collect() };
            }
        }
        let prev = &out[k - 1];
        let next: Vec<BigInt> = (0..=k)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..=i.min(k - 1) {
                    acc += &t[i - j] * &prev[j];
                }
                acc
            })
            .collect();
        out.push(next);
    }
    out
}

fn to_char_series(poly: &[BigInt], d: &BigInt) -> Vec<BigRational> {
    let mut scale = BigInt::one();
    poly.iter()
        .map(|c| {
            let x = BigRational::new(c.clone(), scale.clone());
            scale *= d;
            x
        })
        .collect()
}

/// Exact `det(I − tU)` via Berkowitz on the denominator-cleared matrix.
pub fn char_series(u: &UMatrix) -> CharSeries {
    let (m, d) = u.cleared();
    let polys = berkowitz(&m);
    let n = u.size();
    let reference = (n > STABILITY_GAP).then(|| to_char_series(&polys[n - STABILITY_GAP], &d));
    CharSeries { prime: u.prime(), n, coeffs: to_char_series(&polys[n], &d), reference }
}

/// How many leading slopes agree between the `n`- and `(n−5)`-truncations.
pub fn stable_slope_count(cs: &CharSeries) -> usize {
    let Some(reference) = &cs.reference else {
        return 0;
    };
    let a = cs.newton_polygon().slopes();
    let b = newton_of(reference, cs.prime).slopes();
    // the last edge of the shorter polygon is never trusted
    let limit = b.len().saturating_sub(1);
    a.iter().zip(&b).take(limit).take_while(|(x, y)| x == y).count()
}

/// The first `count` slopes, once they have stabilized.
pub fn slopes(cs: &CharSeries, count: usize) -> Result<Vec<Rational64>, SpectralError> {
    let stable = stable_slope_count(cs);
    if count > stable {
        return Err(SpectralError::UnstableRange { requested: count, stable });
    }
    Ok(cs.newton_polygon().slopes().into_iter().take(count).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::uoperator::{rescale, u_direct, Radius};

    fn big(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    /// det(xI − A) by cofactor expansion on a polynomial matrix.
    fn charpoly_oracle(a: &[Vec<i64>]) -> Vec<i64> {
        fn det(m: &[Vec<Vec<i64>>]) -> Vec<i64> {
            let n = m.len();
            if n == 0 {
                return vec![1];
            }
            let mut acc = vec![0i64; n + 1];
            for c in 0..n {
                let minor: Vec<Vec<Vec<i64>>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect()).collect();
                let sub = det(&minor);
                let sign = if c % 2 == 0 { 1 } else { -1 };
                for (i, x) in m[0][c].iter().enumerate() {
                    for (j, y) in sub.iter().enumerate() {
                        acc[i + j] += sign * x * y;
                    }
                }
            }
            acc
        }
        let n = a.len();
        let m: Vec<Vec<Vec<i64>>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { vec![-a[i][j], 1] } else { vec![-a[i][j]] }).collect())
            .collect();
        det(&m)
    }

    #[test]
    fn berkowitz_matches_cofactor_oracle() {
        let a = [vec![2, -1, 3, 0], vec![4, 0, 1, 5], vec![-2, 7, 1, 1], vec![3, 3, -3, 2]];
        let got = berkowitz(&big(&[&[2, -1, 3, 0], &[4, 0, 1, 5], &[-2, 7, 1, 1], &[3, 3, -3, 2]]));
        for k in 0..=4 {
            let block: Vec<Vec<i64>> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
            let mut oracle = charpoly_oracle(&block);
            oracle.reverse();
            let got_k: Vec<i64> = got[k].iter().map(|x| x.try_into().unwrap()).collect();
            assert_eq!(got_k, oracle, "block {k}");
        }
    }

    #[test]
    fn small_series() {
        let p2 = Prime::new(2).unwrap();
        let cs = char_series(&u_direct(p2, 1));
        assert_eq!(cs.coeffs(), &[rat(1), rat(-24)]);
        let zero = UMatrix::from_entries(p2, vec![vec![rat(0); 3]; 3], Radius::ZERO, 7);
        assert_eq!(char_series(&zero).coeffs(), &[rat(1), rat(0), rat(0), rat(0)]);
    }

    #[test]
    fn p5_three_by_three() {
        let p = Prime::new(5).unwrap();
        let cs = char_series(&u_direct(p, 3));
        let v: Vec<_> = cs.coeffs().iter().map(|c| valuation_of_rational(c, p).finite().unwrap()).collect();
        assert_eq!(v, vec![0, 1, 5, 10]);
        let s: Vec<_> = cs.newton_polygon().slopes().into_iter().map(|x| x.to_integer()).collect();
        assert_eq!(s, vec![1, 4, 5]);
    }

    #[test]
    fn radius_does_not_change_the_series() {
        let p = Prime::new(3).unwrap();
        let u = u_direct(p, 8);
        let r = rescale(&u, Radius::new(1, 2)).unwrap();
        assert_eq!(char_series(&u).coeffs(), char_series(&r).coeffs());
    }

    #[test]
    fn unstable_request_is_refused() {
        let p = Prime::new(2).unwrap();
        let cs = char_series(&u_direct(p, 4));
        assert!(matches!(slopes(&cs, 1), Err(SpectralError::UnstableRange { .. })));
        let cs = char_series(&u_direct(p, 12));
        assert_eq!(slopes(&cs, 3).unwrap(), vec![Rational64::from(3), Rational64::from(7), Rational64::from(13)]);
    }
}
