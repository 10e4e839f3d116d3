use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::eigen::EigenPackage;
use super::SpectralError;
use crate::arith::{rat, rat_pow, rat_valuation};
use crate::hauptmodul::compute_hp;
use crate::padic::{PadicScalar, Valuation};
use crate::prime::Prime;
use crate::qseries::{self, QSeries};
use crate::uoperator::{rescale, Radius, UMatrix};

pub type PadicVector = Vec<PadicScalar>;

/// The image of an exact rational known to absolute precision `abs`.
pub(crate) fn to_padic(x: &BigRational, p: Prime, abs: i64) -> PadicScalar {
    if x.is_zero() {
        return PadicScalar::exact_zero(p);
    }
    let v = rat_valuation(x, p.get()).unwrap();
    if v >= abs {
        return PadicScalar::zero_to(p, abs);
    }
    PadicScalar::from_rational(x, p, (abs - v) as u32)
}

fn weight(p: Prime, i: usize) -> BigRational {
    rat(i as u64) * rat_pow(p.get(), -(p.disc_exponent() as i64) * i as i64)
}

/// `⟨h, k⟩ = Σ i h_i k_i p^{−12i/(p−1)}` on exact `f`-coordinates.
pub fn pairing_exact(h: &[BigRational], k: &[BigRational], p: Prime) -> Result<BigRational, SpectralError> {
    if h.len() != k.len() {
        return Err(SpectralError::TruncationMismatch { left: h.len(), right: k.len() });
    }
    Ok(h.iter().zip(k).enumerate().fold(BigRational::zero(), |acc, (i, (a, b))| acc + a * b * weight(p, i + 1)))
}

/// The same form on p-adic `f`-coordinates.
pub fn pairing(h: &[PadicScalar], k: &[PadicScalar], p: Prime) -> Result<PadicScalar, SpectralError> {
    if h.len() != k.len() {
        return Err(SpectralError::TruncationMismatch { left: h.len(), right: k.len() });
    }
    let mut acc = PadicScalar::exact_zero(p);
    for (i, (a, b)) in h.iter().zip(k).enumerate() {
        if a.is_exact_zero() || b.is_exact_zero() {
            continue;
        }
        acc = &acc + &(a * b).mul_rational(&weight(p, i + 1));
    }
    Ok(acc)
}

/// Coordinates `h_1..h_n` of a cusp form `h = Σ h_i f_p^i`.
pub fn express_in_f_basis(h: &QSeries, p: Prime, n: usize) -> Result<Vec<BigRational>, SpectralError> {
    if h.lowest_order() < 1 && !h.is_zero() {
        return Err(SpectralError::NotCuspidal(h.lowest_order()));
    }
    if h.trunc() < n as i64 + 1 {
        return Err(SpectralError::SeriesTooShort { have: h.trunc(), need: n as i64 + 1 });
    }
    let f = qseries::hauptmodul_fp(p, n as i64 + 1);
    let mut r = h.truncate(n as i64 + 1);
    let mut power = f.clone();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let c = r.coeff(i as i64).unwrap();
        if !c.is_zero() {
            r = r.sub(&power.scale(&c));
        }
        out.push(c);
        power = power.mul(&f);
    }
    Ok(out)
}

/// `f`-coordinates of `1/j`, computed from the q-expansion and checked
/// against the power series `x / H_p(x)`.
pub fn inverse_j_coords(p: Prime, n: usize) -> Result<Vec<BigRational>, SpectralError> {
    let t = n as i64 + 1;
    let inv_j = qseries::j_invariant(t).inverse()?;
    let coords = express_in_f_basis(&inv_j, p, n)?;
    let h = compute_hp(p, p.get() as i64 + 12)?;
    // 1/H as a power series in x, H(0) = 1
    let hc = h.coeffs();
    let mut inv = vec![BigInt::one()];
    for k in 1..n {
        let mut s = BigInt::zero();
        for (i, c) in hc.iter().enumerate().skip(1).take(k) {
            s += c * &inv[k - i];
        }
        inv.push(-s);
    }
    for (i, c) in coords.iter().enumerate() {
        if *c != BigRational::from_integer(inv[i].clone()) {
            return Err(SpectralError::InconsistentExpansion(i + 1));
        }
    }
    Ok(coords)
}

/// `c_i = ⟨h, φ_i⟩ / ⟨φ_i, φ_i⟩` for `h` given by exact `f`-coordinates.
pub fn spectral_coefficients(h: &[BigRational], eigens: &[EigenPackage]) -> Result<PadicVector, SpectralError> {
    let mut out = Vec::with_capacity(eigens.len());
    for e in eigens {
        let n = e.f_coords.len();
        if h.len() < n {
            return Err(SpectralError::TruncationMismatch { left: h.len(), right: n });
        }
        let abs = e.eigenvalue.abs_prec().finite().unwrap_or(64);
        let hp: PadicVector = h[..n].iter().map(|x| to_padic(x, e.prime(), abs)).collect();
        let num = pairing(&hp, &e.f_coords, e.prime())?;
        if e.self_pairing.is_zero() {
            return Err(SpectralError::DegeneratePairing(e.index));
        }
        out.push(num.checked_div(&e.self_pairing)?);
    }
    Ok(out)
}

/// `(U/λ)^steps h` in `f`-coordinates.
pub fn iterate_projection(h: &[BigRational], u: &UMatrix, lambda: &PadicScalar, steps: usize) -> Result<PadicVector, SpectralError> {
    let u0 = rescale(u, Radius::ZERO)?;
    let p = u.prime();
    let n = u0.size();
    if h.len() != n {
        return Err(SpectralError::TruncationMismatch { left: h.len(), right: n });
    }
    let abs = lambda.abs_prec().finite().unwrap_or(64);
    let m: Vec<Vec<PadicScalar>> = u0.rows().iter().map(|r| r.iter().map(|x| to_padic(x, p, abs)).collect()).collect();
    let mut v: PadicVector = h.iter().map(|x| to_padic(x, p, abs)).collect();
    for _ in 0..steps {
        let mut next = Vec::with_capacity(n);
        for row in &m {
            let mut acc = PadicScalar::exact_zero(p);
            for (a, x) in row.iter().zip(&v) {
                if !a.is_exact_zero() && !x.is_exact_zero() {
                    acc = &acc + &(a * x);
                }
            }
            next.push(acc.checked_div(lambda)?);
        }
        v = next;
    }
    Ok(v)
}

/// `ν_r(h − Σ_{i≤m} c_i φ_i)` for `m = 0..=eigens.len()`, where the norm of
/// `Σ a_i f^i` at radius `r` is `min_i ν_p(a_i) − 12 r i/(p−1)`.
///
/// Coordinates known only to `O(p^N)` contribute `N`.
pub fn residual_norms(
    h: &[BigRational],
    eigens: &[EigenPackage],
    coeffs: &[PadicScalar],
    r: Radius,
) -> Result<Vec<Rational64>, SpectralError> {
    let Some(first) = eigens.first() else {
        return Ok(vec![]);
    };
    let p = first.prime();
    let n = first.f_coords.len();
    if h.len() < n {
        return Err(SpectralError::TruncationMismatch { left: h.len(), right: n });
    }
    let abs = first.eigenvalue.abs_prec().finite().unwrap_or(64);
    let e = r.raw_exponent(p);
    let norm = |v: &PadicVector| -> Rational64 {
        v.iter()
            .enumerate()
            .filter_map(|(i, x)| match x.valuation() {
                Valuation::Infinite => None,
                Valuation::Finite(a) => Some(Rational64::from(a) - e * (i as i64 + 1)),
            })
            .min()
            .unwrap_or_else(|| Rational64::from(i64::MAX / 4))
    };
    let mut res: PadicVector = h[..n].iter().map(|x| to_padic(x, p, abs)).collect();
    let mut out = vec![norm(&res)];
    for (c, phi) in coeffs.iter().zip(eigens) {
        for (x, y) in res.iter_mut().zip(&phi.f_coords) {
            *x = &*x - &(c * y);
        }
        out.push(norm(&res));
    }
    Ok(out)
}
