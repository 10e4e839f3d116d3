use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use rayon::prelude::*;

use super::charseries::char_series;
use super::expansion::{pairing, to_padic, PadicVector};
use super::SpectralError;
use crate::arith::rat_pow;
use crate::padic::{segment_roots, PadicScalar, Valuation};
use crate::prime::Prime;
use crate::qseries;
use crate::uoperator::{Radius, UMatrix};

/// Number of q-expansion coefficients kept per eigenfunction.
pub const QEXP_TERMS: usize = 20;

/// One finite-slope eigenfunction of a truncated `U`.
#[derive(Clone, Debug)]
pub struct EigenPackage {
    /// 1-based position in order of increasing slope.
    pub index: usize,
    pub eigenvalue: PadicScalar,
    pub slope: Rational64,
    /// Coordinates in the `(c f_p)^i` basis of the matrix's radius.
    pub coords: PadicVector,
    /// Coordinates in the `f_p^i` basis; `f_coords[0] = 1`.
    pub f_coords: PadicVector,
    /// Coefficients of `q^1, q^2, …`; the first is exactly 1.
    pub qexp: PadicVector,
    pub self_pairing: PadicScalar,
    pub radius: Radius,
    /// `ν_p(U v − λ v)` over the coordinates, at the matrix's radius.
    pub residual_valuation: Valuation,
}

impl EigenPackage {
    pub fn prime(&self) -> Prime {
        self.eigenvalue.prime()
    }
}

/// Eigenfunctions found before the first slope that could not be resolved.
#[derive(Clone, Debug)]
pub struct PartialEigen {
    pub packages: Vec<EigenPackage>,
    pub error: Option<SpectralError>,
}

fn padic_matrix(u: &UMatrix, abs: i64) -> Vec<Vec<PadicScalar>> {
    let p = u.prime();
    u.rows().iter().map(|row| row.iter().map(|x| to_padic(x, p, abs)).collect()).collect()
}

/// A vector spanning the kernel of a corank-one matrix, by full pivoting on
/// the entry of least valuation.
fn kernel_vector(mut a: Vec<Vec<PadicScalar>>, p: Prime, abs: i64, index: usize) -> Result<PadicVector, SpectralError> {
    let n = a.len();
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    // (row, col, columns still free when this pivot was taken)
    let mut pivots: Vec<(usize, usize, Vec<usize>)> = Vec::with_capacity(n);
    for _ in 0..n.saturating_sub(1) {
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, row) in a.iter().enumerate().filter(|(i, _)| !row_used[*i]) {
            for (j, x) in row.iter().enumerate().filter(|(j, _)| !col_used[*j]) {
                if x.is_zero() {
                    continue;
                }
                let v = x.valuation().finite().unwrap();
                if best.is_none_or(|(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((r, c, _)) = best else {
            return Err(SpectralError::PrecisionLoss { index, detail: "no nonzero pivot left".into() });
        };
        row_used[r] = true;
        col_used[c] = true;
        let free: Vec<usize> = (0..n).filter(|j| !col_used[*j]).collect();
        let pivot_row = a[r].clone();
        let pivot = pivot_row[c].clone();
        let updates: Vec<(usize, Vec<PadicScalar>)> = (0..n)
            .into_par_iter()
            .filter(|i| !row_used[*i] && !a[*i][c].is_exact_zero())
            .map(|i| {
                let f = a[i][c].checked_div(&pivot).expect("pivot is nonzero");
                let mut row = a[i].clone();
                for &j in &free {
                    if !pivot_row[j].is_exact_zero() {
                        row[j] = &row[j] - &(&f * &pivot_row[j]);
                    }
                }
                row[c] = PadicScalar::exact_zero(p);
                (i, row)
            })
            .collect();
        for (i, row) in updates {
            a[i] = row;
        }
        pivots.push((r, c, free));
    }
    let last = (0..n).find(|j| !col_used[*j]).expect("one column stays free");
    let mut v = vec![PadicScalar::exact_zero(p); n];
    v[last] = PadicScalar::one(p, abs.max(1) as u32);
    for (r, c, free) in pivots.iter().rev() {
        let mut acc = PadicScalar::exact_zero(p);
        for &j in free {
            if !a[*r][j].is_exact_zero() && !v[j].is_exact_zero() {
                acc = &acc + &(&a[*r][j] * &v[j]);
            }
        }
        v[*c] = (-&acc).checked_div(&a[*r][*c])?;
    }
    Ok(v)
}

fn min_valuation(v: &[PadicScalar]) -> Valuation {
    v.iter().map(|x| x.valuation()).fold(Valuation::Infinite, |a, b| match (a, b) {
        (Valuation::Infinite, x) | (x, Valuation::Infinite) => x,
        (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x.min(y)),
    })
}

fn residual(u: &[Vec<PadicScalar>], lambda: &PadicScalar, v: &[PadicScalar]) -> Valuation {
    let r: Vec<PadicScalar> = u
        .iter()
        .zip(v)
        .map(|(row, vi)| {
            let mut acc = -(lambda * vi);
            for (a, x) in row.iter().zip(v) {
                if !a.is_exact_zero() && !x.is_exact_zero() {
                    acc = &acc + &(a * x);
                }
            }
            acc
        })
        .collect();
    min_valuation(&r)
}

/// `x · p^k` for an integer `k`.
fn shift(x: &PadicScalar, k: i64) -> PadicScalar {
    if x.is_exact_zero() {
        return x.clone();
    }
    x.mul_rational(&rat_pow(x.prime().get(), k))
}

/// Eigenvalues with their raw kernel vectors at the matrix's radius; stops at
/// the first slope that is repeated, fractional or not residually rational.
fn eigen_pairs(u: &UMatrix, count: usize, abs_prec: i64) -> (Vec<(PadicScalar, Rational64, PadicVector)>, Option<SpectralError>) {
    let p = u.prime();
    let poly = char_series(u).char_poly();
    let groups = match segment_roots(&poly, p, abs_prec) {
        Ok(g) => g,
        Err(e) => return (vec![], Some(e.into())),
    };
    let mut found = Vec::new();
    let mut pending = None;
    for (k, g) in groups.iter().take(count).enumerate() {
        let Some(slope) = g.valuation else { break };
        if g.multiplicity != 1 || g.roots.len() != 1 {
            pending = Some(SpectralError::NonIsolatedRoot { index: k + 1, slope, multiplicity: g.multiplicity });
            break;
        }
        found.push((g.roots[0].clone(), slope));
    }
    let base = padic_matrix(u, abs_prec);
    let results: Vec<Result<(PadicScalar, Rational64, PadicVector), SpectralError>> = found
        .into_par_iter()
        .enumerate()
        .map(|(k, (lambda, slope))| {
            let mut a = base.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = &row[i] - &lambda;
            }
            let v = kernel_vector(a, p, abs_prec, k + 1)?;
            Ok((lambda, slope, v))
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        match r {
            Ok(x) => out.push(x),
            Err(e) => return (out, Some(e)),
        }
    }
    (out, pending)
}

fn package(u: &UMatrix, base: &[Vec<PadicScalar>], index: usize, lambda: PadicScalar, slope: Rational64, v: PadicVector, powers: &[Vec<BigRational>]) -> Result<EigenPackage, SpectralError> {
    let p = u.prime();
    let e = u.radius().scale_exponent(p)?;
    let f_raw: PadicVector = v.iter().enumerate().map(|(i, x)| shift(x, e * (i as i64 + 1))).collect();
    let lead = f_raw[0].clone();
    if lead.is_zero() {
        return Err(SpectralError::PrecisionLoss { index, detail: "leading f-coordinate vanishes to precision".into() });
    }
    let f_coords: PadicVector = f_raw.iter().map(|x| x.checked_div(&lead)).collect::<Result<_, _>>()?;
    let coords: PadicVector = f_coords.iter().enumerate().map(|(i, x)| shift(x, -e * (i as i64 + 1))).collect();
    let residual_valuation = residual(base, &lambda, &coords);
    // q^m coefficient: Σ_{i ≤ m} f_coords[i] · [q^m] f^i
    let m = powers.first().map_or(0, Vec::len);
    let mut qexp = Vec::with_capacity(m);
    for t in 0..m {
        let mut acc = PadicScalar::exact_zero(p);
        for (i, x) in f_coords.iter().enumerate().take(t + 1) {
            let c = &powers[i][t];
            if !c.is_zero() && !x.is_exact_zero() {
                acc = &acc + &x.mul_rational(c);
            }
        }
        qexp.push(acc);
    }
    if let Some(first) = qexp.first_mut() {
        *first = PadicScalar::one(p, first.relprec().max(1));
    }
    let self_pairing = pairing(&f_coords, &f_coords, p)?;
    Ok(EigenPackage {
        index,
        eigenvalue: lambda,
        slope,
        coords,
        f_coords,
        qexp,
        self_pairing,
        radius: u.radius(),
        residual_valuation,
    })
}

/// `powers[i][t]` = coefficient of `q^{t+1}` in `f^{i+1}`.
fn power_table(p: Prime, n: usize, terms: usize) -> Vec<Vec<BigRational>> {
    let f = qseries::hauptmodul_fp(p, terms as i64 + 1);
    let mut out = Vec::with_capacity(n.min(terms));
    let mut cur = f.clone();
    for _ in 0..n.min(terms) {
        out.push((1..=terms as i64).map(|t| cur.coeff(t).unwrap()).collect());
        cur = cur.mul(&f);
    }
    out
}

/// The first `count` eigenfunctions, stopping at the first failure.
pub fn eigen_solve_partial(u: &UMatrix, count: usize, abs_prec: i64) -> PartialEigen {
    let (pairs, mut error) = eigen_pairs(u, count, abs_prec);
    let base = padic_matrix(u, abs_prec);
    let powers = power_table(u.prime(), u.size(), QEXP_TERMS);
    let mut packages = Vec::new();
    for (k, (lambda, slope, v)) in pairs.into_iter().enumerate() {
        match package(u, &base, k + 1, lambda, slope, v, &powers) {
            Ok(pk) => packages.push(pk),
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    PartialEigen { packages, error }
}

/// The first `count` eigenfunctions of `u`, each eigenvalue known to
/// absolute precision `abs_prec`.
pub fn eigen_solve(u: &UMatrix, count: usize, abs_prec: i64) -> Result<Vec<EigenPackage>, SpectralError> {
    let out = eigen_solve_partial(u, count, abs_prec);
    match out.error {
        Some(e) => Err(e),
        None => Ok(out.packages),
    }
}

/// Eigenvectors of `u` as columns, column `j` scaled so its `j`-th entry is 1.
#[derive(Clone, Debug)]
pub struct Diagonalizer {
    pub eigenvalues: PadicVector,
    /// `columns[j][i]` is `C_{i+1, j+1}`.
    pub columns: Vec<PadicVector>,
    pub residual_valuations: Vec<Valuation>,
    /// Radius of the matrix the columns were computed from.
    pub radius: Radius,
}

impl Diagonalizer {
    /// Entries `(i, j)` (1-based) off the diagonal with `ν_p < 1`, with their
    /// valuations.
    pub fn violations(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if i != j && !x.is_zero() {
                    let v = x.valuation().finite().unwrap();
                    if v < 1 {
                        out.push((i + 1, j + 1, v));
                    }
                }
            }
        }
        out
    }

    /// Off-diagonal entries with `ν_p < 1` once moved to radius `r`, where
    /// `C^{(r)}_ij = C_ij p^{e(j−i)}` for the rational shift `e`. Entries known
    /// only to `O(p^N)` are judged by `N`.
    pub fn violations_at(&self, r: Radius) -> Vec<(usize, usize, Rational64)> {
        let Some(p) = self.eigenvalues.first().map(PadicScalar::prime) else {
            return vec![];
        };
        let e = r.raw_exponent(p) - self.radius.raw_exponent(p);
        let mut out = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if i == j || x.is_exact_zero() {
                    continue;
                }
                let Some(v) = x.valuation().finite() else { continue };
                let v = Rational64::from(v) + e * (j as i64 - i as i64);
                if v < Rational64::from(1) {
                    out.push((i + 1, j + 1, v));
                }
            }
        }
        out
    }

    /// Least `ν_p` over off-diagonal entries; residues known only to `O(p^N)`
    /// count as `N`.
    pub fn min_off_diagonal_valuation(&self) -> Valuation {
        let mut best = Valuation::Infinite;
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if i != j && !x.is_exact_zero() {
                    let v = x.valuation();
                    if best.finite().is_none_or(|b| v.finite().unwrap() < b) {
                        best = v;
                    }
                }
            }
        }
        best
    }
}

/// Builds `C` without judging it.
pub fn build_diagonalizer(u: &UMatrix, count: usize, abs_prec: i64) -> Result<Diagonalizer, SpectralError> {
    let (pairs, error) = eigen_pairs(u, count, abs_prec);
    if let Some(e) = error {
        return Err(e);
    }
    let base = padic_matrix(u, abs_prec);
    let mut out = Diagonalizer { eigenvalues: vec![], columns: vec![], residual_valuations: vec![], radius: u.radius() };
    for (j, (lambda, _, v)) in pairs.into_iter().enumerate() {
        let d = v[j].clone();
        if d.is_zero() {
            return Err(SpectralError::PrecisionLoss { index: j + 1, detail: "diagonal entry vanishes".into() });
        }
        let col: PadicVector = v.iter().map(|x| x.checked_div(&d)).collect::<Result<_, _>>()?;
        out.residual_valuations.push(residual(&base, &lambda, &col));
        out.eigenvalues.push(lambda);
        out.columns.push(col);
    }
    Ok(out)
}

/// `C` with `C ≡ Id mod p` enforced.
pub fn diagonalizer(u: &UMatrix, count: usize, abs_prec: i64) -> Result<Diagonalizer, SpectralError> {
    let c = build_diagonalizer(u, count, abs_prec)?;
    if let Some(&(i, j, valuation)) = c.violations().first() {
        return Err(SpectralError::CongruenceViolation { i, j, valuation });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uoperator::{rescale, u_direct};

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn first_eigenfunction_for_five() {
        let p = prime(5);
        let u = rescale(&u_direct(p, 8), Radius::new(1, 3)).unwrap();
        let e = eigen_solve(&u, 1, 40).unwrap();
        let phi = &e[0];
        assert_eq!(phi.slope, Rational64::from(1));
        assert_eq!(phi.qexp[0].to_table_string(10), "1");
        assert_eq!(phi.qexp[1].to_table_string(10), "8528631");
        assert_eq!(phi.qexp[2].to_table_string(10), "8596652");
        assert!(phi.residual_valuation.finite().is_none_or(|v| v >= 30));
    }

    #[test]
    fn radius_does_not_change_the_eigenfunction() {
        let p = prime(5);
        let u0 = u_direct(p, 10);
        let a = eigen_solve(&u0, 3, 40).unwrap();
        let b = eigen_solve(&rescale(&u0, Radius::new(1, 3)).unwrap(), 3, 40).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.eigenvalue.agrees_with(&y.eigenvalue, 35));
            for (s, t) in x.qexp.iter().zip(&y.qexp).take(10) {
                assert!(s.agrees_with(t, 20));
            }
        }
    }

    #[test]
    fn diagonalizer_moves_between_radii() {
        let p = prime(3);
        let u0 = u_direct(p, 16);
        let c0 = build_diagonalizer(&u0, 5, 120).unwrap();
        let c1 = build_diagonalizer(&rescale(&u0, Radius::new(1, 2)).unwrap(), 5, 120).unwrap();
        for r in [Radius::ZERO, Radius::new(1, 2)] {
            assert_eq!(c0.violations_at(r), c1.violations_at(r));
        }
        assert!(c1.violations_at(Radius::new(1, 2)).is_empty());
        assert!(!c1.violations_at(Radius::ZERO).is_empty());
    }

    #[test]
    fn single_column_diagonalizer() {
        let p = prime(2);
        let u = rescale(&u_direct(p, 12), Radius::new(1, 2)).unwrap();
        let c = diagonalizer(&u, 1, 40).unwrap();
        assert_eq!(c.columns.len(), 1);
        assert_eq!(c.columns[0][0], PadicScalar::one(p, c.columns[0][0].relprec()));
    }
}
