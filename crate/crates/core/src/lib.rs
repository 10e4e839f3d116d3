//! Exact spectral theory of the Atkin–Lehner `U` operator on weight-0
//! overconvergent p-adic modular functions of tame level 1.
//!
//! For the five primes where `X_0(p)` has genus zero the space of
//! `r`-overconvergent functions has the orthonormal basis `(c f_p)^i`, where
//! `f_p = (Δ(pz)/Δ(z))^(1/(p-1))` is the hauptmodul. Everything here is built
//! on that model:
//!
//! * [`qseries`]: exact truncated q-expansions (Δ, E_k, j, f_p) and the
//!   `U`/`V` operators on them.
//! * [`hauptmodul`]: the polynomial `H_p` with `j = H_p(f_p)/f_p`, the
//!   bivariate relation `I_p(V f_p, 1/f_p) = 0` and the recurrence kernel.
//! * [`uoperator`]: the exact matrix of `U` in the `f_p`-power basis, by
//!   direct q-expansion solve and by recurrence.
//! * [`spectral`]: characteristic series, slopes, LDU factorization,
//!   p-adic eigenfunctions, the self-adjoint pairing and spectral expansions.
//! * [`padic`]: capped-precision p-adic scalars, Newton polygons and
//!   Hensel lifting of polynomial roots.

pub mod arith;
pub mod cache;
pub mod hauptmodul;
pub mod padic;
pub mod prime;
pub mod qseries;
pub mod spectral;
pub mod uoperator;

pub use hauptmodul::{BivarIntPoly, IntPolynomial, RecurrenceKernel};
pub use padic::{NewtonPolygon, PadicScalar, Valuation};
pub use prime::Prime;
pub use qseries::QSeries;
pub use spectral::{CharSeries, EigenPackage, LduFactorization};
pub use uoperator::{Radius, UMatrix};

/// Crate-wide error type; every module error converts into it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Prime(#[from] prime::UnsupportedPrime),
    #[error(transparent)]
    Padic(#[from] padic::PadicError),
    #[error(transparent)]
    Series(#[from] qseries::SeriesError),
    #[error(transparent)]
    Hauptmodul(#[from] hauptmodul::HauptmodulError),
    #[error(transparent)]
    UMatrix(#[from] uoperator::UMatrixError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Cache(#[from] cache::CacheError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
