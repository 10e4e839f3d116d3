//! Characteristic series, slopes, the LDU factorization, p-adic
//! eigenfunctions, the self-adjoint pairing and spectral expansions.

mod charseries;
mod eigen;
mod expansion;
mod ldu;

pub use charseries::{berkowitz, char_series, slopes, stable_slope_count, CharSeries};
pub use eigen::{
    build_diagonalizer, diagonalizer, eigen_solve, eigen_solve_partial, Diagonalizer, EigenPackage, PartialEigen,
    QEXP_TERMS,
};
pub use expansion::{
    express_in_f_basis, inverse_j_coords, iterate_projection, pairing, pairing_exact, residual_norms,
    spectral_coefficients, PadicVector,
};
pub use ldu::{
    conjecture_check, d_closed_form, lemma_entry, ldu, off_diagonal_valuations, ConjectureReport, LduFactorization, MinEntry,
};

use num_rational::Rational64;

use crate::padic::PadicError;
use crate::qseries::SeriesError;
use crate::uoperator::UMatrixError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("only {stable} slopes are stable at this size, {requested} requested; increase n")]
    UnstableRange { requested: usize, stable: usize },
    #[error("leading {0}×{0} minor is singular")]
    SingularMinor(usize),
    #[error("eigenvalue {index}: slope {slope} has multiplicity {multiplicity} or no root in Q_p")]
    NonIsolatedRoot { index: usize, slope: Rational64, multiplicity: u64 },
    #[error("eigenvalue {index}: precision exhausted during elimination ({detail})")]
    PrecisionLoss { index: usize, detail: String },
    #[error("coordinate vectors have lengths {left} and {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("series starts at q^{0}; a cusp form is required")]
    NotCuspidal(i64),
    #[error("series known to q^{have}, need q^{need}")]
    SeriesTooShort { have: i64, need: i64 },
    #[error("self-pairing of eigenfunction {0} vanishes to working precision")]
    DegeneratePairing(usize),
    #[error("diagonalizer entry ({i},{j}) has valuation {valuation} < 1")]
    CongruenceViolation { i: usize, j: usize, valuation: i64 },
    #[error("f-basis coordinates of 1/j disagree with f/H_p(f) at index {0}")]
    InconsistentExpansion(usize),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Matrix(#[from] UMatrixError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hauptmodul(#[from] crate::hauptmodul::HauptmodulError),
}
