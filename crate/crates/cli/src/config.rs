use std::path::PathBuf;

use upadic::cache::MatrixCache;
use upadic::uoperator::{self, Radius, UMatrix};
use upadic::Prime;

use crate::{Format, GlobalArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] upadic::Error),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Compute(_) => 1,
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.into())
            }
        })*
    };
}

via_core!(
    upadic::uoperator::UMatrixError,
    upadic::spectral::SpectralError,
    upadic::hauptmodul::HauptmodulError,
    upadic::qseries::SeriesError,
    upadic::cache::CacheError,
    upadic::padic::PadicError
);

pub type CliResult<T> = Result<T, CliError>;

/// Text to print and whether the run counts as passing.
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

/// Validated command-line settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prime: Prime,
    pub size: Option<usize>,
    pub prec: Option<i64>,
    pub qprec: Option<i64>,
    /// Explicit radius, already checked to lie in `[0, p/(p+1))`.
    pub radius: Option<Radius>,
    pub format: Format,
    pub cache: Option<MatrixCache>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> CliResult<Self> {
        let prime = Prime::new(g.prime).map_err(|e| CliError::Usage(e.to_string()))?;
        let radius = match &g.radius {
            None => None,
            Some(s) => {
                let r: Radius = s.parse().map_err(CliError::Usage)?;
                r.check_admissible(prime).map_err(|e| CliError::Usage(e.to_string()))?;
                Some(r)
            }
        };
        if g.size == Some(0) {
            return Err(CliError::Usage("--size must be positive".into()));
        }
        if let Some(p) = g.prec {
            if p < 1 {
                return Err(CliError::Usage("--prec must be positive".into()));
            }
        }
        let cache = g.cache_dir.as_ref().filter(|d| !d.as_os_str().is_empty()).map(MatrixCache::new);
        Ok(RunConfig {
            prime,
            size: g.size,
            prec: g.prec,
            qprec: g.qprec,
            radius,
            format: g.format,
            cache,
        })
    }

    pub fn size_or(&self, default: usize) -> usize {
        self.size.unwrap_or(default)
    }

    pub fn prec_or(&self, default: i64) -> i64 {
        self.prec.unwrap_or(default)
    }

    /// The radius to build matrices at: the explicit one, which must then
    /// give a rational scale, or the prime's default.
    pub fn matrix_radius(&self) -> CliResult<Radius> {
        match self.radius {
            None => Ok(Radius::default_for(self.prime)),
            Some(r) => {
                r.scale_exponent(self.prime).map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(r)
            }
        }
    }

    /// `U` at radius `r`, through the cache when one is configured.
    pub fn matrix(&self, n: usize, r: Radius) -> CliResult<UMatrix> {
        let p = self.prime;
        if let Some(q) = self.qprec {
            let u0 = uoperator::u_direct_with_qprec(p, n, q)?;
            return Ok(uoperator::rescale(&u0, r)?);
        }
        match &self.cache {
            Some(c) => Ok(c.get_or_compute(p, n, r)?),
            None => Ok(uoperator::rescale(&uoperator::u_direct(p, n), r)?),
        }
    }
}
