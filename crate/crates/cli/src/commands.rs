use std::fmt::Write as _;

use num_rational::{BigRational, Rational64};
use serde::Serialize;
use serde_json::Value;
use upadic::arith::rat_valuation;
use upadic::hauptmodul::{ip_on_hauptmodul, ip_rescaling_symmetric, HauptmodulData};
use upadic::qseries::{self, QSeries, SeriesError};
use upadic::spectral::{
    char_series, d_closed_form, eigen_solve, eigen_solve_partial, express_in_f_basis, inverse_j_coords,
    residual_norms, spectral_coefficients, stable_slope_count, EigenPackage,
};
use upadic::uoperator::Radius;

use crate::config::{CliError, CliResult, Output, RunConfig};
use crate::render::{self, PadicOut};
use crate::Format;

#[derive(Serialize)]
struct HauptmodulJson {
    schema: &'static str,
    p: u32,
    #[serde(rename = "H")]
    h: Vec<Value>,
    /// `[a, b, coefficient]` triples of `I_p`.
    #[serde(rename = "I")]
    i: Vec<[Value; 3]>,
    #[serde(rename = "M")]
    m: Value,
    rescaling_symmetric: bool,
    vanishes_on_hauptmodul: bool,
}

pub fn hauptmodul(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.prime;
    let data = HauptmodulData::derive(p)?;
    let symmetric = ip_rescaling_symmetric(p, &data.ip);
    let vanishes = ip_on_hauptmodul(p, &data.ip, 30).is_zero();
    let passed = symmetric && vanishes;
    let text = match cfg.format {
        Format::Json => render::json(&HauptmodulJson {
            schema: "upadic.hauptmodul/1",
            p: p.get(),
            h: data.hp.coeffs().iter().map(render::big).collect(),
            i: data.ip.terms().map(|(a, b, c)| [Value::from(a), Value::from(b), render::big(c)]).collect(),
            m: render::big_matrix(data.kernel.rows()),
            rescaling_symmetric: symmetric,
            vanishes_on_hauptmodul: vanishes,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = data
                .kernel
                .rows()
                .iter()
                .enumerate()
                .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, v)| vec![(a + 1).to_string(), (b + 1).to_string(), v.to_string()]))
                .collect();
            render::csv(&["a", "b", "M_ab"], &rows)
        }
        Format::Table => {
            let mut s = format!("p = {p}\nH(x) coefficients: {}\nI(x, y) terms:\n", data.hp);
            for (a, b, c) in data.ip.terms() {
                let _ = writeln!(s, "  x^{a} y^{b}: {c}");
            }
            let _ = writeln!(s, "M = {}", serde_json::to_string(&render::big_matrix(data.kernel.rows())).unwrap());
            let _ = writeln!(s, "rescaling symmetry: {}", if symmetric { "ok" } else { "FAILED" });
            let _ = writeln!(s, "I(V f, 1/f) = 0: {}", if vanishes { "ok" } else { "FAILED" });
            s
        }
    };
    Ok(Output { text, passed })
}

#[derive(Serialize)]
struct SlopesJson {
    schema: &'static str,
    p: u32,
    n: usize,
    stable: usize,
    slopes: Vec<String>,
    formula: Option<Vec<String>>,
    matches_formula: Option<bool>,
}

/// Slopes do not depend on the radius, so any admissible radius is accepted
/// and the computation runs at `r = 0`.
pub fn slopes(cfg: &RunConfig, count: Option<usize>) -> CliResult<Output> {
    let p = cfg.prime;
    let n = cfg.size_or(30);
    let cs = char_series(&cfg.matrix(n, Radius::ZERO)?);
    let stable = stable_slope_count(&cs);
    let count = count.unwrap_or(stable);
    let got = upadic::spectral::slopes(&cs, count)?;
    let formula: Option<Vec<Rational64>> = (1..=count as u64)
        .map(|i| d_closed_form(p, i).map(|d| Rational64::from(rat_valuation(&d, p.get()).unwrap())))
        .collect();
    let matches = formula.as_ref().map(|f| *f == got);
    let text = match cfg.format {
        Format::Json => render::json(&SlopesJson {
            schema: "upadic.slopes/1",
            p: p.get(),
            n,
            stable,
            slopes: got.iter().map(|s| render::rational(*s)).collect(),
            formula: formula.as_ref().map(|f| f.iter().map(|s| render::rational(*s)).collect()),
            matches_formula: matches,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = got
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let f = formula.as_ref().map_or(String::new(), |f| render::rational(f[i]));
                    vec![(i + 1).to_string(), render::rational(*s), f]
                })
                .collect();
            render::csv(&["i", "slope", "formula"], &rows)
        }
        Format::Table => {
            let mut s = format!("# p = {p}, n = {n}, {stable} stable slopes\n");
            for (i, x) in got.iter().enumerate() {
                let _ = write!(s, "{:>3}  {}", i + 1, render::rational(*x));
                if let Some(f) = &formula {
                    let _ = write!(s, "  (formula {})", render::rational(f[i]));
                }
                s.push('\n');
            }
            if let Some(m) = matches {
                let _ = writeln!(s, "# formula {}", if m { "matches" } else { "DIFFERS" });
            }
            s
        }
    };
    Ok(Output { text, passed: matches != Some(false) })
}

#[derive(Serialize)]
struct EigenJson {
    schema: &'static str,
    p: u32,
    n: usize,
    radius: Radius,
    prec: i64,
    eigenfunctions: Vec<EigenEntry>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct EigenEntry {
    index: usize,
    slope: String,
    eigenvalue: PadicOut,
    qexp: Vec<PadicOut>,
}

pub fn eigen(cfg: &RunConfig, count: usize, dump_phi: Option<usize>) -> CliResult<Output> {
    let p = cfg.prime;
    let n = cfg.size_or(2 * count + 10);
    let prec = cfg.prec_or(40 + 3 * count as i64);
    let r = cfg.matrix_radius()?;
    let u = cfg.matrix(n, r)?;
    let found = eigen_solve_partial(&u, count, prec);
    let notes: Vec<String> = found.error.iter().map(|e| format!("stopped after {} eigenfunctions: {e}", found.packages.len())).collect();
    let complete = found.packages.len() == count;
    if let Some(k) = dump_phi {
        let Some(e) = found.packages.get(k.wrapping_sub(1)) else {
            return Err(CliError::Usage(format!("φ_{k} was not computed ({} available)", found.packages.len())));
        };
        return Ok(Output::ok(dump_series(e, n)));
    }
    let text = match cfg.format {
        Format::Json => render::json(&EigenJson {
            schema: "upadic.eigen/1",
            p: p.get(),
            n,
            radius: r,
            prec,
            eigenfunctions: found
                .packages
                .iter()
                .map(|e| EigenEntry {
                    index: e.index,
                    slope: render::rational(e.slope),
                    eigenvalue: (&e.eigenvalue).into(),
                    qexp: e.qexp.iter().map(PadicOut::from).collect(),
                })
                .collect(),
            notes: notes.clone(),
        }),
        Format::Csv => {
            let mut rows = Vec::new();
            for e in &found.packages {
                for (k, c) in e.qexp.iter().enumerate() {
                    let o = PadicOut::from(c);
                    rows.push(vec![
                        e.index.to_string(),
                        render::rational(e.slope),
                        (k + 1).to_string(),
                        o.valuation.map_or(String::new(), |v| v.to_string()),
                        o.unit,
                        o.relprec.to_string(),
                    ]);
                }
            }
            render::csv(&["index", "slope", "term", "valuation", "unit", "relprec"], &rows)
        }
        Format::Table => {
            let mut s = format!("# p = {p}, n = {n}, r = {r}, precision {p}^{prec}\n");
            for e in &found.packages {
                let _ = writeln!(s, "# slope {}, eigenvalue {}", render::rational(e.slope), render::table(&e.eigenvalue));
                let _ = writeln!(s, "φ_{} = {}", e.index, render::qexp_line(&e.qexp));
            }
            for note in &notes {
                let _ = writeln!(s, "# {note}");
            }
            s
        }
    };
    Ok(Output { text, passed: complete })
}

/// `Σ_i lift(a_i) f^i` to `O(q^{n+1})`.
fn dump_series(e: &EigenPackage, n: usize) -> String {
    let t = n as i64 + 1;
    let f = qseries::hauptmodul_fp(e.prime(), t);
    let mut acc = QSeries::zero(t);
    let mut power = f.clone();
    for a in &e.f_coords {
        acc = acc.add(&power.scale(&a.lift()));
        power = power.mul(&f);
    }
    format!("# φ_{} for p = {}, slope {}\n{}", e.index, e.prime(), render::rational(e.slope), acc.to_dump())
}

#[derive(Serialize)]
struct SpectralJson {
    schema: &'static str,
    p: u32,
    n: usize,
    radius: Radius,
    input: String,
    initial_residual: String,
    coefficients: Vec<SpectralEntry>,
}

#[derive(Serialize)]
struct SpectralEntry {
    j: usize,
    c: PadicOut,
    /// `ν_r(h − Σ_{i ≤ j} c_i φ_i)`.
    residual: String,
}

fn read_input(input: &str, cfg: &RunConfig, n: usize) -> CliResult<Vec<BigRational>> {
    if input == "inverse-j" {
        return Ok(inverse_j_coords(cfg.prime, n)?);
    }
    let path = std::path::PathBuf::from(input);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Input { path: path.clone(), source })?;
    let h = QSeries::from_dump(&text).map_err(|e| match e {
        SeriesError::Parse { .. } => CliError::Usage(format!("{}: {e}", path.display())),
        other => other.into(),
    })?;
    Ok(express_in_f_basis(&h, cfg.prime, n)?)
}

pub fn spectral(cfg: &RunConfig, input: &str, count: usize) -> CliResult<Output> {
    let p = cfg.prime;
    let n = cfg.size_or(50);
    let prec = cfg.prec_or(100);
    let r = cfg.matrix_radius()?;
    let h = read_input(input, cfg, n)?;
    let u = cfg.matrix(n, r)?;
    let eig = eigen_solve(&u, count, prec)?;
    let c = spectral_coefficients(&h, &eig)?;
    let norms = residual_norms(&h, &eig, &c, r)?;
    let text = match cfg.format {
        Format::Json => render::json(&SpectralJson {
            schema: "upadic.spectral/1",
            p: p.get(),
            n,
            radius: r,
            input: input.to_string(),
            initial_residual: render::rational(norms[0]),
            coefficients: c
                .iter()
                .enumerate()
                .map(|(j, x)| SpectralEntry { j: j + 1, c: x.into(), residual: render::rational(norms[j + 1]) })
                .collect(),
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = c
                .iter()
                .enumerate()
                .map(|(j, x)| vec![(j + 1).to_string(), render::table(x), render::rational(norms[j + 1])])
                .collect();
            render::csv(&["j", "c_j", "residual"], &rows)
        }
        Format::Table => {
            let mut s = format!("# h = {input}, p = {p}, n = {n}, r = {r}\n# residual of h: {}\n", render::rational(norms[0]));
            for (j, x) in c.iter().enumerate() {
                let _ = writeln!(s, "{:>3}  {}  (residual {})", j + 1, render::table(x), render::rational(norms[j + 1]));
            }
            s
        }
    };
    Ok(Output::ok(text))
}
