use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

const EIGENFORMS: &str = include_str!("../../core/tests/data/p5_eigenforms.txt");
const INVERSE_J: &str = include_str!("../../core/tests/data/p5_inverse_j_coefficients.txt");

fn upadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upadic"))
        .args(args)
        .env_remove("UPADIC_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = upadic(&a);
    assert!(o.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

/// `e:b` table entries rendered the way the table format prints them.
fn table_entry(t: &str) -> String {
    let (e, b) = t.split_once(':').unwrap();
    match e {
        "0" => b.to_string(),
        "1" => format!("5×{b}"),
        _ => format!("5^{e}×{b}"),
    }
}

#[test]
fn kernels_for_two_and_three() {
    let start = Instant::now();
    let v2 = json(&["-p", "2", "hauptmodul"]);
    assert!(start.elapsed() < Duration::from_secs(1));
    assert_eq!(v2["schema"], "upadic.hauptmodul/1");
    assert_eq!(v2["M"].to_string(), "[[48,1],[4096,0]]");
    let v3 = json(&["-p", "3", "hauptmodul"]);
    assert_eq!(v3["M"].to_string(), "[[270,36,1],[26244,729,0],[531441,0,0]]");
    let table = stdout(&upadic(&["-p", "2", "hauptmodul"]));
    assert!(table.contains("M = [[48,1],[4096,0]]\n"));
}

#[test]
fn kernel_for_seven_is_skew_triangular() {
    let v = json(&["-p", "7", "hauptmodul"]);
    let m = v["M"].as_array().unwrap();
    assert_eq!(m.len(), 7);
    for (a, row) in m.iter().enumerate() {
        for (b, x) in row.as_array().unwrap().iter().enumerate() {
            let zero = *x == 0;
            assert_eq!(zero, a + b + 2 > 8, "M[{}][{}] = {x}", a + 1, b + 1);
        }
    }
    assert_eq!(v["rescaling_symmetric"], true);
    assert_eq!(v["vanishes_on_hauptmodul"], true);
}

#[test]
fn slope_tables() {
    let v = json(&["-p", "2", "slopes", "-c", "10"]);
    assert_eq!(v["schema"], "upadic.slopes/1");
    assert_eq!(v["matches_formula"], true);
    assert_eq!(v["slopes"][0], "3");
    let v = json(&["-p", "5", "slopes", "-c", "3"]);
    assert_eq!(v["slopes"], serde_json::json!(["1", "4", "5"]));
    let v = json(&["-p", "13", "slopes"]);
    assert!(v["formula"].is_null() && v["matches_formula"].is_null());
    assert!(!v["slopes"].as_array().unwrap().is_empty());
    // the radius does not enter the slopes, so any admissible one is accepted
    assert_eq!(json(&["-p", "5", "-r", "1/2", "slopes", "-c", "3"])["slopes"], serde_json::json!(["1", "4", "5"]));
    let csv = stdout(&upadic(&["-p", "2", "slopes", "-c", "2", "-f", "csv"]));
    assert_eq!(csv, "i,slope,formula\n1,3,3\n2,7,7\n");
}

#[test]
fn too_many_slopes_is_a_computation_failure() {
    let o = upadic(&["-p", "5", "-n", "10", "slopes", "-c", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eigenfunction_table_for_five() {
    let o = upadic(&["eigen"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("φ_")).collect();
    assert_eq!(lines.len(), 20);
    for (line, row) in lines.iter().zip(EIGENFORMS.lines()) {
        let mut it = row.split_whitespace();
        let k = it.next().unwrap();
        let terms: Vec<String> = it
            .enumerate()
            .map(|(i, t)| {
                let c = table_entry(t);
                let c = if c == "1" { String::new() } else { c };
                if i == 0 { format!("{c}q") } else { format!("{c}q^{}", i + 1) }
            })
            .collect();
        assert_eq!(*line, format!("φ_{k} = {} + O(q^21)", terms.join(" + ")));
    }
}

#[test]
fn single_eigenfunction_is_fast() {
    let start = Instant::now();
    let v = json(&["eigen", "-c", "1"]);
    assert!(start.elapsed() < Duration::from_secs(1));
    let e = &v["eigenfunctions"][0];
    assert_eq!(e["slope"], "1");
    assert_eq!(e["eigenvalue"]["valuation"], 1);
    assert_eq!(v["schema"], "upadic.eigen/1");
}

#[test]
fn repeated_slope_gives_partial_output() {
    let o = upadic(&["-p", "13", "eigen", "-c", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("φ_")).count(), 5);
    assert!(text.contains("# stopped after 5 eigenfunctions"));
}

#[test]
fn inverse_j_coefficients() {
    let v = json(&["spectral"]);
    assert_eq!(v["schema"], "upadic.spectral/1");
    let cs = v["coefficients"].as_array().unwrap();
    let table = stdout(&upadic(&["spectral"]));
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    for (row, want) in rows.iter().zip(INVERSE_J.lines()) {
        let (j, t) = want.split_once(' ').unwrap();
        let fields: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(fields[0], j);
        assert_eq!(fields[1], table_entry(t));
    }
    let norm = |x: &Value| -> f64 {
        let s = x.as_str().unwrap();
        match s.split_once('/') {
            Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
            None => s.parse().unwrap(),
        }
    };
    let mut last = norm(&v["initial_residual"]);
    for c in cs {
        let r = norm(&c["residual"]);
        assert!(r >= last, "residuals must not decrease");
        last = r;
    }
}

#[test]
fn expanding_an_eigenfunction_gives_a_unit_vector() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("phi1.txt");
    let o = upadic(&["-n", "20", "eigen", "-c", "5", "--dump-phi", "1"]);
    assert!(o.status.success());
    std::fs::write(&file, &o.stdout).unwrap();
    let v = json(&["-n", "20", "spectral", "-i", file.to_str().unwrap(), "-c", "5"]);
    let cs = v["coefficients"].as_array().unwrap();
    assert_eq!(cs[0]["c"]["valuation"], 0);
    let unit: num_bigint::BigInt = cs[0]["c"]["unit"].as_str().unwrap().parse().unwrap();
    let m = num_bigint::BigInt::from(5).pow(40);
    assert_eq!((unit - 1u32) % m, 0u32.into(), "c_1 ≡ 1 mod 5^40");
    for c in &cs[1..] {
        assert!(c["c"]["valuation"].as_i64().unwrap() >= 40, "{c}");
    }
}

#[test]
fn verify_defaults_pass_for_small_primes() {
    for p in ["2", "3", "5"] {
        let o = upadic(&["-p", p, "verify"]);
        assert!(o.status.success(), "p={p}: {}", stdout(&o));
        let text = stdout(&o);
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().all(|l| l.contains(": PASS")), "{text}");
    }
}

#[test]
fn verify_reports_boundary_radius_failure() {
    let o = upadic(&["-p", "5", "-r", "1/3", "verify", "--suite", "ldu-conjecture"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("B_4,6 has ν = 0"));
}

#[test]
fn verify_suite_selection_and_json() {
    let v = json(&["-p", "13", "-n", "30", "verify", "--suite", "support", "--suite", "appendixA"]);
    assert_eq!(v["schema"], "upadic.verify/1");
    let r = v["results"].as_array().unwrap();
    assert_eq!(r.len(), 2);
    assert_eq!(r[0]["suite"], "support");
    assert_eq!(r[1]["suite"], "identities");
    assert!(r.iter().all(|x| x["status"] == "pass"));
    let skip = json(&["-p", "7", "verify", "--suite", "ldu-conjecture"]);
    assert_eq!(skip["results"][0]["status"], "skip");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["-p", "11", "slopes"][..],
        &["-p", "5", "-r", "5/6", "slopes"],
        &["-p", "5", "-r", "1/2", "eigen"],
        &["-r", "x", "slopes"],
        &["spectral", "-i", "/nonexistent/file"],
        &["eigen", "-c", "2", "--dump-phi", "3"],
        &["bogus"],
        &["verify", "--suite", "nope"],
    ] {
        assert_eq!(upadic(args).status.code(), Some(2), "{args:?}");
    }
}

fn run_with_cache(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upadic")).args(args).env("UPADIC_CACHE_DIR", dir).output().unwrap()
}

#[test]
fn output_and_cache_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["-p", "3", "-n", "16", "eigen", "-c", "4", "-f", "json"];
    let first = run_with_cache(dir.path(), &args);
    assert!(first.status.success());
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names, ["umatrix-p3-n16-r0_1.json", "umatrix-p3-n16-r1_2.json"]);
    let saved: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();

    // cached run, then a fresh run without the cache: same bytes
    let second = run_with_cache(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(upadic(&args).stdout, first.stdout);

    for f in &files {
        std::fs::remove_file(f).unwrap();
    }
    run_with_cache(dir.path(), &args);
    let again: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
    assert_eq!(saved, again);

    let flag = upadic(&["--cache-dir", dir.path().to_str().unwrap(), "-p", "3", "-n", "16", "eigen", "-c", "4", "-f", "json"]);
    assert_eq!(flag.stdout, first.stdout);
}

#[test]
fn corrupt_cache_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("umatrix-p2-n8-r0_1.json"), "{not json").unwrap();
    let o = run_with_cache(dir.path(), &["-p", "2", "-n", "8", "slopes", "-c", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed cache file"));
}
