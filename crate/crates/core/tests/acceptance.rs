//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use biharp::atomic::{classify, verify_atomic_chain, verify_l2_atom_bound};
use biharp::factorize::{pisier_split, interpolation_check, InterpolationParams};
use biharp::haar::hp_norm;
use biharp::harness::{
    brute_force_oracle, check_against_main, generate, generate_one, interpolation_sample, random_unit_ball,
    run_suite, tiny_fixtures, EnsembleKind, EnsembleSpec, SuiteConfig,
};
use biharp::pietsch::{adversarial_search, domination_check, gaussian_multiplier};
use biharp::search::{rng, AscentConfig};
use biharp::{pietsch_weights, DyadicRectangle, HaarExpansion, Normalization};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// `(p index, θ index) -> (min, max)` of the implied constant.
type CpTable = BTreeMap<(usize, usize), (f64, f64)>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:.1?} exceeds {limit:?}"))
}

/// Fixture `i` of the mixed ensemble: sparse random, lacunary diagonal and
/// rectangle comb in turn, all at `L = 4`.
fn mixed_fixture(i: usize, seed: u64) -> (HaarExpansion, u64) {
    let kind = match i % 3 {
        0 => EnsembleKind::SparseRandom { density: 0.2 },
        1 => EnsembleKind::LacunaryDiagonal { ratio: 3.0 },
        _ => EnsembleKind::RectangleComb,
    };
    let spec = EnsembleSpec::new(kind, 4, i + 1, seed);
    (generate_one(&spec, i).expect("valid spec"), spec.fixture_seed(i))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ens = generate(&EnsembleSpec::new(EnsembleKind::SparseRandom { density: 0.2 }, 4, 100, 101)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut r = rng(1);
    for (i, f) in ens.iter().enumerate() {
        let dec = classify(f, 2.0).map_err(|e| e.to_string())?;
        let w = pietsch_weights(f, &dec, Normalization::B).map_err(|e| e.to_string())?;
        let sum_err = (w.sum() - 1.0).abs();
        ensure(sum_err <= 1e-9, || format!("fixture {i}: Σω - 1 = {sum_err:e}"))?;
        worst = worst.max(sum_err);
        for _ in 0..100 {
            let rep = domination_check(f, &w, &gaussian_multiplier(f, &mut r)).map_err(|e| format!("fixture {i}: {e}"))?;
            let d = (rep.ratio - 1.0).abs();
            ensure(d <= 1e-9, || format!("fixture {i}: ratio {}", rep.ratio))?;
            worst = worst.max(d);
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "100 fixtures x 100 φ at p = 2, max |ratio - 1|, |Σω - 1| = {worst:.2e}, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut per_p = BTreeMap::new();
    for (pi, p) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        let mut worst_p = 0.0f64;
        for i in 0..500 {
            let (f, seed) = mixed_fixture(i, 2000 + pi as u64);
            let fail = |e: biharp::Error| format!("p = {p}, fixture {i} (seed {seed}): {e}");
            let dec = classify(&f, p).map_err(fail)?;
            let w = pietsch_weights(&f, &dec, Normalization::B).map_err(fail)?;
            let mut r = rng(seed);
            for _ in 0..100 {
                let rep = domination_check(&f, &w, &gaussian_multiplier(&f, &mut r)).map_err(fail)?;
                worst_p = worst_p.max(rep.ratio);
            }
            let search = adversarial_search(&f, &w, &AscentConfig::new(2000, seed)).map_err(fail)?;
            worst_p = worst_p.max(search.worst_ratio);
            ensure(worst_p <= 1.0 + 1e-9, || format!("p = {p}, fixture {i} (seed {seed}): ratio {worst_p}"))?;
        }
        per_p.insert(p.to_string(), worst_p);
        worst = worst.max(worst_p);
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    let detail: Vec<String> = per_p.iter().map(|(p, w)| format!("p={p}: {w:.6}")).collect();
    Ok(format!(
        "1500 fixtures, 100 φ + 2000 search each, worst ratio {worst:.9} ({}), {:.1?}",
        detail.join(", "),
        start.elapsed()
    ))
}

fn criterion_3() -> Outcome {
    let mut levels = 0usize;
    for (pi, p) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        for i in 0..500 {
            let (f, seed) = mixed_fixture(i, 2000 + pi as u64);
            let fail = |e: biharp::Error| format!("p = {p}, fixture {i} (seed {seed}): {e}");
            let dec = classify(&f, p).map_err(fail)?;
            verify_atomic_chain(&dec, &f).map_err(fail)?;
            let reports = verify_l2_atom_bound(&dec).map_err(fail)?;
            ensure(reports.iter().all(|r| r.inclusion_holds), || format!("p = {p}, fixture {i}: inclusion"))?;
            levels += reports.len();
        }
    }
    Ok(format!("atomic chain and L^2 atom chain on 1500 fixtures, inclusion exact on {levels} levels"))
}

fn criterion_4() -> Outcome {
    let fixtures = tiny_fixtures(50, 6, 404).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut patterns = 0usize;
    for (i, f) in fixtures.iter().enumerate() {
        for p in [0.5, 1.0, 1.5, 2.0] {
            let agree = check_against_main(f, p, 1e-9).map_err(|e| format!("tiny fixture {i}, p = {p}: {e}"))?;
            worst = worst.max(agree.max_rel_diff);
            patterns += agree.patterns;
        }
    }
    Ok(format!(
        "50 tiny fixtures x 4 exponents, {patterns} sign patterns, max relative discrepancy {worst:.2e}"
    ))
}

fn criterion_5() -> Outcome {
    let big = DyadicRectangle::unit();
    let small = DyadicRectangle::from_parts(1, 0, 1, 0).unwrap();
    let f = HaarExpansion::from_coeffs(1, [(big, 1.0), (small, 3.0)]).unwrap();
    let dec = classify(&f, 1.0).map_err(|e| e.to_string())?;
    let w = pietsch_weights(&f, &dec, Normalization::B).map_err(|e| e.to_string())?;
    let norm = 0.75 + 10f64.sqrt() / 4.0;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;

    let levels: Vec<(i32, Vec<DyadicRectangle>)> = dec.levels().iter().map(|l| (l.n, l.rects.clone())).collect();
    ensure(levels == vec![(-1, vec![big]), (1, vec![small])], || format!("levels {levels:?}"))?;
    ensure(close(dec.b(), 1.75), || format!("B = {}", dec.b()))?;
    ensure(close(w.weight(&big), 4.0 / 7.0) && close(w.weight(&small), 3.0 / 7.0), || {
        format!("ω = ({}, {})", w.weight(&big), w.weight(&small))
    })?;
    ensure(close(dec.norm(), norm), || format!("‖f‖ = {}", dec.norm()))?;
    let rep = domination_check(&f, &w, &biharp::MultiplierSequence::constant(1.0)).map_err(|e| e.to_string())?;
    ensure(close(rep.ratio, norm / 1.75), || format!("ratio {}", rep.ratio))?;

    let oracle = brute_force_oracle(&f, 1.0).map_err(|e| e.to_string())?;
    ensure(close(oracle.b, dec.b()) && close(oracle.norm, dec.norm()), || "oracle disagrees".into())?;
    let ones = oracle.patterns.iter().find(|(pat, _)| pat.iter().all(|&d| d == 1)).unwrap();
    ensure(close(ones.1, rep.ratio), || "oracle ratio disagrees".into())?;
    Ok(format!(
        "R_-1 = {{[0,1)²}}, R_1 = {{[0,1/2)²}}, B = 1.75, ω = (4/7, 3/7), ‖f‖ = {norm:.9}, ratio {:.9}",
        rep.ratio
    ))
}

const PS_6: [f64; 3] = [0.5, 1.0, 1.5];
const THETAS_6: [f64; 3] = [0.25, 0.5, 0.75];

/// Per `(p, θ)`: (min, max) of the implied constant, plus the worst upper
/// margin over all triples.
fn interpolation_ensemble(seed: u64) -> Result<(CpTable, f64), String> {
    let ens = generate(&EnsembleSpec::new(EnsembleKind::SparseRandom { density: 0.2 }, 4, 500, seed)).map_err(|e| e.to_string())?;
    let mut table = BTreeMap::new();
    let mut min_margin = f64::INFINITY;
    for (i, f) in ens.iter().enumerate() {
        for (a, &p) in PS_6.iter().enumerate() {
            for (b, &theta) in THETAS_6.iter().enumerate() {
                let s = interpolation_sample(f, p, theta, seed ^ (i as u64) << 8 ^ (3 * a + b) as u64)
                    .map_err(|e| format!("seed {seed}, fixture {i}, p = {p}, θ = {theta}: {e}"))?;
                ensure(s.upper_margin >= -1e-9, || format!("upper direction fails: margin {}", s.upper_margin))?;
                ensure(s.implied_lower.is_finite() && s.implied_lower > 0.0, || {
                    format!("implied constant {}", s.implied_lower)
                })?;
                min_margin = min_margin.min(s.upper_margin);
                let e = table.entry((a, b)).or_insert((f64::INFINITY, 0.0f64));
                e.0 = e.0.min(s.implied_lower);
                e.1 = e.1.max(s.implied_lower);
            }
        }
    }
    Ok((table, min_margin))
}

fn criterion_6() -> Outcome {
    // The margin check above also runs through the library's own assertion.
    let f = generate_one(&EnsembleSpec::new(EnsembleKind::DenseGaussian, 2, 1, 5), 0).unwrap();
    let g = random_unit_ball(&f, 9).unwrap();
    interpolation_check(&f, &g, &InterpolationParams::new(1.0, 0.5).unwrap()).map_err(|e| e.to_string())?;

    let (first, m1) = interpolation_ensemble(6001)?;
    let (second, m2) = interpolation_ensemble(6002)?;
    let mut csv = String::from("p,theta,q,seed,min_cp,max_cp\n");
    let mut worst_change = 0.0f64;
    for (&(a, b), &(lo1, hi1)) in &first {
        let (lo2, hi2) = second[&(a, b)];
        let q = InterpolationParams::new(PS_6[a], THETAS_6[b]).unwrap().q;
        let _ = writeln!(csv, "{},{},{q},6001,{lo1},{hi1}", PS_6[a], THETAS_6[b]);
        let _ = writeln!(csv, "{},{},{q},6002,{lo2},{hi2}", PS_6[a], THETAS_6[b]);
        let change = (hi1 - hi2).abs() / hi1.max(hi2);
        worst_change = worst_change.max(change);
        ensure(change < 0.05, || {
            format!("max c_p at p = {}, θ = {} moved {:.1}%", PS_6[a], THETAS_6[b], 100.0 * change)
        })?;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("interpolation_constants.csv");
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    Ok(format!(
        "2 x 500 fixtures x 9 (p, θ), min upper margin {:.2e}, max c_p change {:.3}%, table at {}",
        m1.min(m2),
        100.0 * worst_change,
        path.display()
    ))
}

fn criterion_7() -> Outcome {
    let mut worst_defect = 0.0f64;
    let mut worst_y = 0.0f64;
    let mut count = 0;
    for (pi, p) in [1.25, 1.5, 1.75].into_iter().enumerate() {
        let theta = 2.0 - 2.0 / p;
        for i in 0..200 {
            let (f, seed) = mixed_fixture(i, 7000 + pi as u64);
            let fail = |e: biharp::Error| format!("p = {p}, fixture {i} (seed {seed}): {e}");
            let dec = classify(&f, p).map_err(fail)?;
            let w = pietsch_weights(&f, &dec, Normalization::B).map_err(fail)?;
            let pair = pisier_split(&f, &w, &AscentConfig::new(100, seed)).map_err(fail)?;
            let rel = pair.defect / f.max_abs_coeff();
            ensure(rel <= 1e-9, || format!("p = {p}, fixture {i}: defect {rel:e}"))?;
            ensure((pair.y_h2 - 1.0).abs() <= 1e-9, || format!("p = {p}, fixture {i}: ‖y‖ = {}", pair.y_h2))?;
            let x0 = pair.x0.as_ref().unwrap();
            let upper = hp_norm(&pair.x, 1.0).map_err(fail)?.powf(1.0 - theta);
            ensure((x0.upper_bound - upper).abs() <= 1e-9 * upper, || {
                format!("p = {p}, fixture {i}: upper bound {} vs {upper}", x0.upper_bound)
            })?;
            ensure(x0.lower_bound <= upper + 1e-9, || {
                format!("p = {p}, fixture {i}: lower {} > upper {upper}", x0.lower_bound)
            })?;
            worst_defect = worst_defect.max(rel);
            worst_y = worst_y.max((pair.y_h2 - 1.0).abs());
            count += 1;
        }
    }
    Ok(format!(
        "{count} splits, max relative defect {worst_defect:.2e}, max |‖y‖ - 1| {worst_y:.2e}, X0 bounds ordered"
    ))
}

fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

fn criterion_8() -> Outcome {
    let config = SuiteConfig {
        ensembles: vec![EnsembleSpec::new(EnsembleKind::SparseRandom { density: 0.2 }, 3, 25, 8)],
        adversarial_budget: 200,
        x0_budget: 50,
        ..SuiteConfig::default()
    };
    let a = run_suite(&config).map_err(|e| e.to_string())?;
    let b = run_suite(&config).map_err(|e| e.to_string())?;
    ensure(a.passed(), || format!("{} failures", a.failures.len()))?;
    ensure(a.canonical_json().unwrap() == b.canonical_json().unwrap(), || "library reports differ".into())?;

    let dir = tempfile_dir();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("report{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_biharp"))
            .args(["suite", "--depth", "3", "--trials", "20", "--seed", "77", "--budget", "200", "--x0-budget", "50"])
            .arg("--output")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("suite exited with {status}"))?;
        outputs.push(strip_timestamp(&std::fs::read_to_string(&out).map_err(|e| e.to_string())?));
    }
    ensure(outputs[0] == outputs[1], || "CLI reports differ".into())?;
    Ok(format!(
        "suite reports byte-identical modulo timestamp ({} bytes)",
        outputs[0].len()
    ))
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact identity at p = 2", criterion_1),
        ("universal domination", criterion_2),
        ("atomic chains", criterion_3),
        ("oracle equivalence", criterion_4),
        ("hand-derived fixture", criterion_5),
        ("interpolation upper direction", criterion_6),
        ("factorization defect", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg}", k + 1);
            }
        }
        eprintln!("    [{}] took {:.1?}", k + 1, start.elapsed());
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
