use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use biharp::atomic::{atomic_sets, classify_at, fefferman_stein_check, verify_atomic_chain, verify_l2_atom_bound};
use biharp::factorize::{pisier_endpoint, pisier_split, x0_norm_estimate};
use biharp::haar::{check_exponent, hp_norm_at};
use biharp::harness::{
    constants_csv, constants_text, estimate_constants, generate, run_suite, EnsembleKind, EnsembleSpec, SuiteConfig,
};
use biharp::io::{expansions_from_json, expansions_to_json, DecompositionJson, FactorPairJson, WeightsJson, X0Json};
use biharp::pietsch::{adversarial_search, domination_check, gaussian_multiplier, two_summing_check};
use biharp::search::{rng, AscentConfig};
use biharp::{pietsch_weights, Error, HaarExpansion, Normalization, Result};

#[derive(Parser)]
#[command(name = "biharp", version, about = "Haar multipliers on bi-parameter dyadic Hardy spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    SingleAtom,
    SparseRandom,
    DenseGaussian,
    LacunaryDiagonal,
    RectangleComb,
}

#[derive(Args)]
struct Common {
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct InputArgs {
    /// Expansion JSON (one object or an array); `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Which expansion of an array to use.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Grid exponent G (default L + 1).
    #[arg(long)]
    grid: Option<u32>,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long, value_enum, default_value = "sparse-random")]
    kind: Kind,
    /// Maximal side level L.
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Number of fixtures.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 4.0)]
    ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

impl EnsembleArgs {
    fn spec(&self) -> EnsembleSpec {
        let kind = match self.kind {
            Kind::SingleAtom => EnsembleKind::SingleAtom,
            Kind::SparseRandom => EnsembleKind::SparseRandom { density: self.density },
            Kind::DenseGaussian => EnsembleKind::DenseGaussian,
            Kind::LacunaryDiagonal => EnsembleKind::LacunaryDiagonal { ratio: self.ratio },
            Kind::RectangleComb => EnsembleKind::RectangleComb,
        };
        EnsembleSpec {
            coefficient_scale: self.scale,
            ..EnsembleSpec::new(kind, self.depth, self.trials, self.seed)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random ensemble as expansion JSON.
    Gen {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// H^p norms of the input expansions.
    Norms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        p: Vec<f64>,
        #[arg(long)]
        grid: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Atomic decomposition of one expansion.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Pietsch weights of one expansion.
    Weights {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Normalize by A_p ‖f‖^p instead of B.
        #[arg(long)]
        ap: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Random and adversarial domination checks plus the 2-summing check.
    VerifyDomination {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Random multipliers.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Adversarial search evaluations.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// The atomic chain, the per-level L^2 bounds and the Fefferman–Stein estimate.
    VerifyAtomic {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Factor split |f| = |x|^(1-θ)|y|^θ with θ = 2 - 2/p.
    Factorize {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds on the extrapolation sup for x.
    X0 {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        theta: f64,
        /// Target exponent.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Constant tables over a random ensemble.
    EstimateConstants {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        theta: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// End-to-end pipeline over a random ensemble.
    Suite {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Random multipliers per fixture.
        #[arg(long, default_value_t = 100)]
        phi_trials: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 200)]
        x0_budget: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn read_input(path: &PathBuf) -> Result<Vec<HaarExpansion>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)?
    };
    expansions_from_json(&text)
}

fn pick(args: &InputArgs) -> Result<(HaarExpansion, u32)> {
    let mut list = read_input(&args.input)?;
    if args.index >= list.len() {
        return Err(Error::Config(format!(
            "index {} out of range for {} expansions",
            args.index,
            list.len()
        )));
    }
    let f = list.swap_remove(args.index);
    let g = args.grid.unwrap_or_else(|| f.default_resolution());
    Ok((f, g))
}

fn exponent(p: f64) -> Result<f64> {
    check_exponent(p).map_err(|_| Error::Config(format!("p = {p} outside (0, 2]")))?;
    Ok(p)
}

fn emit(common: &Common, text: String) -> Result<()> {
    match &common.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Key/value rows as aligned text or CSV.
fn table(format: Format, rows: &[(&str, String)]) -> String {
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("key,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
    } else {
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NormRow {
    index: usize,
    p: f64,
    grid: u32,
    norm: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DominationSummary {
    p: f64,
    b: f64,
    domination_constant: f64,
    random_trials: usize,
    max_random_ratio: f64,
    worst_ratio: f64,
    search_evaluations: usize,
    two_summing_lhs: f64,
    two_summing_rhs: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AtomicSummary {
    p: f64,
    norm_pow: f64,
    atom_sum: f64,
    b: f64,
    ap_sample: f64,
    levels: Vec<LevelSummary>,
    fs_lhs: f64,
    fs_rhs: f64,
    fs_constant: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LevelSummary {
    n: i32,
    l2_sq: f64,
    outside: f64,
    star_bound: f64,
    maximal_bound: f64,
    inclusion_holds: bool,
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { ensemble, common } => {
            let list = generate(&ensemble.spec())?;
            emit(&common, expansions_to_json(&list)? + "\n")?;
        }
        Command::Norms { input, p, grid, common } => {
            let list = read_input(&input)?;
            let mut rows = Vec::new();
            for &p in &p {
                exponent(p)?;
            }
            for (index, f) in list.iter().enumerate() {
                let g = grid.unwrap_or_else(|| f.default_resolution());
                for &p in &p {
                    rows.push(NormRow {
                        index,
                        p,
                        grid: g,
                        norm: hp_norm_at(f, p, g)?,
                    });
                }
            }
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => json(&rows)?,
                fmt => {
                    let mut out = if fmt == Format::Csv {
                        String::from("index,p,grid,norm\n")
                    } else {
                        format!("{:>5} {:>6} {:>4} {:>22}\n", "index", "p", "grid", "norm")
                    };
                    for r in &rows {
                        if fmt == Format::Csv {
                            out.push_str(&format!("{},{},{},{}\n", r.index, r.p, r.grid, r.norm));
                        } else {
                            out.push_str(&format!("{:>5} {:>6} {:>4} {:>22.15e}\n", r.index, r.p, r.grid, r.norm));
                        }
                    }
                    out
                }
            };
            emit(&common, text)?;
        }
        Command::Decompose { input, p, common } => {
            let (f, g) = pick(&input)?;
            let dec = classify_at(&f, exponent(p)?, g)?;
            let out = DecompositionJson::from(&dec);
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => json(&out)?,
                fmt => {
                    let mut rows = vec![("B", out.b.to_string()), ("apSample", out.ap_sample.to_string())];
                    let level_rows: Vec<(String, String)> = out
                        .levels
                        .iter()
                        .map(|l| {
                            (
                                format!("n={}", l.n),
                                format!(
                                    "rects={} star={}/{} l2={} hp={}",
                                    l.rects.len(),
                                    l.star_measure.numerator,
                                    l.star_measure.denominator,
                                    l.l2,
                                    l.hp
                                ),
                            )
                        })
                        .collect();
                    rows.extend(level_rows.iter().map(|(k, v)| (k.as_str(), v.clone())));
                    table(fmt, &rows)
                }
            };
            emit(&common, text)?;
        }
        Command::Weights { input, p, ap, common } => {
            let (f, g) = pick(&input)?;
            let dec = classify_at(&f, exponent(p)?, g)?;
            let mode = match ap {
                Some(a) => Normalization::Ap(a),
                None => Normalization::B,
            };
            let w = pietsch_weights(&f, &dec, mode)?;
            let out = WeightsJson::from(&w);
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => json(&out)?,
                Format::Csv => {
                    let mut s = String::from("iLevel,iIndex,jLevel,jIndex,n,omega\n");
                    for r in &out.weights {
                        s.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            r.rect.i_level, r.rect.i_index, r.rect.j_level, r.rect.j_index, r.n, r.omega
                        ));
                    }
                    s
                }
                Format::Text => {
                    let mut s = format!("normalization {}  B = {}  sum = {}\n", out.normalization, out.b, out.sum);
                    for r in &out.weights {
                        s.push_str(&format!(
                            "I=({},{}) J=({},{}) n={:>3}  omega={:.15e}\n",
                            r.rect.i_level, r.rect.i_index, r.rect.j_level, r.rect.j_index, r.n, r.omega
                        ));
                    }
                    s
                }
            };
            emit(&common, text)?;
        }
        Command::VerifyDomination {
            input,
            p,
            trials,
            budget,
            seed,
            common,
        } => {
            let (f, g) = pick(&input)?;
            let dec = classify_at(&f, exponent(p)?, g)?;
            let w = pietsch_weights(&f, &dec, Normalization::B)?;
            let mut r = rng(seed);
            let mut max_random_ratio = 0.0f64;
            for _ in 0..trials {
                let rep = domination_check(&f, &w, &gaussian_multiplier(&f, &mut r))?;
                max_random_ratio = max_random_ratio.max(rep.ratio);
            }
            let search = adversarial_search(&f, &w, &AscentConfig::new(budget, seed))?;
            let phis: Vec<_> = (0..10).map(|_| gaussian_multiplier(&f, &mut r)).collect();
            let two = two_summing_check(&f, &w, &phis)?;
            let out = DominationSummary {
                p,
                b: w.b(),
                domination_constant: w.domination_constant(),
                random_trials: trials,
                max_random_ratio,
                worst_ratio: search.worst_ratio,
                search_evaluations: search.evaluations,
                two_summing_lhs: two.lhs,
                two_summing_rhs: two.rhs,
            };
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Json => json(&out)?,
                fmt => table(
                    fmt,
                    &[
                        ("p", out.p.to_string()),
                        ("B", out.b.to_string()),
                        ("maxRandomRatio", out.max_random_ratio.to_string()),
                        ("worstRatio", out.worst_ratio.to_string()),
                        ("searchEvaluations", out.search_evaluations.to_string()),
                        ("twoSummingLhs", out.two_summing_lhs.to_string()),
                        ("twoSummingRhs", out.two_summing_rhs.to_string()),
                    ],
                ),
            };
            emit(&common, text)?;
        }
        Command::VerifyAtomic { input, p, common } => {
            let (f, g) = pick(&input)?;
            let dec = classify_at(&f, exponent(p)?, g)?;
            let chain = verify_atomic_chain(&dec, &f)?;
            let levels = verify_l2_atom_bound(&dec)?;
            let fs = fefferman_stein_check(&f, p, &atomic_sets(&dec)?, 0.5)?;
            let out = AtomicSummary {
                p,
                norm_pow: chain.norm_pow,
                atom_sum: chain.atom_sum,
                b: chain.b,
                ap_sample: chain.ap_sample,
                levels: levels
                    .iter()
                    .map(|l| LevelSummary {
                        n: l.n,
                        l2_sq: l.l2_sq,
                        outside: l.outside,
                        star_bound: l.star_bound,
                        maximal_bound: l.maximal_bound,
                        inclusion_holds: l.inclusion_holds,
                    })
                    .collect(),
                fs_lhs: fs.lhs,
                fs_rhs: fs.rhs,
                fs_constant: fs.implied_constant,
            };
            let text = match common.format.unwrap_or(Format::Text) {
                Format::Json => json(&out)?,
                fmt => {
                    let mut rows = vec![
                        ("normPow", out.norm_pow.to_string()),
                        ("atomSum", out.atom_sum.to_string()),
                        ("B", out.b.to_string()),
                        ("apSample", out.ap_sample.to_string()),
                        ("levelsChecked", out.levels.len().to_string()),
                    ];
                    if let Some(c) = out.fs_constant {
                        rows.push(("fsConstant", c.to_string()));
                    }
                    table(fmt, &rows)
                }
            };
            emit(&common, text)?;
        }
        Command::Factorize {
            input,
            p,
            budget,
            seed,
            common,
        } => {
            let (f, g) = pick(&input)?;
            let dec = classify_at(&f, exponent(p)?, g)?;
            let w = pietsch_weights(&f, &dec, Normalization::B)?;
            let pair = if p == 1.0 || p == 2.0 {
                pisier_endpoint(&f, &w)?
            } else {
                pisier_split(&f, &w, &AscentConfig::new(budget, seed))?
            };
            emit(&common, json(&FactorPairJson::from(&pair))?)?;
        }
        Command::X0 {
            input,
            theta,
            p,
            budget,
            seed,
            common,
        } => {
            let (x, _) = pick(&input)?;
            let est = x0_norm_estimate(&x, theta, exponent(p)?, &AscentConfig::new(budget, seed))?;
            let out = X0Json::from(&est);
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => json(&out)?,
                fmt => table(
                    fmt,
                    &[
                        ("lowerBound", out.lower_bound.to_string()),
                        ("upperBound", out.upper_bound.to_string()),
                        ("rescaledLower", out.rescaled_lower.to_string()),
                        ("baseExponent", out.base_exponent.to_string()),
                        ("evaluations", out.evaluations.to_string()),
                    ],
                ),
            };
            emit(&common, text)?;
        }
        Command::EstimateConstants {
            ensemble,
            p,
            theta,
            common,
        } => {
            for &p in &p {
                exponent(p)?;
            }
            let list = generate(&ensemble.spec())?;
            let rows = estimate_constants(&list, &p, &theta, ensemble.seed)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => constants_csv(&rows),
                Format::Text => constants_text(&rows),
                Format::Json => json(&rows)?,
            };
            emit(&common, text)?;
        }
        Command::Suite {
            ensemble,
            p,
            theta,
            phi_trials,
            budget,
            x0_budget,
            common,
        } => {
            let config = SuiteConfig {
                ensembles: vec![ensemble.spec()],
                ps: p,
                theta,
                phi_trials,
                adversarial_budget: budget,
                x0_budget,
                ..SuiteConfig::default()
            };
            let report = run_suite(&config)?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => report.to_json()? + "\n",
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv(),
            };
            emit(&common, text)?;
            for f in &report.failures {
                eprintln!(
                    "FAIL index={} seed={} p={} stage={}: {}",
                    f.index, f.seed, f.p, f.stage, f.message
                );
            }
            return Ok(report.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
