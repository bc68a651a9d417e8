use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::ensemble::{generate_one, EnsembleSpec};
use crate::atomic::{atomic_sets, classify, fefferman_stein_check, verify_atomic_chain, verify_l2_atom_bound};
use crate::error::{Error, Result};
use crate::factorize::{g_candidate, pisier_split, interpolation_check, InterpolationParams};
use crate::haar::{check_exponent, HaarExpansion};
use crate::numeric::median;
use crate::pietsch::{
    adversarial_search, domination_check, gaussian_multiplier, pietsch_weights, two_summing_check, Normalization,
};
use crate::search::{rng, AscentConfig};

pub const REPORT_SCHEMA: &str = "biharp.run-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteConfig {
    pub ensembles: Vec<EnsembleSpec>,
    pub ps: Vec<f64>,
    pub theta: f64,
    pub phi_trials: usize,
    pub two_summing_trials: usize,
    pub adversarial_budget: usize,
    pub x0_budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            ensembles: vec![EnsembleSpec::new(
                super::EnsembleKind::SparseRandom { density: 0.2 },
                4,
                500,
                42,
            )],
            ps: vec![0.5, 1.0, 1.5, 2.0],
            theta: 0.5,
            phi_trials: 100,
            two_summing_trials: 10,
            adversarial_budget: 2000,
            x0_budget: 200,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ensembles.is_empty() || self.ps.is_empty() {
            return Err(Error::Config("suite needs at least one ensemble and one p".into()));
        }
        for p in &self.ps {
            check_exponent(*p).map_err(|_| Error::Config(format!("p = {p} outside (0, 2]")))?;
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config(format!("θ = {} outside (0, 1)", self.theta)));
        }
        self.ensembles.iter().try_for_each(EnsembleSpec::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PisierRecord {
    pub defect: f64,
    pub y_h2: f64,
    pub x0_lower: f64,
    pub x0_upper: f64,
    pub implied_c_verbatim: f64,
    pub implied_c_rescaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureRecord {
    pub index: usize,
    pub seed: u64,
    pub kind: String,
    pub p: f64,
    pub support: usize,
    pub levels: usize,
    pub tie_cells: usize,
    pub norm: f64,
    pub b: f64,
    pub ap_sample: f64,
    pub max_random_ratio: f64,
    pub worst_ratio: f64,
    pub search_evaluations: usize,
    pub two_summing_slack: f64,
    pub cp_ratio: f64,
    pub interp_upper_margin: f64,
    pub interp_implied_lower: Option<f64>,
    pub fs_constant: Option<f64>,
    pub pisier: Option<PisierRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Failure {
    pub index: usize,
    pub seed: u64,
    pub kind: String,
    pub p: f64,
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregate {
    pub p: f64,
    pub metric: String,
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema: String,
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub timestamp: u64,
    pub config: SuiteConfig,
    pub fixtures: Vec<FixtureRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        self.failures.iter().map(|f| f.exit_code).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the timestamp removed, for byte comparison across runs.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timestamp");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}  fixtures: {}  failures: {}",
            self.schema,
            self.fixtures.len(),
            self.failures.len()
        );
        out.push_str(&aggregate_table(&self.aggregates));
        for f in &self.failures {
            let _ = writeln!(
                out,
                "FAIL index={} seed={} kind={} p={} stage={}: {}",
                f.index, f.seed, f.kind, f.p, f.stage, f.message
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        aggregate_csv(&self.aggregates)
    }
}

pub fn aggregate_table(rows: &[Aggregate]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:<20} {:>6} {:>14} {:>14} {:>14}",
        "p", "metric", "count", "min", "median", "max"
    );
    for a in rows {
        let _ = writeln!(
            out,
            "{:>6}  {:<20} {:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            a.p, a.metric, a.count, a.min, a.median, a.max
        );
    }
    out
}

pub fn aggregate_csv(rows: &[Aggregate]) -> String {
    let mut out = String::from("p,metric,count,min,median,max\n");
    for a in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", a.p, a.metric, a.count, a.min, a.median, a.max);
    }
    out
}

/// Summary of `values` under `metric`; `None` for an empty slice.
pub fn summarize(p: f64, metric: &str, values: &[f64]) -> Option<Aggregate> {
    if values.is_empty() {
        return None;
    }
    Some(Aggregate {
        p,
        metric: metric.to_string(),
        count: values.len(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(values),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Runs every stage on one fixture at one exponent. On failure returns the
/// stage name with the error.
pub fn run_fixture(
    f: &HaarExpansion,
    p: f64,
    config: &SuiteConfig,
    seed: u64,
) -> std::result::Result<FixtureRecord, (&'static str, Error)> {
    fn at<T>(stage: &'static str, r: Result<T>) -> std::result::Result<T, (&'static str, Error)> {
        r.map_err(|e| (stage, e))
    }
    let dec = at("classify", classify(f, p))?;
    let chain = at("verify_atomic_chain", verify_atomic_chain(&dec, f))?;
    at("verify_l2_atom_bound", verify_l2_atom_bound(&dec))?;
    let w = at("pietsch_weights", pietsch_weights(f, &dec, Normalization::B))?;

    let mut r = rng(seed ^ p.to_bits());
    let mut max_random_ratio = 0.0f64;
    for _ in 0..config.phi_trials {
        let phi = gaussian_multiplier(f, &mut r);
        let rep = at("domination_check", domination_check(f, &w, &phi))?;
        max_random_ratio = max_random_ratio.max(rep.ratio);
    }
    let search = at(
        "adversarial_search",
        adversarial_search(f, &w, &AscentConfig::new(config.adversarial_budget, r_seed(seed, 1))),
    )?;
    let phis: Vec<_> = (0..config.two_summing_trials)
        .map(|_| gaussian_multiplier(f, &mut r))
        .collect();
    let two = at("two_summing_check", two_summing_check(f, &w, &phis))?;

    let cand = at("g_candidate", g_candidate(f, &dec))?;
    let params = at("interpolation_check", InterpolationParams::new(p, config.theta))?;
    let unit_g = cand.g.scale(1.0 / cand.l2_sq.sqrt());
    let interp = at("interpolation_check", interpolation_check(f, &unit_g, &params))?;

    let pisier = if p > 1.0 && p < 2.0 {
        let pair = at(
            "pisier_split",
            pisier_split(f, &w, &AscentConfig::new(config.x0_budget, r_seed(seed, 2))),
        )?;
        let x0 = pair.x0.as_ref().expect("interior exponent carries an estimate");
        Some(PisierRecord {
            defect: pair.defect,
            y_h2: pair.y_h2,
            x0_lower: x0.lower_bound,
            x0_upper: x0.upper_bound,
            implied_c_verbatim: pair.implied_c_verbatim.unwrap_or(f64::NAN),
            implied_c_rescaled: pair.implied_c_rescaled.unwrap_or(f64::NAN),
        })
    } else {
        None
    };

    let sets = at("fefferman_stein_check", atomic_sets(&dec))?;
    let fs = at("fefferman_stein_check", fefferman_stein_check(f, p, &sets, 0.5))?;

    Ok(FixtureRecord {
        index: 0,
        seed,
        kind: String::new(),
        p,
        support: f.support_len(),
        levels: dec.levels().len(),
        tie_cells: dec.tie_cells(),
        norm: dec.norm(),
        b: dec.b(),
        ap_sample: chain.ap_sample,
        max_random_ratio,
        worst_ratio: search.worst_ratio,
        search_evaluations: search.evaluations,
        two_summing_slack: two.slack,
        cp_ratio: cand.cp_ratio,
        interp_upper_margin: interp.upper_margin,
        interp_implied_lower: interp.implied_lower,
        fs_constant: fs.implied_constant,
        pisier,
    })
}

fn r_seed(seed: u64, stream: u64) -> u64 {
    super::ensemble::mix(seed, stream)
}

/// Runs the full pipeline on every fixture of every ensemble at every `p`.
pub fn run_suite(config: &SuiteConfig) -> Result<RunReport> {
    config.validate()?;
    let mut fixtures = Vec::new();
    let mut failures = Vec::new();
    let mut index = 0usize;
    for spec in &config.ensembles {
        for i in 0..spec.count {
            let seed = spec.fixture_seed(i);
            let f = generate_one(spec, i)?;
            for &p in &config.ps {
                match run_fixture(&f, p, config, seed) {
                    Ok(mut rec) => {
                        rec.index = index;
                        rec.kind = spec.kind.name().to_string();
                        fixtures.push(rec);
                    }
                    Err((stage, e)) => failures.push(Failure {
                        index,
                        seed,
                        kind: spec.kind.name().to_string(),
                        p,
                        stage: stage.to_string(),
                        message: e.to_string(),
                        exit_code: e.exit_code(),
                    }),
                }
            }
            index += 1;
        }
    }
    let aggregates = aggregate(&config.ps, &fixtures);
    Ok(RunReport {
        schema: REPORT_SCHEMA.to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: config.clone(),
        fixtures,
        aggregates,
        failures,
    })
}

fn aggregate(ps: &[f64], fixtures: &[FixtureRecord]) -> Vec<Aggregate> {
    type Getter = fn(&FixtureRecord) -> Option<f64>;
    let metrics: [(&str, Getter); 9] = [
        ("apSample", |r| Some(r.ap_sample)),
        ("maxRandomRatio", |r| Some(r.max_random_ratio)),
        ("worstRatio", |r| Some(r.worst_ratio)),
        ("twoSummingSlack", |r| Some(r.two_summing_slack)),
        ("cpRatio", |r| Some(r.cp_ratio)),
        ("interpImpliedLower", |r| r.interp_implied_lower),
        ("fsConstant", |r| r.fs_constant),
        ("impliedCVerbatim", |r| r.pisier.as_ref().map(|x| x.implied_c_verbatim)),
        ("impliedCRescaled", |r| r.pisier.as_ref().map(|x| x.implied_c_rescaled)),
    ];
    let mut out = Vec::new();
    for &p in ps {
        for (name, get) in metrics {
            let values: Vec<f64> = fixtures.iter().filter(|r| r.p == p).filter_map(get).collect();
            out.extend(summarize(p, name, &values));
        }
    }
    out
}
