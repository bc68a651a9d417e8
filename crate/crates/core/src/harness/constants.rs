use std::fmt::Write as _;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::atomic::{atomic_sets, classify, fefferman_stein_check};
use crate::error::Result;
use crate::factorize::{g_candidate, interpolation_check, InterpolationParams};
use crate::haar::HaarExpansion;
use crate::numeric::median;
use crate::search::rng;

/// Distribution of one estimated constant at one `(p, θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantRow {
    pub constant: String,
    pub p: f64,
    pub theta: Option<f64>,
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl ConstantRow {
    fn new(constant: &str, p: f64, theta: Option<f64>, values: &[f64]) -> Self {
        Self {
            constant: constant.to_string(),
            p,
            theta,
            count: values.len(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            median: median(values),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationSample {
    /// `‖|f|^(1-θ)|g|^θ‖_q / ‖f‖^(1-θ)` for the normalized atomic candidate.
    pub implied_lower: f64,
    /// `‖f‖^(1-θ) - ‖|f|^(1-θ)|g|^θ‖_q` for a random `g` with `‖g‖_2 ≤ 1`.
    pub upper_margin: f64,
}

/// A random `g` on the support of `f` with `‖g‖_2 = u`, `u` uniform in (0, 1].
pub fn random_unit_ball(f: &HaarExpansion, seed: u64) -> Result<HaarExpansion> {
    let mut r = rng(seed);
    let values: Vec<(_, f64)> = f
        .support()
        .map(|rect| {
            let z: f64 = r.sample(StandardNormal);
            (*rect, if z == 0.0 { 1.0 } else { z })
        })
        .collect();
    let raw = HaarExpansion::from_coeffs(f.max_level(), values)?;
    let radius = 1.0 - r.gen::<f64>();
    Ok(raw.scale(radius / raw.h2_norm_coeff()))
}

/// Upper-direction margin for a random `g` in the unit ball and the implied
/// lower constant of the atomic candidate, for one fixture.
pub fn interpolation_sample(f: &HaarExpansion, p: f64, theta: f64, seed: u64) -> Result<InterpolationSample> {
    let params = InterpolationParams::new(p, theta)?;
    let g = random_unit_ball(f, seed)?;
    let rep = interpolation_check(f, &g, &params)?;
    Ok(InterpolationSample {
        implied_lower: rep.implied_lower.expect("g is nonzero"),
        upper_margin: rep.f_factor - rep.hq_norm,
    })
}

/// `A_p` samples `B/‖f‖^p`, Fefferman–Stein constants for `E = I x J ∩ F_n`,
/// `‖g‖_2^2/‖f‖^p` for the atomic candidate, and the implied interpolation
/// constant at each `θ`.
pub fn estimate_constants(ensemble: &[HaarExpansion], ps: &[f64], thetas: &[f64], seed: u64) -> Result<Vec<ConstantRow>> {
    let mut rows = Vec::new();
    for &p in ps {
        let mut ap = Vec::new();
        let mut fs = Vec::new();
        let mut gc = Vec::new();
        for f in ensemble {
            let dec = classify(f, p)?;
            ap.push(dec.ap_sample());
            let rep = fefferman_stein_check(f, p, &atomic_sets(&dec)?, 0.5)?;
            fs.extend(rep.implied_constant);
            gc.push(g_candidate(f, &dec)?.cp_ratio);
        }
        rows.push(ConstantRow::new("A_p", p, None, &ap));
        rows.push(ConstantRow::new("C_p(1/2)", p, None, &fs));
        rows.push(ConstantRow::new("gCandidateRatio", p, None, &gc));
        for &theta in thetas {
            let cp = ensemble
                .iter()
                .enumerate()
                .map(|(i, f)| interpolation_sample(f, p, theta, super::ensemble::mix(seed, i as u64)).map(|s| s.implied_lower))
                .collect::<Result<Vec<_>>>()?;
            rows.push(ConstantRow::new("c_p", p, Some(theta), &cp));
        }
    }
    Ok(rows)
}

pub fn constants_csv(rows: &[ConstantRow]) -> String {
    let mut out = String::from("constant,p,theta,count,min,median,max\n");
    for r in rows {
        let theta = r.theta.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.constant, r.p, theta, r.count, r.min, r.median, r.max
        );
    }
    out
}

pub fn constants_text(rows: &[ConstantRow]) -> String {
    let mut out = format!(
        "{:<16} {:>6} {:>6} {:>6} {:>14} {:>14} {:>14}\n",
        "constant", "p", "theta", "count", "min", "median", "max"
    );
    for r in rows {
        let theta = r.theta.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<16} {:>6} {:>6} {:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.constant, r.p, theta, r.count, r.min, r.median, r.max
        );
    }
    out
}
