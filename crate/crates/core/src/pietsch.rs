//! Explicit Pietsch weights for the Haar multiplier `M_f : l^inf -> H^p`.
//!
//! For `I x J ∈ R_n` the weight is
//!
//! ```text
//! ω_IJ = |R_n^*|^(1-p/2) f_IJ^2 |I||J| / (N ‖f_n‖_2^(2-p))
//! ```
//!
//! with `N = B` (so that `Σ ω = 1`) or `N = A_p ‖f‖^p` for a caller-supplied
//! `A_p`. With `N = B` the domination
//! `‖M_f φ‖_{H^p} ≤ B^(1/p) (Σ φ_IJ^2 ω_IJ)^(1/2)` carries no unknown
//! constant and is checked exactly.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::atomic::AtomicDecomposition;
use crate::dyadic::DyadicRectangle;
use crate::error::{Error, Result};
use crate::haar::{hp_norm_at, multiplier_apply, HaarExpansion, MultiplierSequence, SupportGrid};
use crate::numeric::{self, le_rel, REL_TOL};
use crate::search::{self, AscentConfig, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Divide by `B`.
    B,
    /// Divide by `A_p ‖f‖^p`.
    Ap(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PietschWeights {
    p: f64,
    resolution: u32,
    normalization: Normalization,
    weights: BTreeMap<DyadicRectangle, f64>,
    levels: BTreeMap<DyadicRectangle, i32>,
    level_sums: BTreeMap<i32, f64>,
    b: f64,
    norm: f64,
    domination_constant: f64,
    over_budget: bool,
}

impl PietschWeights {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_b_normalized(&self) -> bool {
        self.normalization == Normalization::B
    }

    pub fn weight(&self, r: &DyadicRectangle) -> f64 {
        self.weights.get(r).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DyadicRectangle, f64)> + '_ {
        self.weights.iter().map(|(r, &w)| (r, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        numeric::sum(self.weights.values().copied())
    }

    /// The `n` with `r ∈ R_n`.
    pub fn level_of(&self, r: &DyadicRectangle) -> Option<i32> {
        self.levels.get(r).copied()
    }

    /// `Σ_{R_n} ω`, per level `n`.
    pub fn level_sums(&self) -> &BTreeMap<i32, f64> {
        &self.level_sums
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `‖f‖_{H^p}`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `B^(1/p)` for B-normalized weights, `A_p ‖f‖_{H^p}` otherwise.
    pub fn domination_constant(&self) -> f64 {
        self.domination_constant
    }

    /// For `A_p`-normalized weights, the constant `(A_p ‖f‖^p)^(1/p)` that the
    /// Hölder step produces.
    pub fn proof_constant(&self) -> f64 {
        match self.normalization {
            Normalization::B => self.domination_constant,
            Normalization::Ap(ap) => (ap * self.norm.powf(self.p)).powf(1.0 / self.p),
        }
    }

    /// Set when the supplied `A_p` is below `B / ‖f‖^p`, so `Σ ω > 1`.
    pub fn over_budget(&self) -> bool {
        self.over_budget
    }
}

/// Builds `ω` from `f` and its atomic decomposition.
pub fn pietsch_weights(f: &HaarExpansion, dec: &AtomicDecomposition, mode: Normalization) -> Result<PietschWeights> {
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0 has no Pietsch weights".into()));
    }
    let classified: usize = dec.levels().iter().map(|l| l.rects.len()).sum();
    if classified != f.support_len() {
        return Err(Error::Precondition(
            "decomposition does not belong to this expansion".into(),
        ));
    }
    let p = dec.p();
    let b = dec.b();
    let norm = dec.norm();
    let (denominator, domination_constant, over_budget) = match mode {
        Normalization::B => (b, b.powf(1.0 / p), false),
        Normalization::Ap(ap) => {
            if ap.is_nan() || ap <= 0.0 {
                return Err(Error::Domain(format!("A_p = {ap} must be positive")));
            }
            let n = ap * norm.powf(p);
            (n, ap * norm, n < b * (1.0 - REL_TOL))
        }
    };

    let mut weights = BTreeMap::new();
    let mut levels = BTreeMap::new();
    let mut level_sums = BTreeMap::new();
    for level in dec.levels() {
        let factor = level.star.measure().powf(1.0 - p / 2.0) / level.l2.powf(2.0 - p) / denominator;
        let mut acc = numeric::CompensatedSum::new();
        for r in &level.rects {
            let v = f.get(r);
            if v == 0.0 {
                return Err(Error::Precondition(format!(
                    "rectangle {r} of the decomposition is not in the support of f"
                )));
            }
            let w = factor * v * v * r.measure();
            acc.add(w);
            weights.insert(*r, w);
            levels.insert(*r, level.n);
        }
        level_sums.insert(level.n, acc.value());
    }

    Ok(PietschWeights {
        p,
        resolution: dec.resolution(),
        normalization: mode,
        weights,
        levels,
        level_sums,
        b,
        norm,
        domination_constant,
        over_budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport {
    /// `‖M_f φ‖_{H^p}`.
    pub lhs: f64,
    /// `C (Σ φ^2 ω)^(1/2)`.
    pub rhs: f64,
    pub ratio: f64,
    /// Set for `A_p`-normalized weights, where nothing is asserted.
    pub estimate_only: bool,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `‖M_f φ‖_{H^p}` against `C (Σ φ^2 ω)^(1/2)`; asserts `ratio ≤ 1` for
/// B-normalized weights.
pub fn domination_check(f: &HaarExpansion, w: &PietschWeights, phi: &MultiplierSequence) -> Result<DominationReport> {
    let lhs = hp_norm_at(&multiplier_apply(f, phi), w.p, w.resolution)?;
    let weighted = numeric::sum(w.iter().map(|(r, om)| {
        let x = phi.value(r);
        x * x * om
    }));
    let rhs = w.domination_constant * weighted.sqrt();
    let ratio = ratio_of(lhs, rhs);
    let estimate_only = !w.is_b_normalized();
    if !estimate_only && !le_rel(lhs, rhs, REL_TOL) {
        return Err(Error::violation("‖M_f φ‖ ≤ B^(1/p) (Σ φ² ω)^(1/2)", lhs, rhs));
    }
    Ok(DominationReport {
        lhs,
        rhs,
        ratio,
        estimate_only,
    })
}

/// Domination ratio for many multipliers on a fixed `(f, ω)`. Multipliers
/// are given as the vector of `φ_IJ^2` over the support of `f`, in
/// rectangle order.
pub struct DominationEvaluator {
    grid: SupportGrid,
    rects: Vec<DyadicRectangle>,
    f_sq: Vec<f64>,
    omega: Vec<f64>,
    p: f64,
    constant: f64,
    coeff: Vec<f64>,
    scratch: Vec<f64>,
}

impl DominationEvaluator {
    pub fn new(f: &HaarExpansion, w: &PietschWeights) -> Result<Self> {
        let rects: Vec<DyadicRectangle> = f.support().copied().collect();
        let grid = SupportGrid::new(&rects, w.resolution)?;
        let cells = grid.cells();
        Ok(Self {
            f_sq: f.iter().map(|(_, v)| v * v).collect(),
            omega: rects.iter().map(|r| w.weight(r)).collect(),
            p: w.p,
            constant: w.domination_constant,
            coeff: vec![0.0; rects.len()],
            scratch: vec![0.0; cells],
            rects,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.rects.len()
    }

    pub fn rects(&self) -> &[DyadicRectangle] {
        &self.rects
    }

    pub fn ratio(&mut self, phi_sq: &[f64]) -> f64 {
        for ((c, f2), x) in self.coeff.iter_mut().zip(&self.f_sq).zip(phi_sq) {
            *c = f2 * x;
        }
        let lhs = self.grid.hp_norm(&self.coeff, self.p, &mut self.scratch);
        let weighted = numeric::sum(phi_sq.iter().zip(&self.omega).map(|(x, o)| x * o));
        ratio_of(lhs, self.constant * weighted.sqrt())
    }

    /// Multiplier with entries `sqrt(phi_sq)` on the support, zero elsewhere.
    pub fn multiplier(&self, phi_sq: &[f64]) -> MultiplierSequence {
        MultiplierSequence::from_entries(self.rects.iter().zip(phi_sq).map(|(r, x)| (*r, x.sqrt())))
    }
}

/// Random Gaussian multiplier on the support of `f`.
pub fn gaussian_multiplier(f: &HaarExpansion, rng: &mut Rng) -> MultiplierSequence {
    MultiplierSequence::from_entries(f.support().map(|r| (*r, rng.sample::<f64, _>(StandardNormal))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub worst_phi: MultiplierSequence,
    pub worst_ratio: f64,
    pub evaluations: usize,
}

/// Searches for a multiplier maximizing the domination ratio: Gaussian
/// samples, random `{-1, 0, +1}` patterns, and multiplicative coordinate
/// ascent on `φ^2`. The worst multiplier found is re-checked through
/// [`domination_check`].
pub fn adversarial_search(f: &HaarExpansion, w: &PietschWeights, cfg: &AscentConfig) -> Result<SearchOutcome> {
    if !w.is_b_normalized() {
        return Err(Error::Precondition("adversarial search needs B-normalized weights".into()));
    }
    let mut eval = DominationEvaluator::new(f, w)?;
    let dim = eval.dim();
    let rects = eval.rects().to_vec();

    // φ ≡ 1 and the indicator of each level R_n.
    let mut starts = vec![vec![1.0; dim]];
    if w.level_sums().len() > 1 {
        for n in w.level_sums().keys() {
            starts.push(rects.iter().map(|r| if w.level_of(r) == Some(*n) { 1.0 } else { 0.0 }).collect());
        }
    }

    let mut toggle = false;
    let sampler = |rng: &mut Rng| {
        toggle = !toggle;
        if toggle {
            (0..dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    z * z
                })
                .collect()
        } else {
            (0..dim).map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).collect()
        }
    };
    let outcome = search::maximize(dim, &starts, sampler, |v| eval.ratio(v), cfg);
    let worst_phi = DominationEvaluator::new(f, w)?.multiplier(&outcome.best);
    let report = domination_check(f, w, &worst_phi)?;
    Ok(SearchOutcome {
        worst_phi,
        worst_ratio: report.ratio,
        evaluations: outcome.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSummingReport {
    /// `(Σ_i ‖M_f φ_i‖^2)^(1/2)`.
    pub lhs: f64,
    /// `C sup_IJ (Σ_i φ_{i,IJ}^2)^(1/2)`.
    pub rhs: f64,
    pub slack: f64,
}

/// The 2-summing inequality in coordinate-functional form,
/// `(Σ_i ‖M_f φ_i‖^2)^(1/2) ≤ B^(1/p) sup_IJ (Σ_i φ_{i,IJ}^2)^(1/2)`,
/// with the supremum over the support of `f`.
pub fn two_summing_check(f: &HaarExpansion, w: &PietschWeights, phis: &[MultiplierSequence]) -> Result<TwoSummingReport> {
    if !w.is_b_normalized() {
        return Err(Error::Precondition("2-summing check needs B-normalized weights".into()));
    }
    let mut lhs_sq = numeric::CompensatedSum::new();
    for phi in phis {
        let v = hp_norm_at(&multiplier_apply(f, phi), w.p, w.resolution)?;
        lhs_sq.add(v * v);
    }
    let lhs = lhs_sq.value().sqrt();
    let sup = f
        .support()
        .map(|r| numeric::sum(phis.iter().map(|phi| phi.value(r).powi(2))))
        .fold(0.0, f64::max)
        .sqrt();
    let rhs = w.domination_constant * sup;
    if !le_rel(lhs, rhs, REL_TOL) {
        return Err(Error::violation("2-summing inequality", lhs, rhs));
    }
    Ok(TwoSummingReport {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApStats {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub samples: Vec<f64>,
}

/// Distribution of `B / ‖f‖^p` over an ensemble.
pub fn estimate_ap(ensemble: &[HaarExpansion], p: f64) -> Result<ApStats> {
    if ensemble.is_empty() {
        return Err(Error::Config("empty ensemble".into()));
    }
    let samples = ensemble
        .iter()
        .map(|f| crate::atomic::classify(f, p).map(|d| d.ap_sample()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ApStats {
        count: samples.len(),
        min: samples.iter().copied().fold(f64::INFINITY, f64::min),
        median: numeric::median(&samples),
        max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        samples,
    })
}
