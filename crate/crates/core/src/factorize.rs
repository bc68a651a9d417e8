//! Lattice interpolation between `H^p(δ^2)` and `H^2(δ^2)`, and the factor
//! split `|f| = |x|^(1-θ) |y|^θ` built from the Pietsch weights.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::atomic::{classify, AtomicDecomposition};
use crate::dyadic::{DyadicRectangle, GridFunction};
use crate::error::{Error, Result};
use crate::haar::{check_exponent, hp_norm_at, lattice_interpolant, HaarExpansion, SupportGrid};
use crate::numeric::{self, le_rel, IDENTITY_TOL, REL_TOL};
use crate::pietsch::PietschWeights;
use crate::search::{self, AscentConfig, Rng};

/// `(p, θ, q)` with `1/q = (1-θ)/p + θ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationParams {
    pub p: f64,
    pub theta: f64,
    pub q: f64,
}

impl InterpolationParams {
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        check_exponent(p)?;
        check_theta(theta)?;
        let q = 1.0 / ((1.0 - theta) / p + theta / 2.0);
        Ok(Self { p, theta, q })
    }

    /// Recovers `θ` from `p < 2` and `q ∈ (p, 2)`.
    pub fn from_q(p: f64, q: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(p < 2.0 && q > p && q < 2.0) {
            return Err(Error::Domain(format!("need p < q < 2, got p = {p}, q = {q}")));
        }
        let theta = (1.0 / p - 1.0 / q) / (1.0 / p - 0.5);
        Ok(Self { p, theta, q })
    }

    /// `|(q - p) - qθ(2 - p)/2|`, zero up to round-off.
    pub fn identity_defect(&self) -> f64 {
        ((self.q - self.p) - self.q * self.theta * (2.0 - self.p) / 2.0).abs()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("θ = {theta} outside (0, 1)")))
    }
}

fn grid_for(a: &HaarExpansion, b: &HaarExpansion) -> u32 {
    a.max_level().max(b.max_level()) + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct GCandidate {
    pub g: HaarExpansion,
    /// `‖g‖_2^2`.
    pub l2_sq: f64,
    /// `‖g‖_2^2 / ‖f‖_{H^p}^p`.
    pub cp_ratio: f64,
}

/// `|g_IJ| = 2^(-n(2-p)/2) |f_IJ|` for `I x J ∈ R_n`.
pub fn g_candidate(f: &HaarExpansion, dec: &AtomicDecomposition) -> Result<GCandidate> {
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0".into()));
    }
    let p = dec.p();
    let mut g = HaarExpansion::new(f.max_level())?;
    for level in dec.levels() {
        let scale = 2f64.powf(-0.5 * level.n as f64 * (2.0 - p));
        for r in &level.rects {
            g.set(*r, scale * f.get(r).abs())?;
        }
    }
    let l2_sq = g.h2_norm_coeff().powi(2);
    Ok(GCandidate {
        cp_ratio: l2_sq / dec.norm().powf(p),
        l2_sq,
        g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport {
    /// `‖Σ |f|^(1-θ) |g|^θ h‖_{H^q}` for the given `g` (scaled into the unit ball).
    pub hq_norm: f64,
    /// `‖f‖_{H^p}^(1-θ)`.
    pub f_factor: f64,
    /// `‖g‖_2` after scaling.
    pub g_l2: f64,
    /// `‖f‖^(1-θ) ‖g‖_2^θ`.
    pub upper_bound: f64,
    pub upper_margin: f64,
    /// `‖h‖_{H^q} / ‖f‖^(1-θ)` with `g` the normalized candidate; `None` when
    /// the supplied `g` is zero.
    pub implied_lower: Option<f64>,
}

/// Upper direction `‖h‖_{H^q} ≤ ‖f‖_{H^p}^(1-θ) ‖g‖_2^θ` (asserted) and the
/// implied constant of the lower direction for the candidate `g`.
pub fn interpolation_check(f: &HaarExpansion, g: &HaarExpansion, params: &InterpolationParams) -> Result<InterpolationReport> {
    let InterpolationParams { p, theta, q } = *params;
    let res = grid_for(f, g);
    let g_norm = g.h2_norm_coeff();
    let g_used = if g_norm > 1.0 { g.scale(1.0 / g_norm) } else { g.clone() };
    let g_l2 = g_used.h2_norm_coeff();
    let f_factor = hp_norm_at(f, p, res)?.powf(1.0 - theta);
    let hq_norm = hp_norm_at(&lattice_interpolant(f, &g_used, theta)?, q, res)?;
    let upper_bound = f_factor * g_l2.powf(theta);
    if !le_rel(hq_norm, upper_bound, REL_TOL) {
        return Err(Error::violation("‖|f|^(1-θ)|g|^θ‖_q ≤ ‖f‖_p^(1-θ)‖g‖_2^θ", hq_norm, upper_bound));
    }
    let implied_lower = if g.is_zero() || f.is_zero() {
        None
    } else {
        let cand = g_candidate(f, &classify(f, p)?)?;
        let unit = cand.g.scale(1.0 / cand.l2_sq.sqrt());
        let hc = hp_norm_at(&lattice_interpolant(f, &unit, theta)?, q, res)?;
        Some(hc / f_factor)
    };
    Ok(InterpolationReport {
        hq_norm,
        f_factor,
        g_l2,
        upper_bound,
        upper_margin: upper_bound - hq_norm,
        implied_lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedHolderReport {
    /// `∫ u^r v^(1-r)`.
    pub lhs: f64,
    /// `(∫ u)^r (∫ v)^(1-r)`.
    pub rhs: f64,
}

/// `∫ u^r v^(1-r) ≥ (∫ u)^r (∫ v)^(1-r)` for `r > 1` or `r < 0`, with the
/// Lebesgue measure on the unit square.
pub fn modified_holder_check(u: &GridFunction, v: &GridFunction, r: f64) -> Result<ModifiedHolderReport> {
    if (0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(Error::Domain(format!("r = {r} must satisfy r > 1 or r < 0")));
    }
    if u.resolution() != v.resolution() {
        return Err(Error::Resolution("u and v live on different grids".into()));
    }
    if u.min() < 0.0 || v.min() < 0.0 {
        return Err(Error::Precondition("u and v must be nonnegative".into()));
    }
    // The factor with a negative exponent must not vanish.
    let (neg, name) = if r > 1.0 { (v, "v") } else { (u, "u") };
    if neg.min() <= 0.0 {
        return Err(Error::Precondition(format!("{name} vanishes where its exponent is negative")));
    }
    let lhs = numeric::sum(u.values().iter().zip(v.values()).map(|(&a, &b)| {
        if a == 0.0 && r > 1.0 {
            0.0
        } else {
            a.powf(r) * b.powf(1.0 - r)
        }
    })) * u.cell_measure();
    let rhs = u.integral().powf(r) * v.integral().powf(1.0 - r);
    if lhs < rhs * (1.0 - REL_TOL) {
        return Err(Error::violation("∫u^r v^(1-r) ≥ (∫u)^r (∫v)^(1-r)", lhs, rhs));
    }
    Ok(ModifiedHolderReport { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct X0Estimate {
    /// Best `‖Σ |x|^(1-θ) |y|^θ h‖_{H^target}` found over `‖y‖_2 ≤ 1`.
    pub lower_bound: f64,
    /// `‖x‖_{H^base}^(1-θ)`.
    pub upper_bound: f64,
    /// `base` with `1/target = (1-θ)/base + θ/2`; equals 1 when `θ = 2 - 2/target`.
    pub base_exponent: f64,
    /// `‖x‖_{H^base}`.
    pub base_norm: f64,
    /// `lower_bound^(1/(1-θ))`, the 1-homogeneous reading of the sup.
    pub rescaled_lower: f64,
    pub witness: HaarExpansion,
    pub evaluations: usize,
}

/// Lower and upper bounds for the extrapolation sup
/// `sup_{‖y‖_2 ≤ 1} ‖Σ |x_IJ|^(1-θ) |y_IJ|^θ h_{I x J}‖_{H^target}`.
///
/// Witnesses: the atomic candidate `g` built from `x` at the base exponent,
/// `y ∝ |x|`, then seeded coordinate ascent. The upper bound is the Hölder
/// estimate at the base exponent.
pub fn x0_norm_estimate(x: &HaarExpansion, theta: f64, target_p: f64, cfg: &AscentConfig) -> Result<X0Estimate> {
    x0_norm_estimate_with_hints(x, theta, target_p, cfg, &[])
}

/// [`x0_norm_estimate`] with extra starting witnesses `y` (any scale).
pub fn x0_norm_estimate_with_hints(
    x: &HaarExpansion,
    theta: f64,
    target_p: f64,
    cfg: &AscentConfig,
    hints: &[HaarExpansion],
) -> Result<X0Estimate> {
    check_theta(theta)?;
    check_exponent(target_p)?;
    let inv_base = (1.0 / target_p - theta / 2.0) / (1.0 - theta);
    let base = 1.0 / inv_base;
    if inv_base.is_nan() || inv_base <= 0.0 || base > 2.0 + IDENTITY_TOL {
        return Err(Error::Domain(format!(
            "θ = {theta}, target p = {target_p} need a base exponent outside (0, 2]"
        )));
    }
    let base = base.min(2.0);
    if x.is_zero() {
        return Ok(X0Estimate {
            lower_bound: 0.0,
            upper_bound: 0.0,
            base_exponent: base,
            base_norm: 0.0,
            rescaled_lower: 0.0,
            witness: x.clone(),
            evaluations: 0,
        });
    }
    let res = x.default_resolution();
    let base_norm = hp_norm_at(x, base, res)?;
    let upper_bound = base_norm.powf(1.0 - theta);

    let rects: Vec<DyadicRectangle> = x.support().copied().collect();
    let measures: Vec<f64> = rects.iter().map(DyadicRectangle::measure).collect();
    let x_factor: Vec<f64> = x.iter().map(|(_, v)| v.abs().powf(2.0 * (1.0 - theta))).collect();
    let grid = SupportGrid::new(&rects, res)?;
    let mut scratch = vec![0.0; grid.cells()];
    let mut coeff = vec![0.0; rects.len()];
    // `w` lives on the simplex up to scale: y_IJ^2 = w_IJ / (|I||J| Σ w).
    let mut objective = |w: &[f64]| {
        let total = numeric::sum(w.iter().copied());
        if total <= 0.0 {
            return 0.0;
        }
        for k in 0..w.len() {
            coeff[k] = x_factor[k] * (w[k] / (measures[k] * total)).powf(theta);
        }
        grid.hp_norm(&coeff, target_p, &mut scratch)
    };

    let cand = g_candidate(x, &classify(x, base)?)?;
    let mut starts = vec![
        rects.iter().zip(&measures).map(|(r, m)| cand.g.get(r).powi(2) * m).collect::<Vec<_>>(),
        x.iter().zip(&measures).map(|((_, v), m)| v * v * m).collect(),
    ];
    starts.extend(
        hints
            .iter()
            .map(|y| rects.iter().zip(&measures).map(|(r, m)| y.get(r).powi(2) * m).collect()),
    );
    let dim = rects.len();
    let mut toggle = false;
    let sampler = |rng: &mut Rng| {
        toggle = !toggle;
        (0..dim)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                if toggle || rng.gen_bool(0.5) {
                    z * z
                } else {
                    0.0
                }
            })
            .collect()
    };
    let outcome = search::maximize(dim, &starts, sampler, &mut objective, cfg);

    let total = numeric::sum(outcome.best.iter().copied());
    let witness = HaarExpansion::from_coeffs(
        x.max_level(),
        rects
            .iter()
            .zip(&outcome.best)
            .zip(&measures)
            .map(|((r, w), m)| (*r, (w / (m * total)).sqrt())),
    )?;
    let lower_bound = outcome.value;
    if !le_rel(lower_bound, upper_bound, REL_TOL) {
        return Err(Error::violation("X0 lower bound ≤ ‖x‖_{H^base}^(1-θ)", lower_bound, upper_bound));
    }
    Ok(X0Estimate {
        lower_bound,
        upper_bound,
        base_exponent: base,
        base_norm,
        rescaled_lower: lower_bound.powf(1.0 / (1.0 - theta)),
        witness,
        evaluations: outcome.evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub x: HaarExpansion,
    pub y: HaarExpansion,
    pub theta: f64,
    /// `max_IJ ||x|^(1-θ)|y|^θ - |f||`.
    pub defect: f64,
    pub y_h2: f64,
    pub f_norm: f64,
    /// `None` at the endpoints `p ∈ {1, 2}`.
    pub x0: Option<X0Estimate>,
    /// `S^(1-θ) ‖y‖^θ / ‖f‖` with `S` the X0 sup estimate read verbatim.
    pub implied_c_verbatim: Option<f64>,
    /// `S ‖y‖^θ / ‖f‖`, reading `‖x‖_X0 = S^(1/(1-θ))`.
    pub implied_c_rescaled: Option<f64>,
}

fn coefficient_defect(f: &HaarExpansion, x: &HaarExpansion, y: &HaarExpansion, theta: f64) -> f64 {
    f.iter()
        .map(|(r, v)| (x.get(r).abs().powf(1.0 - theta) * y.get(r).abs().powf(theta) - v.abs()).abs())
        .fold(0.0, f64::max)
}

/// Splits `|f| = |x|^(1-θ) |y|^θ`, `θ = 2 - 2/p`, with
/// `y_IJ = (ω_IJ / |I||J|)^(1/2)` from B-normalized weights, so `‖y‖_2 = 1`.
pub fn pisier_split(f: &HaarExpansion, w: &PietschWeights, x0_cfg: &AscentConfig) -> Result<FactorPair> {
    let p = w.p();
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Domain(format!(
            "factor split needs p ∈ (1, 2), got {p}; use pisier_endpoint for p = 1 or 2"
        )));
    }
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0".into()));
    }
    if !w.is_b_normalized() {
        return Err(Error::Precondition("factor split needs B-normalized weights".into()));
    }
    let theta = 2.0 - 2.0 / p;
    let y = f.map_coeffs(|r, _| (w.weight(r) / r.measure()).sqrt());
    let x = f.map_coeffs(|r, v| (v.abs() / y.get(r).powf(theta)).powf(1.0 / (1.0 - theta)));
    let defect = coefficient_defect(f, &x, &y, theta);
    let max_f = f.max_abs_coeff();
    if defect > REL_TOL * max_f {
        return Err(Error::violation("|x|^(1-θ)|y|^θ = |f|", defect, REL_TOL * max_f));
    }
    let y_h2 = y.h2_norm_coeff();
    if (y_h2 - 1.0).abs() > REL_TOL {
        return Err(Error::violation("‖y‖_2 = 1", y_h2, 1.0));
    }
    let f_norm = hp_norm_at(f, p, w.resolution())?;
    let x0 = x0_norm_estimate_with_hints(&x, theta, p, x0_cfg, std::slice::from_ref(&y))?;
    let yt = y_h2.powf(theta);
    Ok(FactorPair {
        implied_c_verbatim: Some(x0.lower_bound.powf(1.0 - theta) * yt / f_norm),
        implied_c_rescaled: Some(x0.lower_bound * yt / f_norm),
        x0: Some(x0),
        x,
        y,
        theta,
        defect,
        y_h2,
        f_norm,
    })
}

/// The degenerate splits: at `p = 1` (`θ = 0`) `x = |f|` and `y` comes from
/// the weights; at `p = 2` (`θ = 1`) `x = y = |f|`.
pub fn pisier_endpoint(f: &HaarExpansion, w: &PietschWeights) -> Result<FactorPair> {
    let p = w.p();
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0".into()));
    }
    let (theta, y) = if p == 1.0 {
        (0.0, f.map_coeffs(|r, _| (w.weight(r) / r.measure()).sqrt()))
    } else if p == 2.0 {
        (1.0, f.abs())
    } else {
        return Err(Error::Domain(format!("p = {p} is not an endpoint")));
    };
    let x = f.abs();
    Ok(FactorPair {
        defect: coefficient_defect(f, &x, &y, theta),
        y_h2: y.h2_norm_coeff(),
        f_norm: hp_norm_at(f, p, w.resolution())?,
        x,
        y,
        theta,
        x0: None,
        implied_c_verbatim: None,
        implied_c_rescaled: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::hp_norm;
    use crate::pietsch::{pietsch_weights, Normalization};

    fn rect(a: u32, k: u64, b: u32, l: u64) -> DyadicRectangle {
        DyadicRectangle::from_parts(a, k, b, l).unwrap()
    }

    fn unit_atom(c: f64) -> HaarExpansion {
        HaarExpansion::from_coeffs(0, [(DyadicRectangle::unit(), c)]).unwrap()
    }

    fn two_coeff() -> HaarExpansion {
        HaarExpansion::from_coeffs(1, [(DyadicRectangle::unit(), 1.0), (rect(1, 0, 1, 0), 3.0)]).unwrap()
    }

    #[test]
    fn interpolation_params_identities() {
        let ip = InterpolationParams::new(1.0, 0.5).unwrap();
        assert!((ip.q - 4.0 / 3.0).abs() < 1e-15);
        assert!(ip.identity_defect() < 1e-12);
        let back = InterpolationParams::from_q(ip.p, ip.q).unwrap();
        assert!((back.theta - 0.5).abs() < 1e-12);
        assert!(InterpolationParams::new(1.0, 1.0).is_err());
        assert!(InterpolationParams::new(3.0, 0.5).is_err());
    }

    #[test]
    fn g_candidate_examples() {
        let f = two_coeff();
        let g2 = g_candidate(&f, &classify(&f, 2.0).unwrap()).unwrap();
        assert_eq!(g2.g, f.abs());

        let a = unit_atom(1.0);
        let ga = g_candidate(&a, &classify(&a, 1.0).unwrap()).unwrap();
        assert!((ga.g.get(&DyadicRectangle::unit()) - 2f64.sqrt()).abs() < 1e-15);
        assert!((ga.l2_sq - 2.0).abs() < 1e-14);

        let g1 = g_candidate(&f, &classify(&f, 1.0).unwrap()).unwrap();
        assert!((g1.g.get(&DyadicRectangle::unit()) - 2f64.sqrt()).abs() < 1e-15);
        assert!((g1.g.get(&rect(1, 0, 1, 0)) - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((g1.l2_sq - 3.125).abs() < 1e-14);
    }

    #[test]
    fn interpolation_check_examples() {
        let a = unit_atom(1.0);
        let ip = InterpolationParams::new(1.0, 0.5).unwrap();
        let rep = interpolation_check(&a, &a, &ip).unwrap();
        assert!((rep.hq_norm - 1.0).abs() < 1e-14);
        assert!(rep.upper_margin.abs() < 1e-14);

        let zero = HaarExpansion::new(0).unwrap();
        let rep = interpolation_check(&a, &zero, &ip).unwrap();
        assert_eq!(rep.hq_norm, 0.0);
        assert!(rep.implied_lower.is_none());

        let f = two_coeff();
        let cand = g_candidate(&f, &classify(&f, 1.0).unwrap()).unwrap();
        let g = cand.g.scale(1.0 / 3.125f64.sqrt());
        let rep = interpolation_check(&f, &g, &ip).unwrap();
        assert!(rep.upper_margin >= 0.0);
        let lower = rep.implied_lower.unwrap();
        assert!((lower - rep.hq_norm / rep.f_factor).abs() < 1e-12);
        assert!(lower > 0.0 && lower <= 1.0 + 1e-12);
    }

    #[test]
    fn modified_holder_examples() {
        let u = GridFunction::from_values(1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let rep = modified_holder_check(&u, &u, 2.0).unwrap();
        assert!((rep.lhs - rep.rhs).abs() < 1e-14);
        let a = GridFunction::from_values(1, vec![2.0; 4]).unwrap();
        let b = GridFunction::from_values(1, vec![5.0; 4]).unwrap();
        let rep = modified_holder_check(&a, &b, -1.5).unwrap();
        assert!((rep.lhs - rep.rhs).abs() < 1e-12 * rep.rhs);

        let mut rng = search::rng(5);
        let rand_grid = |rng: &mut Rng| {
            GridFunction::from_values(2, (0..16).map(|_| rng.gen_range(0.1..3.0)).collect()).unwrap()
        };
        let (u, v) = (rand_grid(&mut rng), rand_grid(&mut rng));
        let rep = modified_holder_check(&u, &v, 2.0).unwrap();
        assert!(rep.lhs >= rep.rhs);

        assert!(matches!(modified_holder_check(&u, &v, 0.5), Err(Error::Domain(_))));
        let with_zero = GridFunction::from_values(2, vec![0.0; 16]).unwrap();
        assert!(matches!(modified_holder_check(&u, &with_zero, 2.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn x0_estimate_examples() {
        let a = unit_atom(1.0);
        let est = x0_norm_estimate(&a, 2.0 / 3.0, 1.5, &AscentConfig::new(20, 0)).unwrap();
        assert!((est.lower_bound - 1.0).abs() < 1e-12);
        assert!((est.upper_bound - 1.0).abs() < 1e-12);
        assert!((est.base_exponent - 1.0).abs() < 1e-12);

        let zero = HaarExpansion::new(1).unwrap();
        assert_eq!(x0_norm_estimate(&zero, 0.5, 1.2, &AscentConfig::new(5, 0)).unwrap().lower_bound, 0.0);

        let f = two_coeff();
        let est = x0_norm_estimate(&f, 2.0 / 3.0, 1.5, &AscentConfig::new(300, 9)).unwrap();
        let upper = hp_norm(&f, 1.0).unwrap().powf(1.0 / 3.0);
        assert!((est.upper_bound - upper).abs() < 1e-12);
        assert!((upper - 1.1549427).abs() < 1e-6);
        assert!(est.lower_bound <= est.upper_bound + 1e-9);
        assert!((est.witness.h2_norm_coeff() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pisier_split_examples() {
        let cfg = AscentConfig::new(30, 2);
        let a = unit_atom(1.0);
        let w = pietsch_weights(&a, &classify(&a, 1.5).unwrap(), Normalization::B).unwrap();
        let pair = pisier_split(&a, &w, &cfg).unwrap();
        assert!((pair.y.get(&DyadicRectangle::unit()) - 1.0).abs() < 1e-15);
        assert!((pair.x.get(&DyadicRectangle::unit()) - 1.0).abs() < 1e-15);

        let c = unit_atom(-2.5);
        let w = pietsch_weights(&c, &classify(&c, 1.5).unwrap(), Normalization::B).unwrap();
        let pair = pisier_split(&c, &w, &cfg).unwrap();
        let theta = 2.0 - 2.0 / 1.5;
        assert!((pair.y.get(&DyadicRectangle::unit()) - 1.0).abs() < 1e-15);
        assert!((pair.x.get(&DyadicRectangle::unit()) - 2.5f64.powf(1.0 / (1.0 - theta))).abs() < 1e-12);

        let f = two_coeff();
        let w = pietsch_weights(&f, &classify(&f, 1.5).unwrap(), Normalization::B).unwrap();
        let pair = pisier_split(&f, &w, &cfg).unwrap();
        assert!(pair.defect <= 1e-12);
        assert!((pair.y_h2 - 1.0).abs() < 1e-12);
        let x0 = pair.x0.unwrap();
        assert!(x0.lower_bound <= x0.upper_bound + 1e-9);
        assert!(x0.lower_bound >= pair.f_norm * (1.0 - 1e-12));

        let w1 = pietsch_weights(&f, &classify(&f, 1.0).unwrap(), Normalization::B).unwrap();
        assert!(matches!(pisier_split(&f, &w1, &cfg), Err(Error::Domain(_))));
        let end = pisier_endpoint(&f, &w1).unwrap();
        assert!(end.defect < 1e-15);
        let w2 = pietsch_weights(&f, &classify(&f, 2.0).unwrap(), Normalization::B).unwrap();
        assert!(pisier_endpoint(&f, &w2).unwrap().defect < 1e-15);
    }
}
