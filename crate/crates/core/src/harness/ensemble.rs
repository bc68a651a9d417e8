use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, DyadicRectangle};
use crate::error::{Error, Result};
use crate::haar::HaarExpansion;
use crate::search::{rng, Rng};

/// Deepest `L` the generators accept.
pub const MAX_ENSEMBLE_LEVEL: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum EnsembleKind {
    /// One uniformly chosen rectangle with coefficient `scale`.
    SingleAtom,
    /// Every rectangle independently with probability `density`, Gaussian
    /// coefficients.
    SparseRandom { density: f64 },
    /// Every rectangle up to `L`, Gaussian coefficients.
    DenseGaussian,
    /// Nested squares `I_a x I_a`, `a = 0..=L`, along a random chain of
    /// dyadic intervals, with coefficients `± ratio^a`.
    LacunaryDiagonal { ratio: f64 },
    /// All `2^a` disjoint rectangles `I x J` with `|I| = 2^-a` and a fixed
    /// coarser `J`, Gaussian coefficients, randomly transposed.
    RectangleComb,
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::SingleAtom => "singleAtom",
            EnsembleKind::SparseRandom { .. } => "sparseRandom",
            EnsembleKind::DenseGaussian => "denseGaussian",
            EnsembleKind::LacunaryDiagonal { .. } => "lacunaryDiagonal",
            EnsembleKind::RectangleComb => "rectangleComb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub max_level: u32,
    pub count: usize,
    pub seed: u64,
    pub coefficient_scale: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, max_level: u32, count: usize, seed: u64) -> Self {
        Self {
            kind,
            max_level,
            count,
            seed,
            coefficient_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_level > MAX_ENSEMBLE_LEVEL {
            return Err(Error::Config(format!(
                "maxLevel {} exceeds {MAX_ENSEMBLE_LEVEL}",
                self.max_level
            )));
        }
        if self.count == 0 {
            return Err(Error::Config("ensemble count must be at least 1".into()));
        }
        if !(self.coefficient_scale.is_finite() && self.coefficient_scale != 0.0) {
            return Err(Error::Config("coefficientScale must be finite and nonzero".into()));
        }
        match self.kind {
            EnsembleKind::SparseRandom { density } if !(density > 0.0 && density <= 1.0) => {
                Err(Error::Config(format!("density {density} outside (0, 1]")))
            }
            EnsembleKind::LacunaryDiagonal { ratio } if !(ratio.is_finite() && ratio > 0.0) => {
                Err(Error::Config(format!("ratio {ratio} must be positive")))
            }
            EnsembleKind::RectangleComb if self.max_level == 0 => {
                Err(Error::Config("rectangleComb needs maxLevel ≥ 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Seed of fixture `index`; regenerating with it alone reproduces the
    /// fixture.
    pub fn fixture_seed(&self, index: usize) -> u64 {
        mix(self.seed, index as u64)
    }
}

/// SplitMix64 finalizer applied to `seed + (index + 1) γ`.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Every rectangle with both side levels `≤ max_level`.
pub fn all_rectangles(max_level: u32) -> Vec<DyadicRectangle> {
    let mut out = Vec::new();
    for a in 0..=max_level {
        for b in 0..=max_level {
            for k in 0..1u64 << a {
                for l in 0..1u64 << b {
                    out.push(DyadicRectangle::from_parts(a, k, b, l).expect("indices in range"));
                }
            }
        }
    }
    out
}

fn gaussian(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_interval(rng: &mut Rng, level: u32) -> DyadicInterval {
    DyadicInterval::new(level, rng.gen_range(0..1u64 << level)).expect("index in range")
}

/// Fixture `index` of the ensemble.
pub fn generate_one(spec: &EnsembleSpec, index: usize) -> Result<HaarExpansion> {
    spec.validate()?;
    let mut rng = rng(spec.fixture_seed(index));
    let l = spec.max_level;
    let scale = spec.coefficient_scale;
    loop {
        let mut f = HaarExpansion::new(l)?;
        match spec.kind {
            EnsembleKind::SingleAtom => {
                let (a, b) = (rng.gen_range(0..=l), rng.gen_range(0..=l));
                let r = DyadicRectangle::new(random_interval(&mut rng, a), random_interval(&mut rng, b));
                f.set(r, scale)?;
            }
            EnsembleKind::SparseRandom { density } => {
                for r in all_rectangles(l) {
                    if density >= 1.0 || rng.gen_bool(density) {
                        f.set(r, scale * gaussian(&mut rng))?;
                    }
                }
            }
            EnsembleKind::DenseGaussian => {
                for r in all_rectangles(l) {
                    f.set(r, scale * gaussian(&mut rng))?;
                }
            }
            EnsembleKind::LacunaryDiagonal { ratio } => {
                let mut i = DyadicInterval::unit();
                let mut j = DyadicInterval::unit();
                for a in 0..=l {
                    if a > 0 {
                        i = if rng.gen_bool(0.5) { i.left_child() } else { i.right_child() };
                        j = if rng.gen_bool(0.5) { j.left_child() } else { j.right_child() };
                    }
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    f.set(DyadicRectangle::new(i, j), sign * scale * ratio.powi(a as i32))?;
                }
            }
            EnsembleKind::RectangleComb => {
                let a = rng.gen_range(1..=l);
                let b = rng.gen_range(0..a);
                let j = random_interval(&mut rng, b);
                let transpose = rng.gen_bool(0.5);
                for k in 0..1u64 << a {
                    let i = DyadicInterval::new(a, k)?;
                    let r = if transpose {
                        DyadicRectangle::new(j, i)
                    } else {
                        DyadicRectangle::new(i, j)
                    };
                    f.set(r, scale * gaussian(&mut rng))?;
                }
            }
        }
        if !f.is_zero() {
            return Ok(f);
        }
    }
}

pub fn generate(spec: &EnsembleSpec) -> Result<Vec<HaarExpansion>> {
    spec.validate()?;
    (0..spec.count).map(|i| generate_one(spec, i)).collect()
}

/// Expansions with `1..=max_coeffs` distinct coefficients and `L ≤ 2`, for
/// comparison against the brute-force oracle.
pub fn tiny_fixtures(count: usize, max_coeffs: usize, seed: u64) -> Result<Vec<HaarExpansion>> {
    if max_coeffs == 0 || max_coeffs > super::oracle::ORACLE_MAX_SUPPORT {
        return Err(Error::Config(format!("max_coeffs {max_coeffs} outside 1..=6")));
    }
    (0..count)
        .map(|idx| {
            let mut rng = rng(mix(seed, idx as u64));
            let l = rng.gen_range(0..=2u32);
            let mut rects = all_rectangles(l);
            rects.shuffle(&mut rng);
            let k = rng.gen_range(1..=max_coeffs.min(rects.len()));
            let mut f = HaarExpansion::new(l)?;
            for r in &rects[..k] {
                let mut v = gaussian(&mut rng);
                if v == 0.0 {
                    v = 1.0;
                }
                f.set(*r, v)?;
            }
            Ok(f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::classify;

    #[test]
    fn single_atom_has_one_unit_coefficient() {
        for f in generate(&EnsembleSpec::new(EnsembleKind::SingleAtom, 3, 20, 1)).unwrap() {
            assert_eq!(f.support_len(), 1);
            assert_eq!(f.iter().next().unwrap().1, 1.0);
        }
    }

    #[test]
    fn full_density_populates_every_rectangle() {
        let spec = EnsembleSpec::new(EnsembleKind::SparseRandom { density: 1.0 }, 1, 3, 7);
        for f in generate(&spec).unwrap() {
            assert_eq!(f.support_len(), 9);
        }
        assert_eq!(all_rectangles(2).len(), 49);
    }

    #[test]
    fn bad_specs_are_config_errors() {
        for kind in [
            EnsembleKind::SparseRandom { density: 0.0 },
            EnsembleKind::SparseRandom { density: 1.5 },
            EnsembleKind::LacunaryDiagonal { ratio: -1.0 },
        ] {
            assert!(matches!(generate(&EnsembleSpec::new(kind, 2, 1, 0)), Err(Error::Config(_))));
        }
        assert!(matches!(
            generate(&EnsembleSpec::new(EnsembleKind::DenseGaussian, 9, 1, 0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            generate(&EnsembleSpec::new(EnsembleKind::DenseGaussian, 2, 0, 0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn lacunary_diagonal_spreads_over_levels() {
        let spec = EnsembleSpec::new(EnsembleKind::LacunaryDiagonal { ratio: 4.0 }, 4, 5, 3);
        for f in generate(&spec).unwrap() {
            let mut mags: Vec<f64> = f.iter().map(|(_, v)| v.abs()).collect();
            mags.sort_by(f64::total_cmp);
            assert_eq!(mags, vec![1.0, 4.0, 16.0, 64.0, 256.0]);
            let dec = classify(&f, 1.0).unwrap();
            assert!(dec.levels().len() >= 4, "{} levels", dec.levels().len());
        }
    }

    #[test]
    fn comb_rectangles_are_disjoint() {
        let spec = EnsembleSpec::new(EnsembleKind::RectangleComb, 4, 10, 5);
        for f in generate(&spec).unwrap() {
            let total: f64 = f.support().map(|r| r.measure()).sum();
            let union = crate::dyadic::union_pointset(f.support(), 5).unwrap();
            assert_eq!(union.measure(), total);
            assert!(f.support_len().is_power_of_two() && f.support_len() >= 2);
        }
    }

    #[test]
    fn generation_is_deterministic_and_every_fixture_nonzero() {
        let spec = EnsembleSpec::new(EnsembleKind::SparseRandom { density: 0.05 }, 2, 40, 99);
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        assert!(a.iter().all(|f| !f.is_zero()));
        assert_eq!(generate_one(&spec, 17).unwrap(), a[17]);
    }

    #[test]
    fn tiny_fixtures_respect_limits() {
        for f in tiny_fixtures(30, 6, 4).unwrap() {
            assert!(f.support_len() <= 6 && f.max_level() <= 2 && !f.is_zero());
        }
    }
}
