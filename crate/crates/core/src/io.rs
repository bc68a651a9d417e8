//! JSON forms of expansions, decompositions, weights and factor pairs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atomic::AtomicDecomposition;
use crate::dyadic::DyadicRectangle;
use crate::error::{Error, Result};
use crate::factorize::FactorPair;
use crate::haar::HaarExpansion;
use crate::pietsch::{Normalization, PietschWeights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RectJson {
    pub i_level: u32,
    pub i_index: u64,
    pub j_level: u32,
    pub j_index: u64,
}

impl From<&DyadicRectangle> for RectJson {
    fn from(r: &DyadicRectangle) -> Self {
        Self {
            i_level: r.i.level(),
            i_index: r.i.index(),
            j_level: r.j.level(),
            j_index: r.j.index(),
        }
    }
}

impl TryFrom<RectJson> for DyadicRectangle {
    type Error = Error;

    fn try_from(r: RectJson) -> Result<Self> {
        DyadicRectangle::from_parts(r.i_level, r.i_index, r.j_level, r.j_index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    #[serde(flatten)]
    pub rect: RectJson,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpansionJson {
    pub max_level: u32,
    pub coeffs: Vec<CoeffJson>,
}

impl From<&HaarExpansion> for ExpansionJson {
    fn from(f: &HaarExpansion) -> Self {
        Self {
            max_level: f.max_level(),
            coeffs: f.iter().map(|(r, value)| CoeffJson { rect: r.into(), value }).collect(),
        }
    }
}

impl TryFrom<ExpansionJson> for HaarExpansion {
    type Error = Error;

    /// Repeated rectangles are summed.
    fn try_from(e: ExpansionJson) -> Result<Self> {
        let coeffs = e
            .coeffs
            .into_iter()
            .map(|c| Ok((DyadicRectangle::try_from(c.rect)?, c.value)))
            .collect::<Result<Vec<_>>>()?;
        HaarExpansion::from_coeffs(e.max_level, coeffs)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(ExpansionJson),
    Many(Vec<ExpansionJson>),
}

pub fn expansion_to_json(f: &HaarExpansion) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ExpansionJson::from(f))?)
}

/// Parses a single expansion object or an array of them.
pub fn expansions_from_json(s: &str) -> Result<Vec<HaarExpansion>> {
    let parsed: OneOrMany = serde_json::from_str(s)?;
    let list = match parsed {
        OneOrMany::One(e) => vec![e],
        OneOrMany::Many(v) => v,
    };
    list.into_iter().map(HaarExpansion::try_from).collect()
}

pub fn expansion_from_json(s: &str) -> Result<HaarExpansion> {
    let mut list = expansions_from_json(s)?;
    if list.len() != 1 {
        return Err(Error::Config(format!("expected one expansion, found {}", list.len())));
    }
    Ok(list.remove(0))
}

pub fn expansions_to_json(fs: &[HaarExpansion]) -> Result<String> {
    let list: Vec<ExpansionJson> = fs.iter().map(ExpansionJson::from).collect();
    Ok(serde_json::to_string_pretty(&list)?)
}

pub fn read_expansions(path: &Path) -> Result<Vec<HaarExpansion>> {
    expansions_from_json(&fs::read_to_string(path)?)
}

/// `numerator / 2^denominatorLog2` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DyadicFraction {
    pub numerator: u64,
    pub denominator: u64,
    pub denominator_log2: u32,
}

impl DyadicFraction {
    /// `count` cells out of `4^g`.
    pub fn from_cells(count: u64, g: u32) -> Self {
        let mut num = count;
        let mut log2 = 2 * g;
        while log2 > 0 && num.is_multiple_of(2) && num > 0 {
            num /= 2;
            log2 -= 1;
        }
        if num == 0 {
            log2 = 0;
        }
        Self {
            numerator: num,
            denominator: 1 << log2,
            denominator_log2: log2,
        }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelJson {
    pub n: i32,
    pub rects: Vec<RectJson>,
    pub star_measure: DyadicFraction,
    pub l2: f64,
    pub hp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionJson {
    pub p: f64,
    pub grid: u32,
    pub norm: f64,
    pub levels: Vec<LevelJson>,
    pub b: f64,
    pub ap_sample: f64,
    pub tie_cells: usize,
}

impl From<&AtomicDecomposition> for DecompositionJson {
    fn from(d: &AtomicDecomposition) -> Self {
        Self {
            p: d.p(),
            grid: d.resolution(),
            norm: d.norm(),
            levels: d
                .levels()
                .iter()
                .map(|l| LevelJson {
                    n: l.n,
                    rects: l.rects.iter().map(RectJson::from).collect(),
                    star_measure: DyadicFraction::from_cells(l.star_count(), d.resolution()),
                    l2: l.l2,
                    hp: l.hp,
                })
                .collect(),
            b: d.b(),
            ap_sample: d.ap_sample(),
            tie_cells: d.tie_cells(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightJson {
    #[serde(flatten)]
    pub rect: RectJson,
    pub n: i32,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WeightsJson {
    pub p: f64,
    pub normalization: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap: Option<f64>,
    pub b: f64,
    pub norm: f64,
    pub domination_constant: f64,
    pub sum: f64,
    pub over_budget: bool,
    pub weights: Vec<WeightJson>,
}

impl From<&PietschWeights> for WeightsJson {
    fn from(w: &PietschWeights) -> Self {
        let (normalization, ap) = match w.normalization() {
            Normalization::B => ("B".to_string(), None),
            Normalization::Ap(a) => ("Ap".to_string(), Some(a)),
        };
        Self {
            p: w.p(),
            normalization,
            ap,
            b: w.b(),
            norm: w.norm(),
            domination_constant: w.domination_constant(),
            sum: w.sum(),
            over_budget: w.over_budget(),
            weights: w
                .iter()
                .map(|(r, omega)| WeightJson {
                    rect: r.into(),
                    n: w.level_of(r).unwrap_or_default(),
                    omega,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct X0Json {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rescaled_lower: f64,
    pub base_exponent: f64,
    pub base_norm: f64,
    pub evaluations: usize,
    pub witness: ExpansionJson,
}

impl From<&crate::factorize::X0Estimate> for X0Json {
    fn from(e: &crate::factorize::X0Estimate) -> Self {
        Self {
            lower_bound: e.lower_bound,
            upper_bound: e.upper_bound,
            rescaled_lower: e.rescaled_lower,
            base_exponent: e.base_exponent,
            base_norm: e.base_norm,
            evaluations: e.evaluations,
            witness: (&e.witness).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorPairJson {
    pub theta: f64,
    pub defect: f64,
    pub y_h2: f64,
    pub f_norm: f64,
    pub x: ExpansionJson,
    pub y: ExpansionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<X0Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_c_verbatim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_c_rescaled: Option<f64>,
}

impl From<&FactorPair> for FactorPairJson {
    fn from(f: &FactorPair) -> Self {
        Self {
            theta: f.theta,
            defect: f.defect,
            y_h2: f.y_h2,
            f_norm: f.f_norm,
            x: (&f.x).into(),
            y: (&f.y).into(),
            x0: f.x0.as_ref().map(X0Json::from),
            implied_c_verbatim: f.implied_c_verbatim,
            implied_c_rescaled: f.implied_c_rescaled,
        }
    }
}

pub fn decomposition_to_json(d: &AtomicDecomposition) -> Result<String> {
    Ok(serde_json::to_string_pretty(&DecompositionJson::from(d))?)
}

pub fn weights_to_json(w: &PietschWeights) -> Result<String> {
    Ok(serde_json::to_string_pretty(&WeightsJson::from(w))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_round_trip_is_lossless() {
        let f = HaarExpansion::from_coeffs(
            2,
            [
                (DyadicRectangle::unit(), 0.1 + 0.2),
                (DyadicRectangle::from_parts(2, 3, 1, 0).unwrap(), -1.0 / 3.0),
                (DyadicRectangle::from_parts(0, 0, 2, 1).unwrap(), 1e-300),
            ],
        )
        .unwrap();
        let s = expansion_to_json(&f).unwrap();
        assert_eq!(expansion_from_json(&s).unwrap(), f);
        let many = expansions_to_json(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(expansions_from_json(&many).unwrap(), vec![f.clone(), f]);
    }

    #[test]
    fn schema_field_names() {
        let s = r#"{"maxLevel": 1, "coeffs": [{"iLevel": 1, "iIndex": 0, "jLevel": 1, "jIndex": 0, "value": 3.0}]}"#;
        let f = expansion_from_json(s).unwrap();
        assert_eq!(f.get(&DyadicRectangle::from_parts(1, 0, 1, 0).unwrap()), 3.0);
        let bad = r#"{"maxLevel": 0, "coeffs": [{"iLevel": 1, "iIndex": 0, "jLevel": 0, "jIndex": 0, "value": 1.0}]}"#;
        assert!(expansion_from_json(bad).is_err());
    }

    #[test]
    fn dyadic_fraction_is_reduced() {
        assert_eq!(
            DyadicFraction::from_cells(4, 2),
            DyadicFraction {
                numerator: 1,
                denominator: 4,
                denominator_log2: 2
            }
        );
        assert_eq!(DyadicFraction::from_cells(16, 2).value(), 1.0);
        assert_eq!(DyadicFraction::from_cells(0, 3).denominator, 1);
        assert_eq!(DyadicFraction::from_cells(3, 1).value(), 0.75);
    }
}
