//! Exhaustive recomputation of the decomposition, the weights and the
//! domination ratios for expansions with a handful of coefficients.
//!
//! Everything here works with cell centres and plain loops; nothing is
//! shared with the bitset and square-function code of the main path.

use std::collections::BTreeMap;

use crate::atomic::classify;
use crate::dyadic::DyadicRectangle;
use crate::error::{Error, Result};
use crate::haar::{HaarExpansion, MultiplierSequence};
use crate::pietsch::{domination_check, pietsch_weights, Normalization};

pub const ORACLE_MAX_SUPPORT: usize = 6;
pub const ORACLE_MAX_LEVEL: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRecord {
    pub p: f64,
    pub grid: u32,
    pub norm: f64,
    pub levels: BTreeMap<i32, Vec<DyadicRectangle>>,
    pub b: f64,
    pub omega: BTreeMap<DyadicRectangle, f64>,
    /// Every nonzero pattern in `{-1, 0, 1}^support` (support in rectangle
    /// order) with its domination ratio.
    pub patterns: Vec<(Vec<i8>, f64)>,
}

struct Geometry {
    /// `(x0, x1, y0, y1)` of each support rectangle.
    boxes: Vec<(f64, f64, f64, f64)>,
    centres: Vec<(f64, f64)>,
    cell_area: f64,
}

impl Geometry {
    fn new(rects: &[DyadicRectangle], grid: u32) -> Self {
        let side = 1usize << grid;
        let h = 1.0 / side as f64;
        let boxes = rects
            .iter()
            .map(|r| {
                let (li, lj) = (0.5f64.powi(r.i.level() as i32), 0.5f64.powi(r.j.level() as i32));
                let (x0, y0) = (r.i.index() as f64 * li, r.j.index() as f64 * lj);
                (x0, x0 + li, y0, y0 + lj)
            })
            .collect();
        let mut centres = Vec::with_capacity(side * side);
        for x in 0..side {
            for y in 0..side {
                centres.push(((x as f64 + 0.5) * h, (y as f64 + 0.5) * h));
            }
        }
        Self {
            boxes,
            centres,
            cell_area: h * h,
        }
    }

    fn inside(&self, k: usize, c: (f64, f64)) -> bool {
        let (x0, x1, y0, y1) = self.boxes[k];
        x0 <= c.0 && c.0 < x1 && y0 <= c.1 && c.1 < y1
    }

    /// `S^2` at every cell centre for squared coefficients `sq`.
    fn square(&self, sq: &[f64]) -> Vec<f64> {
        self.centres
            .iter()
            .map(|&c| (0..sq.len()).filter(|&k| self.inside(k, c)).map(|k| sq[k]).sum())
            .collect()
    }

    fn lp(&self, s2: &[f64], p: f64) -> f64 {
        (s2.iter().map(|v| v.powf(p / 2.0)).sum::<f64>() * self.cell_area).powf(1.0 / p)
    }

    fn area(&self, k: usize) -> f64 {
        let (x0, x1, y0, y1) = self.boxes[k];
        (x1 - x0) * (y1 - y0)
    }
}

/// Recomputes everything by enumeration. Refuses supports above six
/// coefficients or depths above two.
pub fn brute_force_oracle(f: &HaarExpansion, p: f64) -> Result<OracleRecord> {
    crate::haar::check_exponent(p)?;
    if f.support_len() > ORACLE_MAX_SUPPORT || f.max_level() > ORACLE_MAX_LEVEL {
        return Err(Error::Precondition(format!(
            "oracle needs at most {ORACLE_MAX_SUPPORT} coefficients and L ≤ {ORACLE_MAX_LEVEL}"
        )));
    }
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0".into()));
    }
    let grid = f.max_level() + 1;
    let rects: Vec<DyadicRectangle> = f.support().copied().collect();
    let coeffs: Vec<f64> = f.iter().map(|(_, v)| v).collect();
    let geo = Geometry::new(&rects, grid);
    let sq: Vec<f64> = coeffs.iter().map(|v| v * v).collect();
    let s2 = geo.square(&sq);
    let norm = geo.lp(&s2, p);

    // Largest n with more than half of the rectangle's cells in {S^2 > 4^n}.
    let mut level_of = Vec::with_capacity(rects.len());
    for k in 0..rects.len() {
        let cells: Vec<f64> = geo
            .centres
            .iter()
            .zip(&s2)
            .filter(|(c, _)| geo.inside(k, **c))
            .map(|(_, &v)| v)
            .collect();
        let n = (-200..=200)
            .rev()
            .find(|&n| 2 * cells.iter().filter(|&&v| v > 4f64.powi(n)).count() > cells.len())
            .ok_or_else(|| Error::Precondition("oracle: rectangle without a level".into()))?;
        level_of.push(n);
    }
    let mut levels: BTreeMap<i32, Vec<DyadicRectangle>> = BTreeMap::new();
    for (r, n) in rects.iter().zip(&level_of) {
        levels.entry(*n).or_default().push(*r);
    }

    let mut star = BTreeMap::new();
    let mut l2 = BTreeMap::new();
    for &n in levels.keys() {
        let members: Vec<usize> = (0..rects.len()).filter(|&k| level_of[k] == n).collect();
        let covered = geo
            .centres
            .iter()
            .filter(|&&c| members.iter().any(|&k| geo.inside(k, c)))
            .count();
        star.insert(n, covered as f64 * geo.cell_area);
        l2.insert(n, members.iter().map(|&k| sq[k] * geo.area(k)).sum::<f64>().sqrt());
    }
    let b: f64 = levels.keys().map(|n| star[n].powf(1.0 - p / 2.0) * l2[n].powf(p)).sum();
    let omega: BTreeMap<DyadicRectangle, f64> = (0..rects.len())
        .map(|k| {
            let n = level_of[k];
            let w = star[&n].powf(1.0 - p / 2.0) * sq[k] * geo.area(k) / (b * l2[&n].powf(2.0 - p));
            (rects[k], w)
        })
        .collect();

    let dim = rects.len();
    let mut patterns = Vec::new();
    for code in 1..3usize.pow(dim as u32) {
        let mut c = code;
        let pattern: Vec<i8> = (0..dim)
            .map(|_| {
                let d = (c % 3) as i8 - 1;
                c /= 3;
                d
            })
            .collect();
        if pattern.iter().all(|&d| d == 0) {
            continue;
        }
        let masked: Vec<f64> = (0..dim).map(|k| if pattern[k] != 0 { sq[k] } else { 0.0 }).collect();
        let lhs = geo.lp(&geo.square(&masked), p);
        let weighted: f64 = (0..dim).filter(|&k| pattern[k] != 0).map(|k| omega[&rects[k]]).sum();
        let rhs = b.powf(1.0 / p) * weighted.sqrt();
        patterns.push((pattern, lhs / rhs));
    }

    Ok(OracleRecord {
        p,
        grid,
        norm,
        levels,
        b,
        omega,
        patterns,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAgreement {
    pub patterns: usize,
    /// Largest relative discrepancy over B, ω, norms and ratios.
    pub max_rel_diff: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Compares the main path with the oracle; a discrepancy above `tol` or a
/// different classification is a violation.
pub fn check_against_main(f: &HaarExpansion, p: f64, tol: f64) -> Result<OracleAgreement> {
    let oracle = brute_force_oracle(f, p)?;
    let dec = classify(f, p)?;
    let w = pietsch_weights(f, &dec, Normalization::B)?;

    for level in dec.levels() {
        let want = oracle.levels.get(&level.n);
        if want != Some(&level.rects) {
            return Err(Error::Violation {
                what: format!("oracle classification of level {}", level.n),
                lhs: level.rects.len() as f64,
                rhs: want.map_or(0.0, |v| v.len() as f64),
            });
        }
    }
    if oracle.levels.len() != dec.levels().len() {
        return Err(Error::violation(
            "oracle level count",
            dec.levels().len() as f64,
            oracle.levels.len() as f64,
        ));
    }

    let mut worst = 0.0f64;
    let mut compare = |what: &str, main: f64, orc: f64| -> Result<()> {
        let d = rel_diff(main, orc);
        worst = worst.max(d);
        if d > tol {
            return Err(Error::violation(format!("oracle agreement on {what}"), main, orc));
        }
        Ok(())
    };
    compare("B", dec.b(), oracle.b)?;
    compare("norm", dec.norm(), oracle.norm)?;
    for (r, om) in &oracle.omega {
        compare("omega", w.weight(r), *om)?;
    }
    let rects: Vec<DyadicRectangle> = f.support().copied().collect();
    for (pattern, ratio) in &oracle.patterns {
        let phi = MultiplierSequence::from_entries(rects.iter().zip(pattern).map(|(r, &d)| (*r, d as f64)));
        let rep = domination_check(f, &w, &phi)?;
        compare("domination ratio", rep.ratio, *ratio)?;
    }
    Ok(OracleAgreement {
        patterns: oracle.patterns.len(),
        max_rel_diff: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_coeff() -> HaarExpansion {
        HaarExpansion::from_coeffs(
            1,
            [
                (DyadicRectangle::unit(), 1.0),
                (DyadicRectangle::from_parts(1, 0, 1, 0).unwrap(), 3.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_coefficient_fixture() {
        let f = two_coeff();
        let o = brute_force_oracle(&f, 1.0).unwrap();
        assert!((o.b - 1.75).abs() < 1e-12);
        let om: Vec<f64> = o.omega.values().copied().collect();
        assert!((om[0] - 4.0 / 7.0).abs() < 1e-12 && (om[1] - 3.0 / 7.0).abs() < 1e-12);
        assert_eq!(o.levels.keys().copied().collect::<Vec<_>>(), vec![-1, 1]);
        assert!((o.norm - (0.75 + 10f64.sqrt() / 4.0)).abs() < 1e-12);
        let ones = o.patterns.iter().find(|(pat, _)| pat == &vec![1, 1]).unwrap();
        assert!((ones.1 - o.norm / 1.75).abs() < 1e-12);
        check_against_main(&f, 1.0, 1e-9).unwrap();
    }

    #[test]
    fn single_atom_and_p_two_ratios_are_one() {
        let a = HaarExpansion::from_coeffs(2, [(DyadicRectangle::from_parts(2, 1, 0, 0).unwrap(), -0.7)]).unwrap();
        for (_, r) in brute_force_oracle(&a, 0.5).unwrap().patterns {
            assert!((r - 1.0).abs() < 1e-12);
        }
        for (_, r) in brute_force_oracle(&two_coeff(), 2.0).unwrap().patterns {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_large_supports() {
        let f = HaarExpansion::from_coeffs(
            2,
            super::super::ensemble::all_rectangles(2).into_iter().take(7).map(|r| (r, 1.0)),
        )
        .unwrap();
        assert!(matches!(brute_force_oracle(&f, 1.0), Err(Error::Precondition(_))));
    }
}
