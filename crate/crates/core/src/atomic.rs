//! Atomic decomposition of `f ∈ H^p(δ^2)`.
//!
//! With `F_n = {S(f) > 2^n}`, a support rectangle `I x J` belongs to `R_n`
//! when it meets `F_n` in more than half of its measure but `F_{n+1}` in at
//! most half. The atom `f_n` is the part of `f` carried by `R_n`.

use std::collections::BTreeMap;

use crate::dyadic::{is_majority, rect_measure, union_pointset, CellSet, DyadicRectangle, GridFunction};
use crate::error::{Error, Result};
use crate::haar::{check_exponent, integral_of_sq_power, square_function_sq, HaarExpansion};
use crate::numeric::{self, four_pow, le_rel, REL_TOL};

/// One nonempty level `n` of the decomposition.
#[derive(Debug, Clone)]
pub struct AtomLevel {
    pub n: i32,
    /// `R_n`, in rectangle order.
    pub rects: Vec<DyadicRectangle>,
    /// `f_n`.
    pub atom: HaarExpansion,
    /// `R_n^*`.
    pub star: CellSet,
    /// `F_n`.
    pub level_set: CellSet,
    /// `‖f_n‖_2` from the coefficients.
    pub l2: f64,
    /// `‖f_n‖_{H^p}`.
    pub hp: f64,
}

impl AtomLevel {
    pub fn star_count(&self) -> u64 {
        self.star.count()
    }

    /// `|R_n^*|^(1-p/2) ‖f_n‖_2^p`.
    pub fn b_term(&self, p: f64) -> f64 {
        self.star.measure().powf(1.0 - p / 2.0) * self.l2.powf(p)
    }
}

#[derive(Debug, Clone)]
pub struct AtomicDecomposition {
    p: f64,
    resolution: u32,
    levels: Vec<AtomLevel>,
    b: f64,
    norm: f64,
    square_sq: GridFunction,
    tie_cells: usize,
}

impl AtomicDecomposition {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Nonempty levels in increasing `n`.
    pub fn levels(&self) -> &[AtomLevel] {
        &self.levels
    }

    /// `B = Σ_n |R_n^*|^(1-p/2) ‖f_n‖_2^p`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `‖f‖_{H^p}` of the decomposed function.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `B / ‖f‖^p`, one sample of the constant `A_p`.
    pub fn ap_sample(&self) -> f64 {
        self.b / self.norm.powf(self.p)
    }

    /// `S(f)^2` on the decomposition grid.
    pub fn square_sq(&self) -> &GridFunction {
        &self.square_sq
    }

    /// Cells where `S^2` lies within `1e-12` (relative) of some threshold
    /// `4^n` of the scan window.
    pub fn tie_cells(&self) -> usize {
        self.tie_cells
    }

    pub fn level_of(&self, r: &DyadicRectangle) -> Option<i32> {
        self.levels
            .iter()
            .find(|l| l.rects.binary_search(r).is_ok())
            .map(|l| l.n)
    }

    /// `F_m` for any `m`, recomputed from the stored square function.
    pub fn level_set(&self, m: i32) -> CellSet {
        level_set_from_sq(&self.square_sq, m)
    }
}

/// `F_n = {S(f) > 2^n}` on the `2^g` grid.
pub fn level_set(f: &HaarExpansion, n: i32, g: u32) -> Result<CellSet> {
    check_grid(f, g)?;
    Ok(level_set_from_sq(&square_function_sq(f, g)?, n))
}

/// `{S^2 > 4^n}` for a grid holding `S^2`.
pub fn level_set_from_sq(square_sq: &GridFunction, n: i32) -> CellSet {
    square_sq.super_level_set(four_pow(n))
}

fn check_grid(f: &HaarExpansion, g: u32) -> Result<()> {
    if g < f.max_level() {
        return Err(Error::Resolution(format!(
            "grid exponent {g} below max level {}",
            f.max_level()
        )));
    }
    Ok(())
}

/// Window of levels `[floor(log2 min|f_IJ|) - 2, ceil(log2 max S) + 1]`.
fn scan_window(f: &HaarExpansion, square_sq: &GridFunction) -> (i32, i32) {
    let min_coeff = f.min_abs_coeff().expect("nonzero expansion");
    let lo = min_coeff.log2().floor() as i32 - 2;
    let hi = (0.5 * square_sq.max().log2()).ceil() as i32 + 1;
    (lo, hi)
}

/// Atomic decomposition at the default grid `G = L + 1`.
pub fn classify(f: &HaarExpansion, p: f64) -> Result<AtomicDecomposition> {
    classify_at(f, p, f.default_resolution())
}

pub fn classify_at(f: &HaarExpansion, p: f64, g: u32) -> Result<AtomicDecomposition> {
    check_exponent(p)?;
    check_grid(f, g)?;
    if f.is_zero() {
        return Err(Error::Degenerate("f = 0 has no atomic decomposition".into()));
    }
    let square_sq = square_function_sq(f, g)?;
    let (lo, hi) = scan_window(f, &square_sq);

    // F_lo ⊇ ... ⊇ F_{hi+1}
    let sets: Vec<CellSet> = (lo..=hi + 1).map(|m| level_set_from_sq(&square_sq, m)).collect();
    let set_of = |m: i32| &sets[(m - lo) as usize];

    let mut by_level: BTreeMap<i32, Vec<DyadicRectangle>> = BTreeMap::new();
    for r in f.support() {
        let area = rect_measure(r, g)?;
        let mut found = None;
        for m in (lo..=hi).rev() {
            if is_majority(set_of(m).count_in_rect(r)?, area) {
                found = Some(m);
                break;
            }
        }
        let n = found.ok_or_else(|| {
            Error::Precondition(format!("rectangle {r} not classified in window [{lo}, {hi}]"))
        })?;
        debug_assert!(!is_majority(set_of(n + 1).count_in_rect(r)?, area));
        by_level.entry(n).or_default().push(*r);
    }

    let mut levels = Vec::with_capacity(by_level.len());
    for (n, rects) in by_level {
        let atom = f.restrict(|r| rects.binary_search(r).is_ok());
        let star = union_pointset(&rects, g)?;
        let l2 = atom.h2_norm_coeff();
        let hp = integral_of_sq_power(&square_function_sq(&atom, g)?, p).powf(1.0 / p);
        levels.push(AtomLevel {
            n,
            rects,
            atom,
            star,
            level_set: set_of(n).clone(),
            l2,
            hp,
        });
    }

    let b = numeric::sum(levels.iter().map(|l| l.b_term(p)));
    let norm = integral_of_sq_power(&square_sq, p).powf(1.0 / p);
    let tie_cells = square_sq
        .values()
        .iter()
        .filter(|&&s| (lo..=hi + 1).any(|m| (s - four_pow(m)).abs() < 1e-12 * four_pow(m)))
        .count();

    Ok(AtomicDecomposition {
        p,
        resolution: g,
        levels,
        b,
        norm,
        square_sq,
        tie_cells,
    })
}

/// The three computable members of the chain
/// `‖f‖^p ≤ Σ ‖f_n‖_{H^p}^p ≤ Σ |R_n^*|^(1-p/2) ‖f_n‖_2^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicChainReport {
    pub norm_pow: f64,
    pub atom_sum: f64,
    pub b: f64,
    /// `B / ‖f‖^p`.
    pub ap_sample: f64,
}

/// Checks the two constant-free inequalities of the chain.
pub fn verify_atomic_chain(dec: &AtomicDecomposition, f: &HaarExpansion) -> Result<AtomicChainReport> {
    let p = dec.p;
    let norm_pow = integral_of_sq_power(&square_function_sq(f, dec.resolution)?, p);
    let atom_sum = numeric::sum(dec.levels.iter().map(|l| l.hp.powf(p)));
    if !le_rel(norm_pow, atom_sum, REL_TOL) {
        return Err(Error::violation("‖f‖^p ≤ Σ‖f_n‖^p", norm_pow, atom_sum));
    }
    if !le_rel(atom_sum, dec.b, REL_TOL) {
        return Err(Error::violation("Σ‖f_n‖^p ≤ B", atom_sum, dec.b));
    }
    Ok(AtomicChainReport {
        norm_pow,
        atom_sum,
        b: dec.b,
        ap_sample: dec.b / norm_pow,
    })
}

/// Counts of `s` in every dyadic rectangle, indexed `[a][b][x * 2^b + y]`
/// for side levels `a`, `b`.
fn dyadic_counts(s: &CellSet) -> Vec<Vec<Vec<u64>>> {
    let g = s.resolution() as usize;
    let mut counts = vec![vec![Vec::new(); g + 1]; g + 1];
    let mut finest = vec![0u64; 1 << (2 * g)];
    for (x, y) in s.cells() {
        finest[(x << g) + y] = 1;
    }
    counts[g][g] = finest;
    for a in (0..=g).rev() {
        if a < g {
            let above = &counts[a + 1][g];
            let mut level = vec![0u64; 1 << (a + g)];
            for x in 0..1usize << a {
                for y in 0..1usize << g {
                    level[(x << g) + y] = above[((2 * x) << g) + y] + above[((2 * x + 1) << g) + y];
                }
            }
            counts[a][g] = level;
        }
        for b in (0..g).rev() {
            let finer = &counts[a][b + 1];
            let mut level = vec![0u64; 1 << (a + b)];
            for x in 0..1usize << a {
                for y in 0..1usize << b {
                    level[(x << b) + y] = finer[(x << (b + 1)) + 2 * y] + finer[(x << (b + 1)) + 2 * y + 1];
                }
            }
            counts[a][b] = level;
        }
    }
    counts
}

/// Dyadic strong maximal function of `1_s`: at each cell, the largest
/// fraction `|R ∩ s| / |R|` over dyadic rectangles `R` containing the cell.
/// Values are exact binary fractions.
pub fn strong_maximal(s: &CellSet) -> GridFunction {
    let g = s.resolution() as usize;
    let counts = dyadic_counts(s);
    let mut out = GridFunction::zeros(s.resolution()).expect("resolution already checked");
    for x in 0..1usize << g {
        for y in 0..1usize << g {
            let mut best = 0.0f64;
            for (a, row) in counts.iter().enumerate() {
                for (b, level) in row.iter().enumerate() {
                    let c = level[((x >> (g - a)) << b) + (y >> (g - b))];
                    let frac = c as f64 * 2f64.powi(-((2 * g - a - b) as i32));
                    best = best.max(frac);
                }
            }
            out.set(x, y, best);
        }
    }
    out
}

/// `{M_S(1_s) > 1/2}` decided in integers.
pub fn maximal_majority_set(s: &CellSet) -> CellSet {
    let g = s.resolution() as usize;
    let counts = dyadic_counts(s);
    let mut out = CellSet::empty(s.resolution()).expect("resolution already checked");
    for x in 0..1usize << g {
        for y in 0..1usize << g {
            let hit = counts.iter().enumerate().any(|(a, row)| {
                row.iter().enumerate().any(|(b, level)| {
                    let c = level[((x >> (g - a)) << b) + (y >> (g - b))];
                    is_majority(c, 1u64 << (2 * g - a - b))
                })
            });
            if hit {
                out.insert(x, y);
            }
        }
    }
    out
}

/// Per-level members of
/// `‖f_n‖_2^2 ≤ 2 ∫ S^2(f_n) 1_{F_{n+1}^c} ≤ 2 · 4^(n+1) |R_n^*| ≤ 8 · 4^n |{M_S 1_{F_n} > 1/2}|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2AtomReport {
    pub n: i32,
    pub l2_sq: f64,
    /// `∫ S^2(f_n) 1_{F_{n+1}^c}`.
    pub outside: f64,
    /// `4^(n+1) |R_n^*|`.
    pub star_bound: f64,
    /// `8 · 4^n |{M_S(1_{F_n}) > 1/2}|`.
    pub maximal_bound: f64,
    pub inclusion_holds: bool,
}

/// Checks every link of the chain above on every level, with the explicit
/// constants 2, `4^(n+1)` and 8. The inclusion `R_n^* ⊆ {M_S(1_{F_n}) > 1/2}`
/// is decided exactly.
pub fn verify_l2_atom_bound(dec: &AtomicDecomposition) -> Result<Vec<L2AtomReport>> {
    let g = dec.resolution;
    let mut out = Vec::with_capacity(dec.levels.len());
    for level in &dec.levels {
        let n = level.n;
        let next = dec.level_set(n + 1);
        let atom_sq = square_function_sq(&level.atom, g)?;
        let side = atom_sq.side();
        let outside = numeric::sum(
            atom_sq
                .values()
                .iter()
                .enumerate()
                .filter(|(k, _)| !next.contains(k / side, k % side))
                .map(|(_, &v)| v),
        ) * atom_sq.cell_measure();
        let l2_sq = level.l2 * level.l2;
        let star_bound = four_pow(n + 1) * level.star.measure();
        let maximal = maximal_majority_set(&level.level_set);
        let inclusion_holds = level.star.is_subset(&maximal)?;
        let maximal_bound = 8.0 * four_pow(n) * maximal.measure();

        let tag = |what: &str| format!("{what} at level n = {n}");
        if !le_rel(l2_sq, 2.0 * outside, REL_TOL) {
            return Err(Error::violation(tag("‖f_n‖² ≤ 2∫S²(f_n)1_{F_{n+1}^c}"), l2_sq, 2.0 * outside));
        }
        if !le_rel(outside, star_bound, REL_TOL) {
            return Err(Error::violation(tag("∫S²(f_n)1_{F_{n+1}^c} ≤ 4^(n+1)|R_n^*|"), outside, star_bound));
        }
        if !inclusion_holds {
            return Err(Error::violation(
                tag("R_n^* ⊆ {M_S(1_F_n) > 1/2}"),
                level.star.measure(),
                maximal.measure(),
            ));
        }
        if !le_rel(l2_sq, maximal_bound, REL_TOL) {
            return Err(Error::violation(tag("‖f_n‖² ≤ 8·4^n|{M_S > 1/2}|"), l2_sq, maximal_bound));
        }
        out.push(L2AtomReport {
            n,
            l2_sq,
            outside,
            star_bound,
            maximal_bound,
            inclusion_holds,
        });
    }
    Ok(out)
}

/// Both sides of `‖f‖_{H^p} ≤ C ‖(Σ |f_IJ|^2 1_{E_IJ})^(1/2)‖_{L^p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsCheckReport {
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when `f = 0`.
    pub implied_constant: Option<f64>,
    pub degenerate: bool,
}

/// Evaluates the Fefferman–Stein type estimate for sets `E_IJ ⊆ I x J` with
/// `|E_IJ| / |I x J| > ε`, given for every support rectangle of `f`.
pub fn fefferman_stein_check(
    f: &HaarExpansion,
    p: f64,
    family: &BTreeMap<DyadicRectangle, CellSet>,
    epsilon: f64,
) -> Result<FsCheckReport> {
    check_exponent(p)?;
    if f.is_zero() {
        return Ok(FsCheckReport {
            epsilon,
            lhs: 0.0,
            rhs: 0.0,
            implied_constant: None,
            degenerate: true,
        });
    }
    let g = family
        .values()
        .next()
        .map(CellSet::resolution)
        .unwrap_or_else(|| f.default_resolution());
    let mut restricted_sq = GridFunction::zeros(g)?;
    let side = restricted_sq.side();
    for (r, v) in f.iter() {
        let e = family
            .get(r)
            .ok_or_else(|| Error::Precondition(format!("no set E given for {r}")))?;
        let own = CellSet::from_rect(r, e.resolution())?;
        if !e.is_subset(&own)? {
            return Err(Error::Precondition(format!("E is not contained in {r}")));
        }
        let area = rect_measure(r, e.resolution())?;
        if e.count() as f64 <= epsilon * area as f64 {
            return Err(Error::Precondition(format!(
                "|E|/|{r}| = {}/{area} is not above ε = {epsilon}",
                e.count()
            )));
        }
        if e.resolution() != g {
            return Err(Error::Resolution("sets E at different grid exponents".into()));
        }
        let values = restricted_sq.values_mut();
        for (x, y) in e.cells() {
            values[x * side + y] += v * v;
        }
    }
    let lhs = integral_of_sq_power(&square_function_sq(f, g)?, p).powf(1.0 / p);
    let rhs = integral_of_sq_power(&restricted_sq, p).powf(1.0 / p);
    if rhs.is_nan() || rhs <= 0.0 {
        return Err(Error::violation("‖(Σ f² 1_E)^(1/2)‖_p > 0", rhs, 0.0));
    }
    let implied = lhs / rhs;
    if implied < 1.0 - REL_TOL {
        return Err(Error::violation("implied constant ≥ 1", implied, 1.0));
    }
    Ok(FsCheckReport {
        epsilon,
        lhs,
        rhs,
        implied_constant: Some(implied),
        degenerate: false,
    })
}

/// `E_IJ = I x J ∩ F_n` for `I x J ∈ R_n`.
pub fn atomic_sets(dec: &AtomicDecomposition) -> Result<BTreeMap<DyadicRectangle, CellSet>> {
    let mut family = BTreeMap::new();
    for level in &dec.levels {
        for r in &level.rects {
            let own = CellSet::from_rect(r, dec.resolution)?;
            family.insert(*r, own.intersection(&level.level_set)?);
        }
    }
    Ok(family)
}
