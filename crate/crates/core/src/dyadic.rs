//! Dyadic intervals, rectangles and exact cell-count measures.
//!
//! Everything lives on a uniform grid of `2^G x 2^G` cells of side `2^-G`.
//! A cell is addressed by `(x, y)` where `x` indexes the first coordinate
//! `s` and `y` the second coordinate `t`. Set measures are cell counts, so
//! comparisons such as `|I x J ∩ F| > |I x J| / 2` are integer comparisons.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Largest supported grid exponent.
pub const MAX_RESOLUTION: u32 = 12;

/// `[k 2^-n, (k+1) 2^-n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    level: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > 62 {
            return Err(Error::Domain(format!("dyadic level {level} exceeds 62")));
        }
        if index >= 1u64 << level {
            return Err(Error::Domain(format!(
                "dyadic index {index} out of range for level {level}"
            )));
        }
        Ok(Self { level, index })
    }

    /// `[0, 1)`.
    pub const fn unit() -> Self {
        Self { level: 0, index: 0 }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// `|I| = 2^-n`, exact.
    pub fn measure(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    pub fn left_child(&self) -> Self {
        Self {
            level: self.level + 1,
            index: 2 * self.index,
        }
    }

    pub fn right_child(&self) -> Self {
        Self {
            level: self.level + 1,
            index: 2 * self.index + 1,
        }
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && other.index >> (other.level - self.level) == self.index
    }

    /// Cells of a `2^g` grid along one axis covered by this interval.
    pub fn cell_range(&self, g: u32) -> Result<Range<usize>> {
        if self.level > g {
            return Err(Error::Resolution(format!(
                "interval level {} exceeds grid exponent {g}",
                self.level
            )));
        }
        let width = 1usize << (g - self.level);
        let start = self.index as usize * width;
        Ok(start..start + width)
    }

    /// Left endpoint as an exact binary fraction.
    pub fn start(&self) -> f64 {
        self.index as f64 * self.measure()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/2^{}, {}/2^{})", self.index, self.level, self.index + 1, self.level)
    }
}

/// `I x J` with `I` along `s` and `J` along `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicRectangle {
    pub i: DyadicInterval,
    pub j: DyadicInterval,
}

impl DyadicRectangle {
    pub fn new(i: DyadicInterval, j: DyadicInterval) -> Self {
        Self { i, j }
    }

    pub fn from_parts(i_level: u32, i_index: u64, j_level: u32, j_index: u64) -> Result<Self> {
        Ok(Self {
            i: DyadicInterval::new(i_level, i_index)?,
            j: DyadicInterval::new(j_level, j_index)?,
        })
    }

    pub const fn unit() -> Self {
        Self {
            i: DyadicInterval::unit(),
            j: DyadicInterval::unit(),
        }
    }

    /// `|I||J|`, exact.
    pub fn measure(&self) -> f64 {
        2f64.powi(-((self.i.level + self.j.level) as i32))
    }

    pub fn max_level(&self) -> u32 {
        self.i.level.max(self.j.level)
    }

    pub fn contains(&self, other: &DyadicRectangle) -> bool {
        self.i.contains(&other.i) && self.j.contains(&other.j)
    }

    /// Cell ranges along `s` and `t`.
    pub fn cell_ranges(&self, g: u32) -> Result<(Range<usize>, Range<usize>)> {
        Ok((self.i.cell_range(g)?, self.j.cell_range(g)?))
    }
}

impl fmt::Display for DyadicRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.i, self.j)
    }
}

fn check_resolution(g: u32) -> Result<()> {
    if g > MAX_RESOLUTION {
        return Err(Error::Resolution(format!(
            "grid exponent {g} exceeds the supported maximum {MAX_RESOLUTION}"
        )));
    }
    Ok(())
}

/// Number of grid cells in `r` at resolution `g`: `2^(2g - n_I - n_J)`.
pub fn rect_measure(r: &DyadicRectangle, g: u32) -> Result<u64> {
    check_resolution(g)?;
    if r.max_level() > g {
        return Err(Error::Resolution(format!(
            "rectangle {r} is finer than grid exponent {g}"
        )));
    }
    Ok(1u64 << (2 * g - r.i.level - r.j.level))
}

/// Number of cells of `s` inside `r`.
pub fn intersect_count(r: &DyadicRectangle, s: &CellSet) -> Result<u64> {
    s.count_in_rect(r)
}

/// `C^*`: the cells covered by a collection of rectangles.
pub fn union_pointset<'a, I>(rects: I, g: u32) -> Result<CellSet>
where
    I: IntoIterator<Item = &'a DyadicRectangle>,
{
    let mut set = CellSet::empty(g)?;
    for r in rects {
        set.insert_rect(r)?;
    }
    Ok(set)
}

/// `2 * count > area`, the strict majority test used throughout.
#[inline]
pub fn is_majority(count: u64, area: u64) -> bool {
    2 * count > area
}

/// A set of grid cells, bitset-backed with 64-cell words. Bit `x * 2^g + y`
/// stands for cell `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    resolution: u32,
    words: Vec<u64>,
    count: u64,
}

impl CellSet {
    pub fn empty(g: u32) -> Result<Self> {
        check_resolution(g)?;
        let bits = 1usize << (2 * g);
        Ok(Self {
            resolution: g,
            words: vec![0; bits.div_ceil(64)],
            count: 0,
        })
    }

    pub fn full(g: u32) -> Result<Self> {
        let mut set = Self::empty(g)?;
        set.set_range(0, set.total_cells() as usize);
        set.count = set.total_cells();
        Ok(set)
    }

    pub fn from_rect(r: &DyadicRectangle, g: u32) -> Result<Self> {
        let mut set = Self::empty(g)?;
        set.insert_rect(r)?;
        Ok(set)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn side(&self) -> usize {
        1 << self.resolution
    }

    pub fn total_cells(&self) -> u64 {
        1u64 << (2 * self.resolution)
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// `count * 4^-G`, exact.
    pub fn measure(&self) -> f64 {
        self.count as f64 * 2f64.powi(-2 * self.resolution as i32)
    }

    #[inline]
    fn bit(&self, x: usize, y: usize) -> usize {
        x * self.side() + y
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        let b = self.bit(x, y);
        self.words[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        let b = self.bit(x, y);
        let w = &mut self.words[b / 64];
        let mask = 1u64 << (b % 64);
        if *w & mask == 0 {
            *w |= mask;
            self.count += 1;
        }
    }

    pub fn insert_rect(&mut self, r: &DyadicRectangle) -> Result<()> {
        let (xs, ys) = r.cell_ranges(self.resolution)?;
        for x in xs {
            let base = x * self.side();
            self.set_range(base + ys.start, base + ys.end);
        }
        self.recount();
        Ok(())
    }

    pub fn union_with(&mut self, other: &CellSet) -> Result<()> {
        self.same_grid(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        self.recount();
        Ok(())
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet> {
        self.same_grid(other)?;
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        let count = words.iter().map(|w| w.count_ones() as u64).sum();
        Ok(CellSet {
            resolution: self.resolution,
            words,
            count,
        })
    }

    pub fn is_subset(&self, other: &CellSet) -> Result<bool> {
        self.same_grid(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    /// Exact number of cells of `self` inside `r`.
    pub fn count_in_rect(&self, r: &DyadicRectangle) -> Result<u64> {
        let (xs, ys) = r.cell_ranges(self.resolution)?;
        let side = self.side();
        Ok(xs
            .map(|x| self.count_range(x * side + ys.start, x * side + ys.end))
            .sum())
    }

    /// Iterator over the `(x, y)` cells in the set, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let side = self.side();
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                let b = wi * 64 + tz;
                Some((b / side, b % side))
            })
        })
    }

    fn same_grid(&self, other: &CellSet) -> Result<()> {
        if self.resolution != other.resolution {
            return Err(Error::Resolution(format!(
                "cell sets at grid exponents {} and {}",
                self.resolution, other.resolution
            )));
        }
        Ok(())
    }

    fn recount(&mut self) {
        self.count = self.words.iter().map(|w| w.count_ones() as u64).sum();
    }

    fn set_range(&mut self, lo: usize, hi: usize) {
        for_each_word_mask(lo, hi, |wi, mask| self.words[wi] |= mask);
    }

    fn count_range(&self, lo: usize, hi: usize) -> u64 {
        let mut total = 0;
        for_each_word_mask(lo, hi, |wi, mask| total += (self.words[wi] & mask).count_ones() as u64);
        total
    }
}

/// Calls `f(word, mask)` for every word touched by the bit range `[lo, hi)`.
fn for_each_word_mask(lo: usize, hi: usize, mut f: impl FnMut(usize, u64)) {
    let mut b = lo;
    while b < hi {
        let wi = b / 64;
        let off = b % 64;
        let len = (64 - off).min(hi - b);
        let mask = if len == 64 { u64::MAX } else { ((1u64 << len) - 1) << off };
        f(wi, mask);
        b += len;
    }
}

/// A real function that is constant on each cell of a `2^G x 2^G` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    resolution: u32,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(g: u32) -> Result<Self> {
        check_resolution(g)?;
        Ok(Self {
            resolution: g,
            values: vec![0.0; 1 << (2 * g)],
        })
    }

    pub fn from_values(g: u32, values: Vec<f64>) -> Result<Self> {
        check_resolution(g)?;
        if values.len() != 1 << (2 * g) {
            return Err(Error::Resolution(format!(
                "{} values do not fill a grid of exponent {g}",
                values.len()
            )));
        }
        Ok(Self { resolution: g, values })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn side(&self) -> usize {
        1 << self.resolution
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.side() + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        let side = self.side();
        self.values[x * side + y] = v;
    }

    /// Row-major values, `x` major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn cell_measure(&self) -> f64 {
        2f64.powi(-2 * self.resolution as i32)
    }

    /// `∫_{[0,1]^2}` of the function.
    pub fn integral(&self) -> f64 {
        numeric::sum(self.values.iter().copied()) * self.cell_measure()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `{value > c}`.
    pub fn super_level_set(&self, c: f64) -> CellSet {
        let mut set = CellSet::empty(self.resolution).expect("resolution already checked");
        let side = self.side();
        for (k, &v) in self.values.iter().enumerate() {
            if v > c {
                set.insert(k / side, k % side);
            }
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(a: u32, k: u64, b: u32, l: u64) -> DyadicRectangle {
        DyadicRectangle::from_parts(a, k, b, l).unwrap()
    }

    #[test]
    fn interval_invariants() {
        assert!(DyadicInterval::new(2, 4).is_err());
        let i = DyadicInterval::new(3, 5).unwrap();
        assert_eq!(i.measure(), 0.125);
        assert_eq!(i.parent(), Some(DyadicInterval::new(2, 2).unwrap()));
        assert!(i.parent().unwrap().contains(&i));
        assert!(!i.contains(&i.parent().unwrap()));
        assert_eq!(i.cell_range(4).unwrap(), 10..12);
        assert!(i.cell_range(2).is_err());
    }

    #[test]
    fn rect_measure_examples() {
        assert_eq!(rect_measure(&DyadicRectangle::unit(), 3).unwrap(), 64);
        assert_eq!(rect_measure(&rect(1, 0, 2, 0), 3).unwrap(), 8);
        assert_eq!(rect_measure(&rect(2, 2, 0, 0), 2).unwrap(), 4);
        assert!(matches!(
            rect_measure(&rect(3, 0, 0, 0), 2),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn intersect_count_examples() {
        let left_half = CellSet::from_rect(&rect(1, 0, 0, 0), 3).unwrap();
        assert_eq!(intersect_count(&DyadicRectangle::unit(), &left_half).unwrap(), 32);

        let quarter = CellSet::from_rect(&rect(1, 0, 1, 0), 2).unwrap();
        assert_eq!(intersect_count(&rect(1, 0, 1, 0), &quarter).unwrap(), 4);
        let full = intersect_count(&DyadicRectangle::unit(), &quarter).unwrap();
        assert_eq!(full, 4);
        assert!(!is_majority(full, 16));

        let coarse = CellSet::empty(1).unwrap();
        assert!(intersect_count(&rect(2, 0, 0, 0), &coarse).is_err());
    }

    #[test]
    fn union_pointset_examples() {
        let full = union_pointset(&[DyadicRectangle::unit()], 2).unwrap();
        assert_eq!(full.count(), 16);
        let cross = union_pointset(&[rect(1, 0, 0, 0), rect(0, 0, 1, 0)], 1).unwrap();
        assert_eq!(cross.count(), 3);
        assert_eq!(cross.measure(), 0.75);
        let none = union_pointset(&[], 3).unwrap();
        assert_eq!(none.count(), 0);
    }

    #[test]
    fn small_grid_word_packing() {
        // At g = 2 a row is 4 bits, several rows share a word.
        let mut s = CellSet::empty(2).unwrap();
        s.insert_rect(&rect(2, 1, 1, 1)).unwrap();
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(1, 2), (1, 3)]);
        assert_eq!(s.count_in_rect(&rect(1, 0, 1, 1)).unwrap(), 2);
        assert_eq!(s.count_in_rect(&rect(1, 0, 1, 0)).unwrap(), 0);
    }

    #[test]
    fn grid_function_integral_and_level_sets() {
        let mut g = GridFunction::zeros(1).unwrap();
        g.set(0, 0, 4.0);
        g.set(1, 1, 1.0);
        assert_eq!(g.integral(), 1.25);
        let s = g.super_level_set(1.0);
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(0, 0)]);
        assert_eq!(s.resolution(), 1);
    }
}
