//! Finite anisotropic Haar expansions and their square functions.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::dyadic::{DyadicRectangle, GridFunction, MAX_RESOLUTION};
use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};

/// Checks `p ∈ (0, 2]`.
pub fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent p = {p} outside (0, 2]")))
    }
}

/// `f = Σ f_IJ h_{I x J}` over finitely many dyadic rectangles whose sides
/// have level at most `max_level`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarExpansion {
    max_level: u32,
    coeffs: BTreeMap<DyadicRectangle, f64>,
}

impl HaarExpansion {
    pub fn new(max_level: u32) -> Result<Self> {
        if max_level >= MAX_RESOLUTION {
            return Err(Error::Resolution(format!(
                "max level {max_level} needs a grid finer than 2^{MAX_RESOLUTION}"
            )));
        }
        Ok(Self {
            max_level,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn from_coeffs<I>(max_level: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (DyadicRectangle, f64)>,
    {
        let mut f = Self::new(max_level)?;
        for (r, v) in coeffs {
            f.add(r, v)?;
        }
        Ok(f)
    }

    /// Sets the coefficient of `r`, removing it when `value == 0`.
    pub fn set(&mut self, r: DyadicRectangle, value: f64) -> Result<()> {
        self.check_rect(&r)?;
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite coefficient on {r}")));
        }
        if value == 0.0 {
            self.coeffs.remove(&r);
        } else {
            self.coeffs.insert(r, value);
        }
        Ok(())
    }

    /// Adds `value` to the coefficient of `r`.
    pub fn add(&mut self, r: DyadicRectangle, value: f64) -> Result<()> {
        let current = self.get(&r);
        self.set(r, current + value)
    }

    fn check_rect(&self, r: &DyadicRectangle) -> Result<()> {
        if r.max_level() > self.max_level {
            return Err(Error::Resolution(format!(
                "rectangle {r} exceeds max level {}",
                self.max_level
            )));
        }
        Ok(())
    }

    pub fn get(&self, r: &DyadicRectangle) -> f64 {
        self.coeffs.get(r).copied().unwrap_or(0.0)
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Grid exponent on which every `h_{I x J}` is constant: `L + 1`.
    pub fn default_resolution(&self) -> u32 {
        self.max_level + 1
    }

    /// Nonzero coefficients in rectangle order.
    pub fn iter(&self) -> impl Iterator<Item = (&DyadicRectangle, f64)> + '_ {
        self.coeffs.iter().map(|(r, &v)| (r, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &DyadicRectangle> + '_ {
        self.coeffs.keys()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lattice modulus: coefficients `|f_IJ|`.
    pub fn abs(&self) -> Self {
        self.map_coeffs(|_, v| v.abs())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_coeffs(|_, v| c * v)
    }

    /// Applies `op` to every stored coefficient, dropping results equal to 0.
    pub fn map_coeffs(&self, op: impl Fn(&DyadicRectangle, f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(r, &v)| (*r, op(r, v)))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        Self {
            max_level: self.max_level,
            coeffs,
        }
    }

    /// Restriction to the rectangles accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(&DyadicRectangle) -> bool) -> Self {
        Self {
            max_level: self.max_level,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(r, _)| keep(r))
                .map(|(r, v)| (*r, *v))
                .collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_abs_coeff(&self) -> Option<f64> {
        self.coeffs.values().map(|v| v.abs()).reduce(f64::min)
    }

    /// `‖f‖_2 = (Σ f_IJ^2 |I||J|)^(1/2)`, from the coefficients.
    pub fn h2_norm_coeff(&self) -> f64 {
        numeric::sum(self.coeffs.iter().map(|(r, v)| v * v * r.measure())).sqrt()
    }
}

/// `φ = (φ_IJ)` in `l^inf(R)`. Rectangles without an explicit entry take
/// the value `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSequence {
    default: f64,
    entries: BTreeMap<DyadicRectangle, f64>,
}

impl MultiplierSequence {
    /// `φ ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self {
            default: c,
            entries: BTreeMap::new(),
        }
    }

    /// Explicit entries, zero elsewhere.
    pub fn from_entries<I: IntoIterator<Item = (DyadicRectangle, f64)>>(entries: I) -> Self {
        Self {
            default: 0.0,
            entries: entries.into_iter().collect(),
        }
    }

    pub fn value(&self, r: &DyadicRectangle) -> f64 {
        self.entries.get(r).copied().unwrap_or(self.default)
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries
            .values()
            .fold(self.default.abs(), |m, v| m.max(v.abs()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&DyadicRectangle, f64)> + '_ {
        self.entries.iter().map(|(r, &v)| (r, v))
    }

    /// Entrywise modulus.
    pub fn abs(&self) -> Self {
        Self {
            default: self.default.abs(),
            entries: self.entries.iter().map(|(r, v)| (*r, v.abs())).collect(),
        }
    }
}

/// `M_f(φ) = Σ φ_IJ f_IJ h_{I x J}`.
pub fn multiplier_apply(f: &HaarExpansion, phi: &MultiplierSequence) -> HaarExpansion {
    f.map_coeffs(|r, v| phi.value(r) * v)
}

/// `Σ |x_IJ|^(1-θ) |y_IJ|^θ h_{I x J}`; zero wherever either factor is zero.
pub fn lattice_interpolant(x: &HaarExpansion, y: &HaarExpansion, theta: f64) -> Result<HaarExpansion> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("θ = {theta} outside (0, 1)")));
    }
    let mut out = HaarExpansion::new(x.max_level().max(y.max_level()))?;
    for (r, xv) in x.iter() {
        let yv = y.get(r);
        if yv != 0.0 {
            out.set(*r, xv.abs().powf(1.0 - theta) * yv.abs().powf(theta))?;
        }
    }
    Ok(out)
}

/// Pointwise values of `f` on the `2^g` grid.
pub fn evaluate(f: &HaarExpansion, g: u32) -> Result<GridFunction> {
    if g < f.max_level() + 1 {
        return Err(Error::Resolution(format!(
            "evaluation needs grid exponent ≥ {}, got {g}",
            f.max_level() + 1
        )));
    }
    let mut out = GridFunction::zeros(g)?;
    let side = out.side();
    let values = out.values_mut();
    for (r, v) in f.iter() {
        let (xs, ys) = r.cell_ranges(g)?;
        let xmid = xs.start + xs.len() / 2;
        let ymid = ys.start + ys.len() / 2;
        for x in xs {
            let sx = if x < xmid { v } else { -v };
            let row = &mut values[x * side..(x + 1) * side];
            for y in ys.clone() {
                row[y] += if y < ymid { sx } else { -sx };
            }
        }
    }
    Ok(out)
}

/// `S(f)^2 = Σ f_IJ^2 1_{I x J}` on the `2^g` grid.
pub fn square_function_sq(f: &HaarExpansion, g: u32) -> Result<GridFunction> {
    let grid = SupportGrid::new(f.support(), g)?;
    let coeff_sq: Vec<f64> = f.iter().map(|(_, v)| v * v).collect();
    let mut out = GridFunction::zeros(g)?;
    grid.fill_square_sq(&coeff_sq, out.values_mut());
    Ok(out)
}

/// `S(f)` on the `2^g` grid.
pub fn square_function(f: &HaarExpansion, g: u32) -> Result<GridFunction> {
    Ok(square_function_sq(f, g)?.map(f64::sqrt))
}

/// `‖f‖_{H^p} = (∫ S(f)^p)^(1/p)` at the default resolution.
pub fn hp_norm(f: &HaarExpansion, p: f64) -> Result<f64> {
    hp_norm_at(f, p, f.default_resolution())
}

pub fn hp_norm_at(f: &HaarExpansion, p: f64, g: u32) -> Result<f64> {
    check_exponent(p)?;
    Ok(integral_of_sq_power(&square_function_sq(f, g)?, p).powf(1.0 / p))
}

/// `∫ (S^2)^(p/2)` for a grid holding `S^2`.
pub fn integral_of_sq_power(square_sq: &GridFunction, p: f64) -> f64 {
    numeric::sum(square_sq.values().iter().map(|&s| numeric::pow_half(s, p))) * square_sq.cell_measure()
}

/// The cell footprint of a fixed list of rectangles. Lets the searches
/// re-evaluate `∫ S^p` for many coefficient vectors on one support without
/// rebuilding the geometry.
#[derive(Debug, Clone)]
pub struct SupportGrid {
    resolution: u32,
    rects: Vec<(Range<usize>, Range<usize>)>,
}

impl SupportGrid {
    pub fn new<'a, I>(rects: I, g: u32) -> Result<Self>
    where
        I: IntoIterator<Item = &'a DyadicRectangle>,
    {
        if g > MAX_RESOLUTION {
            return Err(Error::Resolution(format!("grid exponent {g} too large")));
        }
        let rects = rects
            .into_iter()
            .map(|r| r.cell_ranges(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { resolution: g, rects })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn cells(&self) -> usize {
        1 << (2 * self.resolution)
    }

    /// Writes `Σ_k coeff_sq[k] 1_{R_k}` into `out`.
    pub fn fill_square_sq(&self, coeff_sq: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeff_sq.len(), self.rects.len());
        debug_assert_eq!(out.len(), self.cells());
        out.fill(0.0);
        let side = 1 << self.resolution;
        for ((xs, ys), &c) in self.rects.iter().zip(coeff_sq) {
            if c == 0.0 {
                continue;
            }
            for x in xs.clone() {
                for v in &mut out[x * side + ys.start..x * side + ys.end] {
                    *v += c;
                }
            }
        }
    }

    /// `∫ S^p` for the expansion with squared coefficients `coeff_sq`.
    /// `scratch` must hold `cells()` values.
    pub fn integral_pow(&self, coeff_sq: &[f64], p: f64, scratch: &mut [f64]) -> f64 {
        self.fill_square_sq(coeff_sq, scratch);
        let acc: CompensatedSum = scratch.iter().map(|&s| numeric::pow_half(s, p)).collect();
        acc.value() * 2f64.powi(-2 * self.resolution as i32)
    }

    /// `‖·‖_{H^p}` for squared coefficients `coeff_sq`.
    pub fn hp_norm(&self, coeff_sq: &[f64], p: f64, scratch: &mut [f64]) -> f64 {
        self.integral_pow(coeff_sq, p, scratch).powf(1.0 / p)
    }
}
