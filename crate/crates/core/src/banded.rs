//! Finite truncations of semi-infinite banded matrices.
//!
//! Storage is dense inside the band and row-major: row `r` holds columns
//! `r - lower ..= r + upper` contiguously. Slots whose column falls outside
//! `0..size` are structural zeros and are never read.

use alloc::vec;
use alloc::vec::Vec;

use crate::coefficients::{reconstruct_row, LuCoefficients};
use crate::{Error, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<S> {
    size: usize,
    lower: usize,
    upper: usize,
    data: Vec<S>,
}

impl<S: Scalar> BandedMatrix<S> {
    pub fn zeros(size: usize, lower: usize, upper: usize) -> Self {
        let width = lower + upper + 1;
        Self {
            size,
            lower,
            upper,
            data: vec![S::zero(); size * width],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, 0, 0);
        for v in &mut m.data {
            *v = S::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.lower
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.upper
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, row: usize, col: usize) -> Option<usize> {
        if row >= self.size || col >= self.size {
            return None;
        }
        if col + self.lower < row || col > row + self.upper {
            return None;
        }
        Some(row * self.width() + col + self.lower - row)
    }

    /// In-band entry, or `None` for structural zeros and out-of-range indices.
    pub fn get(&self, row: usize, col: usize) -> Option<&S> {
        self.slot(row, col).map(|i| &self.data[i])
    }

    /// Entry value with structural zeros filled in.
    pub fn entry(&self, row: usize, col: usize) -> S {
        self.get(row, col).cloned().unwrap_or_else(S::zero)
    }

    /// Writes an in-band entry. Returns `false` if `(row, col)` is outside
    /// the band or the matrix.
    pub fn set(&mut self, row: usize, col: usize, value: S) -> bool {
        match self.slot(row, col) {
            Some(i) => {
                self.data[i] = value;
                true
            }
            None => false,
        }
    }

    /// Columns of row `row` that lie inside both the band and the matrix.
    pub fn band_columns(&self, row: usize) -> core::ops::Range<usize> {
        let lo = row.saturating_sub(self.lower);
        let hi = (row + self.upper + 1).min(self.size);
        lo..hi.max(lo)
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, &S)> + '_ {
        self.band_columns(row)
            .map(move |c| (c, self.get(row, c).expect("column in band")))
    }

    pub fn row_sum(&self, row: usize) -> S {
        self.row(row).fold(S::zero(), |acc, (_, v)| acc + v.clone())
    }

    /// A row is interior when none of its band is cut off by the truncation.
    pub fn is_interior(&self, row: usize) -> bool {
        row + self.upper < self.size
    }

    /// Smallest `(lower, upper)` band containing every nonzero entry.
    pub fn effective_bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for r in 0..self.size {
            for (c, v) in self.row(r) {
                if v.is_zero() {
                    continue;
                }
                if c < r {
                    lo = lo.max(r - c);
                } else {
                    up = up.max(c - r);
                }
            }
        }
        (lo, up)
    }

    /// Banded product; bandwidths add.
    pub fn multiply(&self, other: &Self) -> Result<Self, Error> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                left: self.size,
                right: other.size,
            });
        }
        let mut out = Self::zeros(self.size, self.lower + other.lower, self.upper + other.upper);
        for i in 0..self.size {
            for j in out.band_columns(i) {
                let mut acc = S::zero();
                for (k, a) in self.row(i) {
                    if let Some(b) = other.get(k, j) {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

/// The pure-death factor `P_L` on states `0..size`.
pub fn build_lower_factor<S: Scalar>(c: &LuCoefficients<S>, size: usize) -> Result<BandedMatrix<S>, Error> {
    c.require(size)?;
    let mut m = BandedMatrix::zeros(size, 2, 0);
    for n in 0..size {
        m.set(n, n, c.s[n].clone());
        if n >= 1 {
            m.set(n, n - 1, c.r[n].clone());
        }
        if n >= 2 {
            m.set(n, n - 2, c.t[n].clone());
        }
    }
    Ok(m)
}

/// The pure-birth factor `P_U` on states `0..size`; `x_{size-1}` falls off
/// the last row.
pub fn build_upper_factor<S: Scalar>(c: &LuCoefficients<S>, size: usize) -> Result<BandedMatrix<S>, Error> {
    c.require(size)?;
    let mut m = BandedMatrix::zeros(size, 0, 1);
    for n in 0..size {
        m.set(n, n, c.y[n].clone());
        m.set(n, n + 1, c.x[n].clone());
    }
    Ok(m)
}

/// `P` on states `0..size`, assembled row by row from the reconstruction
/// formulas rather than by multiplying the factors.
pub fn build_transition_matrix<S: Scalar>(
    c: &LuCoefficients<S>,
    size: usize,
) -> Result<BandedMatrix<S>, Error> {
    c.require(size)?;
    let mut m = BandedMatrix::zeros(size, 2, 1);
    for n in 0..size {
        let row = reconstruct_row(c, n)?;
        for (col, v) in row.outcomes() {
            m.set(n, col, v.clone());
        }
    }
    Ok(m)
}

/// Outcome of checking `P = P_L · P_U` on a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct LuVerification {
    pub size: usize,
    pub rows_compared: usize,
    pub mismatches: usize,
    pub max_deviation: f64,
    /// Effective `(lower, upper)` bandwidths of the product.
    pub product_band: (usize, usize),
    pub lower_factor_band: (usize, usize),
    pub upper_factor_band: (usize, usize),
    pub max_row_sum_deviation: f64,
    pub row_sum_failures: usize,
}

impl LuVerification {
    pub fn band_ok(&self) -> bool {
        let edge = self.size.saturating_sub(1);
        self.product_band == (edge.min(2), edge.min(1))
            && self.lower_factor_band.1 == 0
            && self.lower_factor_band.0 <= 2
            && self.upper_factor_band.0 == 0
            && self.upper_factor_band.1 <= 1
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.row_sum_failures == 0 && self.band_ok()
    }
}

/// Builds `P` from the reconstruction formulas and from the product of the
/// two factors, and compares them entrywise on rows `0..size-2`.
pub fn verify_lu<S: Scalar>(c: &LuCoefficients<S>, size: usize) -> Result<LuVerification, Error> {
    let lower = build_lower_factor(c, size)?;
    let upper = build_upper_factor(c, size)?;
    let product = lower.multiply(&upper)?;
    let direct = build_transition_matrix(c, size)?;

    let rows_compared = size.saturating_sub(2);
    let mut mismatches = 0;
    let mut max_deviation = 0.0f64;
    for r in 0..rows_compared {
        for col in product.band_columns(r) {
            let (p, d) = (product.entry(r, col), direct.entry(r, col));
            max_deviation = max_deviation.max(p.distance(&d));
            if !p.agrees_with(&d) {
                mismatches += 1;
            }
        }
    }

    let mut max_row_sum_deviation = 0.0f64;
    let mut row_sum_failures = 0;
    for r in (0..size).filter(|&r| product.is_interior(r)) {
        let sum = product.row_sum(r);
        max_row_sum_deviation = max_row_sum_deviation.max(sum.distance(&S::one()));
        if !sum.agrees_with(&S::one()) {
            row_sum_failures += 1;
        }
    }

    Ok(LuVerification {
        size,
        rows_compared,
        mismatches,
        max_deviation,
        product_band: product.effective_bandwidths(),
        lower_factor_band: lower.effective_bandwidths(),
        upper_factor_band: upper.effective_bandwidths(),
        max_row_sum_deviation,
        row_sum_failures,
    })
}
