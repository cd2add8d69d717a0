//! Level-M approximations of the N-dimensional Hilbert curve over a box.
//!
//! `[0, 1]` is cut into `2^(N*M)` half-open cells (the last one closed). Cell
//! `i` maps to the center of one subcube of side `2^-M` of the unit box, then
//! affinely onto `[box_lo, box_hi]`. Consecutive cells map to face-adjacent
//! subcubes and cell 0 sits in the corner at `box_lo`.
//!
//! Index to coordinate conversion uses Skilling's transposed-index form
//! ("Programming the Hilbert curve", AIP Conf. Proc. 707, 2004): the index
//! bits are dealt round-robin onto the N axes, Gray-decoded and then untwisted
//! level by level. It costs `O(N*M)` integer operations per evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of bits available for the cell index. Matches the mantissa
/// width of an IEEE double, so every cell boundary `i * 2^-(N*M)` is exact.
pub const DEFAULT_INDEX_BITS: u32 = 52;

/// Hard ceiling for [`CurveMap::with_index_bits`]; the index is a `u64`.
pub const MAX_INDEX_BITS: u32 = 63;

/// Slack accepted on either side of `[0, 1]` before `map` reports a domain
/// error. Arguments inside the slack are clamped.
pub const DEFAULT_DOMAIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMap {
    dim: usize,
    level: u32,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
    tolerance: f64,
}

impl CurveMap {
    /// Curve over the unit box `[0, 1]^dim`.
    pub fn unit(dim: usize, level: u32) -> Result<Self> {
        Self::new(dim, level, vec![0.0; dim], vec![1.0; dim])
    }

    pub fn new(dim: usize, level: u32, box_lo: Vec<f64>, box_hi: Vec<f64>) -> Result<Self> {
        Self::with_index_bits(dim, level, box_lo, box_hi, DEFAULT_INDEX_BITS)
    }

    /// Like [`CurveMap::new`] but with an explicit bound `G` on `N*M`.
    pub fn with_index_bits(
        dim: usize,
        level: u32,
        box_lo: Vec<f64>,
        box_hi: Vec<f64>,
        index_bits: u32,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCurve("dimension must be at least 1".into()));
        }
        if level == 0 {
            return Err(Error::InvalidCurve("level must be at least 1".into()));
        }
        if box_lo.len() != dim || box_hi.len() != dim {
            return Err(Error::InvalidCurve(format!(
                "box corners must have {dim} coordinates (got {} and {})",
                box_lo.len(),
                box_hi.len()
            )));
        }
        if let Some(j) = (0..dim)
            .find(|&j| !(box_lo[j].is_finite() && box_hi[j].is_finite() && box_lo[j] < box_hi[j]))
        {
            return Err(Error::InvalidCurve(format!(
                "box side {j} is empty or non-finite: [{}, {}]",
                box_lo[j], box_hi[j]
            )));
        }
        let available = index_bits.min(MAX_INDEX_BITS);
        let needed = (dim as u64).saturating_mul(level as u64);
        if needed > available as u64 {
            return Err(Error::IndexOverflow {
                needed: needed.min(u32::MAX as u64) as u32,
                available,
            });
        }
        Ok(Self {
            dim,
            level,
            box_lo,
            box_hi,
            tolerance: DEFAULT_DOMAIN_TOLERANCE,
        })
    }

    /// Overrides the out-of-range slack used by `map` and `cell_index`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance.max(0.0);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn box_lo(&self) -> &[f64] {
        &self.box_lo
    }

    pub fn box_hi(&self) -> &[f64] {
        &self.box_hi
    }

    /// Total number of index bits, `N*M`.
    pub fn index_bits(&self) -> u32 {
        self.dim as u32 * self.level
    }

    /// Number of cells, `2^(N*M)`.
    pub fn cell_count(&self) -> u64 {
        1u64 << self.index_bits()
    }

    /// Euclidean diagonal of one curve cell in box coordinates.
    pub fn cell_diagonal(&self) -> f64 {
        let scale = (-(self.level as f64)).exp2();
        self.box_lo
            .iter()
            .zip(&self.box_hi)
            .map(|(lo, hi)| ((hi - lo) * scale).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Longest side of the box.
    pub fn max_side(&self) -> f64 {
        self.box_lo
            .iter()
            .zip(&self.box_hi)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    pub fn cell_index(&self, x: f64) -> Result<u64> {
        let x = self.check_unit(x)?;
        let cells = self.cell_count();
        // exact: scaling by a power of two
        let scaled = x * cells as f64;
        Ok((scaled.floor() as u64).min(cells - 1))
    }

    pub fn map(&self, x: f64) -> Result<Vec<f64>> {
        let i = self.cell_index(x)?;
        Ok(self.center_of(i))
    }

    pub fn cell_center(&self, index: u64) -> Result<Vec<f64>> {
        let cells = self.cell_count();
        if index >= cells {
            return Err(Error::CellOutOfRange { index, cells });
        }
        Ok(self.center_of(index))
    }

    /// Integer grid coordinates (each in `0..2^M`) of the subcube holding
    /// cell `index`.
    pub fn cell_coords(&self, index: u64) -> Result<Vec<u64>> {
        let cells = self.cell_count();
        if index >= cells {
            return Err(Error::CellOutOfRange { index, cells });
        }
        Ok(hilbert_axes(index, self.dim, self.level))
    }

    fn center_of(&self, index: u64) -> Vec<f64> {
        let side = (-(self.level as f64)).exp2();
        hilbert_axes(index, self.dim, self.level)
            .into_iter()
            .enumerate()
            .map(|(j, c)| {
                let u = (c as f64 + 0.5) * side;
                self.box_lo[j] + u * (self.box_hi[j] - self.box_lo[j])
            })
            .collect()
    }

    fn check_unit(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < -self.tolerance || x > 1.0 + self.tolerance {
            return Err(Error::OutOfUnitInterval(x));
        }
        Ok(x.clamp(0.0, 1.0))
    }
}

/// Converts a Hilbert index into integer axis coordinates.
fn hilbert_axes(index: u64, dim: usize, level: u32) -> Vec<u64> {
    let mut x = vec![0u64; dim];
    // Deal index bits MSB-first onto the axes: bit b*N + j (from the top)
    // becomes bit (M-1-b) of axis j.
    let total = dim as u32 * level;
    for b in 0..level {
        for (j, xj) in x.iter_mut().enumerate() {
            let pos = total - 1 - (b * dim as u32 + j as u32);
            let bit = (index >> pos) & 1;
            *xj |= bit << (level - 1 - b);
        }
    }
    transpose_to_axes(&mut x, level);
    x
}

fn transpose_to_axes(x: &mut [u64], level: u32) {
    let n = x.len();
    let top = 2u64 << (level - 1);
    // Gray decode
    let t = x[n - 1] >> 1;
    for i in (1..n).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;
    // Undo excess work
    let mut q = 2u64;
    while q != top {
        let p = q - 1;
        for i in (0..n).rev() {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q <<= 1;
    }
}
