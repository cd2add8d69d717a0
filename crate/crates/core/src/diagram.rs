//! Interval records and their Hölder-metric diagram coordinates.
//!
//! Every interval of the one-dimensional search space is drawn as a point
//! `(h, F)` where `F` is the objective value at the interval midpoint and
//! `h = ((b - a) / 2)^(1/N)`. For a Hölder constant estimate `H` the
//! characteristic `F - H*h` is the lower bound the Hölder minorant gives over
//! the interval, so the intervals worth subdividing are the ones whose
//! characteristic is smallest for some `H`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest trisection level whose interval endpoints and midpoints are still
/// pairwise distinct as doubles. `3^32` fits the 53-bit mantissa with room
/// for the factor two in the midpoint denominator.
pub const MAX_DEPTH: u32 = 32;

/// `3^depth` as an exact integer.
pub fn pow3(depth: u32) -> u64 {
    3u64.pow(depth)
}

/// Nominal length `3^-depth`, rounded once.
pub fn length_at_depth(depth: u32) -> f64 {
    1.0 / pow3(depth) as f64
}

/// `((len) / 2)^(1/N)`.
pub fn h_from_length(length: f64, dim: usize) -> f64 {
    let half = 0.5 * length;
    match dim {
        1 => half,
        2 => half.sqrt(),
        n => (half.ln() / n as f64).exp(),
    }
}

/// A subinterval `[k * 3^-depth, (k+1) * 3^-depth]` of `[0, 1]` produced by
/// repeated trisection, together with the objective value at its midpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub id: u64,
    /// Left endpoint numerator, `a = left / 3^depth`.
    pub left: u64,
    pub depth: u32,
    pub f_mid: f64,
}

impl IntervalRecord {
    pub fn new(id: u64, left: u64, depth: u32, f_mid: f64) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "interval depth {depth} exceeds {MAX_DEPTH}"
            )));
        }
        if left >= pow3(depth) {
            return Err(Error::InvalidArgument(format!(
                "interval numerator {left} out of range at depth {depth}"
            )));
        }
        Ok(Self {
            id,
            left,
            depth,
            f_mid,
        })
    }

    pub fn a(&self) -> f64 {
        self.left as f64 / pow3(self.depth) as f64
    }

    pub fn b(&self) -> f64 {
        (self.left + 1) as f64 / pow3(self.depth) as f64
    }

    /// Midpoint `(2k + 1) / (2 * 3^depth)`, rounded once.
    pub fn midpoint(&self) -> f64 {
        midpoint_of(self.left, self.depth)
    }

    pub fn length(&self) -> f64 {
        length_at_depth(self.depth)
    }
}

pub(crate) fn midpoint_of(left: u64, depth: u32) -> f64 {
    (2 * left + 1) as f64 / (2 * pow3(depth)) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub interval_id: u64,
    pub h: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

impl DiagramPoint {
    pub fn new(interval_id: u64, h: f64, f: f64) -> Self {
        Self { interval_id, h, f }
    }

    pub fn from_interval(iv: &IntervalRecord, dim: usize) -> Self {
        Self::new(iv.id, h_coordinate(iv, dim), iv.f_mid)
    }
}

pub fn h_coordinate(iv: &IntervalRecord, dim: usize) -> f64 {
    h_from_length(iv.length(), dim)
}

/// `F - H*h`.
pub fn characteristic(p: &DiagramPoint, holder_estimate: f64) -> f64 {
    p.f - holder_estimate * p.h
}

/// Hölder constant `2L*sqrt(N+3)` of the reduced function `F(p(x))` for an
/// `N`-dimensional objective with Lipschitz constant `L` on the unit cube.
pub fn holder_constant_from_lipschitz(lipschitz: f64, dim: usize) -> Result<f64> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(2.0 * lipschitz * ((dim + 3) as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub id: u64,
    pub a: f64,
    pub b: f64,
    pub f_mid: f64,
    pub h: f64,
}

/// Writes `id,a,b,f_mid,h` rows for the given intervals.
pub fn write_diagram_csv<'a, W, I>(out: W, intervals: I, dim: usize) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a IntervalRecord>,
{
    let mut wtr = csv::Writer::from_writer(out);
    for iv in intervals {
        wtr.serialize(DiagramRow {
            id: iv.id,
            a: iv.a(),
            b: iv.b(),
            f_mid: iv.f_mid,
            h: h_coordinate(iv, dim),
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
