//! Nondominated points of an `(h, F)` diagram.
//!
//! A point is nondominated when some positive constant estimate `H` makes its
//! characteristic `F - H*h` strictly the smallest. These are exactly the
//! vertices of the lower-right convex hull running from the lowest point (the
//! widest one among equal lows) to the widest point (the lowest one among
//! equal widths). Each vertex wins on the open range of `H` between the slopes
//! of its two hull edges.
//!
//! Tie rules:
//! - points with identical `h` form a group and only the group minimum
//!   (lowest `F`, then smallest id) can be selected;
//! - collinear points strictly inside a hull edge are dropped, only the chain
//!   vertices are kept.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagram::DiagramPoint;
use crate::error::{Error, Result};

/// Relative slack under which two hull slopes are treated as equal.
const SLOPE_TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullVertex {
    pub point: DiagramPoint,
    /// Lower end of the open range of `H` on which the vertex is the unique
    /// minimizer of `F - H*h` (0 for the lowest vertex).
    pub h_lo: f64,
    /// Upper end of that range (`+inf` for the widest vertex).
    pub h_hi: f64,
}

impl HullVertex {
    pub fn id(&self) -> u64 {
        self.point.interval_id
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HullSelection {
    /// Vertices sorted by increasing `h`.
    pub vertices: Vec<HullVertex>,
}

impl HullSelection {
    pub fn ids(&self) -> Vec<u64> {
        self.vertices.iter().map(HullVertex::id).collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn by_f_then_id(a: &DiagramPoint, b: &DiagramPoint) -> Ordering {
    a.f.total_cmp(&b.f).then(a.interval_id.cmp(&b.interval_id))
}

/// Group minima sorted by increasing `h`.
fn group_minima(points: &[DiagramPoint]) -> Vec<DiagramPoint> {
    let mut sorted: Vec<DiagramPoint> = points.to_vec();
    sorted.sort_by(|a, b| a.h.total_cmp(&b.h).then_with(|| by_f_then_id(a, b)));
    sorted.dedup_by(|later, first| later.h.to_bits() == first.h.to_bits());
    sorted
}

/// Lower-right convex hull by gift wrapping, starting from the lowest point.
pub fn nondominated(points: &[DiagramPoint]) -> Result<HullSelection> {
    if points.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    for p in points {
        if !(p.h > 0.0) || !p.h.is_finite() {
            return Err(Error::NonPositiveH {
                id: p.interval_id,
                h: p.h,
            });
        }
        if !p.f.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "diagram point {} has non-finite F = {}",
                p.interval_id, p.f
            )));
        }
    }
    let reps = group_minima(points);

    // lowest F; among equal F the widest wins for every H > 0
    let mut current = 0;
    for (i, p) in reps.iter().enumerate() {
        if p.f < reps[current].f || (p.f == reps[current].f && p.h > reps[current].h) {
            current = i;
        }
    }

    let mut vertices = Vec::new();
    let mut h_lo = 0.0;
    loop {
        let base = reps[current];
        // next vertex: smallest slope to any wider point, farthest on ties
        let mut next: Option<(usize, f64)> = None;
        for (j, p) in reps.iter().enumerate().skip(current + 1) {
            let slope = (p.f - base.f) / (p.h - base.h);
            next = match next {
                None => Some((j, slope)),
                Some((_, best)) if slope_le(slope, best) => Some((j, slope)),
                keep => keep,
            };
        }
        match next {
            Some((j, slope)) => {
                vertices.push(HullVertex {
                    point: base,
                    h_lo,
                    h_hi: slope,
                });
                h_lo = slope;
                current = j;
            }
            None => {
                vertices.push(HullVertex {
                    point: base,
                    h_lo,
                    h_hi: f64::INFINITY,
                });
                break;
            }
        }
    }
    Ok(HullSelection { vertices })
}

/// `a <= b` up to the slope tie tolerance. Candidates are scanned by
/// increasing `h`, so accepting ties moves to the farther point.
fn slope_le(a: f64, b: f64) -> bool {
    a <= b || (a - b).abs() <= SLOPE_TIE_RTOL * a.abs().max(b.abs())
}

/// Does the vertex promise an improvement of at least `xi` over `f_min` for
/// some `H` in its range? The characteristic decreases in `H`, so checking at
/// `h_hi` is exact.
pub fn passes_improvement(v: &HullVertex, f_min: f64, xi: f64) -> bool {
    if v.h_hi.is_infinite() {
        return v.point.h > 0.0;
    }
    v.point.f - v.h_hi * v.point.h <= f_min - xi
}

/// Keeps the vertices that satisfy [`passes_improvement`].
pub fn filter_improving(sel: &HullSelection, f_min: f64, xi: f64) -> HullSelection {
    HullSelection {
        vertices: sel
            .vertices
            .iter()
            .copied()
            .filter(|v| passes_improvement(v, f_min, xi))
            .collect(),
    }
}

/// One row of a selection-round debug dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub iter: u64,
    pub id: u64,
    pub h: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "H_lo")]
    pub h_lo: f64,
    #[serde(rename = "H_hi")]
    pub h_hi: f64,
    pub passed_xi: bool,
}

pub fn selection_rows(iter: u64, sel: &HullSelection, f_min: f64, xi: f64) -> Vec<SelectionRow> {
    sel.vertices
        .iter()
        .map(|v| SelectionRow {
            iter,
            id: v.id(),
            h: v.point.h,
            f: v.point.f,
            h_lo: v.h_lo,
            h_hi: v.h_hi,
            passed_xi: passes_improvement(v, f_min, xi),
        })
        .collect()
}

/// Writes `iter,id,h,F,H_lo,H_hi,passed_xi`.
pub fn write_selection_csv<W: Write>(out: W, rows: &[SelectionRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(id: u64, h: f64, f: f64) -> DiagramPoint {
        DiagramPoint::new(id, h, f)
    }

    #[test]
    fn single_point() {
        let sel = nondominated(&[pt(7, 0.2, 3.0)]).unwrap();
        assert_eq!(sel.ids(), vec![7]);
        assert_eq!(sel.vertices[0].h_lo, 0.0);
        assert_eq!(sel.vertices[0].h_hi, f64::INFINITY);
    }

    #[test]
    fn point_above_chord_is_dropped() {
        let sel = nondominated(&[pt(0, 0.4, 2.0), pt(1, 0.3, 1.0), pt(2, 0.35, 1.8)]).unwrap();
        assert_eq!(sel.ids(), vec![1, 0]);
        assert!((sel.vertices[0].h_hi - 10.0).abs() < 1e-12);
    }

    #[test]
    fn seven_group_picture() {
        // A..G one per h-group; C and G sit above hull chords, F left of A
        // and higher.
        let pts = [
            pt(0, 0.10, 1.0), // A
            pt(1, 0.20, 1.2), // B
            pt(2, 0.30, 1.6), // C
            pt(3, 0.40, 1.8), // D
            pt(4, 0.60, 2.6), // E
            pt(5, 0.05, 1.3), // F
            pt(6, 0.50, 2.3), // G
        ];
        let sel = nondominated(&pts).unwrap();
        assert_eq!(sel.ids(), vec![0, 1, 3, 4]);
        let slopes: Vec<f64> = sel.vertices.iter().map(|v| v.h_hi).collect();
        assert!((slopes[0] - 2.0).abs() < 1e-12);
        assert!((slopes[1] - 3.0).abs() < 1e-12);
        assert!((slopes[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn only_group_minimum_is_eligible() {
        let pts = [
            pt(0, 0.5, 2.0),
            pt(1, 0.5, 1.0),
            pt(2, 0.5, 1.0),
            pt(3, 0.1, 0.0),
        ];
        let sel = nondominated(&pts).unwrap();
        assert_eq!(sel.ids(), vec![3, 1]);
    }

    #[test]
    fn equal_low_values_favor_the_widest() {
        let sel = nondominated(&[pt(0, 0.1, 1.0), pt(1, 0.3, 1.0), pt(2, 0.2, 1.0)]).unwrap();
        assert_eq!(sel.ids(), vec![1]);
    }

    #[test]
    fn collinear_interior_points_are_dropped() {
        let sel = nondominated(&[pt(0, 0.25, 0.0), pt(1, 0.5, 1.0), pt(2, 1.0, 3.0)]).unwrap();
        assert_eq!(sel.ids(), vec![0, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(nondominated(&[]), Err(Error::EmptyDiagram));
        assert!(matches!(
            nondominated(&[pt(4, 0.0, 1.0)]),
            Err(Error::NonPositiveH { id: 4, .. })
        ));
        assert!(nondominated(&[pt(0, 0.1, f64::NAN)]).is_err());
    }

    #[test]
    fn improvement_filter() {
        let sel = nondominated(&[pt(0, 0.1, 0.0), pt(1, 0.5, 0.5)]).unwrap();
        assert!((sel.vertices[0].h_hi - 1.25).abs() < 1e-12);
        // 0 - 1.25 * 0.1 = -0.125 <= -0.01
        assert_eq!(filter_improving(&sel, 0.0, 0.01).ids(), vec![0, 1]);
        // threshold beyond the best promised improvement
        assert_eq!(filter_improving(&sel, 0.0, 0.2).ids(), vec![1]);
        // equality passes
        assert_eq!(filter_improving(&sel, 0.0, 0.125).ids(), vec![0, 1]);
    }

    #[test]
    fn widest_vertex_always_passes() {
        let sel = nondominated(&[pt(0, 0.01, -5.0), pt(1, 0.02, 100.0)]).unwrap();
        assert_eq!(filter_improving(&sel, -5.0, 1e9).ids(), vec![1]);
    }

    #[test]
    fn selection_csv_columns() {
        let sel = nondominated(&[pt(0, 0.1, 0.0), pt(1, 0.5, 0.5)]).unwrap();
        let rows = selection_rows(3, &sel, 0.0, 0.01);
        let mut buf = Vec::new();
        write_selection_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iter,id,h,F,H_lo,H_hi,passed_xi"));
        assert_eq!(lines.next(), Some("3,0,0.1,0.0,0.0,1.25,true"));
        assert_eq!(lines.next(), Some("3,1,0.5,0.5,1.25,inf,true"));
    }
}
