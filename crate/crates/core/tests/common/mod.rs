//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use mgas_core::diagram::{length_at_depth, pow3, DiagramPoint, IntervalRecord};
use mgas_core::gkls::GklsFunction;
use mgas_core::mgas::OptimizerState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Log-spaced grid of `n` values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Brute force: every point that is the minimizer of `F - H*h` for some `H`
/// of the grid. Exact ties go to the smallest id.
pub fn brute_force_nondominated(points: &[DiagramPoint], grid: &[f64]) -> BTreeSet<u64> {
    let mut winners = BTreeSet::new();
    for &big_h in grid {
        let mut best: Option<(f64, u64)> = None;
        for p in points {
            let value = p.f - big_h * p.h;
            best = match best {
                Some((v, id)) if v < value || (v == value && id < p.interval_id) => Some((v, id)),
                _ => Some((value, p.interval_id)),
            };
        }
        winners.insert(best.unwrap().1);
    }
    winners
}

/// The `H` grid used for hull oracle checks: 10^4 log-spaced values in
/// `[1e-6, 1e6]`.
pub fn standard_h_grid() -> Vec<f64> {
    log_grid(1e-6, 1e6, 10_000)
}

/// Random diagram of `1..=max_points` points. Even seeds draw `h` from
/// trisection columns (so equal-h groups occur), odd seeds draw it freely.
/// Some points are exact copies under a new id.
pub fn random_diagram(seed: u64, max_points: usize) -> Vec<DiagramPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_points);
    let dim = rng.gen_range(1..=5usize);
    let mut pts: Vec<DiagramPoint> = Vec::with_capacity(n);
    for id in 0..n as u64 {
        if !pts.is_empty() && rng.gen_bool(0.05) {
            let copy = pts[rng.gen_range(0..pts.len())];
            pts.push(DiagramPoint::new(id, copy.h, copy.f));
            continue;
        }
        let h = if seed.is_multiple_of(2) {
            let depth = rng.gen_range(0..10u32);
            (0.5 / pow3(depth) as f64).powf(1.0 / dim as f64)
        } else {
            rng.gen_range(0.01..1.0)
        };
        let f = rng.gen_range(-1.0..1.0);
        pts.push(DiagramPoint::new(id, h, f));
    }
    pts
}

/// Checks that the intervals tile `[0, 1]` exactly, using integer
/// arithmetic on the common denominator `3^max_depth`.
pub fn assert_exact_cover<'a>(intervals: impl IntoIterator<Item = &'a IntervalRecord>) {
    let mut ivs: Vec<&IntervalRecord> = intervals.into_iter().collect();
    assert!(!ivs.is_empty());
    let top = ivs.iter().map(|iv| iv.depth).max().unwrap();
    let scale = |iv: &IntervalRecord| pow3(top - iv.depth);
    ivs.sort_by_key(|iv| iv.left * scale(iv));
    let mut next = 0u64;
    for iv in ivs {
        let a = iv.left * scale(iv);
        assert_eq!(a, next, "gap or overlap at interval {}", iv.id);
        next = a + scale(iv);
    }
    assert_eq!(next, pow3(top), "cover stops short of 1");
}

/// Driver invariants checked after every iteration.
pub fn check_state(st: &OptimizerState) {
    assert_exact_cover(st.intervals());
    assert_eq!(st.trials(), 3 + 2 * st.subdivisions());
    assert_eq!(st.interval_count() as u64, 3 + 2 * st.subdivisions());
    assert_eq!(st.trace().len() as u64, st.trials());
    let mut xs = HashSet::new();
    for e in st.trace() {
        assert!(
            xs.insert(e.x.unwrap().to_bits()),
            "abscissa {} sampled twice",
            e.x.unwrap()
        );
    }
    let best = st.trace().iter().map(|e| e.f).fold(f64::INFINITY, f64::min);
    assert_eq!(st.f_min(), best);
    assert_eq!(st.y_min(), st.curve().map(st.x_min()).unwrap().as_slice());
    for iv in st.intervals() {
        assert!(((iv.b() - iv.a()) - length_at_depth(iv.depth)).abs() <= f64::EPSILON);
    }
}

/// Minimum of the function over a regular grid of at least `points` nodes on
/// [-1, 1]^N plus random probes inside every attraction ball.
pub fn scan_minimum(g: &GklsFunction, points: usize) -> f64 {
    let n = g.dim();
    let per_axis = ((points as f64).powf(1.0 / n as f64) - 1e-9)
        .ceil()
        .max(2.0) as usize;
    let total = per_axis.pow(n as u32);
    let grid_min = (0..total)
        .map(|mut k| {
            let y: Vec<f64> = (0..n)
                .map(|_| {
                    let i = k % per_axis;
                    k /= per_axis;
                    -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64
                })
                .collect();
            g.evaluate(&y).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(g.index);
    let mut ball_min = f64::INFINITY;
    for (c, &r) in g.centers.iter().zip(&g.radii) {
        for _ in 0..200 {
            let y: Vec<f64> = c
                .iter()
                .map(|v| (v + rng.gen_range(-r..r)).clamp(-1.0, 1.0))
                .collect();
            ball_min = ball_min.min(g.evaluate(&y).unwrap());
        }
    }
    grid_min.min(ball_min)
}
