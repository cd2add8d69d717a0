//! GKLS-style multiextremal test functions with a known global minimizer.
//!
//! A convex paraboloid `||y - T||^2 + t` is distorted inside disjoint
//! attraction balls. Inside ball `i` (center `M_i`, radius `rho_i`) the
//! function is the continuous ND-type blend of Gaviano, Kvasov, Lera and
//! Sergeyev (ACM TOMS 29(4), 2003):
//!
//! ```text
//! f(y) = (1 - 2<y - M_i, T - M_i> / (rho_i r) + A_i / rho_i^2) r^2 + f_i
//! r    = ||y - M_i||,  A_i = ||T - M_i||^2 + t - f_i
//! ```
//!
//! which equals the paraboloid on the sphere `r = rho_i` and is `>= f_i`
//! inside with equality only at the center. Ball 0 holds the global minimum
//! `f*`; every other `f_i` is strictly above it and the paraboloid itself
//! never drops below `t = 0 > f*`.
//!
//! The random draws come from ChaCha8 (rand_chacha 0.3) seeded with the
//! class seed and using the function index as stream id, so instances are
//! portable but differ from the reference generator's.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Geometric slack used for containment, coincidence and domain checks.
pub const PRECISION: f64 = 1e-10;
const MAX_ATTEMPTS: usize = 1000;
const MAX_PLACEMENT_DRAWS: usize = 100_000;
/// Local radii are shrunk by this factor so balls never touch.
const RADIUS_WEIGHT: f64 = 0.99;
/// Paraboloid vertex value.
const VERTEX_VALUE: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GklsClassSpec {
    /// Preset number 1..=8 when built from the standard table.
    pub class_id: Option<u8>,
    pub dim: usize,
    /// Number of minima, counting the paraboloid vertex.
    pub num_minima: usize,
    pub f_star: f64,
    /// Distance from the global minimizer to the paraboloid vertex.
    pub dist_d: f64,
    /// Radius of the global minimizer's attraction ball.
    pub radius_r: f64,
    pub seed: u64,
}

/// The eight standard classes: (dim, d, r*), all with 10 minima and f* = -1.
const PRESETS: [(usize, f64, f64); 8] = [
    (2, 0.90, 0.20),
    (2, 0.90, 0.10),
    (3, 0.66, 0.20),
    (3, 0.90, 0.20),
    (4, 0.66, 0.20),
    (4, 0.90, 0.20),
    (5, 0.90, 0.40),
    (5, 0.90, 0.30),
];

impl GklsClassSpec {
    pub fn preset(class: u8) -> Result<Self> {
        let (dim, dist_d, radius_r) =
            *PRESETS
                .get((class as usize).wrapping_sub(1))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown class {class} (expected 1..=8)"))
                })?;
        Ok(Self {
            class_id: Some(class),
            dim,
            num_minima: 10,
            f_star: -1.0,
            dist_d,
            radius_r,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.num_minima == 0 {
            return bad("need at least one minimum".into());
        }
        if !(self.f_star < VERTEX_VALUE - PRECISION) {
            return bad(format!(
                "f* = {} must lie below the paraboloid vertex value 0",
                self.f_star
            ));
        }
        if !(self.radius_r > PRECISION) || self.radius_r >= 1.0 {
            return bad(format!("r* = {} must lie in (0, 1)", self.radius_r));
        }
        if self.num_minima > 1 && !(self.dist_d > PRECISION && self.dist_d < 1.0) {
            return bad(format!("d = {} must lie in (0, 1)", self.dist_d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GklsFunction {
    pub spec: GklsClassSpec,
    pub index: u64,
    pub vertex: Vec<f64>,
    pub vertex_value: f64,
    /// `centers[0]` is the global minimizer.
    pub centers: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub radii: Vec<f64>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dist_to_boundary(p: &[f64]) -> f64 {
    p.iter()
        .map(|v| 1.0 - v.abs())
        .fold(f64::INFINITY, f64::min)
}

fn uniform_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Generates function `index` of the class. Deterministic in
/// `(spec, index)`.
pub fn generate(spec: &GklsClassSpec, index: u64) -> Result<GklsFunction> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let mut last = String::new();
    for _ in 0..MAX_ATTEMPTS {
        match try_generate(spec, index, &mut rng) {
            Ok(g) => return Ok(g),
            Err(reason) => last = reason,
        }
    }
    Err(Error::InfeasibleSpec {
        attempts: MAX_ATTEMPTS,
        reason: last,
    })
}

fn try_generate(
    spec: &GklsClassSpec,
    index: u64,
    rng: &mut ChaCha8Rng,
) -> Result<GklsFunction, String> {
    let n = spec.dim;
    let r_star = spec.radius_r;

    if spec.num_minima == 1 {
        // single basin: the paraboloid itself, lowered so its vertex is f*
        let center: Vec<f64> = uniform_point(rng, n);
        if dist_to_boundary(&center) < r_star {
            return Err("global ball leaves the domain".into());
        }
        return Ok(GklsFunction {
            spec: spec.clone(),
            index,
            vertex: center.clone(),
            vertex_value: spec.f_star,
            centers: vec![center],
            values: vec![spec.f_star],
            radii: vec![r_star],
        });
    }

    let vertex = uniform_point(rng, n);
    let dir: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < PRECISION {
        return Err("degenerate direction".into());
    }
    let global: Vec<f64> = vertex
        .iter()
        .zip(&dir)
        .map(|(t, u)| t + spec.dist_d * u / norm)
        .collect();
    if dist_to_boundary(&global) < r_star + PRECISION {
        return Err("global ball leaves the domain".into());
    }

    let mut centers = vec![global];
    for _ in 2..spec.num_minima {
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_DRAWS {
            let p = uniform_point(rng, n);
            let clear_of_global = dist(&p, &centers[0]) > 2.0 * r_star + PRECISION;
            let clear_of_vertex = dist(&p, &vertex) > PRECISION;
            let distinct = centers[1..].iter().all(|c| dist(&p, c) > PRECISION);
            if clear_of_global && clear_of_vertex && distinct && dist_to_boundary(&p) > PRECISION {
                placed = Some(p);
                break;
            }
        }
        centers.push(placed.ok_or("could not place a local minimizer")?);
    }

    let m = centers.len();
    let mut radii = vec![0.0; m];
    radii[0] = r_star;
    for i in 1..m {
        let nearest = (0..m)
            .filter(|&j| j != i)
            .map(|j| dist(&centers[i], &centers[j]))
            .fold(f64::INFINITY, f64::min);
        radii[i] = (0.5 * nearest).min(dist(&centers[i], &centers[0]) - r_star - PRECISION);
    }
    // grow local balls until they touch a neighbour
    for i in 1..m {
        let room = (0..m)
            .filter(|&j| j != i)
            .map(|j| dist(&centers[i], &centers[j]) - radii[j])
            .fold(f64::INFINITY, f64::min);
        if room > radii[i] + PRECISION {
            radii[i] = room;
        }
    }
    for i in 1..m {
        radii[i] = RADIUS_WEIGHT * radii[i].min(dist_to_boundary(&centers[i]));
        if !(radii[i] > PRECISION) {
            return Err("local attraction ball collapsed".into());
        }
    }

    let mut values = vec![spec.f_star; m];
    for i in 1..m {
        let u: f64 = rng.gen();
        let boundary_low = (radii[i] - dist(&vertex, &centers[i])).powi(2) + VERTEX_VALUE;
        let peak = ((1.0 + u) * radii[i]).min(u * (boundary_low - spec.f_star));
        values[i] = boundary_low - peak;
        if !(values[i] > spec.f_star + PRECISION) {
            return Err("local minimum too close to the global value".into());
        }
    }

    Ok(GklsFunction {
        spec: spec.clone(),
        index,
        vertex,
        vertex_value: VERTEX_VALUE,
        centers,
        values,
        radii,
    })
}

impl GklsFunction {
    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn global_minimizer(&self) -> &[f64] {
        &self.centers[0]
    }

    pub fn global_value(&self) -> f64 {
        self.values[0]
    }

    pub fn domain(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-1.0; self.dim()], vec![1.0; self.dim()])
    }

    pub fn evaluate(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim() || y.iter().any(|v| !(v.abs() <= 1.0 + PRECISION)) {
            return Err(Error::OutsideDomain(y.to_vec()));
        }
        Ok(self.value_at(y))
    }

    fn value_at(&self, y: &[f64]) -> f64 {
        for (i, center) in self.centers.iter().enumerate() {
            let r = dist(y, center);
            if r > self.radii[i] {
                continue;
            }
            if r < PRECISION {
                return self.values[i];
            }
            let rho = self.radii[i];
            let to_vertex = dist(&self.vertex, center);
            let a = to_vertex * to_vertex + self.vertex_value - self.values[i];
            let scal: f64 = y
                .iter()
                .zip(center)
                .zip(&self.vertex)
                .map(|((yv, c), t)| (yv - c) * (t - c))
                .sum();
            return (1.0 - 2.0 * scal / (rho * r) + a / (rho * rho)) * r * r + self.values[i];
        }
        let r = dist(y, &self.vertex);
        r * r + self.vertex_value
    }

    /// Index of the attraction ball containing `y`, if any.
    pub fn ball_containing(&self, y: &[f64]) -> Option<usize> {
        (0..self.centers.len()).find(|&i| dist(y, &self.centers[i]) <= self.radii[i])
    }

    pub fn balls_disjoint(&self) -> bool {
        let m = self.centers.len();
        (0..m).all(|i| {
            (i + 1..m)
                .all(|j| dist(&self.centers[i], &self.centers[j]) > self.radii[i] + self.radii[j])
        })
    }

    pub fn balls_inside_domain(&self) -> bool {
        self.centers
            .iter()
            .zip(&self.radii)
            .all(|(c, &r)| dist_to_boundary(c) >= r - PRECISION)
    }
}

impl Objective for GklsFunction {
    fn evaluate(&self, y: &[f64]) -> Result<f64> {
        GklsFunction::evaluate(self, y)
    }
}
