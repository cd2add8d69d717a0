//! Stopping rules and run records shared by both optimizers.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mgas,
    Direct,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Mgas => "mgas",
            Algorithm::Direct => "direct",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mgas" => Ok(Algorithm::Mgas),
            "direct" => Ok(Algorithm::Direct),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

/// Terminate when a trial lands in the ball `||y - target|| <= radius`, or
/// when the trial count would exceed `max_trials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub target: Option<Vec<f64>>,
    pub radius: f64,
    pub max_trials: u64,
}

impl StoppingRule {
    /// Trial budget only.
    pub fn budget(max_trials: u64) -> Self {
        Self {
            target: None,
            radius: 0.0,
            max_trials,
        }
    }

    pub fn ball(target: Vec<f64>, radius: f64, max_trials: u64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "stopping radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            target: Some(target),
            radius,
            max_trials,
        })
    }

    pub fn hits(&self, y: &[f64]) -> bool {
        match &self.target {
            Some(t) => {
                let d2: f64 = y.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum();
                d2.sqrt() <= self.radius
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopReason {
    /// A trial fell inside the target ball.
    Solved,
    /// The trial budget was exhausted.
    Budget,
    /// No interval was eligible for subdivision.
    Stagnation,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::Solved => "solved",
            StopReason::Budget => "budget",
            StopReason::Stagnation => "stagnation",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// 1-based trial number.
    pub trial: u64,
    /// Curve abscissa; `None` for methods that sample `R^N` directly.
    pub x: Option<f64>,
    pub y: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub trials: u64,
    pub iterations: u64,
    pub subdivisions: u64,
    pub stop_reason: StopReason,
    pub f_min: f64,
    pub x_min: Option<f64>,
    pub y_min: Vec<f64>,
    /// Trial count at the end of the iteration that first hit the target ball.
    pub solved_at: Option<u64>,
    /// Index of the first trial inside the target ball.
    pub first_hit_trial: Option<u64>,
    pub trace: Vec<TraceEntry>,
}

impl RunResult {
    pub fn solved(&self) -> bool {
        self.stop_reason == StopReason::Solved
    }

    /// Writes the trace as `trial,x,y_1..y_N,f,f_min`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["trial".to_string(), "x".to_string()];
        header.extend((1..=self.dim).map(|j| format!("y_{j}")));
        header.push("f".into());
        header.push("f_min".into());
        wtr.write_record(&header).map_err(csv_err)?;
        let mut best = f64::INFINITY;
        for e in &self.trace {
            best = best.min(e.f);
            let mut rec = vec![
                e.trial.to_string(),
                e.x.map(|x| x.to_string()).unwrap_or_default(),
            ];
            rec.extend(e.y.iter().map(|v| v.to_string()));
            rec.push(e.f.to_string());
            rec.push(best.to_string());
            wtr.write_record(&rec).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_membership_is_closed() {
        let rule = StoppingRule::ball(vec![0.0, 0.0], 0.5, 10).unwrap();
        assert!(rule.hits(&[0.3, 0.4]));
        assert!(!rule.hits(&[0.3, 0.41]));
        assert!(StoppingRule::ball(vec![0.0], 0.0, 10).is_err());
        assert!(!StoppingRule::budget(10).hits(&[0.0]));
    }

    #[test]
    fn trace_csv_tracks_running_minimum() {
        let r = RunResult {
            algorithm: Algorithm::Mgas,
            dim: 2,
            trials: 2,
            iterations: 0,
            subdivisions: 0,
            stop_reason: StopReason::Budget,
            f_min: 1.0,
            x_min: Some(0.5),
            y_min: vec![0.0, 0.0],
            solved_at: None,
            first_hit_trial: None,
            trace: vec![
                TraceEntry {
                    trial: 1,
                    x: Some(0.25),
                    y: vec![0.1, 0.2],
                    f: 3.0,
                },
                TraceEntry {
                    trial: 2,
                    x: None,
                    y: vec![0.3, 0.4],
                    f: 1.0,
                },
            ],
        };
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "trial,x,y_1,y_2,f,f_min\n1,0.25,0.1,0.2,3,3\n2,,0.3,0.4,1,1\n"
        );
    }

    #[test]
    fn names_round_trip() {
        for a in [Algorithm::Mgas, Algorithm::Direct] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("lbdirect".parse::<Algorithm>().is_err());
        assert_eq!(
            serde_json::to_string(&StopReason::Stagnation).unwrap(),
            "\"stagnation\""
        );
    }
}
