use crate::error::{Error, Result};

/// A black-box objective over `R^N`.
pub trait Objective {
    fn evaluate(&self, y: &[f64]) -> Result<f64>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, y: &[f64]) -> Result<f64> {
        Ok(self(y))
    }
}

/// Evaluates and rejects NaN or infinite values.
pub(crate) fn evaluate_finite<O: Objective + ?Sized>(objective: &O, y: &[f64]) -> Result<f64> {
    let value = objective.evaluate(y)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective {
            value,
            point: y.to_vec(),
        })
    }
}

/// `||y - center||^2`, Lipschitz on a box with constant `2 * max ||y - center||`.
#[derive(Debug, Clone, PartialEq)]
pub struct Paraboloid {
    pub center: Vec<f64>,
}

impl Paraboloid {
    pub fn new(center: Vec<f64>) -> Self {
        Self { center }
    }

    /// Lipschitz constant over the box `[lo, hi]`: twice the largest distance
    /// from the center to a box corner.
    pub fn lipschitz_on(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let far: f64 = self
            .center
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(c, (l, h))| (c - l).abs().max((h - c).abs()).powi(2))
            .sum();
        2.0 * far.sqrt()
    }
}

impl Objective for Paraboloid {
    fn evaluate(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.center.len() {
            return Err(Error::Objective(format!(
                "expected {} coordinates, got {}",
                self.center.len(),
                y.len()
            )));
        }
        Ok(y.iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b).powi(2))
            .sum())
    }
}
