use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observation locations `x_1..x_n`, each an `m`-dimensional point.
///
/// For an ODE forward map `m = 1` (time); for the Burgers map each point is
/// `(z, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Locations {
    points: Vec<Vec<f64>>,
}

impl Locations {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidArgument("at least one location is required".into()))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("locations must have dimension >= 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("location coordinates must be finite".into()));
            }
        }
        Ok(Self { points })
    }

    /// One-dimensional locations, e.g. observation times.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    /// `n` equally spaced scalars on `[lo, hi]`, both endpoints included.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("linspace needs n >= 1".into()));
        }
        if n == 1 {
            return Self::from_scalars(&[lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
            .collect();
        Self::from_scalars(&values)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Coordinate `axis` of every point.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[axis]).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Locations {
    type Error = Error;

    fn try_from(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<Locations> for Vec<Vec<f64>> {
    fn from(l: Locations) -> Self {
        l.points
    }
}

/// Observations `y_1..y_n` paired with their locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub locations: Locations,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(locations: Locations, y: Vec<f64>) -> Result<Self> {
        if y.len() != locations.len() {
            return Err(Error::DimensionMismatch { expected: locations.len(), got: y.len() });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("observations must be finite".into()));
        }
        Ok(Self { locations, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}
