use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// How one seed coordinate is bound to a raster cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coord {
    /// The cell's horizontal coordinate.
    Horizontal,
    /// The cell's vertical coordinate.
    Vertical,
    /// The complex number `horizontal + i vertical`.
    Plane,
    /// A constant `(re, im)`.
    Fixed(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub const UNIT_SQUARE: Region = Region {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    };
}

/// Pixel grid over an axis-aligned region. Row 0 is the top edge
/// (`y_max`); each cell is sampled at its centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub region: Region,
    /// One entry per seed coordinate.
    pub binding: Vec<Coord>,
}

impl GridSpec {
    /// `width x height` grid over the unit square, seeds `(x, y)`.
    pub fn unit_square(width: usize, height: usize) -> Self {
        GridSpec {
            width,
            height,
            region: Region::UNIT_SQUARE,
            binding: vec![Coord::Horizontal, Coord::Vertical],
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidArgument("grid must be at least 1x1".into()));
        }
        let r = &self.region;
        let finite = [r.x_min, r.x_max, r.y_min, r.y_max].iter().all(|v| v.is_finite());
        if !finite || !(r.x_min < r.x_max) || !(r.y_min < r.y_max) {
            return Err(Error::InvalidArgument("region must have positive area".into()));
        }
        if self.binding.len() != n {
            return Err(Error::LengthMismatch {
                what: "seed bindings",
                expected: n,
                got: self.binding.len(),
            });
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Centre of cell `(col, row)`.
    pub fn point(&self, col: usize, row: usize) -> (f64, f64) {
        let r = &self.region;
        let x = r.x_min + (col as f64 + 0.5) * (r.x_max - r.x_min) / self.width as f64;
        let y = r.y_max - (row as f64 + 0.5) * (r.y_max - r.y_min) / self.height as f64;
        (x, y)
    }

    /// Centre of the cell with row-major index `idx`.
    pub fn point_at(&self, idx: usize) -> (f64, f64) {
        self.point(idx % self.width, idx / self.width)
    }

    /// Seed vector at `(x, y)`. Fails for real scalars when a binding has
    /// an imaginary part.
    pub fn seed<S: Scalar>(&self, x: f64, y: f64) -> Result<Vec<S>> {
        self.binding
            .iter()
            .map(|c| {
                let (re, im) = match *c {
                    Coord::Horizontal => (x, 0.0),
                    Coord::Vertical => (y, 0.0),
                    Coord::Plane => (x, y),
                    Coord::Fixed(re, im) => (re, im),
                };
                S::from_parts(re, im).ok_or_else(|| {
                    Error::Unsupported("complex seed binding for a real map".into())
                })
            })
            .collect()
    }
}

pub(crate) fn pgm(width: usize, height: usize, pixels: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(pixels);
    out
}
