use super::grid::{pgm, GridSpec};
use crate::engine::{IterState, MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const DEFAULT_MAX_ITER: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscapeMode {
    /// The grid varies the seeds; parameters stay fixed.
    Julia,
    /// The grid point `x + i y` is bound to the named parameter; seeds come
    /// from the grid binding.
    Mandelbrot { param: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeRaster {
    pub grid: GridSpec,
    pub mode: EscapeMode,
    pub escape_radius: f64,
    pub max_iter: u32,
    /// Row-major counts; `max_iter` for cells that stayed bounded.
    pub counts: Vec<u32>,
}

/// Scalars produced after the seeds before the first one with modulus above
/// `radius` (or non-finite), capped at `max_iter`. 0 if a seed is already
/// outside.
pub fn escape_count<S: Scalar>(
    spec: &MapSpec<S>,
    scheme: Scheme,
    seeds: &[S],
    radius: f64,
    max_iter: u32,
) -> Result<u32> {
    let outside = |v: S| !v.is_finite_scalar() || v.modulus() > radius;
    if seeds.iter().any(|&s| outside(s)) {
        return Ok(0);
    }
    let mut st = IterState::new(spec, scheme, seeds)?;
    let mut count = 0u32;
    while count < max_iter {
        for &v in st.step(spec) {
            if outside(v) {
                return Ok(count);
            }
            count += 1;
            if count == max_iter {
                break;
            }
        }
    }
    Ok(count)
}

/// Escape-time raster of a single-component map.
pub fn escape_raster<S: Scalar>(
    spec: &MapSpec<S>,
    scheme: Scheme,
    mode: &EscapeMode,
    grid: &GridSpec,
    escape_radius: f64,
    max_iter: u32,
) -> Result<EscapeRaster> {
    grid.validate(spec.n())?;
    if spec.m() != 1 {
        return Err(Error::Unsupported("escape rasters need m = 1".into()));
    }
    if !(escape_radius > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument(
            "escape radius and max_iter must be positive".into(),
        ));
    }
    if let EscapeMode::Mandelbrot { param } = mode {
        if spec.param(param).is_none() {
            return Err(Error::UnknownParameter(param.clone()));
        }
    }
    let counts = (0..grid.cells())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = grid.point_at(idx);
            let seeds = grid.seed::<S>(x, y)?;
            match mode {
                EscapeMode::Julia => escape_count(spec, scheme, &seeds, escape_radius, max_iter),
                EscapeMode::Mandelbrot { param } => {
                    let c = S::from_parts(x, y).ok_or_else(|| {
                        Error::Unsupported("complex parameter plane for a real map".into())
                    })?;
                    let local = spec.with_param(param, c)?;
                    escape_count(&local, scheme, &seeds, escape_radius, max_iter)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EscapeRaster {
        grid: grid.clone(),
        mode: mode.clone(),
        escape_radius,
        max_iter,
        counts,
    })
}

impl EscapeRaster {
    /// Grey level `count * 255 / max_iter`, rounded down.
    pub fn to_pgm(&self) -> Vec<u8> {
        let max = self.max_iter as u64;
        pgm(
            self.grid.width,
            self.grid.height,
            self.counts.iter().map(|&c| (c as u64 * 255 / max) as u8),
        )
    }

    /// CSV `x,y,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,count\n");
        for (idx, c) in self.counts.iter().enumerate() {
            let (x, y) = self.grid.point_at(idx);
            let _ = writeln!(out, "{x},{y},{c}");
        }
        out
    }

    pub fn bounded_cells(&self) -> usize {
        self.counts.iter().filter(|&&c| c == self.max_iter).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};
    use crate::raster::grid::{Coord, Region};
    use num_complex::Complex64;

    fn bilinear() -> MapSpec<Complex64> {
        make_family(&FamilyId::new(FamilyKind::BilinearC)).unwrap()
    }

    fn diagonal_disc_grid(w: usize) -> GridSpec {
        GridSpec {
            width: w,
            height: w,
            region: Region {
                x_min: -0.7,
                x_max: 0.7,
                y_min: -0.7,
                y_max: 0.7,
            },
            binding: vec![Coord::Plane, Coord::Plane],
        }
    }

    #[test]
    fn unit_disc_stays_bounded() {
        let r = escape_raster(&bilinear(), Scheme::F, &EscapeMode::Julia, &diagonal_disc_grid(16), 1e6, 200)
            .unwrap();
        assert_eq!(r.bounded_cells(), 256);
        assert!(r.to_pgm().ends_with(&[255u8; 256]));
    }

    #[test]
    fn seed_two_escapes() {
        // 2, 2, 4, 8, 32, 256, 8192, 2097152 > 1e6
        let two = Complex64::new(2.0, 0.0);
        assert_eq!(escape_count(&bilinear(), Scheme::F, &[two, two], 1e6, 1000).unwrap(), 5);
    }

    #[test]
    fn biquadratic_origin_in_parameter_plane() {
        let spec: MapSpec<Complex64> = make_family(&FamilyId::new(FamilyKind::BiquadraticC)).unwrap();
        let grid = GridSpec {
            width: 1,
            height: 1,
            region: Region {
                x_min: -0.1,
                x_max: 0.1,
                y_min: -0.1,
                y_max: 0.1,
            },
            binding: vec![Coord::Fixed(0.0, 0.0), Coord::Fixed(0.0, 0.0)],
        };
        let mode = EscapeMode::Mandelbrot { param: "c".into() };
        let r = escape_raster(&spec, Scheme::F, &mode, &grid, 1e6, 500).unwrap();
        assert_eq!(r.counts, vec![500]);
        let bad = EscapeMode::Mandelbrot { param: "q".into() };
        assert!(escape_raster(&spec, Scheme::F, &bad, &grid, 1e6, 500).is_err());
    }

    #[test]
    fn larger_radius_never_lowers_counts() {
        let grid = GridSpec {
            binding: vec![Coord::Plane, Coord::Plane],
            ..GridSpec::unit_square(12, 12)
        };
        let grid = GridSpec {
            region: Region {
                x_min: -1.5,
                x_max: 1.5,
                y_min: -1.5,
                y_max: 1.5,
            },
            ..grid
        };
        let spec = bilinear().with_param("c", Complex64::new(-0.3, 0.2)).unwrap();
        let small = escape_raster(&spec, Scheme::F, &EscapeMode::Julia, &grid, 10.0, 300).unwrap();
        let large = escape_raster(&spec, Scheme::F, &EscapeMode::Julia, &grid, 1e8, 300).unwrap();
        assert!(small.counts.iter().zip(&large.counts).all(|(a, b)| a <= b));
    }
}
