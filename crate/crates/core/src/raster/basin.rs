use super::grid::{pgm, GridSpec};
use crate::analysis::{
    classify_attractor, diagonal_fixed_points, Attractor, AttractorReport, ClassifyConfig,
};
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Distance within which a fixed point is matched to a diagonal root.
pub const LABEL_MATCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasinLabel {
    ZeroFixed,
    R1Fixed,
    R2Fixed,
    /// A fixed point not matched to `0`, `r_1` or `r_2`.
    OtherFixed,
    Periodic(usize),
    Unbounded,
    Undecided,
}

impl BasinLabel {
    pub fn name(self) -> &'static str {
        match self {
            BasinLabel::ZeroFixed => "ZeroFixed",
            BasinLabel::R1Fixed => "R1Fixed",
            BasinLabel::R2Fixed => "R2Fixed",
            BasinLabel::OtherFixed => "OtherFixed",
            BasinLabel::Periodic(_) => "Periodic",
            BasinLabel::Unbounded => "Unbounded",
            BasinLabel::Undecided => "Undecided",
        }
    }

    pub fn period(self) -> Option<usize> {
        match self {
            BasinLabel::Periodic(p) => Some(p),
            BasinLabel::Unbounded | BasinLabel::Undecided => None,
            _ => Some(1),
        }
    }

    /// Fixed grey level used in PGM output.
    pub fn gray(self) -> u8 {
        match self {
            BasinLabel::ZeroFixed => 0,
            BasinLabel::R1Fixed => 64,
            BasinLabel::R2Fixed => 128,
            BasinLabel::OtherFixed => 164,
            BasinLabel::Periodic(p) => 160 + 4 * p.min(15) as u8,
            BasinLabel::Unbounded => 255,
            BasinLabel::Undecided => 32,
        }
    }
}

/// Diagonal roots used to name fixed points: the root at the origin (if
/// any) and the next two in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DiagonalRoots {
    pub zero: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
}

impl DiagonalRoots {
    /// Roots of `f(x,..,x) = x` in `[0, 1]`. Empty for vector maps.
    pub fn find<R: Real>(spec: &MapSpec<R>) -> Result<Self> {
        if spec.m() != 1 {
            return Ok(DiagonalRoots::default());
        }
        let roots: Vec<f64> = diagonal_fixed_points(spec, (R::zero(), R::one()), 10_000)?
            .into_iter()
            .map(|f| f.value.to_f64_lossy())
            .collect();
        let mut rest = roots.as_slice();
        let mut out = DiagonalRoots::default();
        if let Some((&first, tail)) = rest.split_first() {
            if first.abs() < LABEL_MATCH {
                out.zero = Some(first);
                rest = tail;
            }
        }
        out.r1 = rest.first().copied();
        out.r2 = rest.get(1).copied();
        Ok(out)
    }
}

/// Label for a classification, matching fixed points against `roots`.
pub fn label_for_report<R: Real>(report: &AttractorReport<R>, roots: &DiagonalRoots) -> BasinLabel {
    match &report.attractor {
        Attractor::FixedPoint { value } => {
            let v = value.to_f64_lossy();
            let near = |r: Option<f64>| r.is_some_and(|r| (v - r).abs() < LABEL_MATCH);
            if near(roots.zero) {
                BasinLabel::ZeroFixed
            } else if near(roots.r1) {
                BasinLabel::R1Fixed
            } else if near(roots.r2) {
                BasinLabel::R2Fixed
            } else {
                BasinLabel::OtherFixed
            }
        }
        Attractor::Periodic { period, .. } => BasinLabel::Periodic(*period),
        Attractor::Unbounded => BasinLabel::Unbounded,
        Attractor::Undecided => BasinLabel::Undecided,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinCell {
    pub label: BasinLabel,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinRaster {
    pub grid: GridSpec,
    pub roots: DiagonalRoots,
    /// Row-major, row 0 at the top.
    pub cells: Vec<BasinCell>,
}

/// Classifies the trajectory from every cell centre.
pub fn basin_map<R: Real>(
    spec: &MapSpec<R>,
    scheme: Scheme,
    grid: &GridSpec,
    config: &ClassifyConfig,
) -> Result<BasinRaster> {
    grid.validate(spec.n())?;
    if spec.m() != 1 {
        return Err(Error::Unsupported("basin maps need m = 1".into()));
    }
    let roots = DiagonalRoots::find(spec)?;
    let cells = (0..grid.cells())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = grid.point_at(idx);
            let rep = classify_attractor(spec, scheme, &grid.seed::<R>(x, y)?, config)?;
            Ok(BasinCell {
                label: label_for_report(&rep, &roots),
                iterations: rep.iterations_used,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinRaster {
        grid: grid.clone(),
        roots,
        cells,
    })
}

impl BasinRaster {
    pub fn label(&self, col: usize, row: usize) -> BasinLabel {
        self.cells[row * self.grid.width + col].label
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        pgm(
            self.grid.width,
            self.grid.height,
            self.cells.iter().map(|c| c.label.gray()),
        )
    }

    /// CSV `x,y,label,period`, one row per cell in raster order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,label,period\n");
        for (idx, c) in self.cells.iter().enumerate() {
            let (x, y) = self.grid.point_at(idx);
            let period = c.label.period().map(|p| p.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{x},{y},{},{period}", c.label.name());
        }
        out
    }

    /// Cell count per label name.
    pub fn histogram(&self) -> std::collections::BTreeMap<String, usize> {
        let mut h = std::collections::BTreeMap::new();
        for c in &self.cells {
            let key = match c.label {
                BasinLabel::Periodic(p) => format!("Periodic:{p}"),
                l => l.name().to_string(),
            };
            *h.entry(key).or_insert(0) += 1;
        }
        h
    }
}

/// Labels along the segment from `from` to `to`, at `samples` points
/// `from + t (to - from)` with `t = 1 - q^k`, `q = ratio`, `k = 0..samples`:
/// the points accumulate geometrically towards `to`.
#[allow(clippy::too_many_arguments)]
pub fn ray_labels<R: Real>(
    spec: &MapSpec<R>,
    scheme: Scheme,
    from: &[f64],
    to: &[f64],
    samples: usize,
    ratio: f64,
    config: &ClassifyConfig,
) -> Result<Vec<(f64, BasinLabel)>> {
    if from.len() != spec.n() || to.len() != spec.n() {
        return Err(Error::LengthMismatch {
            what: "ray endpoints",
            expected: spec.n(),
            got: from.len().min(to.len()),
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument("ratio must lie in (0, 1)".into()));
    }
    let roots = DiagonalRoots::find(spec)?;
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let t = 1.0 - ratio.powi(k as i32);
            let seeds: Vec<R> = from
                .iter()
                .zip(to)
                .map(|(&a, &b)| R::from_real(a + t * (b - a)))
                .collect();
            let rep = classify_attractor(spec, scheme, &seeds, config)?;
            Ok((t, label_for_report(&rep, &roots)))
        })
        .collect()
}

/// Number of label changes along a sequence, ignoring undecided entries.
pub fn count_alternations(labels: &[BasinLabel]) -> usize {
    let decided: Vec<BasinLabel> = labels
        .iter()
        .copied()
        .filter(|l| *l != BasinLabel::Undecided)
        .collect();
    decided.windows(2).filter(|w| w[0] != w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    fn logistic2() -> MapSpec<f64> {
        make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap()
    }

    #[test]
    fn gray_levels() {
        assert_eq!(BasinLabel::Periodic(3).gray(), 172);
        assert_eq!(BasinLabel::Periodic(100).gray(), 220);
        assert_eq!(BasinLabel::ZeroFixed.gray(), 0);
    }

    #[test]
    fn roots_at_13() {
        let r = DiagonalRoots::find(&logistic2()).unwrap();
        assert_eq!(r.zero, Some(0.0));
        assert!((r.r1.unwrap() - 0.0936383).abs() < 1e-6);
        assert!(r.r2.unwrap() > 0.6);
    }

    #[test]
    fn small_raster() {
        let grid = GridSpec::unit_square(8, 8);
        let b = basin_map(&logistic2(), Scheme::F, &grid, &ClassifyConfig::raster()).unwrap();
        assert_eq!(b.cells.len(), 64);
        let pgm = b.to_pgm();
        assert!(pgm.starts_with(b"P5\n8 8\n255\n"));
        assert_eq!(pgm.len(), 11 + 64);
        // Bottom-left corner cell (1/16, 1/16) collapses to the origin.
        assert_eq!(b.label(0, 7), BasinLabel::ZeroFixed);
        assert_eq!(b.to_csv().lines().count(), 65);
    }

    #[test]
    fn one_by_one() {
        let grid = GridSpec::unit_square(1, 1);
        let b = basin_map(&logistic2(), Scheme::F, &grid, &ClassifyConfig::raster()).unwrap();
        assert_eq!(b.cells.len(), 1);
        assert_eq!(b.label(0, 0), BasinLabel::Periodic(3));
    }

    #[test]
    fn alternations() {
        use BasinLabel::*;
        assert_eq!(count_alternations(&[R2Fixed, Undecided, R2Fixed, Periodic(3), R2Fixed]), 2);
        assert_eq!(count_alternations(&[]), 0);
    }
}
