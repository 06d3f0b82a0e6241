use crate::analysis::{classify_attractor, AttractorKind, AttractorReport, ClassifyConfig};
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: crate::Scalar + Serialize"))]
pub struct PeriodRow<R> {
    pub a: f64,
    pub report: AttractorReport<R>,
}

/// Classifications over a uniform sweep of one parameter, sorted by value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: crate::Scalar + Serialize"))]
pub struct PeriodTable<R> {
    pub parameter: String,
    pub rows: Vec<PeriodRow<R>>,
}

/// Binds `param = a` on a copy of `spec`.
pub(crate) fn at<R: Real>(spec: &MapSpec<R>, param: &str, a: f64) -> Result<MapSpec<R>> {
    spec.with_param(param, R::from_real(a))
}

/// Classifies the trajectory from `seeds` at `steps` uniformly spaced values
/// of `param` in `[lo, hi]`, endpoints included.
pub fn period_table<R: Real>(
    spec: &MapSpec<R>,
    param: &str,
    scheme: Scheme,
    seeds: &[R],
    range: (f64, f64),
    steps: usize,
    config: &ClassifyConfig,
) -> Result<PeriodTable<R>> {
    let (lo, hi) = range;
    if !(lo < hi) || steps < 2 {
        return Err(Error::InvalidArgument(
            "a sweep needs lo < hi and at least 2 steps".into(),
        ));
    }
    at(spec, param, lo)?;
    let rows = (0..steps)
        .into_par_iter()
        .map(|i| {
            let a = if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            };
            let report = classify_attractor(&at(spec, param, a)?, scheme, seeds, config)?;
            Ok(PeriodRow { a, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PeriodTable {
        parameter: param.to_string(),
        rows,
    })
}

impl<R: Real> PeriodTable<R> {
    /// CSV `a,kind,period,values` with orbit values `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,kind,period,values\n");
        for row in &self.rows {
            let period = row.report.period().map(|p| p.to_string()).unwrap_or_default();
            let values: Vec<String> = row.report.values().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                row.a,
                row.report.kind().name(),
                period,
                values.join(";")
            );
        }
        out
    }

    /// Periods in order of first appearance along the sweep, with runs of
    /// equal periods collapsed. Unbounded and undecided rows are skipped.
    pub fn period_progression(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for row in &self.rows {
            if let Some(p) = row.report.period() {
                if out.last() != Some(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// First parameter value classified as undecided, after which the
    /// sweep is taken to be chaotic.
    pub fn first_undecided(&self) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.report.kind() == AttractorKind::Undecided)
            .map(|r| r.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    #[test]
    fn logistic2_sweep_rows_are_ordered() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap();
        let cfg = ClassifyConfig {
            transient: 20_000,
            budget: 200_000,
            max_period: 64,
            ..ClassifyConfig::default()
        };
        let t = period_table(&spec, "a", Scheme::F, &[0.5, 0.5], (12.0, 13.4), 15, &cfg).unwrap();
        assert_eq!(t.rows.len(), 15);
        assert!(t.rows.windows(2).all(|w| w[0].a < w[1].a));
        assert_eq!(t.rows[14].a, 13.4);
        assert_eq!(t.period_progression(), vec![1, 3]);
        let csv = t.to_csv();
        assert!(csv.starts_with("a,kind,period,values\n12,FixedPoint,1,"));
        assert_eq!(csv.lines().count(), 16);
    }

    #[test]
    fn rejects_bad_ranges() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap();
        let cfg = ClassifyConfig::default();
        assert!(period_table(&spec, "a", Scheme::F, &[0.5, 0.5], (13.0, 12.0), 10, &cfg).is_err());
        assert!(period_table(&spec, "a", Scheme::F, &[0.5, 0.5], (12.0, 13.0), 1, &cfg).is_err());
        assert!(period_table(&spec, "b", Scheme::F, &[0.5, 0.5], (12.0, 13.0), 2, &cfg).is_err());
    }
}
