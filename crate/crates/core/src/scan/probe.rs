use crate::analysis::{classify_attractor, AttractorKind, AttractorReport, ClassifyConfig};
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: crate::Scalar + Serialize"))]
pub struct SeedHit<R> {
    pub seeds: Vec<R>,
    pub report: AttractorReport<R>,
}

/// Outcome of classifying a grid of seeds at one parameter setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: crate::Scalar + Serialize"))]
pub struct SeedProbe<R> {
    pub divisions: Vec<usize>,
    pub total: usize,
    /// Seed counts keyed by `"<kind>"` or `"<kind>:<period>"`.
    pub histogram: BTreeMap<String, usize>,
    pub target_period: Option<usize>,
    /// Seeds reaching the target period, in grid order.
    pub hits: Vec<SeedHit<R>>,
}

impl<R> SeedProbe<R> {
    pub fn found(&self) -> bool {
        !self.hits.is_empty()
    }
}

/// Cell centres of a grid over the open unit hypercube, first coordinate
/// varying slowest.
pub fn seed_grid(divisions: &[usize]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &k in divisions {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |i| {
                    let mut v = prefix.clone();
                    v.push((i as f64 + 0.5) / k as f64);
                    v
                })
            })
            .collect();
    }
    out
}

/// Classifies every seed of a `divisions` grid and collects those whose
/// scalar period equals `target_period` (all periodic seeds when `None`).
pub fn probe_seeds<R: Real>(
    spec: &MapSpec<R>,
    scheme: Scheme,
    divisions: &[usize],
    target_period: Option<usize>,
    config: &ClassifyConfig,
) -> Result<SeedProbe<R>> {
    if divisions.len() != spec.n() || divisions.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "need {} positive grid divisions",
            spec.n()
        )));
    }
    let grid = seed_grid(divisions);
    let reports = grid
        .par_iter()
        .map(|s| {
            let seeds: Vec<R> = s.iter().map(|&v| R::from_real(v)).collect();
            let rep = classify_attractor(spec, scheme, &seeds, config)?;
            Ok((seeds, rep))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    let mut hits = Vec::new();
    for (seeds, report) in reports {
        let key = match report.period() {
            Some(p) => format!("{}:{p}", report.kind().name()),
            None => report.kind().name().to_string(),
        };
        *histogram.entry(key).or_insert(0) += 1;
        let wanted = match target_period {
            Some(t) => report.period() == Some(t),
            None => report.kind() == AttractorKind::Periodic,
        };
        if wanted {
            hits.push(SeedHit { seeds, report });
        }
    }
    Ok(SeedProbe {
        divisions: divisions.to_vec(),
        total: grid.len(),
        histogram,
        target_period,
        hits,
    })
}
