//! Attractor classification of a single trajectory.
//!
//! After discarding a transient, the most recent window of the sequence is
//! scanned for the smallest period `p` with `|u_{k+p} - u_k| < tol` over `8p`
//! consecutive terms. Periods are counted in emitted scalars. If no period is
//! found the trajectory is extended in rounds until the budget runs out; a
//! near miss earns one budget escalation.

use crate::engine::{IterState, MapSpec, Scheme};
use crate::error::Result;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Number of period lengths a candidate period must repeat over.
pub const WINDOW_FACTOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    /// Scalars discarded before the first period check.
    pub transient: u64,
    pub tol: f64,
    pub max_period: usize,
    /// Maximum scalars produced before giving up.
    pub budget: u64,
    /// Budget multiplier applied once on a near miss.
    pub escalation: u64,
    /// A failed check is a near miss when its best deviation is below
    /// `near_miss * tol`.
    pub near_miss: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            transient: 200_000,
            tol: 1e-9,
            max_period: 4096,
            budget: 2_000_000,
            escalation: 10,
            near_miss: 1e3,
        }
    }
}

impl ClassifyConfig {
    /// Cheaper settings for per-cell classification in rasters.
    pub fn raster() -> Self {
        ClassifyConfig {
            transient: 2_000,
            tol: 1e-9,
            max_period: 64,
            budget: 40_000,
            escalation: 5,
            near_miss: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttractorKind {
    FixedPoint,
    Periodic,
    Unbounded,
    Undecided,
}

impl AttractorKind {
    pub fn name(self) -> &'static str {
        match self {
            AttractorKind::FixedPoint => "FixedPoint",
            AttractorKind::Periodic => "Periodic",
            AttractorKind::Unbounded => "Unbounded",
            AttractorKind::Undecided => "Undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Attractor<S> {
    FixedPoint { value: S },
    /// `values` holds one period in sequence order, starting at a scalar
    /// produced by the first component.
    Periodic { period: usize, values: Vec<S> },
    Unbounded,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorReport<S> {
    pub attractor: Attractor<S>,
    /// `period / m` when `m` divides the scalar period.
    pub vector_period: Option<usize>,
    /// Scalars produced after the seeds.
    pub iterations_used: u64,
    pub tolerance_used: f64,
}

impl<S: Scalar> AttractorReport<S> {
    pub fn kind(&self) -> AttractorKind {
        match self.attractor {
            Attractor::FixedPoint { .. } => AttractorKind::FixedPoint,
            Attractor::Periodic { .. } => AttractorKind::Periodic,
            Attractor::Unbounded => AttractorKind::Unbounded,
            Attractor::Undecided => AttractorKind::Undecided,
        }
    }

    /// Scalar period; 1 for fixed points.
    pub fn period(&self) -> Option<usize> {
        match &self.attractor {
            Attractor::FixedPoint { .. } => Some(1),
            Attractor::Periodic { period, .. } => Some(*period),
            _ => None,
        }
    }

    pub fn values(&self) -> &[S] {
        match &self.attractor {
            Attractor::FixedPoint { value } => std::slice::from_ref(value),
            Attractor::Periodic { values, .. } => values,
            _ => &[],
        }
    }

    /// `(kind, period)`, the part of a classification compared when
    /// searching for transitions.
    pub fn signature(&self) -> (AttractorKind, Option<usize>) {
        (self.kind(), self.period())
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self.attractor, Attractor::Undecided)
    }

    /// Largest distance between two orbit values.
    pub fn max_separation(&self) -> f64 {
        let v = self.values();
        let mut best = 0.0f64;
        for (i, &a) in v.iter().enumerate() {
            for &b in &v[i + 1..] {
                best = best.max((a - b).modulus());
            }
        }
        best
    }
}

impl<S: Scalar + Serialize> Serialize for AttractorReport<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Flat<'a, S> {
            kind: &'static str,
            period: Option<usize>,
            vector_period: Option<usize>,
            values: &'a [S],
            iterations_used: u64,
            tolerance_used: f64,
        }
        Flat {
            kind: self.kind().name(),
            period: self.period(),
            vector_period: self.vector_period,
            values: self.values(),
            iterations_used: self.iterations_used,
            tolerance_used: self.tolerance_used,
        }
        .serialize(serializer)
    }
}

fn round_up(k: usize, m: usize) -> usize {
    k.div_ceil(m) * m
}

/// Emits `count` scalars (a multiple of the block size for V). Returns `false`
/// on divergence.
fn advance<S: Scalar>(state: &mut IterState<S>, spec: &MapSpec<S>, count: usize) -> bool {
    let mut emitted = 0;
    while emitted < count {
        emitted += state.step(spec).len();
        if state.diverged() {
            return false;
        }
    }
    true
}

fn collect<S: Scalar>(
    state: &mut IterState<S>,
    spec: &MapSpec<S>,
    window: &mut Vec<S>,
    len: usize,
) -> bool {
    window.clear();
    while window.len() < len {
        let out = state.step(spec);
        window.extend_from_slice(out);
        if state.diverged() {
            return false;
        }
    }
    true
}

enum Detection {
    Found { period: usize, offset: usize },
    Missed { best: f64 },
}

/// Smallest period over the tail of `w`. `offset` is the start of the
/// verified stretch `w[offset..]`.
fn detect<S: Scalar>(w: &[S], tol: f64, max_period: usize, give_up: f64) -> Detection {
    let len = w.len();
    let mut best = f64::INFINITY;
    for p in 1..=max_period {
        let span = (WINDOW_FACTOR + 1) * p;
        if span > len {
            break;
        }
        let offset = len - span;
        let mut worst = 0.0f64;
        let mut ok = true;
        for k in offset..len - p {
            let d = (w[k + p] - w[k]).modulus();
            if !(d < tol) {
                ok = false;
                if !(d < give_up) {
                    worst = f64::INFINITY;
                    break;
                }
            }
            worst = worst.max(d);
        }
        if ok {
            return Detection::Found { period: p, offset };
        }
        best = best.min(worst);
    }
    Detection::Missed { best }
}

/// Classifies the attractor reached from `seeds`.
pub fn classify_attractor<S: Scalar>(
    spec: &MapSpec<S>,
    scheme: Scheme,
    seeds: &[S],
    config: &ClassifyConfig,
) -> Result<AttractorReport<S>> {
    let mut state = IterState::new(spec, scheme, seeds)?;
    let n = spec.n() as u64;
    let m = spec.m();
    let max_period = config.max_period.max(1);
    let wlen = round_up((WINDOW_FACTOR + 1) * max_period, m);
    let skip = round_up(config.transient as usize, m);
    let mut budget = config.budget;
    let mut escalated = false;
    let mut window = Vec::with_capacity(wlen + m);

    let report = |attractor, vector_period, state: &IterState<S>| AttractorReport {
        attractor,
        vector_period,
        iterations_used: state.produced() - n,
        tolerance_used: config.tol,
    };

    if state.diverged() {
        return Ok(report(Attractor::Unbounded, None, &state));
    }
    loop {
        if !advance(&mut state, spec, skip) || !collect(&mut state, spec, &mut window, wlen) {
            return Ok(report(Attractor::Unbounded, None, &state));
        }
        match detect(&window, config.tol, max_period, config.near_miss * config.tol) {
            Detection::Found { period, offset } => {
                let vector_period = (period % m == 0).then_some(period / m);
                if period == 1 {
                    let value = window[wlen - 1];
                    return Ok(report(Attractor::FixedPoint { value }, vector_period, &state));
                }
                // Re-phase the verified stretch so it starts on a block boundary.
                let start = round_up(offset, m);
                let values = (0..period)
                    .map(|i| {
                        let mut idx = start + i;
                        while idx >= wlen {
                            idx -= period;
                        }
                        window[idx]
                    })
                    .collect();
                return Ok(report(
                    Attractor::Periodic { period, values },
                    vector_period,
                    &state,
                ));
            }
            Detection::Missed { best } => {
                let used = state.produced() - n;
                if used + (skip + wlen) as u64 > budget {
                    if !escalated && best < config.near_miss * config.tol {
                        escalated = true;
                        budget = budget.saturating_mul(config.escalation.max(1));
                    } else {
                        return Ok(report(Attractor::Undecided, None, &state));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    fn logistic2(a: f64) -> MapSpec<f64> {
        make_family(&FamilyId::new(FamilyKind::Logistic2).with("a", a).unwrap()).unwrap()
    }

    #[test]
    fn converges_to_r2_below_trifurcation() {
        let rep = classify_attractor(
            &logistic2(12.782842211),
            Scheme::F,
            &[0.7, 0.3],
            &ClassifyConfig::default(),
        )
        .unwrap();
        let Attractor::FixedPoint { value } = rep.attractor else {
            panic!("{rep:?}")
        };
        assert!((value - 0.6541934769).abs() < 1e-10);
    }

    #[test]
    fn period_three_above_trifurcation() {
        let rep = classify_attractor(
            &logistic2(12.782842212),
            Scheme::F,
            &[0.7, 0.3],
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.period(), Some(3));
        assert_eq!(rep.vector_period, Some(3));
        let mut v = rep.values().to_vec();
        v.sort_by(f64::total_cmp);
        assert!((v[0] - 0.515931143419749).abs() < 1e-9);
        assert!((v[1] - 0.515931143419749).abs() < 1e-9);
        assert!((v[2] - 0.7973063104767419).abs() < 1e-9);
    }

    #[test]
    fn border_seed_goes_to_zero() {
        let rep = classify_attractor(&logistic2(13.0), Scheme::F, &[0.05, 0.05], &ClassifyConfig::default())
            .unwrap();
        assert_eq!(rep.kind(), AttractorKind::FixedPoint);
        assert!(rep.values()[0].abs() < 1e-9);
    }

    #[test]
    fn unbounded_and_undecided() {
        let spec = MapSpec::from_sources(2, &["x*y + 1"], &[]).unwrap();
        let rep = classify_attractor(&spec, Scheme::F, &[2.0f64, 2.0], &ClassifyConfig::default()).unwrap();
        assert_eq!(rep.kind(), AttractorKind::Unbounded);

        // Fully chaotic logistic map never settles.
        let spec = MapSpec::from_sources(1, &["4*x*(1-x)"], &[]).unwrap();
        let cfg = ClassifyConfig {
            transient: 1000,
            budget: 20_000,
            max_period: 16,
            ..ClassifyConfig::default()
        };
        let rep = classify_attractor(&spec, Scheme::F, &[0.3f64], &cfg).unwrap();
        assert_eq!(rep.kind(), AttractorKind::Undecided);
        assert!(rep.iterations_used <= 20_000);
    }

    #[test]
    fn vector_fixed_point_has_scalar_period_m() {
        // Rotation-free contraction towards (0.2, 0.6) in R^2 -> R^2.
        let spec = MapSpec::from_sources(2, &["0.2 + 0.5*(x - 0.2)", "0.6 + 0.5*(y - 0.6)"], &[]).unwrap();
        let rep = classify_attractor(&spec, Scheme::V, &[0.9f64, 0.1], &ClassifyConfig::default()).unwrap();
        assert_eq!(rep.period(), Some(2));
        assert_eq!(rep.vector_period, Some(1));
        let v = rep.values();
        assert!((v[0] - 0.2).abs() < 1e-12 && (v[1] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let rep = AttractorReport {
            attractor: Attractor::Periodic {
                period: 2,
                values: vec![0.25, 0.5],
            },
            vector_period: Some(2),
            iterations_used: 10,
            tolerance_used: 1e-9,
        };
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"Periodic","period":2,"vector_period":2,"values":[0.25,0.5],"iterations_used":10,"tolerance_used":1e-9}"#
        );
    }
}
