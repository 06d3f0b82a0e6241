use super::table::at;
use crate::analysis::{classify_attractor, AttractorReport, ClassifyConfig};
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;

/// A bracketed change of attractor along one parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: crate::Scalar + Serialize"))]
pub struct CriticalValue<R> {
    pub parameter: String,
    pub lo: f64,
    pub hi: f64,
    pub midpoint: f64,
    /// Classification at `lo`.
    pub below: AttractorReport<R>,
    /// Classification at `hi`.
    pub above: AttractorReport<R>,
    pub seeds: Vec<R>,
    pub tol: f64,
    pub evaluations: usize,
    /// Midpoints still undecided after a budget escalation. Each was
    /// treated as lying past the transition.
    pub undecided_midpoints: usize,
}

pub(crate) fn classify_retry<R: Real>(
    spec: &MapSpec<R>,
    scheme: Scheme,
    seeds: &[R],
    config: &ClassifyConfig,
) -> Result<AttractorReport<R>> {
    let rep = classify_attractor(spec, scheme, seeds, config)?;
    if rep.is_decided() {
        return Ok(rep);
    }
    let mut wider = *config;
    wider.budget = config.budget.saturating_mul(config.escalation.max(1));
    wider.escalation = 1;
    classify_attractor(spec, scheme, seeds, &wider)
}

/// Bisects `[lo, hi]` for the first departure from the classification at
/// `lo`, until the bracket is narrower than `tol`.
///
/// Two classifications are the same when kind and period agree.
pub fn locate_transition<R: Real>(
    spec: &MapSpec<R>,
    param: &str,
    scheme: Scheme,
    seeds: &[R],
    bracket: (f64, f64),
    tol: f64,
    config: &ClassifyConfig,
) -> Result<CriticalValue<R>> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "bracket must satisfy lo < hi and tol > 0".into(),
        ));
    }
    let mut below = classify_retry(&at(spec, param, lo)?, scheme, seeds, config)?;
    let mut above = classify_retry(&at(spec, param, hi)?, scheme, seeds, config)?;
    if !below.is_decided() || !above.is_decided() {
        return Err(Error::Bracket(format!(
            "undecided classification at a bracket end ({} at {lo}, {} at {hi})",
            below.kind().name(),
            above.kind().name()
        )));
    }
    if below.signature() == above.signature() {
        return Err(Error::Bracket(format!(
            "both ends classify as {} with period {:?}",
            below.kind().name(),
            below.period()
        )));
    }
    let target = below.signature();
    let mut evaluations = 2;
    let mut undecided = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let rep = classify_retry(&at(spec, param, mid)?, scheme, seeds, config)?;
        evaluations += 1;
        if !rep.is_decided() {
            undecided += 1;
        }
        if rep.is_decided() && rep.signature() == target {
            lo = mid;
            below = rep;
        } else {
            hi = mid;
            above = rep;
        }
    }
    Ok(CriticalValue {
        parameter: param.to_string(),
        lo,
        hi,
        midpoint: 0.5 * (lo + hi),
        below,
        above,
        seeds: seeds.to_vec(),
        tol,
        evaluations,
        undecided_midpoints: undecided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AttractorKind;
    use crate::families::{make_family, FamilyId, FamilyKind};

    fn logistic2() -> MapSpec<f64> {
        make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap()
    }

    #[test]
    fn trifurcation_for_0_6_0_3() {
        let cv = locate_transition(
            &logistic2(),
            "a",
            Scheme::F,
            &[0.6, 0.3],
            (12.5, 13.5),
            1e-8,
            &ClassifyConfig::default(),
        )
        .unwrap();
        assert!((cv.midpoint - 13.1986367).abs() < 5e-6, "{}", cv.midpoint);
        assert_eq!(cv.below.kind(), AttractorKind::FixedPoint);
        assert_eq!(cv.above.period(), Some(3));
        assert!(cv.hi - cv.lo < 1e-8);
    }

    #[test]
    fn equal_ends_are_a_bracket_error() {
        let err = locate_transition(
            &logistic2(),
            "a",
            Scheme::F,
            &[0.6, 0.3],
            (12.0, 12.4),
            1e-6,
            &ClassifyConfig::default(),
        )
        .unwrap_err();
        assert!(err.is_numerical());
    }
}
