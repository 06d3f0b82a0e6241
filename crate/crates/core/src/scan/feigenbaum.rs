use super::table::at;
use super::transition::locate_transition;
use crate::analysis::{classify_attractor, ClassifyConfig};
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;

/// Located period-doubling values and the derived gap ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeigenbaumEstimate {
    pub parameter: String,
    pub base_period: usize,
    pub doublings_requested: usize,
    /// `mus[k]` is the transition from period `base·2^k` to `base·2^(k+1)`.
    pub mus: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    /// `(mu_k - mu_{k-1}) / (mu_{k+1} - mu_k)`.
    pub ratios: Vec<f64>,
    /// `mu_k + (mu_k - mu_{k-1}) / (delta - 1)` with the last ratio as delta.
    pub mu_infinity: Option<f64>,
    pub tol: f64,
    pub evaluations: usize,
    /// Set when fewer doublings than requested could be bracketed.
    pub failure: Option<String>,
}

impl FeigenbaumEstimate {
    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn final_ratio(&self) -> Option<f64> {
        self.ratios.last().copied()
    }
}

/// Steps forward from `start` until the period changes from `p` to `2p`.
/// Overshooting to a longer period shrinks the step and retries from the
/// last point with period `p`.
#[allow(clippy::too_many_arguments)]
fn bracket_doubling<R: Real>(
    spec: &MapSpec<R>,
    param: &str,
    scheme: Scheme,
    seeds: &[R],
    p: usize,
    start: f64,
    end: f64,
    mut step: f64,
    config: &ClassifyConfig,
    evaluations: &mut usize,
) -> Result<Option<(f64, f64)>> {
    let mut last_p: Option<f64> = None;
    let mut a = start;
    let mut refinements = 0;
    while a <= end {
        let rep = classify_attractor(&at(spec, param, a)?, scheme, seeds, config)?;
        *evaluations += 1;
        match rep.period() {
            Some(q) if q == p => last_p = Some(a),
            Some(q) if q == 2 * p => {
                if let Some(lo) = last_p {
                    return Ok(Some((lo, a)));
                }
            }
            Some(q) if q > 2 * p && q % p == 0 => {
                if let Some(lo) = last_p {
                    if refinements == 6 {
                        return Ok(None);
                    }
                    refinements += 1;
                    step /= 4.0;
                    a = lo;
                }
            }
            _ => {}
        }
        a += step;
    }
    Ok(None)
}

/// Locates `doublings` successive period doublings starting from period
/// `base_period`, scanning forward through `search` and bisecting each
/// bracket to `tol`.
#[allow(clippy::too_many_arguments)]
pub fn feigenbaum<R: Real>(
    spec: &MapSpec<R>,
    param: &str,
    scheme: Scheme,
    seeds: &[R],
    base_period: usize,
    doublings: usize,
    search: (f64, f64),
    tol: f64,
    config: &ClassifyConfig,
) -> Result<FeigenbaumEstimate> {
    if doublings < 3 {
        return Err(Error::InvalidArgument("at least 3 doublings are needed".into()));
    }
    if base_period == 0 || !(search.0 < search.1) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(
            "need base_period >= 1, lo < hi and tol > 0".into(),
        ));
    }
    at(spec, param, search.0)?;
    let mut est = FeigenbaumEstimate {
        parameter: param.to_string(),
        base_period,
        doublings_requested: doublings,
        mus: Vec::new(),
        brackets: Vec::new(),
        ratios: Vec::new(),
        mu_infinity: None,
        tol,
        evaluations: 0,
        failure: None,
    };
    let coarse = (search.1 - search.0) / 200.0;
    let mut start = search.0;
    for k in 0..doublings {
        let p = base_period << k;
        let step = match est.mus.len() {
            0 | 1 => coarse,
            n => (est.mus[n - 1] - est.mus[n - 2]) / 100.0,
        };
        let found = bracket_doubling(
            spec,
            param,
            scheme,
            seeds,
            p,
            start,
            search.1,
            step,
            config,
            &mut est.evaluations,
        )?;
        let Some(bracket) = found else {
            est.failure = Some(format!(
                "no doubling from period {p} to {} found above {start}",
                2 * p
            ));
            break;
        };
        let cv = match locate_transition(spec, param, scheme, seeds, bracket, tol, config) {
            Ok(cv) => cv,
            Err(e) if e.is_numerical() => {
                est.failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        est.evaluations += cv.evaluations;
        est.mus.push(cv.midpoint);
        est.brackets.push((cv.lo, cv.hi));
        start = bracket.1;
    }
    est.ratios = est
        .mus
        .windows(3)
        .map(|w| (w[1] - w[0]) / (w[2] - w[1]))
        .collect();
    if let (Some(&delta), [.., prev, last]) = (est.ratios.last(), est.mus.as_slice()) {
        est.mu_infinity = Some(last + (last - prev) / (delta - 1.0));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    #[test]
    fn needs_three_doublings() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap();
        let cfg = ClassifyConfig::default();
        assert!(feigenbaum(&spec, "a", Scheme::F, &[0.5, 0.5], 3, 2, (13.0, 13.8), 1e-7, &cfg).is_err());
    }

    #[test]
    fn no_cascade_reports_a_bracket_failure() {
        // Below the trifurcation the orbit stays a fixed point.
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Logistic2)).unwrap();
        let cfg = ClassifyConfig {
            transient: 5000,
            budget: 50_000,
            max_period: 64,
            ..ClassifyConfig::default()
        };
        let est = feigenbaum(&spec, "a", Scheme::F, &[0.5, 0.5], 1, 3, (8.0, 12.0), 1e-6, &cfg).unwrap();
        assert!(!est.complete());
        assert!(est.mus.is_empty());
        assert!(est.mu_infinity.is_none());
    }
}
