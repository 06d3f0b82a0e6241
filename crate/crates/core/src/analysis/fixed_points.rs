//! Fixed points on the diagonal: roots of `h(x) = f(x, .., x) - x`.

use super::classify::{classify_attractor, Attractor, ClassifyConfig};
use super::stability::diagonal_multipliers;
use crate::engine::{MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bisection stops once the bracket is this narrow.
pub const ROOT_WIDTH: f64 = 1e-14;
/// Grid values of `|h|` below this are probed for tangential roots.
pub const TANGENT_PROBE: f64 = 1e-6;
/// A root is accepted only with `|h| <` this.
pub const MAX_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    /// More than 99% of sampled seeds converge to the point.
    AttractingSampled,
    /// Between 1% and 99% of sampled seeds, or fewer but linearly stable.
    SemiStable,
    /// Almost no sampled seed converges, and the point is a saddle.
    SemiInstable,
    Repelling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointInfo<R> {
    pub value: R,
    pub residual: f64,
    pub stability: Option<StabilityClass>,
    /// Fraction of sampled seeds attracted, once assessed.
    pub basin_fraction: Option<f64>,
}

fn diagonal_residual<R: Real>(spec: &MapSpec<R>, x: R, probe: &mut [R], stack: &mut [R]) -> R {
    probe.fill(x);
    spec.components()[0].eval_with(probe, spec.parameters(), stack) - x
}

/// Roots of `f(x, .., x) = x` in `[lo, hi]` for a single-component map,
/// sorted ascending. Sign changes on a uniform grid are bisected; local
/// minima of `|h|` without a sign change are refined by golden-section
/// search to catch tangential roots.
pub fn diagonal_fixed_points<R: Real>(
    spec: &MapSpec<R>,
    interval: (R, R),
    grid: usize,
) -> Result<Vec<FixedPointInfo<R>>> {
    if spec.m() != 1 {
        return Err(Error::Unsupported(format!(
            "diagonal fixed points need m = 1, got m = {}",
            spec.m()
        )));
    }
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::InvalidArgument("interval must satisfy lo < hi".into()));
    }
    let grid = grid.max(2);
    let mut probe = vec![R::zero(); spec.n()];
    let mut stack = vec![R::zero(); spec.components()[0].max_stack()];
    let mut h = |x: R| diagonal_residual(spec, x, &mut probe, &mut stack);
    let step = (hi - lo) / R::from_usize(grid).unwrap();
    let xs: Vec<R> = (0..=grid)
        .map(|i| if i == grid { hi } else { lo + step * R::from_usize(i).unwrap() })
        .collect();
    let hs: Vec<R> = xs.iter().map(|&x| h(x)).collect();

    let mut roots: Vec<R> = Vec::new();
    for i in 0..=grid {
        if hs[i] == R::zero() {
            roots.push(xs[i]);
        }
        if i < grid && hs[i] * hs[i + 1] < R::zero() {
            roots.push(bisect(&mut h, xs[i], xs[i + 1], hs[i]));
        }
    }
    for i in 1..grid {
        let (a, b, c) = (hs[i - 1].abs(), hs[i].abs(), hs[i + 1].abs());
        let sign_change = hs[i - 1] * hs[i] <= R::zero() || hs[i] * hs[i + 1] <= R::zero();
        if !sign_change && b <= a && b <= c && b.to_f64_lossy() < TANGENT_PROBE {
            roots.push(golden_min(&mut h, xs[i - 1], xs[i + 1]));
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<FixedPointInfo<R>> = Vec::new();
    for x in roots {
        let residual = h(x).abs().to_f64_lossy();
        if !(residual < MAX_RESIDUAL) {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if (x - last.value).abs().to_f64_lossy() < 1e-9 {
                if residual < last.residual {
                    last.value = x;
                    last.residual = residual;
                }
                continue;
            }
        }
        out.push(FixedPointInfo {
            value: x,
            residual,
            stability: None,
            basin_fraction: None,
        });
    }
    Ok(out)
}

fn bisect<R: Real>(h: &mut impl FnMut(R) -> R, mut a: R, mut b: R, mut ha: R) -> R {
    let width = R::from_real(ROOT_WIDTH);
    let two = R::from_real(2.0);
    while b - a > width {
        let mid = (a + b) / two;
        if mid <= a || mid >= b {
            break;
        }
        let hm = h(mid);
        if hm == R::zero() {
            return mid;
        }
        if ha * hm < R::zero() {
            b = mid;
        } else {
            a = mid;
            ha = hm;
        }
    }
    let hb = h(b);
    if ha.abs() <= hb.abs() {
        a
    } else {
        b
    }
}

fn golden_min<R: Real>(h: &mut impl FnMut(R) -> R, mut a: R, mut b: R) -> R {
    let ratio = R::from_real(0.618_033_988_749_894_9);
    let width = R::from_real(ROOT_WIDTH);
    let mut c = b - (b - a) * ratio;
    let mut d = a + (b - a) * ratio;
    let mut fc = h(c).abs();
    let mut fd = h(d).abs();
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * ratio;
            fc = h(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * ratio;
            fd = h(d).abs();
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Assigns an empirical stability class to each fixed point by classifying
/// `samples` random seeds from the open unit hypercube.
///
/// A point counts as attracting a seed when the seed's trajectory is a
/// fixed point within `1e-6` of it. Classes:
/// fraction > 99% is attracting; 1%..99% semi-stable; below 1% semi-stable
/// if all multipliers lie inside the unit circle, semi-instable if some do
/// and some do not, repelling otherwise.
pub fn assess_stability<R: Real>(
    spec: &MapSpec<R>,
    scheme: Scheme,
    points: &mut [FixedPointInfo<R>],
    samples: usize,
    config: &ClassifyConfig,
    rng_seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = spec.n();
    let seeds: Vec<Vec<R>> = (0..samples)
        .map(|_| {
            (0..n)
                .map(|_| R::from_real(rng.gen_range(f64::EPSILON..1.0)))
                .collect()
        })
        .collect();
    let limits: Vec<Option<R>> = seeds
        .par_iter()
        .map(|s| {
            classify_attractor(spec, scheme, s, config).map(|rep| match rep.attractor {
                Attractor::FixedPoint { value } => Some(value),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    for fp in points.iter_mut() {
        let hits = limits
            .iter()
            .filter(|l| l.is_some_and(|v| (v - fp.value).abs().to_f64_lossy() < 1e-6))
            .count();
        let fraction = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
        let class = if fraction > 0.99 {
            StabilityClass::AttractingSampled
        } else if fraction >= 0.01 {
            StabilityClass::SemiStable
        } else {
            let mult = diagonal_multipliers(spec, fp.value)?;
            let inside = mult.iter().filter(|z| z.norm() < 1.0).count();
            if inside == mult.len() {
                StabilityClass::SemiStable
            } else if inside > 0 {
                StabilityClass::SemiInstable
            } else {
                StabilityClass::Repelling
            }
        };
        fp.stability = Some(class);
        fp.basin_fraction = Some(fraction);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    fn logistic2(a: f64) -> MapSpec<f64> {
        make_family(&FamilyId::new(FamilyKind::Logistic2).with("a", a).unwrap()).unwrap()
    }

    /// Root of `a x (1-x)^2 = 1` on `[lo, hi]` by plain bisection on the
    /// expanded cubic `a x^3 - 2a x^2 + a x - 1`.
    fn cubic_root(a: f64, mut lo: f64, mut hi: f64) -> f64 {
        let c = |x: f64| a * x * x * x - 2.0 * a * x * x + a * x - 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c(lo) * c(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn three_roots_at_13_5() {
        let fps = diagonal_fixed_points(&logistic2(13.5), (0.0, 1.0), 10_000).unwrap();
        let v: Vec<f64> = fps.iter().map(|f| f.value).collect();
        assert_eq!(v.len(), 3, "{v:?}");
        assert_eq!(v[0], 0.0);
        let r1 = cubic_root(13.5, 0.0, 1.0 / 3.0);
        assert!((v[1] - r1).abs() < 1e-13);
        assert!((v[1] - 0.0893164).abs() < 1e-7);
        assert!((v[2] - 2.0 / 3.0).abs() < 1e-13);
        assert!(fps.iter().all(|f| f.residual < 1e-12));
    }

    #[test]
    fn only_origin_at_a_5() {
        let fps = diagonal_fixed_points(&logistic2(5.0), (0.0, 1.0), 10_000).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].value, 0.0);
    }

    #[test]
    fn tangential_root_at_6_75() {
        // 6.75 x (1-x)^2 = 1 has a double root at x = 1/3: no sign change.
        let fps = diagonal_fixed_points(&logistic2(6.75), (0.0, 1.0), 1000).unwrap();
        assert_eq!(fps.len(), 2, "{fps:?}");
        assert!((fps[1].value - 1.0 / 3.0).abs() < 1e-6);
        assert!(fps[1].residual < 1e-12);
    }

    #[test]
    fn origin_is_always_a_root() {
        for kind in [FamilyKind::Logistic3, FamilyKind::Sine2, FamilyKind::Sum2] {
            let spec: MapSpec<f64> = make_family(&FamilyId::new(kind)).unwrap();
            let fps = diagonal_fixed_points(&spec, (0.0, 1.0), 1000).unwrap();
            assert!(fps[0].value.abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn stability_classes_at_13() {
        let spec = logistic2(13.0);
        let mut fps = diagonal_fixed_points(&spec, (0.0, 1.0), 10_000).unwrap();
        let cfg = ClassifyConfig {
            transient: 3000,
            max_period: 16,
            budget: 30_000,
            ..ClassifyConfig::default()
        };
        assess_stability(&spec, Scheme::F, &mut fps, 300, &cfg, 1).unwrap();
        assert_eq!(fps[1].stability, Some(StabilityClass::SemiInstable));
        assert_eq!(fps[2].stability, Some(StabilityClass::SemiStable));
        assert!(fps[2].basin_fraction.unwrap() > 0.01);
    }
}
