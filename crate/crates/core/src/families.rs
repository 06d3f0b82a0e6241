//! Catalog of named map families.
//!
//! | name            | (n, m) | components                                         |
//! |-----------------|--------|----------------------------------------------------|
//! | `logistic2`     | (2, 1) | `a x(1-x) y(1-y)`                                  |
//! | `logistic3`     | (3, 1) | `a x(1-x) y(1-y) z(1-z)`                           |
//! | `sine2`         | (2, 1) | `a sin(pi x) sin(pi y)`                            |
//! | `sum2`          | (2, 1) | `a [x(1-x) + y(1-y)]`                              |
//! | `bilinear-c`    | (2, 1) | `z w + c`                                          |
//! | `biquadratic-c` | (2, 1) | `z^2 w^2 + c`                                      |
//! | `twoparam32`    | (3, 2) | `a x(1-x)y(1-y)z(1-z)`, `b sin(pi x)sin(pi y)sin(pi z)` |

use crate::engine::MapSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Logistic2,
    Logistic3,
    Sine2,
    Sum2,
    BilinearC,
    BiquadraticC,
    Twoparam32,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Logistic2,
        FamilyKind::Logistic3,
        FamilyKind::Sine2,
        FamilyKind::Sum2,
        FamilyKind::BilinearC,
        FamilyKind::BiquadraticC,
        FamilyKind::Twoparam32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Logistic2 => "logistic2",
            FamilyKind::Logistic3 => "logistic3",
            FamilyKind::Sine2 => "sine2",
            FamilyKind::Sum2 => "sum2",
            FamilyKind::BilinearC => "bilinear-c",
            FamilyKind::BiquadraticC => "biquadratic-c",
            FamilyKind::Twoparam32 => "twoparam32",
        }
    }

    /// `(n, m)`
    pub fn dims(self) -> (usize, usize) {
        match self {
            FamilyKind::Logistic3 => (3, 1),
            FamilyKind::Twoparam32 => (3, 2),
            _ => (2, 1),
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::BilinearC | FamilyKind::BiquadraticC => &["c"],
            FamilyKind::Twoparam32 => &["a", "b"],
            _ => &["a"],
        }
    }

    /// Catalog default for each parameter, as (re, im).
    pub fn default_parameters(self) -> Vec<(f64, f64)> {
        match self {
            FamilyKind::Logistic2 => vec![(13.0, 0.0)],
            FamilyKind::Logistic3 => vec![(50.0, 0.0)],
            FamilyKind::Sine2 => vec![(0.8, 0.0)],
            FamilyKind::Sum2 => vec![(2.0, 0.0)],
            FamilyKind::BilinearC | FamilyKind::BiquadraticC => vec![(0.0, 0.0)],
            FamilyKind::Twoparam32 => vec![(38.0, 0.0), (0.8, 0.0)],
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, FamilyKind::BilinearC | FamilyKind::BiquadraticC)
    }

    pub fn sources(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Logistic2 => &["a*x*(1-x)*y*(1-y)"],
            FamilyKind::Logistic3 => &["a*x*(1-x)*y*(1-y)*z*(1-z)"],
            FamilyKind::Sine2 => &["a*sin(pi*x)*sin(pi*y)"],
            FamilyKind::Sum2 => &["a*(x*(1-x) + y*(1-y))"],
            FamilyKind::BilinearC => &["z*w + c"],
            FamilyKind::BiquadraticC => &["z^2*w^2 + c"],
            FamilyKind::Twoparam32 => &[
                "a*x*(1-x)*y*(1-y)*z*(1-z)",
                "b*sin(pi*x)*sin(pi*y)*sin(pi*z)",
            ],
        }
    }

    /// `true` when every component vanishes on the boundary of the unit
    /// hypercube.
    pub fn vanishes_on_boundary(self) -> bool {
        matches!(
            self,
            FamilyKind::Logistic2 | FamilyKind::Logistic3 | FamilyKind::Sine2 | FamilyKind::Twoparam32
        )
    }

    fn check_domain(self, name: &str, re: f64, im: f64) -> Result<()> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::ParameterDomain(format!("{name} must be finite")));
        }
        if self.is_complex() {
            return Ok(());
        }
        if im != 0.0 {
            return Err(Error::ParameterDomain(format!(
                "{} takes a real `{name}`",
                self.name()
            )));
        }
        let ok = match (self, name) {
            (FamilyKind::Logistic2, _) => re > 0.0 && re < 16.0,
            (FamilyKind::Logistic3, _) | (FamilyKind::Twoparam32, "a") => re > 0.0 && re <= 64.0,
            (FamilyKind::Sine2, _) | (FamilyKind::Twoparam32, _) => re > 0.0 && re <= 1.0,
            (FamilyKind::Sum2, _) => re > 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            let range = match (self, name) {
                (FamilyKind::Logistic2, _) => "0 < a < 16",
                (FamilyKind::Logistic3, _) | (FamilyKind::Twoparam32, "a") => "0 < a <= 64",
                (FamilyKind::Twoparam32, _) => "0 < b <= 1",
                (FamilyKind::Sine2, _) => "0 < a <= 1",
                _ => "a > 0",
            };
            Err(Error::ParameterDomain(format!(
                "{} requires {range}, got {name} = {re}",
                self.name()
            )))
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// A family plus its parameter bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyId {
    pub kind: FamilyKind,
    /// One `(re, im)` pair per entry of [`FamilyKind::parameter_names`].
    pub params: Vec<(f64, f64)>,
}

impl FamilyId {
    /// Family with its catalog default parameters.
    pub fn new(kind: FamilyKind) -> Self {
        FamilyId {
            kind,
            params: kind.default_parameters(),
        }
    }

    /// Looks a family up by name.
    pub fn named(name: &str) -> Result<Self> {
        Ok(FamilyId::new(name.parse()?))
    }

    /// Binds a real parameter value.
    pub fn with(self, name: &str, value: f64) -> Result<Self> {
        self.with_complex(name, value, 0.0)
    }

    pub fn with_complex(mut self, name: &str, re: f64, im: f64) -> Result<Self> {
        let k = self
            .kind
            .parameter_names()
            .iter()
            .position(|p| *p == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        self.params[k] = (re, im);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.kind.parameter_names();
        if self.params.len() != names.len() {
            return Err(Error::LengthMismatch {
                what: "family parameters",
                expected: names.len(),
                got: self.params.len(),
            });
        }
        for (name, &(re, im)) in names.iter().zip(&self.params) {
            self.kind.check_domain(name, re, im)?;
        }
        Ok(())
    }
}

/// Builds the map for a catalog family.
pub fn make_family<S: Scalar>(id: &FamilyId) -> Result<MapSpec<S>> {
    id.validate()?;
    let kind = id.kind;
    let names = kind.parameter_names();
    let mut bound = Vec::with_capacity(names.len());
    for (name, &(re, im)) in names.iter().zip(&id.params) {
        let v = S::from_parts(re, im).ok_or_else(|| {
            Error::Unsupported(format!(
                "{} parameter {name} = {re}{im:+}i needs a complex scalar type",
                kind.name()
            ))
        })?;
        bound.push((*name, v));
    }
    let (n, m) = kind.dims();
    let spec = MapSpec::from_sources(n, kind.sources(), &bound)?;
    debug_assert_eq!((spec.n(), spec.m()), (n, m));
    Ok(spec.with_family(kind))
}

/// Closed-form partial derivatives of single-component catalog families at
/// `point`, or `None` when no closed form is catalogued.
pub fn analytic_partials<S: Scalar>(spec: &MapSpec<S>, point: &[S]) -> Option<Vec<S>> {
    let kind = spec.family()?;
    if point.len() != spec.n() {
        return None;
    }
    let one = S::one();
    let two = S::from_real(2.0);
    let q = |x: S| x * (one - x);
    let dq = |x: S| one - two * x;
    match kind {
        FamilyKind::Logistic2 | FamilyKind::Logistic3 => {
            let a = spec.param("a")?;
            Some(
                (0..point.len())
                    .map(|i| {
                        point
                            .iter()
                            .enumerate()
                            .fold(a, |acc, (k, &x)| acc * if k == i { dq(x) } else { q(x) })
                    })
                    .collect(),
            )
        }
        FamilyKind::Sine2 => {
            let a = spec.param("a")?;
            let pi = S::from_real(PI);
            let (x, y) = (point[0], point[1]);
            Some(vec![
                a * pi * (pi * x).cosine() * (pi * y).sine(),
                a * pi * (pi * x).sine() * (pi * y).cosine(),
            ])
        }
        FamilyKind::Sum2 => {
            let a = spec.param("a")?;
            Some(vec![a * dq(point[0]), a * dq(point[1])])
        }
        FamilyKind::BilinearC => Some(vec![point[1], point[0]]),
        FamilyKind::BiquadraticC => {
            let (z, w) = (point[0], point[1]);
            Some(vec![two * z * w * w, two * z * z * w])
        }
        FamilyKind::Twoparam32 => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn logistic2_at_two_thirds() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Logistic2).with("a", 13.5).unwrap()).unwrap();
        let v = spec.eval(&[2.0 / 3.0, 2.0 / 3.0]).unwrap()[0];
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bilinear_at_unit_inputs() {
        let spec: MapSpec<Complex64> = make_family(&FamilyId::new(FamilyKind::BilinearC)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(spec.eval(&[one, one]).unwrap()[0], one);
    }

    #[test]
    fn dimensions() {
        for kind in FamilyKind::ALL {
            let spec: MapSpec<Complex64> = make_family(&FamilyId::new(kind)).unwrap();
            assert_eq!((spec.n(), spec.m()), kind.dims(), "{kind}");
        }
        let spec: MapSpec<f64> =
            make_family(&FamilyId::new(FamilyKind::Logistic3).with("a", 54.746).unwrap()).unwrap();
        assert_eq!((spec.n(), spec.m()), (3, 1));
    }

    #[test]
    fn domain_checks() {
        let bad = FamilyId::new(FamilyKind::Logistic2).with("a", 16.0).unwrap();
        assert!(matches!(make_family::<f64>(&bad), Err(Error::ParameterDomain(_))));
        let bad = FamilyId::new(FamilyKind::Logistic2).with("a", 0.0).unwrap();
        assert!(make_family::<f64>(&bad).is_err());
        let ok = FamilyId::new(FamilyKind::Logistic3).with("a", 64.0).unwrap();
        assert!(make_family::<f64>(&ok).is_ok());
        assert!(matches!(FamilyId::named("henon"), Err(Error::UnknownFamily(_))));
        assert!(FamilyId::new(FamilyKind::Logistic2).with("b", 1.0).is_err());
        let c = FamilyId::new(FamilyKind::BilinearC)
            .with_complex("c", 0.1, 0.2)
            .unwrap();
        assert!(matches!(make_family::<f64>(&c), Err(Error::Unsupported(_))));
        assert!(make_family::<Complex64>(&c).is_ok());
    }

    fn boundary_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for mask in 0..(1usize << n) {
            pts.push((0..n).map(|i| ((mask >> i) & 1) as f64).collect());
        }
        for _ in 0..100 {
            let mut p: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let i = rng.gen_range(0..n);
            p[i] = if rng.gen_bool(0.5) { 0.0 } else { 1.0 };
            pts.push(p);
        }
        pts
    }

    #[test]
    fn boundary_vanishing() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [FamilyKind::Logistic2, FamilyKind::Logistic3, FamilyKind::Sine2] {
            let spec: MapSpec<f64> = make_family(&FamilyId::new(kind)).unwrap();
            for p in boundary_points(spec.n(), &mut rng) {
                let v = spec.eval(&p).unwrap()[0];
                // sin(pi) is 1.2e-16, not 0
                assert!(v.abs() < 1e-15, "{kind} at {p:?} gives {v}");
            }
        }
    }

    #[test]
    fn sum2_does_not_vanish_on_edges() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Sum2)).unwrap();
        assert!(spec.eval(&[0.5, 0.0]).unwrap()[0] != 0.0);
        assert!(spec.eval(&[0.0, 0.5]).unwrap()[0] != 0.0);
        assert!(!FamilyKind::Sum2.vanishes_on_boundary());
    }

    #[test]
    fn analytic_partials_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for kind in [
            FamilyKind::Logistic2,
            FamilyKind::Logistic3,
            FamilyKind::Sine2,
            FamilyKind::Sum2,
        ] {
            let spec: MapSpec<f64> = make_family(&FamilyId::new(kind)).unwrap();
            for _ in 0..100 {
                let p: Vec<f64> = (0..spec.n()).map(|_| rng.gen_range(0.01..0.99)).collect();
                let exact = analytic_partials(&spec, &p).unwrap();
                for i in 0..spec.n() {
                    let mut hi = p.clone();
                    let mut lo = p.clone();
                    hi[i] += h;
                    lo[i] -= h;
                    let fd = (spec.eval(&hi).unwrap()[0] - spec.eval(&lo).unwrap()[0]) / (2.0 * h);
                    assert!((fd - exact[i]).abs() < 1e-6, "{kind} d{i} at {p:?}");
                }
            }
        }
    }
}
