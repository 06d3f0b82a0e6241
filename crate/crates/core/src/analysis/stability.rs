use crate::engine::MapSpec;
use crate::error::{Error, Result};
use crate::families::analytic_partials;
use crate::scalar::Real;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Step for central differences when no closed form is catalogued.
pub const FD_STEP: f64 = 1e-6;

/// Partial derivatives of a single-component map at `point`.
pub fn stability_partials<R: Real>(spec: &MapSpec<R>, point: &[R]) -> Result<Vec<R>> {
    if spec.m() != 1 {
        return Err(Error::Unsupported(format!(
            "partials need a single-component map, got m = {}",
            spec.m()
        )));
    }
    if point.len() != spec.n() {
        return Err(Error::LengthMismatch {
            what: "point coordinates",
            expected: spec.n(),
            got: point.len(),
        });
    }
    if let Some(p) = analytic_partials(spec, point) {
        return Ok(p);
    }
    finite_difference_partials(spec, point)
}

/// Central-difference partials with step [`FD_STEP`].
pub fn finite_difference_partials<R: Real>(spec: &MapSpec<R>, point: &[R]) -> Result<Vec<R>> {
    let h = R::from_real(FD_STEP);
    let two_h = h + h;
    let mut probe = point.to_vec();
    (0..point.len())
        .map(|i| {
            probe[i] = point[i] + h;
            let hi = spec.eval_component(0, &probe)?;
            probe[i] = point[i] - h;
            let lo = spec.eval_component(0, &probe)?;
            probe[i] = point[i];
            Ok((hi - lo) / two_h)
        })
        .collect()
}

/// Multipliers of the diagonal fixed point `(v, .., v)` of a single-component
/// map: eigenvalues of the companion matrix of the sliding-window map
/// `(x_1..x_n) -> (x_2..x_n, f(x))`.
pub fn diagonal_multipliers<R: Real>(spec: &MapSpec<R>, value: R) -> Result<Vec<Complex64>> {
    let n = spec.n();
    let partials = stability_partials(spec, &vec![value; n])?;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        jac[(i, i + 1)] = 1.0;
    }
    for (j, d) in partials.iter().enumerate() {
        jac[(n - 1, j)] = d.to_f64_lossy();
    }
    Ok(jac.complex_eigenvalues().iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilyId, FamilyKind};

    fn logistic2(a: f64) -> MapSpec<f64> {
        make_family(&FamilyId::new(FamilyKind::Logistic2).with("a", a).unwrap()).unwrap()
    }

    #[test]
    fn partials_at_the_last_trifurcation() {
        let spec = logistic2(13.5);
        let (t, o) = (2.0 / 3.0, 1.0 / 3.0);
        for (pt, want) in [
            ([t, t], [-1.0, -1.0]),
            ([o, o], [1.0, 1.0]),
            ([t, o], [-1.0, 1.0]),
            ([o, t], [1.0, -1.0]),
        ] {
            let d = stability_partials(&spec, &pt).unwrap();
            assert!((d[0] - want[0]).abs() < 1e-12 && (d[1] - want[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_differences_at_a_corner() {
        // Along the edges f vanishes; at the corner (1, 1) the polynomial
        // extension gives partials a*(1-2x)*y(1-y) = 0 in both directions.
        let spec = MapSpec::from_sources(2, &["13.5*x*(1-x)*y*(1-y)"], &[]).unwrap();
        let d = stability_partials(&spec, &[1.0f64, 1.0]).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-9));
        let d = stability_partials(&spec, &[0.0f64, 0.5]).unwrap();
        assert!((d[0] - 13.5 * 0.25).abs() < 1e-6 && d[1].abs() < 1e-9);
    }

    #[test]
    fn multipliers_on_the_unit_circle_at_13_5() {
        let mult = diagonal_multipliers(&logistic2(13.5), 2.0 / 3.0).unwrap();
        assert_eq!(mult.len(), 2);
        for z in mult {
            assert!((z.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_vector_maps() {
        let spec: MapSpec<f64> = make_family(&FamilyId::new(FamilyKind::Twoparam32)).unwrap();
        assert!(stability_partials(&spec, &[0.5, 0.5, 0.5]).is_err());
    }
}
