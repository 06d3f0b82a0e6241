//! Closed-form closure conditions for period-3 orbits `(eta, theta, theta)`
//! of the F-iterated map `a x(1-x) y(1-y)`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitResiduals {
    pub eta: f64,
    pub theta: f64,
    /// Residual of the `u_2 = u_5` condition at `(x, y) = (eta, theta)`.
    pub first: f64,
    /// Residual of the `u_1 = u_4` condition at `(x, y) = (theta, eta)`.
    pub second: f64,
    /// `false` when the input did not have the `(eta, theta, theta)` shape
    /// in any rotation within `1e-6`.
    pub shape_ok: bool,
}

/// `u_5 - y` for the sequence starting `x, y`:
/// `a^4 X^2 Y^3 (1 - aXY)^2 {1 - a^2 Y^2 X (1 - aXY)} - y`
/// with `X = x - x^2`, `Y = y - y^2`.
pub fn first_closure(a: f64, x: f64, y: f64) -> f64 {
    let big_x = x - x * x;
    let big_y = y - y * y;
    let u = 1.0 - a * big_x * big_y;
    a.powi(4) * big_x.powi(2) * big_y.powi(3) * u.powi(2) * (1.0 - a * a * big_y.powi(2) * big_x * u) - y
}

/// `u_4 - x` for the sequence starting `x, y`:
/// `a^2 y^2 (1-y)^2 x(1-x) [1 - a x(1-x) y(1-y)] - x`.
pub fn second_closure(a: f64, x: f64, y: f64) -> f64 {
    a * a * y * y * (1.0 - y).powi(2) * x * (1.0 - x) * (1.0 - a * x * (1.0 - x) * y * (1.0 - y)) - x
}

/// Rotates `orbit` to the `(eta, theta, theta)` shape and evaluates both
/// closure conditions.
pub fn verify_orbit_equations(a: f64, orbit: [f64; 3]) -> OrbitResiduals {
    let shaped = (0..3)
        .map(|r| [orbit[r], orbit[(r + 1) % 3], orbit[(r + 2) % 3]])
        .find(|o| (o[1] - o[2]).abs() < 1e-6);
    let shape_ok = shaped.is_some();
    let o = shaped.unwrap_or(orbit);
    let (eta, theta) = (o[0], o[1]);
    OrbitResiduals {
        eta,
        theta,
        first: first_closure(a, eta, theta),
        second: second_closure(a, theta, eta),
        shape_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 12.782842212;
    const ETA: f64 = 0.7973063104767419;
    const THETA: f64 = 0.515931143419749;

    #[test]
    fn known_orbit_in_every_rotation() {
        for orbit in [[ETA, THETA, THETA], [THETA, ETA, THETA], [THETA, THETA, ETA]] {
            let r = verify_orbit_equations(A, orbit);
            assert!(r.shape_ok);
            assert_eq!(r.eta, ETA);
            assert!(r.first.abs() < 1e-8 && r.second.abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn fixed_point_satisfies_both() {
        // a r (1-r)^2 = 1 at the nonzero fixed points.
        let a = 13.0;
        let (mut lo, mut hi) = (1.0f64 / 3.0, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if a * mid * (1.0 - mid).powi(2) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = verify_orbit_equations(a, [lo; 3]);
        assert!(r.first.abs() < 1e-10 && r.second.abs() < 1e-10);
    }

    #[test]
    fn random_triple_fails() {
        let r = verify_orbit_equations(A, [0.3, 0.6, 0.6]);
        assert!(r.first.abs() > 1e-3);
        assert!(!verify_orbit_equations(A, [0.1, 0.2, 0.3]).shape_ok);
    }
}
