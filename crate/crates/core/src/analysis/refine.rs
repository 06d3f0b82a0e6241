//! Newton refinement of periodic orbits by shooting on the seed window.

use crate::engine::{IterState, MapSpec, Scheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;

pub const REFINE_TOL: f64 = 1e-13;
pub const REFINE_MAX_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedOrbit<R> {
    /// One period of the orbit, starting at a scalar produced by the first
    /// component. Unchanged from the input when the Jacobian was singular.
    pub values: Vec<R>,
    /// Closure residual `max |u_{P+i} - u_i|` over the window.
    pub residual: f64,
    pub initial_residual: f64,
    pub converged: bool,
    pub singular: bool,
    pub steps: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Iterates `len` scalars forward from `window`. `None` on divergence.
fn shoot<R: Real>(spec: &MapSpec<R>, scheme: Scheme, window: &[R], len: usize) -> Option<Vec<R>> {
    let mut st = IterState::new(spec, scheme, window).ok()?;
    let mut out = Vec::with_capacity(len + spec.m());
    while out.len() < len {
        out.extend_from_slice(st.step(spec));
        if st.diverged() {
            return None;
        }
    }
    out.truncate(len);
    Some(out)
}

/// `G(w) = u_{P+1..P+n} - w`, where `u` continues the window `w`.
fn closure<R: Real>(spec: &MapSpec<R>, scheme: Scheme, w: &[R], period: usize) -> Option<Vec<R>> {
    let n = w.len();
    let run = shoot(spec, scheme, w, period)?;
    // The last n scalars of the run are the window after one period.
    let mut full = w.to_vec();
    full.extend_from_slice(&run);
    Some((0..n).map(|i| full[period + i] - w[i]).collect())
}

fn max_abs<R: Real>(v: &[R]) -> f64 {
    v.iter().map(|x| x.abs().to_f64_lossy()).fold(0.0, f64::max)
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// Returns `false` when a pivot vanishes relative to the matrix scale.
fn solve<R: Real>(a: &mut [Vec<R>], b: &mut [R]) -> bool {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.abs().to_f64_lossy())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return false;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if !(a[piv][col].abs().to_f64_lossy() > 1e-13 * scale) {
            return false;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (dst, &src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst = *dst - f * src;
            }
            let t = b[col];
            b[row] = b[row] - f * t;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s = s - a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    true
}

/// Refines an approximate periodic orbit of `p` scalars.
///
/// The unknowns are the `n` scalars preceding the orbit. They are iterated
/// forward `P = lcm(p, m)` scalars, and damped Newton drives the closure
/// `u_{P+i} = u_i, i = 1..n` below [`REFINE_TOL`]. The Jacobian is taken by
/// central differences.
pub fn refine_orbit<R: Real>(spec: &MapSpec<R>, scheme: Scheme, orbit: &[R]) -> Result<RefinedOrbit<R>> {
    let p = orbit.len();
    if p == 0 {
        return Err(Error::InvalidArgument("orbit must hold at least one value".into()));
    }
    let n = spec.n();
    let m = spec.m();
    let period = p / gcd(p, m) * m;
    let mut w: Vec<R> = (0..n)
        .map(|i| orbit[(((i as isize - n as isize) % p as isize + p as isize) % p as isize) as usize])
        .collect();
    let unrefined = |residual, singular, steps| RefinedOrbit {
        values: orbit.to_vec(),
        residual,
        initial_residual: residual,
        converged: false,
        singular,
        steps,
    };
    let Some(mut g) = closure(spec, scheme, &w, period) else {
        return Ok(unrefined(f64::INFINITY, false, 0));
    };
    let initial = max_abs(&g);
    let mut res = initial;
    let mut steps = 0;
    let mut singular = false;
    while res >= REFINE_TOL && steps < REFINE_MAX_STEPS {
        steps += 1;
        let mut jac = vec![vec![R::zero(); n]; n];
        for j in 0..n {
            let h = R::from_real(1e-7 * w[j].abs().to_f64_lossy().max(1.0));
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] = w[j] + h;
            wm[j] = w[j] - h;
            let (Some(gp), Some(gm)) = (closure(spec, scheme, &wp, period), closure(spec, scheme, &wm, period))
            else {
                singular = true;
                break;
            };
            for i in 0..n {
                jac[i][j] = (gp[i] - gm[i]) / (h + h);
            }
        }
        let mut delta: Vec<R> = g.iter().map(|&v| -v).collect();
        if singular || !solve(&mut jac, &mut delta) {
            singular = true;
            break;
        }
        let mut lambda = R::one();
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<R> = w.iter().zip(&delta).map(|(&a, &d)| a + lambda * d).collect();
            if let Some(gt) = closure(spec, scheme, &trial, period) {
                let rt = max_abs(&gt);
                if rt < res {
                    w = trial;
                    g = gt;
                    res = rt;
                    improved = true;
                    break;
                }
            }
            lambda = lambda / R::from_real(2.0);
        }
        if !improved {
            break;
        }
    }
    if singular && steps == 1 {
        return Ok(RefinedOrbit {
            initial_residual: initial,
            ..unrefined(initial, true, steps)
        });
    }
    let run = shoot(spec, scheme, &w, period).unwrap_or_default();
    let values = if run.len() >= p { run[..p].to_vec() } else { orbit.to_vec() };
    Ok(RefinedOrbit {
        values,
        residual: res,
        initial_residual: initial,
        converged: res < REFINE_TOL,
        singular,
        steps,
    })
}
