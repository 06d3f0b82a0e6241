//! Fixed points, attractor classification, stability and orbit refinement.

mod classify;
mod fixed_points;
mod orbit_equations;
mod refine;
mod stability;

pub use classify::{
    classify_attractor, Attractor, AttractorKind, AttractorReport, ClassifyConfig, WINDOW_FACTOR,
};
pub use fixed_points::{
    assess_stability, diagonal_fixed_points, FixedPointInfo, StabilityClass, MAX_RESIDUAL,
    ROOT_WIDTH, TANGENT_PROBE,
};
pub use orbit_equations::{first_closure, second_closure, verify_orbit_equations, OrbitResiduals};
pub use refine::{refine_orbit, RefinedOrbit, REFINE_MAX_STEPS, REFINE_TOL};
pub use stability::{diagonal_multipliers, finite_difference_partials, stability_partials, FD_STEP};
