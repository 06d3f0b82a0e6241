//! Basin-of-attraction and escape-time rasters.

mod basin;
mod escape;
mod grid;

pub use basin::{
    basin_map, count_alternations, label_for_report, ray_labels, BasinCell, BasinLabel,
    BasinRaster, DiagonalRoots, LABEL_MATCH,
};
pub use escape::{
    escape_count, escape_raster, EscapeMode, EscapeRaster, DEFAULT_ESCAPE_RADIUS,
    DEFAULT_MAX_ITER,
};
pub use grid::{Coord, GridSpec, Region};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool
/// when `None`. Raster and sweep output does not depend on the pool size.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("thread count must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
