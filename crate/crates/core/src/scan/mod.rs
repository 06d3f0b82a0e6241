//! Parameter sweeps, transition location, Feigenbaum ratios, seed probing and
//! the generalized Sharkovsky ordering.

mod feigenbaum;
mod probe;
mod sharkovsky;
mod table;
mod transition;

pub use feigenbaum::{feigenbaum, FeigenbaumEstimate};
pub use probe::{probe_seeds, seed_grid, SeedHit, SeedProbe};
pub use sharkovsky::{sharkovsky_chain, sharkovsky_compare, sharkovsky_key};
pub use table::{period_table, PeriodRow, PeriodTable};
pub use transition::{locate_transition, CriticalValue};
