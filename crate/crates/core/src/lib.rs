//! Exact failure-probability bounds, design construction and Monte Carlo
//! estimation for non-adaptive group testing with random designs.

pub mod asymptotics;
pub mod bounds;
pub mod designs;
pub mod error;
pub mod exactcomb;
pub mod itemset;
pub mod renyi;
pub mod simulate;
pub mod tables;

pub use bounds::{ClampMode, GammaBound, LieSpec, PriorSpec, TargetSpace};
pub use designs::{Design, ImprovedOptions, Seed};
pub use error::{Error, Result};
pub use itemset::ItemSet;
pub use renyi::{DesignDist, ModelSpec};
pub use simulate::{Decoder, SimConfig, SimResult};
pub use tables::TableId;
