//! Maximum independent set of d-directional convex polygons: exact
//! geometry, maximal extension, charging, fence-based recursive partitions
//! and the container dynamic program.

pub mod charging;
pub mod containers;
pub mod dp;
pub mod error;
pub mod extension;
pub mod geom;
pub mod grid;
pub mod instance;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod partitioner;

pub use error::{Error, GeomError, Result};
pub use instance::Instance;
