//! Configuration spaces of N equal spheres touching a central unit sphere.

pub mod config;
pub mod criticality;
pub mod error;
pub mod geom;
pub mod lp;
pub mod maximin;
pub mod moves;
pub mod perm;
pub mod tammes;
pub mod topology;

pub use error::{Error, Result};
