//! Shell Minkowski contents, dimensions and fractal zeta functions at
//! infinity for unbounded regions of R^N.

pub mod closed_form;
pub mod content;
pub mod error;
mod quad;
pub mod region;
pub mod report;
pub mod sampling;
pub mod shell;
pub mod sphere;
pub mod stats;
pub mod verify;
pub mod zeta;

pub use quad::{QuadScheme, RuleKind};

pub use error::{Error, Result};
pub use region::{parse_region, region_to_json, MeasureClass, Norm, Region, RegionParams};
