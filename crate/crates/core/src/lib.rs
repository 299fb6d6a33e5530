//! Exact toric geometry of simplicial complete threefolds: class groups,
//! positivity, line bundle cohomology, regularity, Cox ring multiplication
//! and Noether-Lefschetz bounds.

pub mod catalog;
pub mod cohomology;
pub mod cox;
pub mod divisor;
pub mod error;
pub mod fan;
pub mod lattice;
pub mod nl;
pub mod regularity;

pub use catalog::{load_catalog, verify_catalog, CatalogEntry, CATALOG_NAMES};
pub use cohomology::{cohomology, graded_cohomology, h0, CohomologyTable};
pub use divisor::{ClassGroup, DivisorClass, Positivity, ToricVariety};
pub use error::{Result, ToricError};
pub use fan::{validate_fan, walls, Fan, FanValidation, Wall};
pub use nl::{nl_bounds, BoundReport, HilbDim};
