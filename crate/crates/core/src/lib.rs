//! Plane-strain finite elements for cracks in simplified strain gradient
//! elasticity: C¹ Bell triangles, optionally enriched near the crack tip with
//! the r^{3/2} asymptotic field, on a graded quarter model of a centre-cracked
//! square plate.

pub mod assembly;
pub mod asymptotics;
pub mod bell;
pub mod enrichment;
pub mod error;
pub mod material;
pub mod mesh;
pub mod postprocess;
pub mod study;

pub use asymptotics::{AmplitudeFactors, Mode};
pub use error::{Error, Result};
pub use material::{ConstitutiveMatrices, MaterialParams};
pub use mesh::{generate_quarter_mesh, DomainSpec, Mesh};
