//! Metric geometry of constant-curvature cone surfaces, polyhedral Kähler cones
//! and orbifold line arrangements.

pub mod arrangement;
pub mod certificate;
pub mod cli;
pub mod deformation;
pub mod error;
pub mod model;
pub mod pk_cone;
pub mod report;
pub mod surface;
pub mod svg;
pub mod trig;

pub use certificate::{Certificate, Verdict, Witness};
pub use error::{Error, Result};
pub use model::{ModelKappa, ModelPoint};
pub use trig::TriangleShape;
