pub mod algebra;
pub mod apply;
pub mod bimodule;
pub mod builtins;
pub mod bundle;
pub mod calculus;
pub mod centre;
pub mod connection;
pub mod crossing;
pub mod diffop;
pub mod error;
pub mod faults;
pub mod fgp;
pub mod geometry;
pub mod hopf;
pub mod linalg;
pub mod scalar;
pub mod sobolev;
pub mod tensor;
pub mod verify;

pub use algebra::{Algebra, State};
pub use bimodule::{AtomId, Bimodule};
pub use error::{Error, Result};
pub use linalg::{Mat, Vector};
pub use scalar::{Field, Rat, Scalar};
pub use tensor::Spaces;
pub use bundle::Bundle;
pub use centre::{centre_verify, CentreCandidate, CentreReport};
pub use connection::ConnectionModule;
pub use crossing::ThetaDegree;
pub use diffop::GradedOperator;
pub use geometry::Geometry;
pub use sobolev::{InnerProduct, SobolevGram};
pub use verify::{verify_all, Report};
