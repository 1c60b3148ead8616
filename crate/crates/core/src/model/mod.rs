//! Layered finite-horizon CMDP with polytopal transition modulation.

mod instance;
mod policy;
mod polytope;
mod reward;
mod space;

pub use instance::{validate, CmdpInstance, QualityConstraint, ValidationReport, Violation};
pub use policy::{Mixture, Policy};
pub use polytope::{box_polytope, ActionPolytope, PolytopeForm};
pub use reward::{Curvature, RewardSpec};
pub use space::{LayeredStateSpace, StateId};
