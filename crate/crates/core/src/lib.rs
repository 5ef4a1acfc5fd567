//! Unique Games and weighted CSPs over F_2^m: instances and exact solvers,
//! gap constructions, bijective pebble games on label-lifted instances, and
//! low-rank SDP relaxations (MaxCut / Goemans–Williamson and LC).

pub mod constructions;
pub mod error;
pub mod game;
pub mod gf2;
pub mod instances;
pub mod sdp;

pub use error::{Error, Result, Side};
pub use game::{AssertLevel, GStarMap, LiftedVertex, Transcript};
pub use gf2::{Gf2Subspace, Gf2Vector};
pub use instances::{
    Assignment, Evaluation, ExactRatio, GroupUgInstance, PermUgInstance, WeightedCspInstance,
};
pub use sdp::{SdpInstance, SdpSolution, SolverOptions};
