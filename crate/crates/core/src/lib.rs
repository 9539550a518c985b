//! Affine tensor ("torsor") mechanics.
//!
//! Frame changes of the Galilei group and their action on points, affine
//! forms and torsors; Galilean connections and the covariant divergence of
//! torsor fields; balance residuals for media of dimension 0 to 3;
//! dimensional reduction of 3D stress-mass fields to rods and shells; and a
//! small scenario runner on top.

pub mod affine;
pub mod algebra;
pub mod balance;
pub mod cli;
pub mod connection;
pub mod diff;
pub mod error;
pub mod fields;
pub mod format;
pub mod manufactured;
pub mod media;
pub mod reduction;
pub mod scenario;
pub mod simulate;

pub use error::{Error, Result};
