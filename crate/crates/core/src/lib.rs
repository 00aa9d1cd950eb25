//! Exact solvers for partitioning a plane curve into points whose x- and
//! y-increments agree up to a rearrangement.
#![no_std]

extern crate alloc;

pub mod climb;
pub mod error;
pub mod explore;
pub mod geom;
pub mod graph_case;
pub mod pipeline;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use geom::{PLCurve, PLFunction, Point, Scalar};
