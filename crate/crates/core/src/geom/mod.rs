//! Exact scalars, piecewise-linear functions and polyline curves.

mod curve;
mod function;
mod monotone;
mod scalar;

pub use curve::{
    curve_intersections, linf_distance_to_polyline, normalize_tail, FloatCurve, Intersection, PLCurve, TailFrame,
};
pub use function::{LevelComponent, PLFunction};
pub use monotone::{
    monotone_decompose, perturb_distinct_extrema, Direction, Extremum, ExtremumKind, MonotoneDecomposition,
    MonotonePiece, Violation,
};
pub use scalar::{Coord, Point, Scalar};
