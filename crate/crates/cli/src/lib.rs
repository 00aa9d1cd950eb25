//! File formats, SVG/CSV reports, batch exploration and the command-line
//! front end for `rearrange-core`.

pub mod batch;
pub mod cli;
pub mod format;
pub mod plot;

pub use cli::run;
