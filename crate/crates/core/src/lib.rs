//! Measure how a Python library's API is used by client programs, annotate
//! it with simplification directives and generate a slimmer wrapper package.

pub mod annotations;
pub mod classify;
pub mod error;
pub mod evolution;
pub mod extract;
pub mod generate;
pub mod json;
pub mod model;
mod pysrc;
pub mod usage;

pub use error::{Error, Result};
pub use json::Document;
