//! Command-line front end: Tammes runs, balance checks, deformation paths and SVG output.

pub mod commands;
pub mod render;
