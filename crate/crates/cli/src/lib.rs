//! Command-line front end for design by morphing.

pub mod commands;
pub mod config;
