pub mod classify;
pub mod clustering;
pub mod config;
pub mod constraints;
pub mod embedding;
pub mod error;
pub mod space;
pub mod eval;
pub mod cli;
pub mod io;
