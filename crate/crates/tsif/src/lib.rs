//! Database, formats, verifier and command-line front end for `tsif-core`.

pub use tsif_core as core;

pub mod cli;
pub mod db;
pub mod demo;
pub mod dot;
pub mod error;
pub mod json;
pub mod pipeline;
pub mod verify;

pub use db::{Database, InvariantRecord};
pub use error::TsifError;
