//! Invariant synthesis for time-series constraints modelled as register automata.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod dfa;
pub mod facet;
pub mod gap;
pub mod hull;
pub mod mining;
pub mod digraph;
pub mod oracle;
pub mod regex;
pub mod solver;
pub mod register;
pub mod symbol;
pub mod synthesis;
pub mod transducer;
