//! Scenario files, sweeps and the `ers` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod harness;
