//! Deterministic user equilibrium on a two-link network where one link is an
//! electric road system (ERS).
//!
//! Two vehicle classes share the network: DWPT-EVs, which charge while driving
//! on the ERS link, and all other vehicles. DWPT-EVs value charging through a
//! state-of-charge dependent term and may pay a fixed toll to use the ERS link.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, sweeps and the
//! command line live in the `ers-cli` crate.
//!
//! ```
//! use ers_core::{analysis, equilibrium, model::*};
//!
//! let link = |ers| LinkParams::new(10.0, 500.0, 0.15, 4.0, ers).unwrap();
//! let network = Network::new(link(Some(30.0)), link(None)).unwrap();
//! let scenario = Scenario::new(
//!     1000.0,
//!     0.2,
//!     SocDistribution::uniform(0.1, 0.9, 200.0).unwrap(),
//!     Preferences::new(50.0, 100.0).unwrap(),
//!     TollSystem::fixed(100.0).unwrap(),
//!     network,
//! )
//! .unwrap();
//!
//! let (eq, _regime) = equilibrium::solve(&scenario).unwrap();
//! assert!((eq.x1_d - 100.0).abs() < 1e-6);
//! let pattern = analysis::classify(&scenario, &eq).unwrap();
//! assert_eq!(pattern, analysis::PatternLabel::BiC);
//! ```

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod model;
mod numeric;

pub use error::{Error, Result};
