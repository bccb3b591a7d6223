//! Limit-cycle based general formation control for planar double-integrator agents.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the pure numerical parts:
//! planar geometry, the formation model and ring topology, the distributed
//! controller, a fixed-step closed-loop simulator, the spectral analysis of the
//! angular-spacing subsystem, and the equilibrium/stability toolkit. File formats,
//! plotting and the command line live in the `encircle` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod controller;
mod error;
pub mod formation;
pub mod geometry;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod poly;
pub mod sim;
pub mod spectral;
pub mod stability;
pub mod target;

pub use error::{Error, Result};
pub use geometry::{Angle, Vec2};
