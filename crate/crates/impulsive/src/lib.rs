//! Impulsive semiflows on compact metric spaces: simulation, separated-set
//! entropy estimation, and the quotient construction that restores
//! continuity.
//!
//! An impulsive system pairs a continuous semiflow with a reset map on a
//! compact impulse set: trajectories follow the flow until they hit the set,
//! jump through the reset map, and continue. The crate provides
//!
//! * exact closed-form flows and metric spaces ([`space`]),
//! * impulsive trajectory evaluation with bisection-located hit times and
//!   sampled verification of the standing hypotheses ([`impulse`]),
//! * admissible time sequences, their merges, and the blackout-window
//!   interval sets that restrict observation times ([`timefns`]),
//! * classical and windowed topological entropy estimation by greedy and
//!   exact separated-set counting ([`entropy`]),
//! * the quotient space that identifies points with their reset images,
//!   its chain pseudometric, and the induced continuous semiflow
//!   ([`quotient`]),
//! * built-in reference systems with analytically known behavior
//!   ([`systems`]).
//!
//! The `impulsive` binary in this workspace drives the same machinery from
//! the command line; the `book/` directory contains a guide whose code
//! snippets compile and run as doc-tests.

pub mod entropy;
pub mod error;
pub mod impulse;
pub mod quotient;
pub mod space;
pub mod systems;
pub mod timefns;

pub use error::{Error, Result};
pub use impulse::{Dynamics, ImpulseMap, ImpulseSet, ImpulsiveOrbit, ImpulsiveSystem};
pub use space::{MetricSpace, Point, Semiflow, SpaceId};

#[cfg(doctest)]
mod book;
