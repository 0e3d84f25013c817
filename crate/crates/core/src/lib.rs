//! Caching and delivery arrays for multi-antenna multi-access coded caching
//! on cyclic wrap-around networks.
//!
//! A network has `K` users and `K` caches; user `k` reads the `r` consecutive
//! caches `k, k+1, ..., k+r-1` (indices wrap modulo `K`), and the server has
//! `L` transmit antennas. A scheme is described by a pair of arrays:
//!
//! * a [`CachingArray`] (`F x K`, stars and nulls) fixing which subfile rows
//!   each cache stores, and
//! * a [`DeliveryArray`] (`F x K`, stars and integers) whose stars are the
//!   subfiles a user can read and whose integers group the remaining
//!   (user, subfile) pairs into zero-forcing transmissions.
//!
//! The crate provides the four constructions ([`construct`]), exhaustive
//! condition checkers ([`verify`]), a schedule/decode simulator
//! ([`delivery`]), closed-form comparison tables ([`compare`]) and a text
//! interchange format ([`format`]).
//!
//! All indices exposed by the public API are 1-based.

pub mod array;
pub mod compare;
pub mod construct;
pub mod cyclic;
pub mod delivery;
mod error;
pub mod format;
pub mod params;
pub mod rational;
pub mod verify;
mod violation;

pub use array::{CachingArray, DeliveryArray, Entry, Epda};
pub use cyclic::{binomial, cyclic_interval, cyclic_mod, gcd};
pub use error::{Error, Result};
pub use params::{DemandVector, NetworkParams};
pub use rational::Rational;
pub use verify::SchemeMetrics;
pub use violation::{Condition, Location, Violation};
