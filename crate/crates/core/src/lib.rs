//! Executable asymptotics for the sequences `M_p = p^(tau p^sigma)`:
//! the extended associated function and its Lambert-W sandwich bounds,
//! Paley-Wiener style decay envelopes with an exactly transformable test
//! bump, and a directional decay classifier for localized 1-D signals.

pub mod associated;
pub mod error;
pub mod lambert;
pub mod microlocal;
pub mod paleywiener;
pub mod sequence;

pub use error::{Error, Result};
