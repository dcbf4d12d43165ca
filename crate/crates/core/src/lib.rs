//! Air-to-air CoMP analysis for 3D aerial networks.

pub mod analytics;
pub mod distributions;
pub mod error;
pub mod geometry;
pub mod planner;
pub mod quadrature;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
    #[doc = include_str!("../../../book/src/planner.md")]
    mod planner {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
