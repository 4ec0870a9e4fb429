//! Monochromatic random waves: Gaussian superpositions of solutions of
//! `Δu + u = 0` in dimensions two and three, with tools for their
//! asymptotics, nodal-set topology and the equivalence of the induced
//! Gaussian measures.

pub mod error;
pub mod field;
pub mod harmonics;
pub mod nodal;
pub mod randomwave;
pub mod specfun;
pub mod stability;
pub mod stats;

pub use error::{Error, Result};
