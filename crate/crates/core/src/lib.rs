//! Energy-aware web rendering toolkit: DOM feature extraction, a
//! dimensionality-reduction pipeline, an FPS regression model, analytic
//! big.LITTLE platform simulation, frequency-setting search, and a
//! governor session simulator.

pub mod corpus;
pub mod dom;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod platform;
pub mod rng;
pub mod sched;
pub mod search;

pub use error::{Error, Result};
