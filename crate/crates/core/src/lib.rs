//! Bending-energy regularization and instance post-processing for nuclei
//! segmentation masks.
//!
//! - [`raster`]: grids, connected components, PGM and sf32 codecs.
//! - [`contour`]: outer contour tracing, discrete curvature, bending energy.
//! - [`loss`]: pixel losses composed with the weighted bending term, and a
//!   greedy mask refiner driven by that composite loss.
//! - [`metrics`]: AJI, Dice, and recognition/segmentation/panoptic quality.
//! - [`hover`]: center-of-mass distance maps, Sobel edge energy, markers and
//!   marker-controlled watershed.
//! - [`synth`]: seeded synthetic ellipse scenes.

pub mod contour;
pub mod error;
pub mod hover;
pub mod loss;
pub mod metrics;
pub mod raster;
pub mod synth;

pub use error::{Error, Result};
