//! Character-region text detection without the network: ground-truth
//! heatmap generation, weakly supervised character pseudo-labels,
//! score-map post-processing into word boxes and polygons, and IoU-based
//! evaluation.

pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod labelgen;
pub mod postproc;
pub mod scoremap;
pub mod synth;
pub mod weaksup;

pub use error::{Error, Result};
pub use geometry::{PerspectiveMap, Point, QuadBox, TextPolygon};
pub use scoremap::ScoreMap;
