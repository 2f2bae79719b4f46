//! Certified construction of triangulated hyperbolic-paraboloid foldings.
//!
//! The folded state is built from the central square outward: every ring
//! corner is the intersection of three spheres centred at already-placed
//! vertices, computed in outward-rounded decimal interval arithmetic. If no
//! square root of a partially negative interval is ever attempted, an exact
//! folding with the computed combinatorics exists inside the intervals.
//!
//! Modules, bottom-up:
//! - [`ivalnum`]: decimal big numbers and intervals.
//! - [`geom3`]: interval vectors, trilateration, orientation predicates.
//! - [`pattern`]: the triangulated crease pattern and its mountain-valley signs.
//! - [`foldctor`]: the inside-out construction with precision escalation.
//! - [`embedcheck`]: self-intersection certification and obstruction lemmas.
//! - [`analysis`]: cross-sections, parabolic fits, frontier and precision studies.
//! - [`export`]: text documents, OBJ meshes, CSV and SVG output.

pub mod analysis;
pub mod embedcheck;
pub mod export;
pub mod foldctor;
pub mod geom3;
pub mod ivalnum;
pub mod pattern;

pub use foldctor::{construct, construct_auto, ConstructError, FoldState};
pub use ivalnum::{BigNum, Interval, SignVerdict};
pub use pattern::{CornerId, CreasePattern, TriangulationKind};

/// Library version embedded in every output document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
