//! Temporal α-shapes: every α-shape of every contiguous window `[i, j]` of
//! a time-ordered planar point sequence, computed once as a set of
//! activity cuboids over `(i, j, α)` and answered by box stabbing.
//!
//! ```
//! use tempalpha::{temporal_alpha_shape, BoxTree, TimedPoint};
//!
//! let pts: Vec<TimedPoint> = [(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, 1.0)]
//!     .iter()
//!     .enumerate()
//!     .map(|(k, &(x, y))| TimedPoint::new(k as u32 + 1, x, y))
//!     .collect();
//! let shape = temporal_alpha_shape(&pts).unwrap();
//! let tree = BoxTree::from_cuboids(&shape.cuboids);
//! // window [1, 3] with a huge α gives the hull of the first three points
//! assert_eq!(tree.stab(1, 3, 1e9).len(), 3);
//! ```

pub mod alpha;
pub mod archive;
pub mod dataset;
pub mod delaunay;
pub mod error;
pub mod geometry;
pub mod registry;
pub mod restricted;
pub mod stab;
pub mod temporal;

pub use alpha::{temporal_alpha_shape, Cuboid, TemporalAlphaShape};
pub use archive::Archive;
pub use delaunay::{alpha_edges_of_window, alpha_ranges_of_window, build_delaunay, Tri, Triangulation};
pub use error::{Error, Result};
pub use geometry::{EdgeSide, PointId, TimedPoint};
pub use restricted::count_restricted;
pub use stab::BoxTree;
pub use temporal::{enumerate_all, TriangleRecord};
