//! External-memory solvers for the maximizing range sum problem (MaxRS) and
//! its circular variant (MaxCRS).
//!
//! The exact solver follows the distribution-sweep pattern: objects become
//! congruent open rectangles, the plane is recursively divided into vertical
//! slabs until a sub-problem fits in memory, leaves are solved by an
//! in-memory plane sweep, and per-slab solutions (slab-files of max-interval
//! tuples) are merged bottom-up while spanning pieces are folded in through
//! per-slab running sums. The circular variant reduces disks to their
//! bounding squares, solves exactly, and picks the best of the region center
//! and four shifted candidates, which is never worse than a quarter of the
//! true optimum.
//!
//! Everything runs against [`emstore`], a simulated external memory that
//! counts whole-block transfers and meters resident records, so the I/O cost
//! of a run is an observable rather than an estimate. Brute-force oracles in
//! [`oracle`] provide ground truth for desk-scale instances.

pub mod approx;
pub mod dataset;
pub mod emstore;
mod error;
pub mod exact;
pub mod geometry;
pub mod oracle;

pub use error::{Error, Result};
