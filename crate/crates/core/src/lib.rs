//! Nash equilibrium solvers for graphical games whose interaction graph is a
//! tree, or can be condensed into one by merging vertices.
//!
//! The crate is organised around the two-pass message-passing scheme on an
//! oriented tree: a downstream pass computes, for every edge, the table of
//! strategy pairs that extend to an equilibrium of the upstream subgame, and
//! an upstream pass reads a concrete equilibrium back out of those tables.
//!
//! - [`game`] holds the game representation, payoff evaluation and regret.
//! - [`approx`] discretizes strategies onto a uniform grid and runs the
//!   passes in polynomial time, yielding ε-Nash equilibria.
//! - [`exact`] represents tables as unions of rectangles with rational
//!   coordinates and returns exact equilibria.
//! - [`select`] augments the approximate tables to optimize social,
//!   welfare, or single-player objectives.
//! - [`transform`] extends the approximate solver to many-action games and
//!   to sparse graphs via vertex merging.
//! - [`oracle`] contains brute-force ground truth used for verification.

pub mod approx;
pub mod error;
pub mod exact;
pub mod game;
pub mod oracle;
pub mod select;
pub mod transform;
pub mod tree;

pub use error::{Result, SolverError};
pub use game::{GraphicalGame, LocalMatrix, MixedProfile, PlayerId};
