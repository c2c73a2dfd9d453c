//! Cops and robbers with damage: one cop, `s` robbers, and the number of
//! vertices the robbers manage to damage.
//!
//! - [`graph`]: simple undirected graphs, edge-list I/O, BFS utilities.
//! - [`families`]: stars, paths, cycles, complete graphs and the
//!   hub-and-path graphs with their landmarks.
//! - [`rules`]: the game state machine.
//! - [`solver`]: exact game values and best responses.
//! - [`strategies`]: cop policies and robber-team scripts.
//! - [`arena`]: deterministic matches, transcripts and suites.
//! - [`verify`]: packaged checkable claims.

mod bitset;
pub mod arena;
pub mod families;
pub mod graph;
pub mod rules;
pub mod solver;
pub mod strategies;
pub mod verify;

pub use bitset::VertexSet;
pub use graph::{Graph, Vertex};
