//! Horizontal isogeny graphs as Cayley graphs of class groups: exact class
//! groups of quadratic orders, character-theoretic spectra, random-walk
//! mixing, two-step path finding, and a genus-1 instantiation on ordinary
//! elliptic curves over small prime fields.

pub mod abelian;
pub mod arith;
pub mod cayley;
pub mod ecgraph;
pub mod error;
pub mod pathfind;
pub mod quadform;
pub mod walks;

pub use error::{Category, Error, Result};
