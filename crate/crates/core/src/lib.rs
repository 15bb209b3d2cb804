//! Exact permanents and related sums computed as flows on trellises.
//!
//! A trellis is a leveled DAG whose root-to-toor paths spell out the terms
//! of a sum. Relabeling its edges with matrix entries and running a
//! Viterbi pass over a semiring evaluates that sum. The permanent uses the
//! subset-lattice trellis; matrices with repeated rows, joint order
//! statistics, sparse matrices and the traveling salesman problem use
//! variants of it.

pub mod bounds;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod oracles;
pub mod order_stats;
pub mod repeated;
pub mod scalar;
pub mod semiring;
pub mod sparse;
pub mod trellis;
pub mod tsp;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use semiring::{Field, OpCounter, Semiring, SemiringKind, SemiringSpec, Tropical};
pub use trellis::{FlowResult, Symbol, Trellis, TrellisBuilder, VertexId};
