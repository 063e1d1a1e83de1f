//! Decomposition of LTL specifications into independent blocks of system
//! variables.
//!
//! A specification splits its atoms into environment inputs and system
//! outputs. [`decompose::partition`] groups the system outputs into blocks
//! such that each block can be handled as a separate sub-specification: every
//! block is independent of the rest, and no nonempty proper subset of a block
//! is. Independence is decided by LTL satisfiability queries answered by an
//! [`engine::Oracle`].
//!
//! ```
//! use ltl_decompose::{decompose, engine::Engine, syntax::parse_spec};
//!
//! let spec = parse_spec("env: p\nsys: a b\nformula: F (p -> X (a & b)) & G !b").unwrap();
//! let result = decompose::partition(&spec, &Engine::default(), decompose::VarOrder::Declaration).unwrap();
//! assert_eq!(result.canonical_blocks(&spec.signature), vec![vec!["a"], vec!["b"]]);
//! ```

pub mod brute;
pub mod decompose;
pub mod engine;
pub mod syntax;
pub mod trace;

pub use decompose::{partition, verify_partition, PartitionResult, VarOrder};
pub use engine::{ltl_sat, Engine, Oracle, SatResult};
pub use syntax::{parse_formula, parse_spec, Formula, Signature, Spec};
pub use trace::{eval, LassoTrace};
