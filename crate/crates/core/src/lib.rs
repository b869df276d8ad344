//! Resolution semiring: flows, wirings, stack nilpotency and the machines
//! and queries built on top of them.

pub mod error;
pub mod machines;
pub mod parse;
pub mod queries;
pub mod semiring;
pub mod stack;
pub mod symbol;
pub mod term;

pub use error::{Error, Result};
pub use semiring::{flow_product, is_balanced, naive_nilpotency, tensor, wiring_product, Flow, NaiveVerdict, Wiring};
pub use symbol::{Signature, Sym};
pub use term::{unify, Substitution, Term, Var};
pub use stack::{saturate, split, stack_nilpotent, StackOp, StackWiring};
pub use queries::{derivation_oracle, encode_cvp, eval_circuit, parse_circuit, parse_query, query_succeeds, Circuit, UnaryQuery};
