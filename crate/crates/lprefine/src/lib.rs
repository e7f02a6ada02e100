//! A refinement toolkit for wide-spectrum logic programs.
//!
//! The toolkit computes execution semantics over finite universes, checks and
//! replays stepwise refinement derivations against a machine-checked law
//! catalogue, exhaustively verifies the laws themselves at small scale, and
//! compiles the executable fragment to Prolog.
//!
//! The semantic object is the [`exec::Execution`]: a partial function from
//! states to states, where a state is a set of bindings and a binding maps
//! every variable to a value.  Healthiness properties guarantee that an
//! execution is fully determined by its action on singleton states, so the
//! canonical representation is a per-binding three-way status
//! (undefined / fail / succeed).

pub mod cli;
pub mod derivation;
pub mod emit;
pub mod exec;
pub mod laws;
pub mod semantics;
pub mod syntax;
pub mod universe;

// The guide chapters double as doc-tests so the book stays in sync with the
// library.  `cargo test` picks these up through rustdoc.
#[doc = include_str!("../../../book/src/language.md")]
mod _book_language {}
#[doc = include_str!("../../../book/src/semantics.md")]
mod _book_semantics {}
#[doc = include_str!("../../../book/src/refinement.md")]
mod _book_refinement {}
#[doc = include_str!("../../../book/src/recursion.md")]
mod _book_recursion {}
#[doc = include_str!("../../../book/src/laws.md")]
mod _book_laws {}
#[doc = include_str!("../../../book/src/derivations.md")]
mod _book_derivations {}
#[doc = include_str!("../../../book/src/emission.md")]
mod _book_emission {}
