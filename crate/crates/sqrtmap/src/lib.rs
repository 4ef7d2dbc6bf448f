//! The square root map on optimal squareful words.
//!
//! Words over `{0, 1}` whose every prefix factors into the six minimal squares
//! of a parameter pair `(a, b)` admit a square root: replace each square by its
//! root. This crate implements that map on finite and infinite words, the
//! Sturmian and rotation machinery it acts on, and the subshift built from the
//! reversed standard word and its first-two-letters swap.

pub mod automaton;
pub mod dynamics;
pub mod equation;
pub mod error;
pub mod lazy;
pub mod omega;
pub mod squares;
pub mod sturmian;
pub mod words;

pub use error::{Error, Result};
pub use lazy::{BlockSeq, InfiniteWord, SLProduct};
pub use omega::{BlockCorpus, Omega, OmegaParams, ProductType, Seed, SqrtStep};
pub use squares::SquareAlphabet;
pub use sturmian::{ContinuedFraction, EndpointConvention, RotationSystem};
pub use words::{Alphabet, Block, Word};
