//! Iterating the square root map: orbits, steps to the fixed periodic words,
//! the ψ-phase on periodic words, and the experiments built on them.

mod orbit;
mod periodic;
mod preimages;
mod table;

pub use orbit::*;
pub use periodic::*;
pub use preimages::*;
pub use table::*;
