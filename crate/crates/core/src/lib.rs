//! Exact p-local algebra for the Brown-Peterson Hopf algebroid and its
//! unstable cobar complex.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod groups;
pub mod cobar;
pub mod hopf;
pub mod lattice;
pub mod plocal;
pub mod solver;
pub mod tensor;
pub mod verify;

pub use error::Error;
