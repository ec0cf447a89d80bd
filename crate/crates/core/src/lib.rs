//! Finitely presented ordered Bratteli diagrams: Vershik dynamics, ordered
//! premorphisms and their induced maps, a counterexample builder for factoring,
//! and the translation to S-adic morphisms and block codes.

pub mod diagram;
pub mod dot;
pub mod constructor;
pub mod dynamics;
pub mod edgeset;
pub mod error;
pub mod exec;
pub mod factoring;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod path;
pub mod premorphism;
pub mod report;
pub mod sadic;
pub mod tower;

pub use error::{Error, Result};
