//! A finite-model-theory workbench: relational structures, homomorphisms,
//! cores, Gaifman locality, Ehrenfeucht–Fraïssé and existential games,
//! primitive-positive logic, and the core model structure on neighborhoods.

pub mod canon;
pub mod cores;
pub mod enumerate;
pub mod error;
pub mod gaifman;
pub mod games;
pub mod homotopy;
pub mod homsearch;
pub mod locality;
pub mod logic;
pub mod matching;
pub mod report;
pub mod structures;
pub mod sweep;

pub use error::{Error, Result};
pub use structures::{Morphism, Structure, Vocabulary};
