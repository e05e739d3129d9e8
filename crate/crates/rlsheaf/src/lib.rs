//! Finite-model engine for residuated lattices and their presheaves,
//! sheaves, and étalé spaces over finite topological spaces.
//!
//! Everything is desk scale and exact: algebras are given by explicit
//! operation tables, spaces by their minimal open neighborhoods, and every
//! checker either certifies a property or produces a concrete witness.
//!
//! The runnable examples are the front door, one per capability:
//!
//! ```text
//! cargo run --example validate_algebra        axiom checking with witnesses
//! cargo run --example filters_and_spectra     filters, classification, spectra
//! cargo run --example quotients_and_morphisms morphisms, quotients, products
//! cargo run --example finite_spaces           spaces, maps, covers, neighborhoods
//! cargo run --example sheaf_conditions        separation / gluing / equalizer
//! cargo run --example stalks_and_germs        colimit stalks and germs
//! cargo run --example etale_spaces            stalk spaces and their sections
//! cargo run --example sheafification          the plus construction and iota
//! cargo run --example theorems                reflection, equivalence, laws
//! cargo run --example file_formats            JSON formats and DOT export
//! ```
//!
//! The same capabilities are scriptable through the thin `rlsheaf` binary
//! (see [`cli`]), which loads JSON files or named fixtures and reports with
//! deterministic text or JSON plus DOT artifacts.

pub mod algebra;
pub mod bitset;
pub mod cli;
pub mod colimit;
pub mod dot;
pub mod etale;
pub mod fixtures;
pub mod functors;
pub mod generate;
pub mod json;
pub mod presheaf;
pub mod report;
pub mod sheafify;
pub mod spectra;
pub mod topology;

pub use report::{Budget, Error, Result, ValidationReport};
