//! Finite-scale verification toolkit for outer actions of finite groupoids.
//!
//! The crate covers exact cocycle algebra on finite groupoids, random walks
//! and their Markov operators, the level-`n` matrix model actions with
//! their states and conditional expectations, characteristic cocycles over
//! finite coefficient bundles, and the quotient-group translation layer
//! relating characteristic data to the modular obstruction.

pub mod cochain;
pub mod corpus;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod invariants;
pub mod io;
pub mod model;
pub mod phase;
pub mod quotient;
pub mod report;
pub mod rng;
pub mod smith;
pub mod suites;
pub mod walk;

pub use cochain::{check_cocycle3, coboundary, inflate, Cochain, CocycleVerdict};
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupAction, GroupHom};
pub use groupoid::{ElementId, Groupoid, GroupoidHom, SectionRule, SemidirectPresentation, Violation};
pub use phase::Phase;
