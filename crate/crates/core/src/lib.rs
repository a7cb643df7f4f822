//! Exact simulation of permutationally invariant open quantum dynamics of
//! `N` qudits in the commutant of the symmetric group.

pub mod cgc;
pub mod commutant;
pub mod error;
pub mod evolve;
pub mod io;
pub mod liouvillian;
pub mod model;
pub mod oracle;
pub mod pparticle;
pub mod qubit;
pub mod scaling;
pub mod schedule;
pub mod sparse;
pub mod tableaux;
pub mod threenu;

pub use error::{Error, Result};
