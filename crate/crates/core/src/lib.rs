//! Exact symbolic computation on the distinguished atlas of partial flag
//! varieties `Fl(d_1,…,d_r; n)` over ℚ.
//!
//! The modules build on each other in order: index combinatorics
//! ([`flagcomb`]), exact polynomials and the master ring ([`exactring`]),
//! chart matrices and transitions ([`flagmatrix`]), the free algebra layer
//! ([`freealg`]) and chain-indexed generator systems ([`softscheme`]).

pub mod error;
pub mod exactring;
pub mod flagcomb;
pub mod flagmatrix;
pub mod freealg;
pub mod par;
pub mod serial;
pub mod softscheme;
pub mod verify;

pub use error::{Error, Result};
