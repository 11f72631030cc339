//! Certified weighted-sum-of-squares lower bounds in exact rational
//! arithmetic.
//!
//! The dual-certificate pipeline: build the Λ operator of a WSOS cone
//! ([`polybasis`]), evaluate the log-det barrier ([`barrier`]), run the
//! rounding Newton iteration ([`solver`]), and check or unpack the resulting
//! certificate ([`certify`]). [`bounds`] evaluates the a-priori bit-size
//! bounds for the standard bases.

pub mod barrier;
pub mod bounds;
pub mod certify;
pub mod error;
pub mod exactarith;
pub mod io;
pub mod polybasis;
pub mod solver;

pub use error::{Error, Result};
pub use exactarith::{Rational, RationalInterval};
