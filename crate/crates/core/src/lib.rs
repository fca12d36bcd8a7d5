//! Evaluators for cloning and superreplication of quantum states and gates.
//!
//! All combinatorial quantities are carried in the log domain ([`numerics::LogReal`]),
//! so closed forms stay finite for copy numbers far beyond `f64` factorial range.
//! Dense simulation ([`gatesim`]) is limited to small qubit counts and serves
//! as an oracle for the closed forms.

pub mod bound;
pub mod cloners;
pub mod dicke;
pub mod error;
pub mod estimation;
pub mod gatesim;
pub mod numerics;
pub mod schur;
pub mod sequential;

pub use bound::Bound;
pub use error::{Error, Result};
pub use numerics::LogReal;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
