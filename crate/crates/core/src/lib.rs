//! Secure computation over black-box rings.
//!
//! Parties manipulate ring elements only through a [`RingOracle`]: opaque labels plus the
//! commands add, subtract, multiply, sample, one and invert. On top of that sit product-sharing
//! protocols for two parties ([`pdtshr`]), encryption-based variants ([`homenc`]), and an outer
//! protocol for many servers with packed secret sharing ([`packed`], [`outer`]) that evaluates
//! arithmetic [`circuit`]s.

pub mod circuit;
pub mod codes;
pub mod error;
pub mod homenc;
pub mod linalg;
pub mod ot;
pub mod outer;
pub mod packed;
pub mod pdtshr;
pub mod ring;
pub mod runner;

pub use circuit::{eval_plain, eval_shared, Circuit, Inputs, Party};
pub use error::{Abort, Error, Result};
pub use ot::{CommStats, Outcome, PayloadKind, Session, Transcript, View};
pub use outer::{run_outer_protocol, OuterOptions, OuterReport};
pub use packed::PackedParams;
pub use pdtshr::ProductSharing;
pub use ring::{CommCounter, Command, Label, Ring, RingOracle};
