//! Event-based story generation toolkit.
//!
//! Stories arrive as dependency-parsed sentences ([`corpus`]). They are
//! reduced to event tuples ([`eventify`]), optionally simplified first
//! ([`splitprune`]) and generalized with WordNet and VerbNet ([`lexicon`]).
//! Count-based sequence models ([`seqmodel`]) learn event-to-event and
//! event-to-sentence mappings over the datasets built by [`dataset`], and
//! [`eval`] scores them.

mod binfmt;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod eventify;
pub mod genre;
pub mod lexicon;
pub mod pipeline;
pub mod sentgen;
pub mod seqmodel;
pub mod splitprune;
pub mod synth;

pub use error::{Error, Result};
