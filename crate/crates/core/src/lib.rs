//! Reactive synthesis for Linear Temporal Logic over finite traces.
//!
//! The pipeline: parse an LTLf formula into a hash-consed negation normal
//! form ([`ltlf`]), build DFAs on the fly by formula progression ([`otf`]),
//! manipulate explicit automata ([`dfa`]), solve adversarial reachability
//! games over them ([`game`]), compose per-conjunct winning regions
//! ([`compose`]), and extract Moore-machine strategies ([`strategy`]).

pub mod compose;
pub mod dfa;
pub mod game;
pub mod gen;
pub mod ltlf;
pub mod otf;
pub mod strategy;

use thiserror::Error;

/// Resource guards for state-space constructions.
///
/// Explicit enumeration is only viable at small alphabet sizes; both caps
/// fail loudly rather than letting a construction run away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of distinct states a construction may discover.
    pub max_states: usize,
    /// Maximum number of propositions in the alphabet.
    pub max_props: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_props: 20,
        }
    }
}

/// Errors raised when a construction hits a resource guard.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("state limit exceeded: more than {limit} states discovered")]
    StateLimit { limit: usize },
    #[error("proposition limit exceeded: alphabet has {count} propositions, limit is {limit}")]
    PropLimit { count: usize, limit: usize },
}
