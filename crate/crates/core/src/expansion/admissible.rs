//! Incremental admissibility: the follower automaton of the digit shift.
//!
//! A digit word is a valid greedy expansion exactly when every suffix stays
//! lexicographically below the quasi-greedy envelope of 1. The automaton
//! tracks, for the word read so far, every suffix that currently matches a
//! prefix of the envelope: an entry holds the (wrapped) envelope position the
//! suffix will be compared against next. Reading a digit above any tracked
//! position's symbol proves some suffix exceeds the envelope; reading below
//! retires the entry for good. Entries are kept longest-match first and
//! deduplicated by position, since equal positions constrain the future
//! identically.
//!
//! A prefix that never violates extends to an admissible infinite word (for
//! instance by the zero tail, which can never exceed the envelope). Strict
//! inequality at infinity therefore only matters for infinite words, which
//! are checked against the envelope by direct comparison instead.

use smallvec::SmallVec;

use crate::words::{Digit, PeriodicWord};

/// Live suffix-match positions, longest raw match first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiveSet(SmallVec<[u16; 8]>);

impl LiveSet {
    pub fn positions(&self) -> &[u16] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The envelope unrolled to its preperiod plus one period; positions advance
/// with wraparound from the end back to the cycle start.
#[derive(Debug, Clone)]
pub struct FollowerAutomaton {
    symbols: Vec<Digit>,
    preperiod: usize,
}

impl FollowerAutomaton {
    pub fn new(envelope: &PeriodicWord) -> Self {
        let m = envelope.preperiod_len();
        let n = envelope.period_len();
        FollowerAutomaton {
            symbols: (0..m + n).map(|i| envelope.digit(i)).collect(),
            preperiod: m,
        }
    }

    /// Number of distinct follower states (= envelope positions).
    pub fn state_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Digit] {
        &self.symbols
    }

    fn wrap(&self, p: usize) -> u16 {
        if p == self.symbols.len() {
            self.preperiod as u16
        } else {
            p as u16
        }
    }

    pub fn start(&self) -> LiveSet {
        LiveSet::default()
    }

    /// Advance by one digit; `None` means the word has left the admissible
    /// language (some suffix exceeded the envelope).
    pub fn feed(&self, live: &LiveSet, a: Digit) -> Option<LiveSet> {
        let mut out: SmallVec<[u16; 8]> = SmallVec::new();
        let mut push = |np: u16| {
            if !out.contains(&np) {
                out.push(np);
            }
        };
        for &p in &live.0 {
            let s = self.symbols[p as usize];
            if a > s {
                return None;
            }
            if a == s {
                push(self.wrap(p as usize + 1));
            }
        }
        // a fresh suffix starts at the digit just read
        let s0 = self.symbols[0];
        if a > s0 {
            return None;
        }
        if a == s0 {
            push(self.wrap(1));
        }
        Some(LiveSet(out))
    }

    /// Follower state of the word read so far: the envelope position of its
    /// longest live suffix, or 0 when no suffix is live. (Position 0 also
    /// appears when a whole period has just been matched; the futures allowed
    /// from both situations coincide, so the identification is sound.)
    pub fn class(&self, live: &LiveSet) -> usize {
        live.0.first().map_or(0, |&p| p as usize)
    }

    /// Convenience: feed a whole finite word from the start state.
    pub fn accepts_prefix(&self, word: &[Digit]) -> bool {
        let mut live = self.start();
        for &a in word {
            match self.feed(&live, a) {
                Some(next) => live = next,
                None => return false,
            }
        }
        true
    }
}
