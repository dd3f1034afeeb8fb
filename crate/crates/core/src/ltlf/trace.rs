use std::fmt;
use thiserror::Error;

/// One propositional assignment: bit `i` is the truth value of the
/// proposition with index `i` in the governing [`Alphabet`](super::Alphabet).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn contains(self, prop: usize) -> bool {
        self.0 >> prop & 1 == 1
    }

    pub fn with(self, prop: usize) -> Letter {
        Letter(self.0 | 1 << prop)
    }

    /// Position of this letter in a dense transition table.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:b}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("traces must be non-empty")]
pub struct EmptyTraceError;

/// A finite non-empty sequence of letters. Non-emptiness is enforced at
/// construction; every consumer may rely on `len() >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    letters: Vec<Letter>,
}

impl Trace {
    pub fn new(letters: Vec<Letter>) -> Result<Trace, EmptyTraceError> {
        if letters.is_empty() {
            return Err(EmptyTraceError);
        }
        Ok(Trace { letters })
    }

    /// Builds a single-letter trace.
    pub fn single(letter: Letter) -> Trace {
        Trace {
            letters: vec![letter],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
    }
}

/// Calls `f` on every trace of length `1..=max_len` over `num_props`
/// propositions, in order of increasing length, letters enumerated by
/// ascending bitmask. The exhaustive bounded-language oracle behind most
/// automata tests.
pub fn for_each_trace(num_props: usize, max_len: usize, mut f: impl FnMut(&Trace)) {
    let n_letters = 1u32 << num_props;
    let mut letters: Vec<Letter> = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        letters.clear();
        letters.resize(len, Letter(0));
        loop {
            let trace = Trace {
                letters: letters.clone(),
            };
            f(&trace);
            // advance odometer
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                letters[pos].0 += 1;
                if letters[pos].0 < n_letters {
                    break;
                }
                letters[pos].0 = 0;
            }
            if letters.iter().all(|l| l.0 == 0) {
                break;
            }
        }
    }
}
