use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::trace::Letter;

/// A named proposition together with its dense index in an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition {
    pub name: String,
    pub index: usize,
}

/// Errors in specification setup: variable partitions and name registration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("duplicate proposition '{0}'")]
    DuplicateProposition(String),
    #[error("invalid proposition name '{0}'")]
    InvalidName(String),
    #[error("partition file is missing the '{0}' line")]
    MissingSection(&'static str),
    #[error("unknown proposition '{0}'")]
    UnknownProposition(String),
}

/// The ordered proposition universe of a specification.
///
/// Indices are dense (`0..len`), with environment-controlled inputs first
/// and agent-controlled outputs after them, so a [`Letter`] packs the X
/// assignment into the low bits and the Y assignment into the high bits.
#[derive(Debug, Clone)]
pub struct Alphabet {
    props: Vec<String>,
    index: HashMap<String, usize>,
    num_inputs: usize,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.props == other.props && self.num_inputs == other.num_inputs
    }
}

impl Eq for Alphabet {}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    /// Builds a partitioned alphabet from input and output variable names.
    pub fn new<S: AsRef<str>>(inputs: &[S], outputs: &[S]) -> Result<Alphabet, SpecError> {
        let mut alphabet = Alphabet {
            props: Vec::new(),
            index: HashMap::new(),
            num_inputs: inputs.len(),
        };
        for name in inputs.iter().chain(outputs.iter()) {
            alphabet.insert(name.as_ref())?;
        }
        Ok(alphabet)
    }

    /// An unpartitioned alphabet (every proposition counts as an output);
    /// convenient for pure language-level work.
    pub fn from_props<S: AsRef<str>>(props: &[S]) -> Result<Alphabet, SpecError> {
        Alphabet::new::<S>(&[], props)
    }

    /// Empty alphabet that grows through [`Alphabet::register`].
    pub fn empty() -> Alphabet {
        Alphabet {
            props: Vec::new(),
            index: HashMap::new(),
            num_inputs: 0,
        }
    }

    fn insert(&mut self, name: &str) -> Result<usize, SpecError> {
        if !valid_name(name) {
            return Err(SpecError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SpecError::DuplicateProposition(name.to_string()));
        }
        let idx = self.props.len();
        self.props.push(name.to_string());
        self.index.insert(name.to_string(), idx);
        Ok(idx)
    }

    /// Returns the index of `name`, registering it at the end of the
    /// proposition list if it is new.
    pub fn register(&mut self, name: &str) -> Result<usize, SpecError> {
        if let Some(&idx) = self.index.get(name) {
            return Ok(idx);
        }
        self.insert(name)
    }

    /// Parses the two-line `.part` convention:
    /// `.inputs: a b` and `.outputs: c d` (colon optional).
    pub fn parse_partition(text: &str) -> Result<Alphabet, SpecError> {
        let mut inputs: Option<Vec<String>> = None;
        let mut outputs: Option<Vec<String>> = None;
        for line in text.lines() {
            let line = line.trim();
            for (tag, slot) in [(".inputs", &mut inputs), (".outputs", &mut outputs)] {
                if let Some(rest) = line.strip_prefix(tag) {
                    let rest = rest.strip_prefix(':').unwrap_or(rest);
                    *slot = Some(rest.split_whitespace().map(str::to_string).collect());
                }
            }
        }
        let inputs = inputs.ok_or(SpecError::MissingSection(".inputs"))?;
        let outputs = outputs.ok_or(SpecError::MissingSection(".outputs"))?;
        Alphabet::new(&inputs, &outputs)
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.props.len() - self.num_inputs
    }

    pub fn name(&self, index: usize) -> &str {
        &self.props[index]
    }

    pub fn props(&self) -> impl Iterator<Item = Proposition> + '_ {
        self.props
            .iter()
            .enumerate()
            .map(|(index, name)| Proposition {
                name: name.clone(),
                index,
            })
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn inputs(&self) -> &[String] {
        &self.props[..self.num_inputs]
    }

    pub fn outputs(&self) -> &[String] {
        &self.props[self.num_inputs..]
    }

    /// Number of distinct letters, `2^len`.
    pub fn num_letters(&self) -> usize {
        1usize << self.props.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.num_letters() as u32).map(Letter)
    }

    /// All environment assignments, as letters with only X bits set.
    pub fn x_assignments(&self) -> impl Iterator<Item = Letter> {
        (0..(1u32 << self.num_inputs)).map(Letter)
    }

    /// All agent assignments, as letters with only Y bits set.
    pub fn y_assignments(&self) -> impl Iterator<Item = Letter> {
        let shift = self.num_inputs;
        (0..(1u32 << self.num_outputs())).map(move |v| Letter(v << shift))
    }

    pub fn x_mask(&self) -> Letter {
        Letter((1u32 << self.num_inputs) - 1)
    }

    pub fn y_mask(&self) -> Letter {
        Letter(((1u32 << self.len()) - 1) & !self.x_mask().0)
    }

    /// Renders `letter` as signed literals over a range of propositions,
    /// e.g. `"x !y"`.
    fn fmt_range(&self, letter: Letter, range: std::ops::Range<usize>) -> String {
        let mut parts = Vec::with_capacity(range.len());
        for i in range {
            if letter.contains(i) {
                parts.push(self.props[i].clone());
            } else {
                parts.push(format!("!{}", self.props[i]));
            }
        }
        parts.join(" ")
    }

    /// Signed literals over the whole alphabet.
    pub fn fmt_letter(&self, letter: Letter) -> String {
        self.fmt_range(letter, 0..self.len())
    }

    /// Signed literals over the inputs only.
    pub fn fmt_x(&self, letter: Letter) -> String {
        self.fmt_range(letter, 0..self.num_inputs)
    }

    /// Signed literals over the outputs only.
    pub fn fmt_y(&self, letter: Letter) -> String {
        self.fmt_range(letter, self.num_inputs..self.len())
    }

    /// Parses a whitespace-separated list of proposition names into a
    /// letter; names absent from the list are false. When `inputs_only`
    /// is set, output names are rejected.
    pub fn parse_assignment(&self, line: &str, inputs_only: bool) -> Result<Letter, SpecError> {
        let mut letter = Letter(0);
        for name in line.split_whitespace() {
            match self.prop_index(name) {
                Some(i) if !inputs_only || i < self.num_inputs => letter = letter.with(i),
                _ => return Err(SpecError::UnknownProposition(name.to_string())),
            }
        }
        Ok(letter)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            ".inputs: {}\n.outputs: {}",
            self.inputs().join(" "),
            self.outputs().join(" ")
        )
    }
}
