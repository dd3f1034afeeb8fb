use super::alphabet::{Alphabet, SpecError};
use super::formula::Formula;
use super::parser::{parse_formula, ParseError};

/// A synthesis problem: a formula over a partitioned alphabet. The
/// environment controls the input variables, the agent the outputs, and the
/// agent moves first each round (Moore semantics).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisSpec {
    pub alphabet: Alphabet,
    pub formula: Formula,
}

impl SynthesisSpec {
    /// Validates that every proposition of `formula` belongs to the
    /// alphabet (indices are dense, so a range check suffices).
    pub fn new(alphabet: Alphabet, formula: Formula) -> Result<SynthesisSpec, SpecError> {
        if let Some(&idx) = formula.props().iter().find(|&&i| i >= alphabet.len()) {
            return Err(SpecError::UnknownProposition(format!("#{idx}")));
        }
        Ok(SynthesisSpec { alphabet, formula })
    }

    /// Parses formula text against a partition, rejecting propositions that
    /// are not declared in it.
    pub fn parse(
        formula_text: &str,
        partition_text: &str,
    ) -> Result<SynthesisSpec, SpecParseError> {
        let mut alphabet = Alphabet::parse_partition(partition_text)?;
        let declared = alphabet.len();
        let formula = parse_formula(formula_text, &mut alphabet)?;
        if alphabet.len() > declared {
            let extra: Vec<&str> = (declared..alphabet.len())
                .map(|i| alphabet.name(i))
                .collect();
            return Err(SpecError::UnknownProposition(extra.join(", ")).into());
        }
        Ok(SynthesisSpec { alphabet, formula })
    }

    /// New spec over the same alphabet, for per-conjunct sub-problems.
    pub fn with_formula(&self, formula: Formula) -> SynthesisSpec {
        SynthesisSpec {
            alphabet: self.alphabet.clone(),
            formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecParseError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
