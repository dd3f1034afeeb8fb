//! On-the-fly DFA construction by formula progression.
//!
//! A state is a pair of the residual obligation (a canonical NNF formula
//! for the remaining suffix) and an acceptance bit. The bit records whether
//! the letter just consumed completed an accepted trace: a residual alone
//! cannot express that, because the residual left behind by a strong next
//! must reject at the end of the trace while the same residual from a weak
//! next must accept. The construction is lazy; [`expand_full`] materializes
//! it breadth-first into an explicit automaton.

use std::collections::{BTreeSet, HashMap};

use crate::dfa::ExplicitDfa;
use crate::ltlf::{xnf, Alphabet, Formula, FormulaKind, Letter};
use crate::{Limits, SolveError};

/// One lazily-generated DFA state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OtfState {
    pub residual: Formula,
    pub accepting: bool,
}

/// The initial state carries the whole formula and a false bit: traces are
/// non-empty, so no play is accepted before the first move.
pub fn initial_state(phi: Formula) -> OtfState {
    OtfState {
        residual: phi,
        accepting: false,
    }
}

pub fn is_accepting(s: &OtfState) -> bool {
    s.accepting
}

/// Successor computation with per-instance memoization. Game solvers
/// revisit transitions heavily during search, so both the next-normal-form
/// rewrite and the (residual, letter) step are cached. Instances are owned
/// by one solver and not shared across threads.
#[derive(Default)]
pub struct Progression {
    xnf_cache: HashMap<Formula, Formula>,
    succ_cache: HashMap<(Formula, Letter), OtfState>,
}

impl Progression {
    pub fn new() -> Progression {
        Progression::default()
    }

    /// Deterministic, total transition function. The residual is expanded
    /// to next normal form, literals are substituted under `sigma` with
    /// constant folding, and the remaining combination of next-atoms is
    /// read off twice: once with both nexts collapsed (the new residual)
    /// and once with strong next as false and weak next as true (the bit).
    pub fn successor(&mut self, s: &OtfState, sigma: Letter) -> OtfState {
        let key = (s.residual, sigma);
        if let Some(&cached) = self.succ_cache.get(&key) {
            return cached;
        }
        let expanded = *self
            .xnf_cache
            .entry(s.residual)
            .or_insert_with(|| xnf(s.residual));
        let (obligations, accepting) = step(expanded, sigma);
        let next = OtfState {
            residual: obligations_to_formula(obligations),
            accepting,
        };
        self.succ_cache.insert(key, next);
        next
    }
}

/// A positive Boolean combination of next-step obligations, kept as a
/// disjunction of obligation sets. Residuals are monotone in their
/// obligations, so the subsumption-minimal set of sets is a canonical form
/// of the combination: without it, syntactically distinct but equivalent
/// residuals would proliferate and the state space would never close.
type Obligations = Vec<BTreeSet<Formula>>;

fn cross(a: Obligations, b: &Obligations) -> Obligations {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for s in &a {
        for t in b {
            let mut u = s.clone();
            u.extend(t.iter().copied());
            out.push(u);
        }
    }
    minimize_terms(out)
}

/// Keeps only the minimal obligation sets (the antichain).
fn minimize_terms(mut terms: Obligations) -> Obligations {
    terms.sort_by_key(BTreeSet::len);
    let mut kept: Obligations = Vec::new();
    for t in terms {
        if !kept.iter().any(|k| k.is_subset(&t)) {
            kept.push(t);
        }
    }
    kept
}

/// Walks a next-normal-form formula under one letter, producing the
/// disjunctive obligations for the rest of the trace and the acceptance
/// bit in a single pass.
fn step(f: Formula, sigma: Letter) -> (Obligations, bool) {
    match f.kind() {
        FormulaKind::True => (vec![BTreeSet::new()], true),
        FormulaKind::False => (Vec::new(), false),
        FormulaKind::Prop(p) => {
            if sigma.contains(p) {
                (vec![BTreeSet::new()], true)
            } else {
                (Vec::new(), false)
            }
        }
        FormulaKind::NotProp(p) => {
            if sigma.contains(p) {
                (Vec::new(), false)
            } else {
                (vec![BTreeSet::new()], true)
            }
        }
        FormulaKind::Next(c) => (vec![BTreeSet::from([c])], false),
        FormulaKind::WeakNext(c) => (vec![BTreeSet::from([c])], true),
        FormulaKind::And(cs) => {
            let mut dnf = vec![BTreeSet::new()];
            let mut bit = true;
            for c in cs {
                let (d, b) = step(c, sigma);
                bit &= b;
                dnf = cross(dnf, &d);
            }
            (dnf, bit)
        }
        FormulaKind::Or(cs) => {
            let mut dnf = Vec::new();
            let mut bit = false;
            for c in cs {
                let (mut d, b) = step(c, sigma);
                bit |= b;
                dnf.append(&mut d);
            }
            (minimize_terms(dnf), bit)
        }
        FormulaKind::Until(_, _) | FormulaKind::Release(_, _) => {
            unreachable!("xnf leaves no bare temporal operators at the Boolean level")
        }
    }
}

fn obligations_to_formula(dnf: Obligations) -> Formula {
    Formula::or(dnf.into_iter().map(Formula::and))
}

/// Materializes the full DFA of `phi` over `alphabet` by BFS, letters
/// enumerated by ascending bitmask, states numbered in discovery order.
/// Accepted traces are exactly the models of `phi`.
pub fn expand_full(
    phi: Formula,
    alphabet: &Alphabet,
    limits: &Limits,
) -> Result<ExplicitDfa, SolveError> {
    if alphabet.len() > limits.max_props {
        return Err(SolveError::PropLimit {
            count: alphabet.len(),
            limit: limits.max_props,
        });
    }
    let n_letters = alphabet.num_letters();
    let mut prog = Progression::new();
    let init = initial_state(phi);

    let mut index: HashMap<OtfState, usize> = HashMap::new();
    let mut states = vec![init];
    index.insert(init, 0);
    let mut trans: Vec<usize> = Vec::new();

    let mut at = 0usize;
    while at < states.len() {
        let s = states[at];
        for letter in alphabet.letters() {
            let succ = prog.successor(&s, letter);
            let target = *index.entry(succ).or_insert_with(|| {
                states.push(succ);
                states.len() - 1
            });
            if states.len() > limits.max_states {
                return Err(SolveError::StateLimit {
                    limit: limits.max_states,
                });
            }
            trans.push(target);
        }
        at += 1;
    }

    debug_assert_eq!(trans.len(), states.len() * n_letters);
    let accepting = states.iter().map(|s| s.accepting).collect();
    let labels = states
        .iter()
        .map(|s| s.residual.display(alphabet).to_string())
        .collect();
    Ok(ExplicitDfa::from_parts(
        alphabet.clone(),
        0,
        trans,
        accepting,
        Some(labels),
    ))
}
